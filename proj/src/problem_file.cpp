#include "plqstab/problem_file.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace plqstab {

std::string Diagnostic::to_string() const {
  return "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message;
}

namespace {

std::string join(const std::vector<Diagnostic>& diagnostics) {
  std::string out;
  for (const auto& d : diagnostics) out += (out.empty() ? "" : "\n") + d.to_string();
  return out;
}

struct Token {
  std::string text;
  int column = 0;
};

struct Body {
  int line = 0;
  int column = 0;  // where the body starts
  std::string text;
};

std::vector<Token> tokenize(const std::string& text, int first_column) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i >= text.size()) break;
    const std::size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    tokens.push_back({text.substr(start, i - start), first_column + static_cast<int>(start)});
  }
  return tokens;
}

std::optional<double> parse_number(std::string_view s) {
  if (s == "inf" || s == "+inf" || s == "infinity") return kInf;
  if (s == "-inf" || s == "-infinity") return -kInf;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return value;
}

std::optional<long long> parse_integer(std::string_view s) {
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return value;
}

std::string format_number(double x) {
  if (x == 0.0) return "0";
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.17g", x);
  return buffer;
}

class Parser {
 public:
  std::vector<Diagnostic> diagnostics;

  void error(int line, int column, std::string message) { diagnostics.push_back({line, column, std::move(message)}); }

  // Variables are x<i> (and p<i> when parameters > 0); parameters come first in the joint vector.
  std::optional<Polynomial> polynomial(const Body& body, int n, int parameters) {
    const int dim = n + parameters;
    std::vector<Monomial> terms;
    bool ok = true;
    double sign = 1.0;
    bool open = false;  // current term accepts factors
    for (const Token& t : tokenize(body.text, body.column)) {
      if (t.text == "+" || t.text == "-") {
        sign = t.text == "-" ? -1.0 : 1.0;
        open = false;
        continue;
      }
      if (const auto c = parse_number(t.text)) {
        if (!std::isfinite(*c)) {
          error(body.line, t.column, "coefficient must be finite");
          ok = false;
        }
        terms.push_back({sign * *c, std::vector<int>(dim, 0)});
        sign = 1.0;
        open = true;
        continue;
      }
      const char kind = t.text.empty() ? '\0' : t.text[0];
      if ((kind != 'x' && !(kind == 'p' && parameters > 0)) || !open) {
        error(body.line, t.column, open ? "unexpected token '" + t.text + "'" : "expected a coefficient before '" + t.text + "'");
        ok = false;
        open = false;
        continue;
      }
      const std::string rest = t.text.substr(1);
      const auto caret = rest.find('^');
      const auto index = parse_integer(rest.substr(0, caret));
      std::optional<long long> power = 1;
      if (caret != std::string::npos) power = parse_integer(rest.substr(caret + 1));
      const int limit = kind == 'x' ? n : parameters;
      if (!index || *index < 1 || *index > limit) {
        error(body.line, t.column, "bad variable '" + t.text + "'");
        ok = false;
        continue;
      }
      if (!power || *power < 1 || *power > Polynomial::kMaxDegree) {
        error(body.line, t.column, "bad exponent in '" + t.text + "'");
        ok = false;
        continue;
      }
      const int slot = (kind == 'x' ? parameters : 0) + static_cast<int>(*index) - 1;
      int& e = terms.back().exponents[slot];
      if (e != 0) {
        error(body.line, t.column, "variable '" + t.text.substr(0, caret == std::string::npos ? t.text.size() : caret + 1) +
                                       "' repeated in one monomial");
        ok = false;
        continue;
      }
      e = static_cast<int>(*power);
      if (terms.back().degree() > Polynomial::kMaxDegree) {
        error(body.line, t.column, "monomial degree exceeds " + std::to_string(Polynomial::kMaxDegree));
        ok = false;
      }
    }
    if (terms.empty() && ok) {
      error(body.line, body.column, "empty polynomial (write 0 for the zero polynomial)");
      return std::nullopt;
    }
    if (!ok) return std::nullopt;
    return Polynomial(dim, std::move(terms));
  }

  std::optional<UnivariatePlq> outer(const Body& body) {
    const auto tokens = tokenize(body.text, body.column);
    if (tokens.empty()) {
      error(body.line, body.column, "missing outer function (ineq, eq or plq)");
      return std::nullopt;
    }
    if (tokens.size() == 1 && tokens[0].text == "ineq") return UnivariatePlq::indicator_nonpositive();
    if (tokens.size() == 1 && tokens[0].text == "eq") return UnivariatePlq::indicator_zero();
    if (tokens[0].text != "plq") {
      error(body.line, tokens[0].column, "unknown outer function '" + tokens[0].text + "'");
      return std::nullopt;
    }
    const std::string& s = body.text;
    std::size_t i = s.find("plq") + 3;
    std::vector<PlqPiece> pieces;
    while (true) {
      while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
      if (i >= s.size()) break;
      const int column = body.column + static_cast<int>(i);
      if (s[i] != '(') {
        error(body.line, column, "expected '(' to start a piece");
        return std::nullopt;
      }
      const std::size_t close = s.find(')', i);
      if (close == std::string::npos) {
        error(body.line, column, "unterminated piece");
        return std::nullopt;
      }
      std::vector<double> fields;
      std::stringstream inner(s.substr(i + 1, close - i - 1));
      std::string field;
      while (std::getline(inner, field, ',')) {
        const auto b = field.find_first_not_of(" \t");
        const auto e = field.find_last_not_of(" \t");
        const auto value = b == std::string::npos ? std::nullopt : parse_number(field.substr(b, e - b + 1));
        if (!value) {
          error(body.line, column, "bad number '" + field + "' in piece");
          return std::nullopt;
        }
        fields.push_back(*value);
      }
      if (fields.size() != 5) {
        error(body.line, column, "a piece needs five fields (a,b,q,l,c)");
        return std::nullopt;
      }
      pieces.push_back({fields[0], fields[1], fields[2], fields[3], fields[4]});
      i = close + 1;
    }
    if (pieces.empty()) {
      error(body.line, body.column, "plq needs at least one piece");
      return std::nullopt;
    }
    return UnivariatePlq(std::move(pieces));
  }

  std::optional<Eigen::VectorXd> vector(const Body& body, int expected, const std::string& what) {
    const auto tokens = tokenize(body.text, body.column);
    if (static_cast<int>(tokens.size()) != expected) {
      error(body.line, body.column,
            what + " needs " + std::to_string(expected) + " entries, found " + std::to_string(tokens.size()));
      return std::nullopt;
    }
    Eigen::VectorXd out(expected);
    for (int i = 0; i < expected; ++i) {
      const auto value = parse_number(tokens[i].text);
      if (!value || !std::isfinite(*value)) {
        error(body.line, tokens[i].column, "bad number '" + tokens[i].text + "'");
        return std::nullopt;
      }
      out(i) = *value;
    }
    return out;
  }
};

struct Raw {
  std::optional<Body> vars, params, obj, point, mult, pv, pu, pp, delta, radius, samples, seed;
  std::map<int, Body> con, map, g;
};

void set_once(Parser& p, std::optional<Body>& slot, const Body& body, const std::string& key) {
  if (slot) p.error(body.line, 1, "duplicate '" + key + "' line");
  slot = body;
}

std::optional<int> count_from(Parser& p, const std::optional<Body>& body, const std::string& key) {
  if (!body) return std::nullopt;
  const auto tokens = tokenize(body->text, body->column);
  const auto value = tokens.size() == 1 ? parse_integer(tokens[0].text) : std::nullopt;
  if (!value || *value < 0 || *value > 64) {
    p.error(body->line, body->column, key + " needs one integer in [0, 64]");
    return std::nullopt;
  }
  return static_cast<int>(*value);
}

}  // namespace

ParseError::ParseError(std::vector<Diagnostic> diagnostics)
    : InputError(join(diagnostics)), diagnostics_(std::move(diagnostics)) {}

KktPoint ProblemFile::kkt() const { return make_kkt_point(problem, x, y, v, u); }

namespace {

bool same(const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return a.size() == b.size() && a == b; }

}  // namespace

bool operator==(const ProblemFile& a, const ProblemFile& b) {
  if (a.kind != b.kind || a.delta != b.delta || a.radius != b.radius || a.samples != b.samples || a.seed != b.seed)
    return false;
  if (a.kind == ProblemFile::Kind::generalized_equation) {
    const auto& e = a.equation;
    const auto& f = b.equation;
    return e.parameters == f.parameters && e.n == f.n && e.maps == f.maps && e.outer == f.outer &&
           same(e.p_bar, f.p_bar) && same(e.x_bar, f.x_bar) && same(e.v_bar, f.v_bar);
  }
  const auto& p = a.problem;
  const auto& q = b.problem;
  return p.n == q.n && p.m == q.m && p.objective == q.objective && p.constraints == q.constraints &&
         p.outer == q.outer && same(a.x, b.x) && same(a.y, b.y) && same(a.v, b.v) && same(a.u, b.u);
}

ProblemFile parse_problem_file(const std::string& text) {
  Parser p;
  Raw raw;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto tokens = tokenize(line, 1);
    if (tokens.empty()) continue;
    const std::string& key = tokens[0].text;
    auto rest_after = [&](const Token& t) {
      const std::size_t start = static_cast<std::size_t>(t.column - 1) + t.text.size();
      return Body{number, static_cast<int>(start) + 1, line.substr(start)};
    };
    if (key == "con" || key == "g" || key == "map") {
      const auto colon = line.find(':');
      if (colon == std::string::npos) {
        p.error(number, tokens[0].column, "expected '" + key + " <i>: ...'");
        continue;
      }
      const std::size_t start = static_cast<std::size_t>(tokens[0].column - 1) + key.size();
      const auto label = tokenize(line.substr(start, colon - start), static_cast<int>(start) + 1);
      const auto index = label.size() == 1 ? parse_integer(label[0].text) : std::nullopt;
      if (!index || *index < 1 || *index > 64) {
        p.error(number, label.empty() ? static_cast<int>(colon) + 1 : label[0].column, "bad index for '" + key + "'");
        continue;
      }
      Body body{number, static_cast<int>(colon) + 2, line.substr(colon + 1)};
      auto& table = key == "con" ? raw.con : (key == "g" ? raw.g : raw.map);
      if (!table.emplace(static_cast<int>(*index), body).second)
        p.error(number, tokens[0].column, "duplicate '" + key + " " + std::to_string(*index) + "'");
    } else if (key == "param") {
      if (tokens.size() < 2 || (tokens[1].text != "v" && tokens[1].text != "u" && tokens[1].text != "p")) {
        p.error(number, tokens.size() < 2 ? tokens[0].column : tokens[1].column, "expected 'param v', 'param u' or 'param p'");
        continue;
      }
      auto& slot = tokens[1].text == "v" ? raw.pv : (tokens[1].text == "u" ? raw.pu : raw.pp);
      set_once(p, slot, rest_after(tokens[1]), "param " + tokens[1].text);
    } else if (key == "vars") {
      set_once(p, raw.vars, rest_after(tokens[0]), key);
    } else if (key == "params") {
      set_once(p, raw.params, rest_after(tokens[0]), key);
    } else if (key == "obj") {
      set_once(p, raw.obj, rest_after(tokens[0]), key);
    } else if (key == "point") {
      set_once(p, raw.point, rest_after(tokens[0]), key);
    } else if (key == "mult") {
      set_once(p, raw.mult, rest_after(tokens[0]), key);
    } else if (key == "delta") {
      set_once(p, raw.delta, rest_after(tokens[0]), key);
    } else if (key == "radius") {
      set_once(p, raw.radius, rest_after(tokens[0]), key);
    } else if (key == "samples") {
      set_once(p, raw.samples, rest_after(tokens[0]), key);
    } else if (key == "seed") {
      set_once(p, raw.seed, rest_after(tokens[0]), key);
    } else {
      p.error(number, tokens[0].column, "unknown keyword '" + key + "'");
    }
  }
  if (!p.diagnostics.empty()) throw ParseError(p.diagnostics);

  ProblemFile file;
  const auto n = count_from(p, raw.vars, "vars");
  if (!raw.vars) p.error(1, 1, "missing 'vars' line");
  const bool equation = raw.params.has_value();
  file.kind = equation ? ProblemFile::Kind::generalized_equation : ProblemFile::Kind::gnlp;
  const auto d = equation ? count_from(p, raw.params, "params") : std::optional<int>(0);

  auto positive = [&](const std::optional<Body>& body, const std::string& key) -> std::optional<double> {
    if (!body) return std::nullopt;
    const auto v = p.vector(*body, 1, key);
    if (v && !((*v)(0) > 0.0)) p.error(body->line, body->column, key + " must be positive");
    return v ? std::optional<double>((*v)(0)) : std::nullopt;
  };
  file.delta = positive(raw.delta, "delta");
  file.radius = positive(raw.radius, "radius");
  if (raw.samples) {
    const auto t = tokenize(raw.samples->text, raw.samples->column);
    const auto v = t.size() == 1 ? parse_integer(t[0].text) : std::nullopt;
    if (!v || *v < 1 || *v > 10000000) p.error(raw.samples->line, raw.samples->column, "samples needs a positive integer");
    else file.samples = static_cast<int>(*v);
  }
  if (raw.seed) {
    const auto t = tokenize(raw.seed->text, raw.seed->column);
    std::uint64_t v = 0;
    const bool ok = t.size() == 1 &&
                    std::from_chars(t[0].text.data(), t[0].text.data() + t[0].text.size(), v).ptr ==
                        t[0].text.data() + t[0].text.size();
    if (!ok) p.error(raw.seed->line, raw.seed->column, "seed needs a nonnegative integer");
    else file.seed = v;
  }
  if (!n || !d || *n < 1) {
    if (n && *n < 1) p.error(raw.vars->line, raw.vars->column, "vars must be at least 1");
    throw ParseError(p.diagnostics);
  }

  auto check_indices = [&](const std::map<int, Body>& table, int count, const std::string& key) {
    for (int i = 1; i <= count; ++i)
      if (!table.count(i)) p.error(1, 1, "missing '" + key + " " + std::to_string(i) + "'");
  };
  auto reject = [&](const std::optional<Body>& body, const std::string& key) {
    if (body) p.error(body->line, 1, "'" + key + "' is not allowed here");
  };
  std::vector<UnivariatePlq> outer;
  auto read_outer = [&](int count) {
    for (const auto& [i, body] : raw.g) {
      if (i > count) {
        p.error(body.line, 1, "g " + std::to_string(i) + " has no matching map");
        continue;
      }
      if (auto g = p.outer(body)) {
        for (const auto& violation : plq_validate(*g))
          p.error(body.line, body.column, "g " + std::to_string(i) + ": " + violation);
        outer.push_back(*g);
      }
    }
  };

  if (equation) {
    for (const auto* b : {&raw.obj, &raw.mult, &raw.pu}) reject(*b, "obj/mult/param u");
    if (!raw.con.empty()) p.error(raw.con.begin()->second.line, 1, "'con' is not allowed in a generalized equation");
    check_indices(raw.map, *n, "map");
    check_indices(raw.g, *n, "g");
    GeneralizedEquation& ge = file.equation;
    ge.parameters = *d;
    ge.n = *n;
    for (const auto& [i, body] : raw.map) {
      if (i > *n) p.error(body.line, 1, "map " + std::to_string(i) + " exceeds vars");
      else if (auto poly = p.polynomial(body, *n, *d)) ge.maps.push_back(*poly);
    }
    read_outer(*n);
    ge.outer = outer;
    ge.x_bar = raw.point ? p.vector(*raw.point, *n, "point").value_or(Eigen::VectorXd::Zero(*n)) : Eigen::VectorXd::Zero(*n);
    ge.p_bar = raw.pp ? p.vector(*raw.pp, *d, "param p").value_or(Eigen::VectorXd::Zero(*d)) : Eigen::VectorXd::Zero(*d);
    ge.v_bar = raw.pv ? p.vector(*raw.pv, *n, "param v").value_or(Eigen::VectorXd::Zero(*n)) : Eigen::VectorXd::Zero(*n);
    if (!p.diagnostics.empty()) throw ParseError(p.diagnostics);
    return file;
  }

  reject(raw.pp, "param p");
  if (!raw.map.empty()) p.error(raw.map.begin()->second.line, 1, "'map' needs a 'params' line");
  const int m = raw.con.empty() ? 0 : raw.con.rbegin()->first;
  check_indices(raw.con, m, "con");
  check_indices(raw.g, m, "g");
  GnlpProblem& problem = file.problem;
  problem.n = *n;
  problem.m = m;
  if (!raw.obj) p.error(1, 1, "missing 'obj' line");
  else if (auto poly = p.polynomial(*raw.obj, *n, 0)) problem.objective = *poly;
  for (const auto& [i, body] : raw.con)
    if (auto poly = p.polynomial(body, *n, 0)) problem.constraints.push_back(*poly);
  read_outer(m);
  problem.outer = outer;
  file.x = raw.point ? p.vector(*raw.point, *n, "point").value_or(Eigen::VectorXd::Zero(*n)) : Eigen::VectorXd::Zero(*n);
  file.y = raw.mult ? p.vector(*raw.mult, m, "mult").value_or(Eigen::VectorXd::Zero(m)) : Eigen::VectorXd::Zero(m);
  file.v = raw.pv ? p.vector(*raw.pv, *n, "param v").value_or(Eigen::VectorXd::Zero(*n)) : Eigen::VectorXd::Zero(*n);
  file.u = raw.pu ? p.vector(*raw.pu, m, "param u").value_or(Eigen::VectorXd::Zero(m)) : Eigen::VectorXd::Zero(m);
  if (!p.diagnostics.empty()) throw ParseError(p.diagnostics);
  return file;
}

namespace {

std::string emit_polynomial(const Polynomial& f, int parameters) {
  if (f.is_zero()) return "0";
  std::string out;
  for (const auto& term : f.terms()) {
    if (!out.empty()) out += "  ";
    out += format_number(term.coefficient);
    for (int j = 0; j < static_cast<int>(term.exponents.size()); ++j) {
      if (term.exponents[j] == 0) continue;
      out += j < parameters ? " p" + std::to_string(j + 1) : " x" + std::to_string(j - parameters + 1);
      if (term.exponents[j] > 1) out += "^" + std::to_string(term.exponents[j]);
    }
  }
  return out;
}

std::string emit_outer(const UnivariatePlq& g) {
  if (g == UnivariatePlq::indicator_nonpositive()) return "ineq";
  if (g == UnivariatePlq::indicator_zero()) return "eq";
  std::string out = "plq";
  for (const auto& piece : g.pieces())
    out += " (" + format_number(piece.lo) + "," + format_number(piece.hi) + "," + format_number(piece.quad) + "," +
           format_number(piece.lin) + "," + format_number(piece.constant) + ")";
  return out;
}

std::string emit_vector(const Eigen::VectorXd& x) {
  std::string out;
  for (Eigen::Index i = 0; i < x.size(); ++i) out += " " + format_number(x(i));
  return out;
}

}  // namespace

std::string emit_problem_file(const ProblemFile& file) {
  std::ostringstream out;
  if (file.kind == ProblemFile::Kind::generalized_equation) {
    const auto& ge = file.equation;
    out << "params " << ge.parameters << "\nvars " << ge.n << "\n";
    for (int i = 0; i < ge.n; ++i) out << "map " << i + 1 << ": " << emit_polynomial(ge.maps[i], ge.parameters) << "\n";
    for (int i = 0; i < ge.n; ++i) out << "g " << i + 1 << ": " << emit_outer(ge.outer[i]) << "\n";
    out << "point" << emit_vector(ge.x_bar) << "\n";
    if (ge.parameters > 0) out << "param p" << emit_vector(ge.p_bar) << "\n";
    out << "param v" << emit_vector(ge.v_bar) << "\n";
  } else {
    const auto& pr = file.problem;
    out << "vars " << pr.n << "\n";
    out << "obj " << emit_polynomial(pr.objective, 0) << "\n";
    for (int i = 0; i < pr.m; ++i) out << "con " << i + 1 << ": " << emit_polynomial(pr.constraints[i], 0) << "\n";
    for (int i = 0; i < pr.m; ++i) out << "g " << i + 1 << ": " << emit_outer(pr.outer[i]) << "\n";
    out << "point" << emit_vector(file.x) << "\n";
    if (pr.m > 0) out << "mult" << emit_vector(file.y) << "\n";
    out << "param v" << emit_vector(file.v) << "\n";
    if (pr.m > 0) out << "param u" << emit_vector(file.u) << "\n";
  }
  if (file.delta) out << "delta " << format_number(*file.delta) << "\n";
  if (file.radius) out << "radius " << format_number(*file.radius) << "\n";
  if (file.samples) out << "samples " << *file.samples << "\n";
  if (file.seed) out << "seed " << *file.seed << "\n";
  return out.str();
}

ProblemFile load_problem_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open problem file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_problem_file(buffer.str());
}

}  // namespace plqstab
