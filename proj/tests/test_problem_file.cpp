#include "plqstab/problem_file.hpp"
#include "plqstab/report.hpp"
#include "support.hpp"

#include <doctest.h>

#include <array>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sys/wait.h>

using namespace plqstab;

namespace {

std::string corpus_path(const std::string& name) { return std::string(PLQSTAB_CORPUS) + "/" + name + ".txt"; }

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct Run {
  int code = -1;
  std::string out;
};

Run run_cli(const std::string& args) {
  Run r;
  FILE* pipe = popen((std::string(PLQSTAB_CLI) + " " + args + " 2>&1").c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

bool prints_negative_zero(const std::string& text) {
  std::string token;
  for (char c : text + " ") {
    if (std::isspace(static_cast<unsigned char>(c)) || c == ',' || c == '(' || c == ')' || c == ';') {
      if (token == "-0") return true;
      token.clear();
    } else {
      token += c;
    }
  }
  return false;
}

std::vector<Diagnostic> diagnostics_of(const std::string& text) {
  try {
    parse_problem_file(text);
  } catch (const ParseError& e) {
    return e.diagnostics();
  }
  return {};
}

}  // namespace

TEST_CASE("parse the half-line problem") {
  const ProblemFile f = load_problem_file(corpus_path("p1"));
  CHECK(f.kind == ProblemFile::Kind::gnlp);
  CHECK(f.problem.n == 1);
  CHECK(f.problem.m == 1);
  CHECK(f.problem.outer[0].is_indicator_nonpositive());
  CHECK(f.x.size() == 1);
  CHECK(f.v.size() == 1);
  CHECK(f.u.size() == 1);
  CHECK(f.kkt().admissible());
}

TEST_CASE("parse errors carry line numbers") {
  const auto repeated = diagnostics_of("vars 1\nobj 0.5 x1^2\ncon 1: 1.0 x1 x1\ng 1: ineq\npoint 0\nmult 0\n");
  REQUIRE_FALSE(repeated.empty());
  CHECK(repeated[0].line == 3);

  const auto decreasing =
      diagnostics_of("vars 1\nobj 0.5 x1^2\ncon 1: 1 x1\ng 1: plq (-inf,0,0,1,0) (0,inf,0,-1,0)\npoint 0\nmult 0\n");
  REQUIRE_FALSE(decreasing.empty());
  CHECK(decreasing[0].line == 4);
  CHECK(decreasing[0].message.find("g 1") != std::string::npos);
  CHECK(decreasing[0].message.find("pieces 1/2") != std::string::npos);

  CHECK_FALSE(diagnostics_of("vars 1\nobj 0.5 y1^2\n").empty());
  CHECK_FALSE(diagnostics_of("vars 1\nobj 0.5 x2^2\npoint 0\n").empty());
  CHECK_FALSE(diagnostics_of("vars 1\nobj 0.5 x1^2\nbogus 3\n").empty());
  CHECK_THROWS_AS(load_problem_file(corpus_path("does_not_exist")), InputError);
}

TEST_CASE("emit and parse round trip on the corpus") {
  auto names = testing::corpus_names();
  for (const char* ge : {"ge_stable", "ge_unstable", "ge_singular", "ge_regular"}) names.emplace_back(ge);
  for (const auto& name : names) {
    CAPTURE(name);
    const ProblemFile f = load_problem_file(corpus_path(name));
    const std::string text = emit_problem_file(f);
    const ProblemFile g = parse_problem_file(text);
    CHECK(f == g);
    CHECK(emit_problem_file(g) == text);
  }
}

TEST_CASE("report formatting") {
  CHECK(format_real(-0.0) == "0");
  CHECK(format_real(-1e-300 * 1e-300) == "0");
  CHECK(format_real(0.1) == "0.1");
  CHECK(format_real(-1.0) == "-1");

  Report r;
  r.add("overall", {"STABLE"});
  r.add("witness", format_values(Eigen::Vector3d(0.0, 1.0, -1.0)));
  CHECK(emit_report(r, ReportFormat::tsv) == "overall\tSTABLE\nwitness\t0\t1\t-1\n");
  CHECK(emit_report(r, ReportFormat::text) == "overall: STABLE\nwitness: 0 1 -1\n");

  LocalizationEstimate e;
  e.verdict = ExperimentVerdict::invalid;
  Report q;
  append_experiment(q, e);
  CHECK(emit_report(q, ReportFormat::tsv).find("experiment\tINVALID\n") != std::string::npos);

  Report codes;
  codes.escalate(2);
  codes.escalate(1);
  codes.escalate(2);
  CHECK(codes.exit_code == 1);
  codes.escalate(3);
  CHECK(codes.exit_code == 3);
  CHECK(exit_code(Overall::conditional) == 2);
  CHECK(exit_code(ExperimentVerdict::invalid) == 2);
}

TEST_CASE("command line exit codes") {
  const Run stable = run_cli("analyze --problem " + corpus_path("p1") + " --format tsv");
  CHECK(stable.code == 0);
  CHECK(stable.out.find("overall\tSTABLE") != std::string::npos);

  const Run repeated = run_cli("analyze --problem " + corpus_path("p2") + " --format tsv");
  CHECK(repeated.code == 1);
  CHECK(repeated.out.find("ligc\tFAILS") != std::string::npos);
  CHECK(repeated.out.find("witness\t0\t1\t-1") != std::string::npos);
  CHECK_FALSE(prints_negative_zero(repeated.out));

  const Run conditional = run_cli("analyze --problem " + corpus_path("l1"));
  CHECK(conditional.code == 2);

  const Run quartic = run_cli("verify --problem " + corpus_path("quartic") + " --format tsv --id-samples 0");
  CHECK(quartic.code == 1);
  CHECK(quartic.out.find("DIVERGING") != std::string::npos);

  const Run missing = run_cli("analyze --problem " + corpus_path("does_not_exist"));
  CHECK(missing.code == 3);
  const Run bad_flag = run_cli("analyze --problem " + corpus_path("p1") + " --format xml");
  CHECK(bad_flag.code == 3);
  CHECK(run_cli("--help").code == 0);

  const Run kummer = run_cli("kummer --problem " + corpus_path("ge_stable") + " --format tsv");
  CHECK(kummer.code == 0);
  CHECK(kummer.out.find("ONLY_ZERO") != std::string::npos);
}
