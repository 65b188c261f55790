// Command-line front end: analyze, verify, derivative, sample-cone, kummer.

#include "plqstab/cloud.hpp"
#include "plqstab/criteria.hpp"
#include "plqstab/derivatives.hpp"
#include "plqstab/experiment.hpp"
#include "plqstab/problem_file.hpp"
#include "plqstab/report.hpp"
#include "plqstab/rng.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <sstream>

using namespace plqstab;

namespace {

struct Flags {
  std::string problem;
  std::optional<double> delta;
  std::optional<double> radius;
  std::optional<int> samples;
  std::optional<std::uint64_t> seed;
  double tol = kKktTolerance;
  std::string format = "text";
  bool assume_varsuff = false;
  bool assume_strong_varsuff = false;
  std::string mode = "strict";
  std::string xprime;
  std::string uprime;
  int id_samples = 10;
  double outer_tol = 1e-6;
  double coverage_tol = 1e-2;
};

Eigen::VectorXd parse_direction(const std::string& text, int size, const std::string& name) {
  std::string cleaned = text;
  for (char& c : cleaned)
    if (c == ',') c = ' ';
  std::istringstream in(cleaned);
  std::vector<double> values;
  std::string token;
  while (in >> token) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(token, &used));
      if (used != token.size()) throw std::invalid_argument(token);
    } catch (const std::exception&) {
      throw InputError(name + ": bad number '" + token + "'");
    }
  }
  if (values.empty() && size > 0) return Eigen::VectorXd::Zero(size);
  if (static_cast<int>(values.size()) != size)
    throw InputError(name + " needs " + std::to_string(size) + " entries, found " + std::to_string(values.size()));
  return Eigen::Map<Eigen::VectorXd>(values.data(), size);
}

CriterionMode parse_mode(const std::string& mode) {
  if (mode == "strict") return CriterionMode::strict;
  if (mode == "coderivative") return CriterionMode::coderivative;
  throw InputError("--mode must be strict or coderivative");
}

ProblemFile load_gnlp(const Flags& f) {
  ProblemFile file = load_problem_file(f.problem);
  if (file.kind != ProblemFile::Kind::gnlp) throw InputError("this command needs a problem file, not a generalized equation");
  return file;
}

KktPoint admissible_kkt(const ProblemFile& file, double tol) {
  const KktPoint kkt = file.kkt();
  if (!kkt.admissible(tol))
    throw InadmissibleKkt("KKT residual " + format_real(kkt.residual) + " exceeds tolerance " + format_real(tol));
  return kkt;
}

Report analyze(const Flags& f) {
  const ProblemFile file = load_gnlp(f);
  const KktPoint kkt = admissible_kkt(file, f.tol);
  StabilityOptions options;
  options.assume_sufficiency = f.assume_varsuff || f.assume_strong_varsuff;
  options.assume_strong_sufficiency = f.assume_strong_varsuff;
  options.mode = parse_mode(f.mode);
  Report report;
  report.add("residual", {format_real(kkt.residual)});
  append_stability(report, stability_verdict(file.problem, kkt, options));
  return report;
}

Report verify(const Flags& f) {
  const ProblemFile file = load_gnlp(f);
  const KktPoint kkt = admissible_kkt(file, f.tol);
  ExperimentOptions options;
  options.rho = f.radius.value_or(file.radius.value_or(options.rho));
  options.delta = f.delta.value_or(file.delta.value_or(options.delta));
  options.samples = f.samples.value_or(file.samples.value_or(options.samples));
  options.seed = f.seed.value_or(file.seed.value_or(options.seed));
  Report report;
  report.add("rho", {format_real(options.rho)});
  report.add("delta", {format_real(options.delta)});
  report.add("seed", {std::to_string(options.seed)});
  append_experiment(report, stability_experiment(file.problem, kkt, options));
  if (file.problem.n <= 2 && f.id_samples > 0) {
    const int n = file.problem.n;
    const int m = file.problem.m;
    Eigen::VectorXd center(n + m);
    center << kkt.v, kkt.u;
    std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> inputs;
    for (int k = 0; k < std::min(f.id_samples, options.samples); ++k) {
      CounterRng rng(options.seed, static_cast<std::uint64_t>(k));
      const Eigen::VectorXd input = rng.in_ball(center, options.rho);
      inputs.emplace_back(input.head(n), input.tail(m));
    }
    append_identification(report, verify_identification(file.problem, kkt, inputs, options.delta, 32, options.seed));
  }
  return report;
}

Report derivative(const Flags& f) {
  const ProblemFile file = load_gnlp(f);
  const KktPoint kkt = admissible_kkt(file, f.tol);
  const CriterionMode mode = parse_mode(f.mode);
  const Eigen::VectorXd xp = parse_direction(f.xprime, file.problem.n, "--xprime");
  const Eigen::VectorXd up = parse_direction(f.uprime, file.problem.m, "--uprime");
  const IndexClassification cls = classify_indices(file.problem, kkt);
  const DerivativeFibers fibers = derivative_fibers(file.problem, kkt, xp, up, mode);
  Report report;
  report.add("mode", {to_string(mode)});
  for (int i = 0; i < file.problem.m; ++i) {
    const IndexInfo& info = cls.indices[i];
    const std::string label = std::to_string(i + 1);
    report.add("slopes", {label, info.slopes.minus.to_string(), info.slopes.plus.to_string()});
    report.add("strict_graph", {label, strict_derivative_graph(info.slopes).describe()});
    report.add("coderivative_graph", {label, coderivative_graph(info.slopes).describe()});
    report.add("argument", {label, format_real(fibers.arguments[i])});
    std::vector<std::string> pieces{label};
    for (const auto& iv : fibers.fibers[i]) pieces.push_back("[" + format_real(iv.lo) + ", " + format_real(iv.hi) + "]");
    if (fibers.fibers[i].empty()) pieces.push_back("EMPTY");
    report.add("fiber", pieces);
  }
  report.add("vprime_base", format_values(fibers.hessian_term));
  for (Eigen::Index r = 0; r < fibers.transpose_jacobian.rows(); ++r)
    report.add("vprime_multiplier_row", format_values(fibers.transpose_jacobian.row(r).transpose()));
  return report;
}

Report sample_cone(const Flags& f) {
  const ProblemFile file = load_gnlp(f);
  const KktPoint kkt = admissible_kkt(file, f.tol);
  const Eigen::VectorXd args = shifted_constraints(file.problem, kkt.x, kkt.u);
  CloudOptions options;
  options.count = f.samples.value_or(file.samples.value_or(options.count));
  options.seed = f.seed.value_or(file.seed.value_or(options.seed));
  Report report;
  report.add("outer_tol", {format_real(f.outer_tol)});
  report.add("coverage_tol", {format_real(f.coverage_tol)});
  for (int i = 0; i < file.problem.m; ++i) {
    const PlqGraphSampler sampler(file.problem.outer[i]);
    const Eigen::Vector2d base(args(i), kkt.y(i));
    const GraphLocation loc = sampler.graph().locate(base);
    const PlanarConeUnion analytic = strict_derivative_graph(sampler.graph().slopes_at(loc));
    const DirectionCloud cloud = sample_strict_derivative_cloud(sampler, loc.point, options);
    report.add("analytic", {std::to_string(i + 1), analytic.describe()});
    append_containment(report, i + 1, containment_check(cloud, analytic, f.outer_tol, f.coverage_tol));
  }
  return report;
}

Report kummer(const Flags& f) {
  const ProblemFile file = load_problem_file(f.problem);
  if (file.kind != ProblemFile::Kind::generalized_equation)
    throw InputError("kummer needs a generalized-equation file (with a 'params' line)");
  const GeneralizedEquation& ge = file.equation;
  const FeasibilityVerdict verdict = check_generalized_equation(ge);
  Report report;
  report.add("kummer", {to_string(verdict.status)});
  if (verdict.witness) report.add("witness", format_values(*verdict.witness));
  const bool stable = verdict.status == ConeStatus::only_zero;
  report.add("overall", {stable ? "STABLE" : "NOT_STABLE"});
  if (stable && ge.parameters > 0) {
    const double rho = f.radius.value_or(file.radius.value_or(0.1));
    const int count = f.samples.value_or(file.samples.value_or(1000));
    const auto sampled = sample_generalized_equation(ge, rho, count, f.seed.value_or(file.seed.value_or(1)));
    report.add("solution_samples", {std::to_string(sampled.pairs.size()), std::to_string(sampled.failures)});
    if (sampled.pairs.size() >= 2) report.add("lipschitz", {format_real(estimate_lipschitz(sampled.pairs))});
  }
  report.escalate(stable ? 0 : 1);
  return report;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certify primal-dual full stability of KKT pairs for problems with piecewise linear-quadratic outer functions"};
  app.require_subcommand(1);
  Flags flags;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--problem", flags.problem, "problem file")->required();
    sub->add_option("--tol", flags.tol, "KKT residual tolerance");
    sub->add_option("--format", flags.format, "text or tsv")->check(CLI::IsMember({"text", "tsv"}));
    sub->add_option("--seed", flags.seed, "random seed");
    sub->add_option("--samples", flags.samples, "sample count");
  };
  auto* analyze_cmd = app.add_subcommand("analyze", "stability verdict from the derivative criteria");
  add_common(analyze_cmd);
  analyze_cmd->add_flag("--assume-varsuff", flags.assume_varsuff, "treat variational sufficiency as given");
  analyze_cmd->add_flag("--assume-strong-varsuff", flags.assume_strong_varsuff, "treat strong variational sufficiency as given");
  analyze_cmd->add_option("--mode", flags.mode, "strict or coderivative");

  auto* verify_cmd = app.add_subcommand("verify", "sampled localization experiment and identification check");
  add_common(verify_cmd);
  verify_cmd->add_option("--delta", flags.delta, "localization radius around the primal point");
  verify_cmd->add_option("--radius", flags.radius, "perturbation radius");
  verify_cmd->add_option("--id-samples", flags.id_samples, "samples re-checked for identification");

  auto* derivative_cmd = app.add_subcommand("derivative", "derivative graphs and fibers of the KKT map");
  add_common(derivative_cmd);
  derivative_cmd->add_option("--mode", flags.mode, "strict or coderivative");
  derivative_cmd->add_option("--xprime", flags.xprime, "direction x', space or comma separated");
  derivative_cmd->add_option("--uprime", flags.uprime, "direction u', space or comma separated");

  auto* sample_cmd = app.add_subcommand("sample-cone", "compare sampled difference quotients with the analytic graphs");
  add_common(sample_cmd);
  sample_cmd->add_option("--outer-tol", flags.outer_tol, "angle allowed outside the analytic set");
  sample_cmd->add_option("--coverage-tol", flags.coverage_tol, "angle allowed between extreme rays and the cloud");

  auto* kummer_cmd = app.add_subcommand("kummer", "generalized equation criterion");
  add_common(kummer_cmd);
  kummer_cmd->add_option("--radius", flags.radius, "parameter radius for sampling the solution map");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 3;
  }

  try {
    Report report;
    if (*analyze_cmd) report = analyze(flags);
    else if (*verify_cmd) report = verify(flags);
    else if (*derivative_cmd) report = derivative(flags);
    else if (*sample_cmd) report = sample_cone(flags);
    else report = kummer(flags);
    std::cout << emit_report(report, flags.format == "tsv" ? ReportFormat::tsv : ReportFormat::text);
    return report.exit_code;
  } catch (const ParseError& e) {
    std::cerr << flags.problem << ":\n" << e.what() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return 3;
}
