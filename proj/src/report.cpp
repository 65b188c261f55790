#include "plqstab/report.hpp"

#include <cmath>
#include <cstdio>

namespace plqstab {

void Report::escalate(int code) {
  auto rank = [](int c) { return c == 3 ? 3 : (c == 1 ? 2 : (c == 2 ? 1 : 0)); };
  if (rank(code) > rank(exit_code)) exit_code = code;
}

std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.9g", x);
  std::string s = buffer;
  if (s == "-0") s = "0";
  return s;
}

std::vector<std::string> format_values(const Eigen::VectorXd& x) {
  std::vector<std::string> out;
  for (Eigen::Index i = 0; i < x.size(); ++i) out.push_back(format_real(x(i)));
  return out;
}

std::string emit_report(const Report& report, ReportFormat format) {
  std::string out;
  for (const auto& [key, values] : report.rows) {
    out += key;
    if (format == ReportFormat::tsv) {
      for (const auto& v : values) out += "\t" + v;
    } else {
      out += ":";
      for (const auto& v : values) out += " " + v;
    }
    out += "\n";
  }
  return out;
}

int exit_code(Overall overall) {
  switch (overall) {
    case Overall::stable: return 0;
    case Overall::not_stable: return 1;
    case Overall::conditional: return 2;
  }
  return 2;
}

int exit_code(ExperimentVerdict verdict) {
  switch (verdict) {
    case ExperimentVerdict::pass: return 0;
    case ExperimentVerdict::fail: return 1;
    case ExperimentVerdict::invalid: return 2;
  }
  return 2;
}

int exit_code(IdentificationStatus status) {
  switch (status) {
    case IdentificationStatus::pass: return 0;
    case IdentificationStatus::fail: return 1;
    case IdentificationStatus::unresolved: return 2;
  }
  return 2;
}

void append_stability(Report& report, const StabilityReport& s) {
  for (std::size_t i = 0; i < s.classification.indices.size(); ++i) {
    const IndexInfo& info = s.classification.indices[i];
    report.add("index", {std::to_string(i + 1), to_string(info.kind), info.slopes.minus.to_string(),
                         info.slopes.plus.to_string()});
  }
  report.add("ligc", {s.ligc.holds ? "HOLDS" : "FAILS"});
  if (s.ligc.witness) report.add("ligc_witness", format_values(*s.ligc.witness));
  report.add("ssoc", {to_string(s.ssoc.status), format_real(s.ssoc.min_eigenvalue),
                      std::to_string(s.ssoc.subspace_dimension)});
  report.add("criterion", {to_string(s.strict_criterion.status)});
  if (s.strict_criterion.witness) report.add("witness", format_values(*s.strict_criterion.witness));
  report.add("origin_criterion", {to_string(s.origin_criterion.status)});
  if (s.origin_criterion.witness) report.add("origin_witness", format_values(*s.origin_criterion.witness));
  report.add("sufficiency", {to_string(s.sufficiency)});
  report.add("overall", {to_string(s.overall)});
  for (const auto& note : s.notes) report.add("note", {note});
  report.escalate(exit_code(s.overall));
}

void append_experiment(Report& report, const LocalizationEstimate& e) {
  report.add("experiment", {to_string(e.verdict)});
  report.add("single_valued", {e.single_valued ? "true" : "false"});
  report.add("lipschitz", {e.diverging ? "DIVERGING" : format_real(e.lipschitz_estimate)});
  for (const auto& rung : e.radius_ladder)
    report.add("ladder", {format_real(rung.radius), format_real(rung.estimate), std::to_string(rung.unique_solves)});
  report.add("samples", {std::to_string(e.sample_count)});
  report.add("empty", {std::to_string(e.empty_count)});
  report.add("multiple", {std::to_string(e.multiple_count)});
  report.add("boundary_suspect", {std::to_string(e.boundary_count)});
  report.add("nonsingleton_multipliers", {std::to_string(e.nonsingleton_count)});
  report.add("far_multipliers", {std::to_string(e.far_multiplier_count)});
  report.add("base_multiplier", {e.base_multiplier_singleton ? "SINGLETON" : "NOT_SINGLETON"});
  if (e.identification_ok) report.add("identification", {*e.identification_ok ? "PASS" : "FAIL"});
  for (const auto& note : e.notes) report.add("note", {note});
  report.escalate(exit_code(e.verdict));
}

void append_identification(Report& report, const std::vector<IdentificationOutcome>& outcomes) {
  int worst = 0;
  for (std::size_t k = 0; k < outcomes.size(); ++k) {
    const auto& o = outcomes[k];
    report.add("identification_sample", {std::to_string(k + 1), to_string(o.status), std::to_string(o.kkt_pairs)});
    for (const auto& note : o.notes) report.add("note", {note});
    const int code = exit_code(o.status);
    if (code == 1 || (code == 2 && worst == 0)) worst = code;
  }
  report.add("identification", {worst == 0 ? "PASS" : (worst == 1 ? "FAIL" : "UNRESOLVED")});
  report.escalate(worst);
}

void append_containment(Report& report, int index, const ContainmentReport& c) {
  report.add("cone", {std::to_string(index), c.pass ? "PASS" : "FAIL", format_real(c.worst_outer),
                      format_real(c.worst_coverage), std::to_string(c.outside)});
  report.escalate(c.pass ? 0 : 1);
}

}  // namespace plqstab
