#pragma once

#include "plqstab/cloud.hpp"
#include "plqstab/criteria.hpp"
#include "plqstab/experiment.hpp"

#include <string>
#include <utility>
#include <vector>

namespace plqstab {

enum class ReportFormat { text, tsv };

/// Ordered rows of key and values. Exit codes: 0 stable/pass, 1 not stable/fail,
/// 2 conditional/unresolved/invalid, 3 input error.
struct Report {
  std::vector<std::pair<std::string, std::vector<std::string>>> rows;
  int exit_code = 0;

  void add(std::string key, std::vector<std::string> values) { rows.emplace_back(std::move(key), std::move(values)); }
  /// Keeps the most severe code; 1 outranks 2.
  void escalate(int code);
};

/// 9 significant digits; never prints "-0".
std::string format_real(double x);
std::vector<std::string> format_values(const Eigen::VectorXd& x);

std::string emit_report(const Report& report, ReportFormat format);

int exit_code(Overall overall);
int exit_code(ExperimentVerdict verdict);
int exit_code(IdentificationStatus status);

void append_stability(Report& report, const StabilityReport& stability);
void append_experiment(Report& report, const LocalizationEstimate& estimate);
void append_identification(Report& report, const std::vector<IdentificationOutcome>& outcomes);
void append_containment(Report& report, int index, const ContainmentReport& containment);

}  // namespace plqstab
