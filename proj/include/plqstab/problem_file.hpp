#pragma once

#include "plqstab/criteria.hpp"
#include "plqstab/problem.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace plqstab {

struct Diagnostic {
  int line = 0;
  int column = 0;
  std::string message;

  std::string to_string() const;
};

/// Carries every diagnostic found in a problem file; what() lists them one per line.
class ParseError : public InputError {
 public:
  explicit ParseError(std::vector<Diagnostic> diagnostics);
  const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

 private:
  std::vector<Diagnostic> diagnostics_;
};

struct ProblemFile {
  enum class Kind { gnlp, generalized_equation };
  Kind kind = Kind::gnlp;

  GnlpProblem problem;
  Eigen::VectorXd x;
  Eigen::VectorXd y;
  Eigen::VectorXd v;
  Eigen::VectorXd u;

  GeneralizedEquation equation;  // kind == generalized_equation

  std::optional<double> delta;
  std::optional<double> radius;
  std::optional<int> samples;
  std::optional<std::uint64_t> seed;

  KktPoint kkt() const;
  friend bool operator==(const ProblemFile& a, const ProblemFile& b);
};

/// Line-oriented format, '#' starts a comment:
///
///   vars N
///   obj <poly>                 terms "coef x<i>^<k> ...", e.g. "0.5 x1^2 -1 x1"
///   con <i>: <poly>
///   g <i>: ineq | eq | plq (a,b,q,l,c) ...
///   point <x...>   mult <y...>   param v <...>   param u <...>
///   delta R   radius R   samples N   seed N
///
/// A generalized equation v in h(p, x) + H(x) instead uses "params D",
/// "map <i>: <poly in p<j> and x<j>>", "g <i>: ...", "point", "param p", "param v".
ProblemFile parse_problem_file(const std::string& text);

/// Inverse of parse_problem_file; numbers are written with 17 significant digits.
std::string emit_problem_file(const ProblemFile& file);

ProblemFile load_problem_file(const std::string& path);

}  // namespace plqstab
