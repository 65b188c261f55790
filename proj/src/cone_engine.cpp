#include "plqstab/cone_engine.hpp"

#include "plqstab/simplex.hpp"

#include <cmath>
#include <cstdint>
#include <string>

namespace plqstab {

namespace {

std::vector<Eigen::Vector2d> generators(const PlanarCone& c) {
  switch (c.kind) {
    case PlanarCone::Kind::line:
      return {c.first, -c.first};
    case PlanarCone::Kind::ray:
      return {c.first};
    case PlanarCone::Kind::wedge:
      return {c.first, c.second};
  }
  return {};
}

struct RowBlock {
  std::vector<Eigen::RowVectorXd> eq;
  std::vector<Eigen::RowVectorXd> ge;

  void add(std::vector<Eigen::RowVectorXd>& rows, const Eigen::RowVectorXd& row) {
    const double n = row.norm();
    if (n > 0.0) rows.push_back(row / n);
  }
};

// Linear description of (a, b) in cone c, with a = first z and b = second z.
void add_cone_rows(const PlanarCone& c, const Eigen::RowVectorXd& a, const Eigen::RowVectorXd& b, RowBlock& out) {
  switch (c.kind) {
    case PlanarCone::Kind::line:
      out.add(out.eq, c.first.x() * b - c.first.y() * a);
      break;
    case PlanarCone::Kind::ray:
      out.add(out.eq, c.first.x() * b - c.first.y() * a);
      out.add(out.ge, c.first.x() * a + c.first.y() * b);
      break;
    case PlanarCone::Kind::wedge:
      out.add(out.ge, c.first.x() * b - c.first.y() * a);
      out.add(out.ge, c.second.y() * a - c.second.x() * b);
      break;
  }
}

Eigen::MatrixXd stack(const std::vector<Eigen::RowVectorXd>& rows, int cols) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = rows[i];
  return m;
}

RowBlock common_rows(const ConeSelectionSystem& system) {
  const int n = system.unknowns();
  RowBlock block;
  for (Eigen::Index i = 0; i < system.equality.rows(); ++i) block.add(block.eq, system.equality.row(i));
  for (int k : system.fixed) block.add(block.eq, Eigen::RowVectorXd::Unit(n, k));
  return block;
}

double splitmix_unit(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return static_cast<double>(z >> 11) * 0x1.0p-53;
}

std::string selection_text(const std::vector<int>& selection) {
  std::string s = "(";
  for (std::size_t i = 0; i < selection.size(); ++i) s += (i ? "," : "") + std::to_string(selection[i]);
  return s + ")";
}

// Nonzero point of the cone cut out by the rows, or nullopt.
std::optional<Eigen::VectorXd> nonzero_point(const RowBlock& rows, int n, const std::vector<int>& selection) {
  LinearProgram lp = LinearProgram::free(n);
  lp.lower.setConstant(-1.0);
  lp.upper.setConstant(1.0);
  lp.eq = stack(rows.eq, n);
  lp.eq_rhs = Eigen::VectorXd::Zero(lp.eq.rows());
  lp.ge = stack(rows.ge, n);
  lp.ge_rhs = Eigen::VectorXd::Zero(lp.ge.rows());

  for (int j = 0; j < n; ++j)
    for (double sign : {1.0, -1.0}) {
      std::uint64_t state = static_cast<std::uint64_t>(2 * j + (sign < 0 ? 1 : 0));
      LpResult result;
      for (int attempt = 0; attempt < 4; ++attempt) {
        lp.cost = Eigen::VectorXd::Zero(n);
        lp.cost(j) = -sign;
        if (attempt > 0)
          for (int k = 0; k < n; ++k) lp.cost(k) += 1e-6 * attempt * (splitmix_unit(state) - 0.5);
        SimplexOptions options;
        options.bland_after = attempt > 1 ? 0 : options.bland_after;
        result = solve_lp(lp, options);
        if (result.status != LpStatus::numerical_failure) break;
      }
      if (result.status == LpStatus::numerical_failure || result.status == LpStatus::unbounded)
        throw ConeFeasibilityError("cone feasibility LP failed for selection " + selection_text(selection),
                                   selection);
      if (result.status == LpStatus::infeasible)
        throw ConeFeasibilityError("cone feasibility LP reported the origin infeasible for selection " +
                                       selection_text(selection),
                                   selection);
      if (sign * result.x(j) > kConeNonzeroThreshold) return result.x;
    }
  return std::nullopt;
}

}  // namespace

PlanarConeUnion ray_minkowski_difference(const PlanarConeUnion& graph) {
  PlanarConeUnion out;
  for (const auto& a : graph.cones())
    for (const auto& b : graph.cones()) {
      std::vector<Eigen::Vector2d> gens = generators(a);
      for (const auto& g : generators(b)) gens.push_back(-g);
      out = out.united(PlanarConeUnion::generated_by(gens));
    }
  return out;
}

PlanarConeUnion ray_minkowski_difference(const SlopePair& slopes) {
  return ray_minkowski_difference(
      PlanarConeUnion({PlanarCone::ray(slopes.plus.direction()), PlanarCone::ray(-slopes.minus.direction())}));
}

void ConeSelectionSystem::check() const {
  const Eigen::Index n = equality.cols();
  const Eigen::Index m = static_cast<Eigen::Index>(graphs.size());
  if (first.rows() != m || second.rows() != m || (m > 0 && (first.cols() != n || second.cols() != n)))
    throw std::invalid_argument("cone selection system: coupling rows do not match the unknowns");
  for (int k : fixed)
    if (k < 0 || k >= n) throw std::invalid_argument("cone selection system: fixed coordinate out of range");
}

FeasibilityVerdict cone_nonzero_feasibility(const ConeSelectionSystem& system) {
  system.check();
  const int n = system.unknowns();
  const int m = system.couplings();
  FeasibilityVerdict verdict;
  if (n == 0) return verdict;

  const RowBlock common = common_rows(system);
  if (!common.eq.empty() && rank_and_nullspace(stack(common.eq, n), 1e-12).rank == n) return verdict;

  std::vector<int> choice(m, 0);
  while (true) {
    RowBlock rows = common;
    for (int i = 0; i < m; ++i) {
      const Eigen::RowVectorXd a = system.first.row(i);
      const Eigen::RowVectorXd b = system.second.row(i);
      if (system.graphs[i].empty()) {
        rows.add(rows.eq, a);
        rows.add(rows.eq, b);
      } else {
        add_cone_rows(system.graphs[i].cones()[choice[i]], a, b, rows);
      }
    }
    if (auto z = nonzero_point(rows, n, choice)) {
      const Eigen::VectorXd w = *z / z->cwiseAbs().maxCoeff();
      if (!verify_witness(system, w, choice))
        throw ConeFeasibilityError("witness failed verification for selection " + selection_text(choice), choice);
      verdict.status = ConeStatus::nonzero;
      verdict.witness = w;
      verdict.selection = choice;
      return verdict;
    }
    // Odometer with the last index varying fastest.
    int i = m - 1;
    for (; i >= 0; --i) {
      const int count = std::max<int>(1, static_cast<int>(system.graphs[i].cones().size()));
      if (++choice[i] < count) break;
      choice[i] = 0;
    }
    if (i < 0) break;
  }
  return verdict;
}

bool verify_witness(const ConeSelectionSystem& system, const Eigen::VectorXd& z, const std::vector<int>& selection,
                    double tol) {
  if (z.size() != system.unknowns() || std::abs(z.cwiseAbs().maxCoeff() - 1.0) > tol) return false;
  for (Eigen::Index i = 0; i < system.equality.rows(); ++i) {
    const double n = system.equality.row(i).norm();
    if (n > 0.0 && std::abs(system.equality.row(i).dot(z)) > tol * n) return false;
  }
  for (int k : system.fixed)
    if (std::abs(z(k)) > tol) return false;
  for (int i = 0; i < system.couplings(); ++i) {
    const Eigen::Vector2d p(system.first.row(i).dot(z), system.second.row(i).dot(z));
    const auto& cones = system.graphs[i].cones();
    const double d = cones.empty() ? p.norm() : cones[selection.at(i)].distance(p);
    if (d > tol * (1.0 + p.norm())) return false;
  }
  return true;
}

const char* to_string(ConeStatus s) { return s == ConeStatus::only_zero ? "ONLY_ZERO" : "NONZERO"; }

}  // namespace plqstab
