#pragma once

#include "plqstab/planar_cones.hpp"
#include "plqstab/plq.hpp"

#include <Eigen/Core>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/QR>

#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

namespace plqstab {

struct RankNullspace {
  int rank = 0;
  Eigen::MatrixXd nullspace;  // orthonormal columns
};

/// Rank by full-pivot elimination; pivots below tol * max|a_ij| count as zero.
template <typename Derived>
RankNullspace rank_and_nullspace(const Eigen::MatrixBase<Derived>& a, double tol) {
  const Eigen::Index cols = a.cols();
  RankNullspace out;
  const double scale = a.size() > 0 ? a.cwiseAbs().maxCoeff() : 0.0;
  if (a.rows() == 0 || scale == 0.0) {
    out.nullspace = Eigen::MatrixXd::Identity(cols, cols);
    return out;
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a.template cast<double>());
  lu.setThreshold(tol);
  out.rank = static_cast<int>(lu.rank());
  if (out.rank == cols) {
    out.nullspace = Eigen::MatrixXd::Zero(cols, 0);
    return out;
  }
  const Eigen::MatrixXd kernel = lu.kernel();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(kernel);
  out.nullspace = qr.householderQ() * Eigen::MatrixXd::Identity(cols, kernel.cols());
  return out;
}

/// Smallest eigenvalue of H restricted to span(basis); +inf for an empty basis.
template <typename DerivedH, typename DerivedB>
double projected_min_eigenvalue(const Eigen::MatrixBase<DerivedH>& h, const Eigen::MatrixBase<DerivedB>& basis) {
  if (basis.cols() == 0) return std::numeric_limits<double>::infinity();
  const Eigen::MatrixXd b = basis.template cast<double>();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(b);
  const Eigen::MatrixXd z = qr.householderQ() * Eigen::MatrixXd::Identity(b.rows(), b.cols());
  Eigen::MatrixXd restricted = z.transpose() * h.template cast<double>() * z;
  restricted = 0.5 * (restricted + restricted.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(restricted, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

/// (R+ u R-) - (R+ u R-) for the rays of a slope pair.
PlanarConeUnion ray_minkowski_difference(const SlopePair& slopes);

/// A - A for a union A of convex cones, computed pair by pair as the convex
/// hull of the generators of one cone and the negated generators of the other.
PlanarConeUnion ray_minkowski_difference(const PlanarConeUnion& graph);

/// Linear system whose nonzero solutions the cone criteria ask about.
///
/// Unknowns z have size `equality.cols()`. Index i couples the pair
/// (first.row(i) z, second.row(i) z) to the cone union graphs[i].
struct ConeSelectionSystem {
  Eigen::MatrixXd equality;
  Eigen::MatrixXd first;
  Eigen::MatrixXd second;
  std::vector<PlanarConeUnion> graphs;
  std::vector<int> fixed;  // coordinates pinned to zero

  int unknowns() const { return static_cast<int>(equality.cols()); }
  int couplings() const { return static_cast<int>(graphs.size()); }
  /// Throws std::invalid_argument on inconsistent shapes.
  void check() const;
};

enum class ConeStatus { only_zero, nonzero };

struct FeasibilityVerdict {
  ConeStatus status = ConeStatus::only_zero;
  std::optional<Eigen::VectorXd> witness;    // max-norm 1
  std::optional<std::vector<int>> selection; // cone index chosen within each graph
};

class ConeFeasibilityError : public std::runtime_error {
 public:
  ConeFeasibilityError(const std::string& what, std::vector<int> selection)
      : std::runtime_error(what), selection_(std::move(selection)) {}
  const std::vector<int>& selection() const { return selection_; }

 private:
  std::vector<int> selection_;
};

inline constexpr double kConeNonzeroThreshold = 1e-7;
inline constexpr double kWitnessTolerance = 1e-9;

/// Decides whether the system admits z != 0.
///
/// Selections of one convex cone per index are enumerated lexicographically
/// (index 0 most significant); the first selection admitting a nonzero z
/// supplies the witness.
FeasibilityVerdict cone_nonzero_feasibility(const ConeSelectionSystem& system);

/// Checks a witness against the system and the given selection.
bool verify_witness(const ConeSelectionSystem& system, const Eigen::VectorXd& z,
                    const std::vector<int>& selection, double tol = kWitnessTolerance);

const char* to_string(ConeStatus s);

}  // namespace plqstab
