#include "plqstab/plq.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace plqstab {

namespace {

bool close(double a, double b, double tol) {
  if (std::isinf(a) || std::isinf(b)) return a == b;
  return std::abs(a - b) <= tol * (1.0 + std::max(std::abs(a), std::abs(b)));
}

double clean_zero(double t) { return t == 0.0 ? 0.0 : t; }

}  // namespace

Eigen::Vector2d Slope::direction() const {
  if (vertical_) return {0.0, 1.0};
  if (value_ == 0.0) return {1.0, 0.0};
  const double norm = std::hypot(1.0, value_);
  return {1.0 / norm, value_ / norm};
}

std::string Slope::to_string() const {
  if (vertical_) return "inf";
  std::ostringstream out;
  out.precision(9);
  out << value_;
  return out.str();
}

UnivariatePlq UnivariatePlq::indicator_nonpositive() {
  return UnivariatePlq({PlqPiece{-kInf, 0.0, 0.0, 0.0, 0.0}});
}

UnivariatePlq UnivariatePlq::indicator_zero() {
  return UnivariatePlq({PlqPiece{0.0, 0.0, 0.0, 0.0, 0.0}});
}

UnivariatePlq UnivariatePlq::zero() { return UnivariatePlq({PlqPiece{-kInf, kInf, 0.0, 0.0, 0.0}}); }

UnivariatePlq UnivariatePlq::absolute_value() {
  return UnivariatePlq({PlqPiece{-kInf, 0.0, 0.0, -1.0, 0.0}, PlqPiece{0.0, kInf, 0.0, 1.0, 0.0}});
}

UnivariatePlq UnivariatePlq::quadratic(double q) {
  return UnivariatePlq({PlqPiece{-kInf, kInf, q, 0.0, 0.0}});
}

Interval UnivariatePlq::domain() const {
  if (pieces_.empty()) return {kInf, -kInf};
  return {pieces_.front().lo, pieces_.back().hi};
}

double UnivariatePlq::value(double u) const {
  for (const auto& p : pieces_)
    if (u >= p.lo && u <= p.hi) return p.value(u);
  return kInf;
}

bool UnivariatePlq::is_indicator_nonpositive() const {
  return pieces_.size() == 1 && pieces_[0] == PlqPiece{-kInf, 0.0, 0.0, 0.0, 0.0};
}

bool UnivariatePlq::is_indicator_zero() const {
  return pieces_.size() == 1 && pieces_[0] == PlqPiece{0.0, 0.0, 0.0, 0.0, 0.0};
}

std::vector<std::string> plq_validate(const UnivariatePlq& g) {
  std::vector<std::string> out;
  const auto& pieces = g.pieces();
  if (pieces.empty()) {
    out.push_back("function is not proper: no pieces");
    return out;
  }
  for (std::size_t k = 0; k < pieces.size(); ++k) {
    const auto& p = pieces[k];
    const std::string tag = "piece " + std::to_string(k + 1) + ": ";
    if (std::isnan(p.lo) || std::isnan(p.hi) || !(p.lo <= p.hi) || p.lo == kInf || p.hi == -kInf)
      out.push_back(tag + "interval endpoints out of order");
    if (!std::isfinite(p.quad) || !std::isfinite(p.lin) || !std::isfinite(p.constant))
      out.push_back(tag + "coefficients must be finite");
    if (p.quad < 0.0) out.push_back(tag + "negative quadratic coefficient (not convex)");
    if (p.lo == p.hi && pieces.size() > 1) out.push_back(tag + "degenerate interval among several pieces");
  }
  for (std::size_t k = 0; k + 1 < pieces.size(); ++k) {
    const auto& a = pieces[k];
    const auto& b = pieces[k + 1];
    const std::string tag = "pieces " + std::to_string(k + 1) + "/" + std::to_string(k + 2) + ": ";
    if (!std::isfinite(a.hi) || !close(a.hi, b.lo, 1e-12)) {
      out.push_back(tag + (a.hi > b.lo ? "intervals overlap" : "domain not an interval"));
      continue;
    }
    if (!close(a.value(a.hi), b.value(b.lo), 1e-12)) out.push_back(tag + "values disagree at shared endpoint");
    const double left = a.derivative(a.hi);
    const double right = b.derivative(b.lo);
    if (right < left - 1e-12 * (1.0 + std::abs(left))) out.push_back(tag + "derivative not nondecreasing");
  }
  return out;
}

void require_valid(const UnivariatePlq& g, const std::string& label) {
  const auto violations = plq_validate(g);
  if (violations.empty()) return;
  std::string msg = label + " is not a valid convex PLQ function:";
  for (const auto& v : violations) msg += " " + v + ";";
  throw InputError(msg);
}

std::optional<Interval> plq_subgradient(const UnivariatePlq& g, double u) {
  const Interval dom = g.domain();
  if (!(u >= dom.lo && u <= dom.hi)) return std::nullopt;
  Interval result{-kInf, kInf};
  if (u > dom.lo)
    for (const auto& p : g.pieces())
      if (p.lo < u && u <= p.hi) {
        result.lo = p.derivative(u);
        break;
      }
  if (u < dom.hi)
    for (const auto& p : g.pieces())
      if (p.lo <= u && u < p.hi) {
        result.hi = p.derivative(u);
        break;
      }
  return result;
}

SubgradientGraph::SubgradientGraph(const UnivariatePlq& g) {
  const auto& pieces = g.pieces();
  if (pieces.empty()) throw InputError("subgradient graph of an empty PLQ function");
  const Interval dom = g.domain();

  auto push = [&](const Eigen::Vector2d& v, Slope from_previous) {
    if (!vertices_.empty() && vertices_.back() == v) return;
    if (!vertices_.empty()) segment_slopes_.push_back(from_previous);
    vertices_.push_back(v);
  };

  if (std::isfinite(dom.lo)) {
    start_slope_ = Slope::vertical();
    push({dom.lo, pieces.front().derivative(dom.lo)}, Slope::vertical());
  }
  for (std::size_t k = 0; k < pieces.size(); ++k) {
    const auto& p = pieces[k];
    if (p.lo == -kInf) {
      start_slope_ = Slope::finite(p.quad);
    } else if (k > 0) {
      const double right = p.derivative(p.lo);
      if (right > vertices_.back().y()) push({p.lo, right}, Slope::vertical());
    }
    if (std::isfinite(p.hi)) {
      if (p.hi > p.lo) push({p.hi, p.derivative(p.hi)}, Slope::finite(p.quad));
    } else {
      end_slope_ = Slope::finite(p.quad);
    }
  }
  if (std::isfinite(dom.hi)) end_slope_ = Slope::vertical();
  if (vertices_.empty()) vertices_.push_back({0.0, pieces.front().lin});

  cumulative_.assign(vertices_.size(), 0.0);
  for (std::size_t j = 0; j + 1 < vertices_.size(); ++j)
    cumulative_[j + 1] = cumulative_[j] + (vertices_[j + 1] - vertices_[j]).norm();
}

GraphLocation SubgradientGraph::locate(const Eigen::Vector2d& p, double snap) const {
  GraphLocation best;
  best.distance = kInf;
  auto consider = [&](GraphLocation::Kind kind, int index, const Eigen::Vector2d& q) {
    const double d = (p - q).norm();
    if (d < best.distance) best = {kind, index, q, d};
  };

  const Eigen::Vector2d& first = vertices_.front();
  const Eigen::Vector2d start_dir = -start_slope_.direction();
  const double ts = (p - first).dot(start_dir);
  if (ts > 0.0) consider(GraphLocation::Kind::start_ray, 0, first + ts * start_dir);

  for (std::size_t j = 0; j + 1 < vertices_.size(); ++j) {
    const Eigen::Vector2d& a = vertices_[j];
    const Eigen::Vector2d& b = vertices_[j + 1];
    const Eigen::Vector2d d = b - a;
    const double t = (p - a).dot(d) / d.squaredNorm();
    if (t > 0.0 && t < 1.0) consider(GraphLocation::Kind::segment, static_cast<int>(j), a + t * d);
  }

  const Eigen::Vector2d& last = vertices_.back();
  const Eigen::Vector2d end_dir = end_slope_.direction();
  const double te = (p - last).dot(end_dir);
  if (te > 0.0) consider(GraphLocation::Kind::end_ray, 0, last + te * end_dir);

  // Vertices win whenever the point is within snapping distance of one.
  GraphLocation nearest_vertex;
  nearest_vertex.distance = kInf;
  for (std::size_t k = 0; k < vertices_.size(); ++k) {
    const double d = (p - vertices_[k]).norm();
    if (d < nearest_vertex.distance)
      nearest_vertex = {GraphLocation::Kind::vertex, static_cast<int>(k), vertices_[k], d};
  }
  if (nearest_vertex.distance <= snap || nearest_vertex.distance <= best.distance) {
    nearest_vertex.distance = std::min(nearest_vertex.distance, best.distance);
    return nearest_vertex;
  }
  return best;
}

double SubgradientGraph::arc_length(const GraphLocation& loc) const {
  switch (loc.kind) {
    case GraphLocation::Kind::vertex:
      return cumulative_[loc.index];
    case GraphLocation::Kind::segment:
      return cumulative_[loc.index] + (loc.point - vertices_[loc.index]).norm();
    case GraphLocation::Kind::start_ray:
      return -(loc.point - vertices_.front()).norm();
    case GraphLocation::Kind::end_ray:
      return cumulative_.back() + (loc.point - vertices_.back()).norm();
  }
  return 0.0;
}

Eigen::Vector2d SubgradientGraph::point_at(double s) const {
  if (s <= 0.0) return vertices_.front() + s * start_slope_.direction();
  const double total = cumulative_.back();
  if (s >= total) return vertices_.back() + (s - total) * end_slope_.direction();
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
  const std::size_t j = static_cast<std::size_t>(it - cumulative_.begin()) - 1;
  const Eigen::Vector2d& a = vertices_[j];
  const Eigen::Vector2d& b = vertices_[j + 1];
  const double length = cumulative_[j + 1] - cumulative_[j];
  return a + ((s - cumulative_[j]) / length) * (b - a);
}

SlopePair SubgradientGraph::slopes_at(const GraphLocation& loc) const {
  switch (loc.kind) {
    case GraphLocation::Kind::vertex: {
      const std::size_t k = static_cast<std::size_t>(loc.index);
      const Slope in = k == 0 ? start_slope_ : segment_slopes_[k - 1];
      const Slope out = k + 1 == vertices_.size() ? end_slope_ : segment_slopes_[k];
      return {in, out};
    }
    case GraphLocation::Kind::segment:
      return {segment_slopes_[loc.index], segment_slopes_[loc.index]};
    case GraphLocation::Kind::start_ray:
      return {start_slope_, start_slope_};
    case GraphLocation::Kind::end_ray:
      return {end_slope_, end_slope_};
  }
  return {};
}

std::vector<double> SubgradientGraph::vertical_abscissae() const {
  std::vector<double> out;
  if (start_slope_.is_vertical()) out.push_back(vertices_.front().x());
  for (std::size_t j = 0; j < segment_slopes_.size(); ++j)
    if (segment_slopes_[j].is_vertical()) out.push_back(vertices_[j].x());
  if (end_slope_.is_vertical()) out.push_back(vertices_.back().x());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

SubgradientGraph::Prox SubgradientGraph::prox(double mu, double z) const {
  auto level = [mu](const Eigen::Vector2d& p) { return p.x() + mu * p.y(); };
  auto along = [mu](const Slope& s) { return 1.0 / (1.0 + mu * s.value()); };
  const double h0 = level(vertices_.front());
  if (z <= h0) {
    const Eigen::Vector2d d = start_slope_.direction();
    const double t = (h0 - z) / (d.x() + mu * d.y());
    const Eigen::Vector2d p = vertices_.front() - t * d;
    return {p.x(), p.y(), start_slope_.is_vertical() ? 0.0 : along(start_slope_)};
  }
  const double hl = level(vertices_.back());
  if (z >= hl) {
    const Eigen::Vector2d d = end_slope_.direction();
    const double t = (z - hl) / (d.x() + mu * d.y());
    const Eigen::Vector2d p = vertices_.back() + t * d;
    return {p.x(), p.y(), end_slope_.is_vertical() ? 0.0 : along(end_slope_)};
  }
  std::size_t j = 0;
  while (j + 2 < vertices_.size() && level(vertices_[j + 1]) < z) ++j;
  const Eigen::Vector2d& a = vertices_[j];
  const Eigen::Vector2d& b = vertices_[j + 1];
  const double ha = level(a);
  const double lambda = (z - ha) / (level(b) - ha);
  const Eigen::Vector2d p = a + lambda * (b - a);
  const Slope s = segment_slopes_[j];
  return {p.x(), p.y(), s.is_vertical() ? 0.0 : along(s)};
}

SlopePair local_slopes(const UnivariatePlq& g, double u, double y) {
  const SubgradientGraph graph(g);
  const GraphLocation loc = graph.locate({u, y});
  if (loc.distance > kGraphSnapTolerance) {
    std::ostringstream msg;
    msg << "point (" << u << ", " << y << ") is not on the subgradient graph (distance "
        << loc.distance << ")";
    throw GraphDomainError(msg.str(), loc.distance);
  }
  return graph.slopes_at(loc);
}

UnivariatePlq plq_conjugate(const UnivariatePlq& g) {
  const SubgradientGraph graph(g);
  const auto& v = graph.vertices();
  const auto& slopes = graph.segment_slopes();
  std::vector<PlqPiece> pieces;

  // A stretch of the curve with slope s becomes a piece of g* whose
  // derivative u(y) has slope 1/s; horizontal stretches become kinks of g*.
  auto add_piece = [&](double ylo, double yhi, const Slope& s, const Eigen::Vector2d& anchor) {
    const double q = s.is_vertical() ? 0.0 : 1.0 / s.value();
    const double l = anchor.x() - q * anchor.y();
    const double at_anchor = anchor.y() * anchor.x() - g.value(anchor.x());
    const double c = at_anchor - 0.5 * q * anchor.y() * anchor.y() - l * anchor.y();
    pieces.push_back({ylo, yhi, clean_zero(q), clean_zero(l), clean_zero(c)});
  };

  if (graph.start_slope().value() > 0.0) add_piece(-kInf, v.front().y(), graph.start_slope(), v.front());
  for (std::size_t j = 0; j < slopes.size(); ++j)
    if (slopes[j].value() > 0.0) add_piece(v[j].y(), v[j + 1].y(), slopes[j], v[j]);
  if (graph.end_slope().value() > 0.0) add_piece(v.back().y(), kInf, graph.end_slope(), v.back());

  if (pieces.empty()) {
    const double y = v.front().y();
    pieces.push_back({y, y, 0.0, 0.0, clean_zero(y * v.front().x() - g.value(v.front().x()))});
  }
  return plq_canonical(UnivariatePlq(std::move(pieces)));
}

UnivariatePlq plq_canonical(const UnivariatePlq& g, double tol) {
  std::vector<PlqPiece> out;
  for (const auto& p : g.pieces()) {
    if (!out.empty() && p.lo == p.hi) continue;
    if (!out.empty() && close(out.back().quad, p.quad, tol) && close(out.back().lin, p.lin, tol)) {
      out.back().hi = p.hi;
      continue;
    }
    if (out.size() == 1 && out.back().lo == out.back().hi) out.clear();
    out.push_back(p);
  }
  return UnivariatePlq(std::move(out));
}

bool plq_approx_equal(const UnivariatePlq& a, const UnivariatePlq& b, double tol) {
  const auto ca = plq_canonical(a, tol);
  const auto cb = plq_canonical(b, tol);
  if (ca.pieces().size() != cb.pieces().size()) return false;
  for (std::size_t k = 0; k < ca.pieces().size(); ++k) {
    const auto& p = ca.pieces()[k];
    const auto& q = cb.pieces()[k];
    if (!close(p.lo, q.lo, tol) || !close(p.hi, q.hi, tol) || !close(p.quad, q.quad, tol) ||
        !close(p.lin, q.lin, tol) || !close(p.constant, q.constant, tol))
      return false;
  }
  return true;
}

}  // namespace plqstab
