#include "plqstab/planar_cones.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace plqstab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kTol = PlanarConeUnion::kAngleTolerance;

double cross(const Eigen::Vector2d& a, const Eigen::Vector2d& b) { return a.x() * b.y() - a.y() * b.x(); }

double angle_between(const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return std::atan2(std::abs(cross(a, b)), a.dot(b));
}

Eigen::Vector2d unit(double angle) { return {std::cos(angle), std::sin(angle)}; }

// Leaves vectors that are already unit untouched so repeated construction is bit-stable.
Eigen::Vector2d as_unit(const Eigen::Vector2d& d) {
  const double n = d.norm();
  return std::abs(n - 1.0) <= 1e-15 ? d : Eigen::Vector2d(d / n);
}

// Counterclockwise arc of directions starting at `start`.
struct Arc {
  double start = 0.0;
  double length = 0.0;
  Eigen::Vector2d start_dir;
  Eigen::Vector2d end_dir;

  double end() const { return start + length; }
};

Arc point_arc(const Eigen::Vector2d& d) { return {polar_angle(d), 0.0, d, d}; }

void append_arcs(const PlanarCone& c, std::vector<Arc>& arcs) {
  switch (c.kind) {
    case PlanarCone::Kind::line:
      arcs.push_back(point_arc(c.first));
      arcs.push_back(point_arc(-c.first));
      break;
    case PlanarCone::Kind::ray:
      arcs.push_back(point_arc(c.first));
      break;
    case PlanarCone::Kind::wedge: {
      const double a = polar_angle(c.first);
      double len = polar_angle(c.second) - a;
      if (len < 0.0) len += kTwoPi;
      arcs.push_back({a, len, c.first, c.second});
      break;
    }
  }
}

std::vector<PlanarCone> full_plane() {
  std::vector<PlanarCone> out;
  for (int j = 0; j < 3; ++j) {
    PlanarCone c;
    c.kind = PlanarCone::Kind::wedge;
    c.first = j == 0 ? Eigen::Vector2d::UnitX() : unit(j * kTwoPi / 3.0);
    c.second = j == 2 ? Eigen::Vector2d::UnitX() : unit((j + 1) * kTwoPi / 3.0);
    out.push_back(c);
  }
  return out;
}

std::vector<PlanarCone> canonical_cones(std::vector<Arc> arcs) {
  if (arcs.empty()) return {};
  std::sort(arcs.begin(), arcs.end(), [](const Arc& a, const Arc& b) {
    return a.start < b.start || (a.start == b.start && a.length > b.length);
  });

  std::vector<Arc> merged;
  for (const auto& arc : arcs) {
    if (!merged.empty() && arc.start <= merged.back().end() + kTol) {
      Arc& back = merged.back();
      if (arc.end() > back.end()) {
        back.length = arc.end() - back.start;
        back.end_dir = arc.end_dir;
      }
      continue;
    }
    merged.push_back(arc);
  }
  while (merged.size() > 1 && merged.back().end() >= merged.front().start + kTwoPi - kTol) {
    Arc& last = merged.back();
    const Arc& first = merged.front();
    if (first.end() + kTwoPi > last.end()) {
      last.length = first.end() + kTwoPi - last.start;
      last.end_dir = first.end_dir;
    }
    merged.erase(merged.begin());
  }
  for (const auto& arc : merged)
    if (arc.length >= kTwoPi - kTol) return full_plane();

  std::vector<PlanarCone> cones;
  std::vector<Eigen::Vector2d> points;
  for (const auto& arc : merged) {
    if (arc.length <= kTol) {
      points.push_back(arc.start_dir);
    } else if (arc.length < kPi - kTol) {
      PlanarCone c;
      c.kind = PlanarCone::Kind::wedge;
      c.first = arc.start_dir;
      c.second = arc.end_dir;
      cones.push_back(c);
    } else {
      const int parts = std::max(2, static_cast<int>(arc.length / (0.5 * kPi)));
      Eigen::Vector2d previous = arc.start_dir;
      for (int j = 1; j <= parts; ++j) {
        const Eigen::Vector2d next = j == parts ? arc.end_dir : unit(arc.start + j * arc.length / parts);
        PlanarCone c;
        c.kind = PlanarCone::Kind::wedge;
        c.first = previous;
        c.second = next;
        cones.push_back(c);
        previous = next;
      }
    }
  }

  std::vector<bool> used(points.size(), false);
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (used[i]) continue;
    used[i] = true;
    std::size_t partner = points.size();
    for (std::size_t j = i + 1; j < points.size(); ++j)
      if (!used[j] && std::abs(std::abs(polar_angle(points[j]) - polar_angle(points[i])) - kPi) <= kTol) {
        partner = j;
        break;
      }
    PlanarCone c;
    c.first = points[i];
    if (partner < points.size()) {
      used[partner] = true;
      c.kind = PlanarCone::Kind::line;
      if (polar_angle(points[partner]) < polar_angle(points[i])) c.first = points[partner];
    } else {
      c.kind = PlanarCone::Kind::ray;
    }
    c.second = c.first;
    cones.push_back(c);
  }

  std::sort(cones.begin(), cones.end(), [](const PlanarCone& a, const PlanarCone& b) {
    const double ta = polar_angle(a.first);
    const double tb = polar_angle(b.first);
    if (ta != tb) return ta < tb;
    return static_cast<int>(a.kind) < static_cast<int>(b.kind);
  });
  return cones;
}

double ray_distance(const Eigen::Vector2d& d, const Eigen::Vector2d& p) {
  const double t = std::max(0.0, p.dot(d));
  return (p - t * d).norm();
}

bool is_vertical(const Eigen::Vector2d& d) { return std::abs(d.x()) <= 1e-15; }

void ray_fiber(const Eigen::Vector2d& d, double a, std::vector<Interval>& out) {
  if (is_vertical(d)) {
    if (a == 0.0) out.push_back(d.y() > 0.0 ? Interval{0.0, kInf} : Interval{-kInf, 0.0});
    return;
  }
  const double t = a / d.x();
  if (t >= 0.0) out.push_back({t * d.y(), t * d.y()});
}

void format_direction(std::ostream& out, const Eigen::Vector2d& d) {
  auto clean = [](double t) { return std::abs(t) < 5e-16 ? 0.0 : t; };
  out << "(" << clean(d.x()) << ", " << clean(d.y()) << ")";
}

}  // namespace

double polar_angle(const Eigen::Vector2d& d) {
  double a = std::atan2(d.y(), d.x());
  if (a < 0.0) a += kTwoPi;
  if (a >= kTwoPi) a = 0.0;
  return a;
}

PlanarCone PlanarCone::line(const Eigen::Vector2d& d) { return {Kind::line, as_unit(d), as_unit(d)}; }

PlanarCone PlanarCone::ray(const Eigen::Vector2d& d) { return {Kind::ray, as_unit(d), as_unit(d)}; }

PlanarCone PlanarCone::wedge(const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  const Eigen::Vector2d ua = as_unit(a);
  const Eigen::Vector2d ub = as_unit(b);
  const double c = cross(ua, ub);
  if (c == 0.0) throw std::invalid_argument("wedge generators must not be collinear");
  return c > 0.0 ? PlanarCone{Kind::wedge, ua, ub} : PlanarCone{Kind::wedge, ub, ua};
}

double PlanarCone::distance(const Eigen::Vector2d& p) const {
  switch (kind) {
    case Kind::line:
      return (p - p.dot(first) * first).norm();
    case Kind::ray:
      return ray_distance(first, p);
    case Kind::wedge:
      if (cross(first, p) >= 0.0 && cross(p, second) >= 0.0) return 0.0;
      return std::min(ray_distance(first, p), ray_distance(second, p));
  }
  return kInf;
}

bool PlanarCone::contains(const Eigen::Vector2d& p, double tol) const { return distance(p) <= tol; }

PlanarConeUnion::PlanarConeUnion(const std::vector<PlanarCone>& cones) {
  std::vector<Arc> arcs;
  for (const auto& c : cones) append_arcs(c, arcs);
  cones_ = canonical_cones(std::move(arcs));
}

PlanarConeUnion PlanarConeUnion::generated_by(const std::vector<Eigen::Vector2d>& generators) {
  std::vector<Eigen::Vector2d> dirs;
  for (const auto& g : generators)
    if (g.norm() > 0.0) dirs.push_back(as_unit(g));
  PlanarConeUnion result;
  if (dirs.empty()) return result;
  std::sort(dirs.begin(), dirs.end(),
            [](const Eigen::Vector2d& a, const Eigen::Vector2d& b) { return polar_angle(a) < polar_angle(b); });

  // The cone is the complement of the largest angular gap between generators.
  std::size_t gap_at = dirs.size() - 1;
  double widest = -1.0;
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    const std::size_t j = (i + 1) % dirs.size();
    const double gap = polar_angle(dirs[j]) - polar_angle(dirs[i]) + (j == 0 ? kTwoPi : 0.0);
    if (gap > widest) {
      widest = gap;
      gap_at = i;
    }
  }
  const Eigen::Vector2d start = dirs[(gap_at + 1) % dirs.size()];
  const Eigen::Vector2d stop = dirs[gap_at];

  if (widest < kPi - kTol) {
    result.cones_ = full_plane();
    return result;
  }
  if (widest <= kPi + kTol) {
    const double a = polar_angle(start);
    const bool only_ends = std::all_of(dirs.begin(), dirs.end(), [&](const Eigen::Vector2d& d) {
      return angle_between(d, start) <= kTol || angle_between(d, stop) <= kTol;
    });
    if (only_ends) return PlanarConeUnion({PlanarCone::line(start)});
    result.cones_ = canonical_cones({Arc{a, kPi, start, stop}});
    return result;
  }
  const double length = kTwoPi - widest;
  result.cones_ = canonical_cones({Arc{polar_angle(start), length <= kTol ? 0.0 : length, start, stop}});
  return result;
}

double PlanarConeUnion::distance(const Eigen::Vector2d& p) const {
  double best = kInf;
  for (const auto& c : cones_) best = std::min(best, c.distance(p));
  return best;
}

bool PlanarConeUnion::contains(const Eigen::Vector2d& p, double tol) const { return distance(p) <= tol; }

double PlanarConeUnion::angular_distance(const Eigen::Vector2d& direction) const {
  const Eigen::Vector2d w = direction.normalized();
  double best = kInf;
  for (const auto& c : cones_) {
    switch (c.kind) {
      case PlanarCone::Kind::line:
        best = std::min({best, angle_between(w, c.first), angle_between(w, -c.first)});
        break;
      case PlanarCone::Kind::ray:
        best = std::min(best, angle_between(w, c.first));
        break;
      case PlanarCone::Kind::wedge:
        if (cross(c.first, w) >= 0.0 && cross(w, c.second) >= 0.0) return 0.0;
        best = std::min({best, angle_between(w, c.first), angle_between(w, c.second)});
        break;
    }
  }
  return best;
}

std::vector<Interval> PlanarConeUnion::fiber(double a) const {
  std::vector<Interval> pieces;
  for (const auto& c : cones_) {
    switch (c.kind) {
      case PlanarCone::Kind::line:
        if (is_vertical(c.first)) {
          if (a == 0.0) pieces.push_back({-kInf, kInf});
        } else {
          const double y = a * c.first.y() / c.first.x();
          pieces.push_back({y, y});
        }
        break;
      case PlanarCone::Kind::ray:
        ray_fiber(c.first, a, pieces);
        break;
      case PlanarCone::Kind::wedge: {
        const bool up = c.contains(Eigen::Vector2d::UnitY());
        const bool down = c.contains(-Eigen::Vector2d::UnitY());
        if (a == 0.0) {
          pieces.push_back({down ? -kInf : 0.0, up ? kInf : 0.0});
          break;
        }
        std::vector<Interval> hits;
        ray_fiber(c.first, a, hits);
        ray_fiber(c.second, a, hits);
        if (hits.empty()) break;
        Interval span{kInf, -kInf};
        for (const auto& h : hits) {
          span.lo = std::min(span.lo, h.lo);
          span.hi = std::max(span.hi, h.hi);
        }
        if (up) span.hi = kInf;
        if (down) span.lo = -kInf;
        pieces.push_back(span);
        break;
      }
    }
  }
  std::sort(pieces.begin(), pieces.end(), [](const Interval& x, const Interval& y) { return x.lo < y.lo; });
  std::vector<Interval> merged;
  for (const auto& p : pieces) {
    if (!merged.empty() && p.lo <= merged.back().hi)
      merged.back().hi = std::max(merged.back().hi, p.hi);
    else
      merged.push_back(p);
  }
  return merged;
}

PlanarConeUnion PlanarConeUnion::negated() const {
  std::vector<PlanarCone> flipped = cones_;
  for (auto& c : flipped) {
    c.first = -c.first;
    c.second = -c.second;
  }
  return PlanarConeUnion(flipped);
}

PlanarConeUnion PlanarConeUnion::united(const PlanarConeUnion& other) const {
  std::vector<PlanarCone> all = cones_;
  all.insert(all.end(), other.cones_.begin(), other.cones_.end());
  return PlanarConeUnion(all);
}

std::vector<Eigen::Vector2d> PlanarConeUnion::extreme_rays() const {
  std::vector<Eigen::Vector2d> out;
  for (const auto& c : cones_) {
    switch (c.kind) {
      case PlanarCone::Kind::line:
        out.push_back(c.first);
        out.push_back(-c.first);
        break;
      case PlanarCone::Kind::ray:
        out.push_back(c.first);
        break;
      case PlanarCone::Kind::wedge:
        out.push_back(c.first);
        out.push_back(c.second);
        break;
    }
  }
  return out;
}

std::string PlanarConeUnion::describe() const {
  if (cones_.empty()) return "EMPTY";
  std::ostringstream out;
  out.precision(9);
  for (std::size_t k = 0; k < cones_.size(); ++k) {
    if (k > 0) out << " u ";
    const auto& c = cones_[k];
    switch (c.kind) {
      case PlanarCone::Kind::line:
        out << "LINE";
        format_direction(out, c.first);
        break;
      case PlanarCone::Kind::ray:
        out << "RAY";
        format_direction(out, c.first);
        break;
      case PlanarCone::Kind::wedge:
        out << "WEDGE(";
        format_direction(out, c.first);
        out << ", ";
        format_direction(out, c.second);
        out << ")";
        break;
    }
  }
  return out.str();
}

bool approx_equal(const PlanarConeUnion& a, const PlanarConeUnion& b, double tol) {
  if (a.cones().size() != b.cones().size()) return false;
  for (std::size_t k = 0; k < a.cones().size(); ++k) {
    const auto& p = a.cones()[k];
    const auto& q = b.cones()[k];
    if (p.kind != q.kind || (p.first - q.first).norm() > tol || (p.second - q.second).norm() > tol) return false;
  }
  return true;
}

}  // namespace plqstab
