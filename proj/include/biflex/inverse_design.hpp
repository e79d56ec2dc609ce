#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "biflex/wrist.hpp"

namespace biflex {

struct DesignBounds {
  double b_min = 0.0, b_max = 0.0;          // m
  double gamma_min = 0.0, gamma_max = 0.0;  // rad
};

struct FeasibilityCell {
  double b = 0.0;      // m
  double gamma = 0.0;  // rad
  double torque = 0.0;
  double angle = 0.0;
  bool feasible = false;
};

struct DesignSolution {
  HoneycombGeometry geometry;  // with solved b, gamma
  BucklingPoint achieved;
  DesignTargets target;
  bool in_tolerance = false;
  double torque_error = 0.0;  // |achieved - target| / target
  double angle_margin = 0.0;  // limit - achieved angle, rad
};

inline DesignTargets derive_targets(const GripperSpec& grip, double payload, double tip_limit,
                                    double torque_target) {
  if (!(torque_target > 0.0))
    throw std::invalid_argument("derive_targets: torque target must be > 0");
  if (!(payload > 0.0)) throw std::invalid_argument("derive_targets: payload must be > 0");
  DesignTargets t;
  t.buckling_torque = torque_target;
  t.buckling_angle_limit = angle_limit_for(grip, tip_limit);
  t.tip_deflection_limit = tip_limit;
  t.payload = payload;
  return t;
}

namespace detail {

inline void require_bounds(const DesignBounds& b) {
  if (!(std::isfinite(b.b_min) && std::isfinite(b.b_max) && std::isfinite(b.gamma_min) &&
        std::isfinite(b.gamma_max)))
    throw std::invalid_argument("design bounds must be finite");
  if (!(b.b_min > 0.0 && b.b_max > b.b_min))
    throw std::invalid_argument("design bounds: need 0 < b_min < b_max");
  if (!(b.gamma_min >= 0.0 && b.gamma_max >= b.gamma_min && b.gamma_max < units::pi / 2.0))
    throw std::invalid_argument("design bounds: need 0 <= gamma_min <= gamma_max < pi/2");
}

}  // namespace detail

// Solve for (b, gamma) with all other geometry fixed so the assembled wrist's
// buckling point lands in the target tolerance box.
//
// Grid search over the bounds scores cells by relative torque error with the
// angle limit as a hard constraint; ties resolve to smaller gamma, then
// smaller b (stiffer free-space mode). Along the winning gamma the torque is
// then refined by bisection on b -- the buckling torque is strictly increasing
// in b -- capped at the largest b that still meets the angle limit. When no
// grid cell is feasible the best-scoring cell is refined anyway and the result
// is flagged in_tolerance = false rather than raising.
inline DesignSolution solve(const DesignTargets& targets, const HoneycombGeometry& fixed,
                            const Material& material, const DesignBounds& bounds,
                            int resolution = 200, double refine_tol = 1e-3,
                            std::vector<FeasibilityCell>* map = nullptr) {
  detail::require_bounds(bounds);
  if (!(targets.buckling_torque > 0.0))
    throw std::invalid_argument("solve: target torque must be > 0");
  if (resolution < 2) throw std::invalid_argument("solve: resolution must be >= 2");

  const double limit = targets.buckling_angle_limit;
  auto point_at = [&](double b, double gamma) {
    HoneycombGeometry g = fixed;
    g.b = b;
    g.gamma = gamma;
    return assemble(g, material).buckling;
  };

  if (map) {
    map->clear();
    map->reserve(static_cast<std::size_t>(resolution) * static_cast<std::size_t>(resolution));
  }

  // Grid pass. Iteration order (gamma ascending, b ascending) with
  // strictly-better replacement realizes the (score, gamma, b) tie-break and
  // keeps the reduction deterministic.
  double best_feasible_score = -1.0, best_feasible_gamma = 0.0;
  double best_any_score = -1.0, best_any_gamma = 0.0;
  for (int j = 0; j < resolution; ++j) {
    const double gamma =
        bounds.gamma_min + (bounds.gamma_max - bounds.gamma_min) * j / (resolution - 1.0);
    for (int i = 0; i < resolution; ++i) {
      const double b = bounds.b_min + (bounds.b_max - bounds.b_min) * i / (resolution - 1.0);
      const BucklingPoint pt = point_at(b, gamma);
      const bool feasible = pt.angle <= limit;
      const double score = std::abs(pt.torque - targets.buckling_torque) / targets.buckling_torque;
      if (map) map->push_back({b, gamma, pt.torque, pt.angle, feasible});
      if (feasible && (best_feasible_score < 0.0 || score < best_feasible_score)) {
        best_feasible_score = score;
        best_feasible_gamma = gamma;
      }
      if (best_any_score < 0.0 || score < best_any_score) {
        best_any_score = score;
        best_any_gamma = gamma;
      }
    }
  }
  const bool any_feasible = best_feasible_score >= 0.0;
  const double gamma_star = any_feasible ? best_feasible_gamma : best_any_gamma;

  // Refinement along gamma_star. Both the torque and the buckling angle grow
  // with b, so first cap b at the angle limit, then bisect for the torque.
  auto torque_of = [&](double b) { return point_at(b, gamma_star).torque; };
  auto angle_of = [&](double b) { return point_at(b, gamma_star).angle; };

  double b_hi = bounds.b_max;
  if (any_feasible && angle_of(bounds.b_max) > limit) {
    double lo = bounds.b_min, hi = bounds.b_max;
    for (int it = 0; it < 100; ++it) {
      const double mid = 0.5 * (lo + hi);
      (angle_of(mid) <= limit ? lo : hi) = mid;
    }
    b_hi = lo;
  }

  double b_star;
  if (targets.buckling_torque <= torque_of(bounds.b_min)) {
    b_star = bounds.b_min;
  } else if (targets.buckling_torque >= torque_of(b_hi)) {
    b_star = b_hi;
  } else {
    double lo = bounds.b_min, hi = b_hi;
    b_star = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
      const double torque = torque_of(b_star);
      if (std::abs(torque - targets.buckling_torque) / targets.buckling_torque < refine_tol) break;
      (torque < targets.buckling_torque ? lo : hi) = b_star;
      b_star = 0.5 * (lo + hi);
    }
  }

  DesignSolution sol;
  sol.geometry = fixed;
  sol.geometry.b = b_star;
  sol.geometry.gamma = gamma_star;
  sol.achieved = point_at(b_star, gamma_star);
  sol.target = targets;
  const ToleranceVerdict v = check_tolerance(sol.achieved, targets);
  sol.in_tolerance = v.in_tolerance;
  sol.torque_error = v.torque_error;
  sol.angle_margin = v.angle_margin;
  return sol;
}

}  // namespace biflex
