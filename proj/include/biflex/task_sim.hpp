#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "biflex/units.hpp"
#include "biflex/wrist.hpp"

namespace biflex {

// Everything here is quasi-static: the arm is an ideal position source, each
// commanded position is resolved to static equilibrium, and friction along
// sliding contacts is ignored.
struct ContactScenario {
  WristModel wrist;  // BiFlex model or rigid stand-in
  GripperSpec gripper;
  double sponge_stiffness = 3000.0;    // N/m, in-hand compliant element
  double sponge_travel = 5.0e-3;       // m, compression cap (sponge thickness)
  double residual_stiffness = 1400.0;  // N/m, fingertip/structure contact compliance
  double safety_force = 15.0;          // N
};

struct TraceSample {
  double command = 0.0;        // scenario-specific scalar, m
  double contact_force = 0.0;  // N
  double wrist_torque = 0.0;   // N*m
  double wrist_angle = 0.0;    // rad
  double tip_deflection = 0.0; // m
};

struct SimTrace {
  std::vector<TraceSample> samples;
  bool terminated_early = false;
  std::string reason;
  bool buckled = false;
  bool success = false;
  double peak_force = 0.0;
};

namespace detail {

inline void require_scenario(const ContactScenario& s) {
  if (!(s.safety_force > 0.0)) throw std::invalid_argument("scenario: safety_force must be > 0");
  if (!(s.sponge_stiffness > 0.0))
    throw std::invalid_argument("scenario: sponge_stiffness must be > 0");
  if (!(s.sponge_travel > 0.0)) throw std::invalid_argument("scenario: sponge_travel must be > 0");
  if (!(s.residual_stiffness > 0.0))
    throw std::invalid_argument("scenario: residual_stiffness must be > 0");
  if (!(s.gripper.length > 0.0)) throw std::invalid_argument("scenario: gripper length must be > 0");
}

// Contact-chain compression under force f: the sponge up to its travel cap
// (bottomed out it transmits load rigidly), then the residual interface.
inline double contact_compression(const ContactScenario& s, double f) {
  return std::min(f / s.sponge_stiffness, s.sponge_travel) + f / s.residual_stiffness;
}

inline double fingertip_force(const ContactScenario& s, double theta) {
  if (theta <= 0.0) return 0.0;
  return torque_at(s.wrist, theta) / (s.gripper.length * std::cos(theta));
}

// Static equilibrium at vertical interference i: the wrist rotates by theta,
// relieving L sin(theta) of it; the rest is absorbed by the contact chain
// carrying the fingertip force F(theta) = tau(theta) / (L cos(theta)). The
// residual g(theta) = compression(F) + L sin(theta) - i increases strictly in
// theta, so bisection is safe. Returns (theta, force).
inline std::pair<double, double> solve_interference(const ContactScenario& s, double interference) {
  if (interference <= 0.0) return {0.0, 0.0};
  const double len = s.gripper.length;
  if (interference >= len)
    throw analysis_error("interference exceeds the gripper length; kinematically impossible");
  auto residual = [&](double theta) {
    return contact_compression(s, fingertip_force(s, theta)) + len * std::sin(theta) -
           interference;
  };
  double lo = 0.0;
  double hi = std::asin(interference / len);  // L sin(hi) = i, so residual(hi) >= 0
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    (residual(mid) < 0.0 ? lo : hi) = mid;
  }
  const double theta = 0.5 * (lo + hi);
  return {theta, fingertip_force(s, theta)};
}

inline void push_sample(SimTrace& tr, const ContactScenario& s, double command, double theta,
                        double force) {
  TraceSample sample;
  sample.command = command;
  sample.contact_force = force;
  sample.wrist_torque = theta > 0.0 ? torque_at(s.wrist, theta) : 0.0;
  sample.wrist_angle = theta;
  sample.tip_deflection = s.gripper.length * std::sin(theta);
  tr.samples.push_back(sample);
  tr.peak_force = std::max(tr.peak_force, force);
  if (!s.wrist.rigid && theta > s.wrist.buckling.angle) tr.buckled = true;
}

// True when the trace must stop: the sample that crossed the limit stays
// recorded, so a terminated trace always ends at contact_force >= safety.
inline bool safety_cutoff(SimTrace& tr, const ContactScenario& s, double force) {
  if (force < s.safety_force) return false;
  tr.terminated_early = true;
  tr.reason = "safety force limit reached";
  return true;
}

}  // namespace detail

// Pressing test: fingertips on a rigid frame, rigid arm. Commanded descent is
// absorbed entirely by wrist rotation, so the sweep runs directly over the
// wrist angle; the recorded command is the descent L sin(theta).
inline SimTrace simulate_press(const ContactScenario& scenario, double max_wrist_angle,
                               double step) {
  detail::require_scenario(scenario);
  if (!(max_wrist_angle > 0.0))
    throw std::invalid_argument("simulate_press: max_wrist_angle must be > 0");
  if (!(step > 0.0)) throw std::invalid_argument("simulate_press: step must be > 0");

  std::vector<double> grid;
  for (double theta = 0.0; theta < max_wrist_angle; theta += step) grid.push_back(theta);
  grid.push_back(max_wrist_angle);

  SimTrace tr;
  for (const double theta : grid) {
    const double force = detail::fingertip_force(scenario, theta);
    detail::push_sample(tr, scenario, scenario.gripper.length * std::sin(theta), theta, force);
    if (detail::safety_cutoff(tr, scenario, force)) break;
  }
  tr.success = !tr.terminated_early;
  return tr;
}

// Piecewise-linear surface height over horizontal position, x from 0.
struct SurfaceProfile {
  std::vector<std::pair<double, double>> points;  // (x, height), x strictly increasing

  double length() const { return points.back().first; }

  double height_at(double x) const {
    if (x <= points.front().first) return points.front().second;
    for (std::size_t i = 1; i < points.size(); ++i) {
      if (x <= points[i].first) {
        const auto& [x0, h0] = points[i - 1];
        const auto& [x1, h1] = points[i];
        return h0 + (h1 - h0) * (x - x0) / (x1 - x0);
      }
    }
    return points.back().second;
  }

  static SurfaceProfile triangle(double height, double slope_angle) {
    if (!(height > 0.0)) throw std::invalid_argument("triangle: height must be > 0");
    if (!(slope_angle > 0.0 && slope_angle < units::pi / 2.0))
      throw std::invalid_argument("triangle: slope must be in (0, 90) deg");
    const double run = height / std::tan(slope_angle);
    return SurfaceProfile{{{0.0, 0.0}, {run, height}, {2.0 * run, 0.0}}};
  }

  static SurfaceProfile flat(double length) {
    if (!(length > 0.0)) throw std::invalid_argument("flat: length must be > 0");
    return SurfaceProfile{{{0.0, 0.0}, {length, 0.0}}};
  }
};

inline void require_profile(const SurfaceProfile& p) {
  if (p.points.size() < 2) throw std::invalid_argument("profile: need at least 2 points");
  if (p.points.front().first != 0.0) throw std::invalid_argument("profile: must start at x = 0");
  for (std::size_t i = 1; i < p.points.size(); ++i)
    if (!(p.points[i].first > p.points[i - 1].first))
      throw std::invalid_argument("profile: x must be strictly increasing (negative-length segment)");
}

// Wiping test: slide along the profile with a constant engagement depth. At
// each x the interference profile(x) + approach_depth splits between sponge
// compression and wrist-rotation lift by force balance. Profile breakpoints
// are merged into the x grid so peaks are sampled exactly.
inline SimTrace simulate_wipe(const ContactScenario& scenario, const SurfaceProfile& profile,
                              double approach_depth, double step) {
  detail::require_scenario(scenario);
  require_profile(profile);
  if (!(approach_depth > 0.0))
    throw std::invalid_argument("simulate_wipe: approach_depth must be > 0");
  if (!(step > 0.0)) throw std::invalid_argument("simulate_wipe: step must be > 0");

  const double end = profile.length();
  std::vector<double> grid;
  for (double x = 0.0; x < end; x += step) grid.push_back(x);
  grid.push_back(end);
  for (const auto& [x, h] : profile.points)
    if (x > 0.0 && x < end) grid.push_back(x);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end(),
                         [](double a, double b) { return std::abs(a - b) < 1e-12; }),
             grid.end());

  SimTrace tr;
  for (const double x : grid) {
    const double interference = profile.height_at(x) + approach_depth;
    const auto [theta, force] = detail::solve_interference(scenario, interference);
    detail::push_sample(tr, scenario, x, theta, force);
    if (detail::safety_cutoff(tr, scenario, force)) break;
  }
  tr.success = !tr.terminated_early;
  return tr;
}

// Pick-and-place static check: the object hangs at `lever` from the wrist
// axis in a horizontal hold, loading the wrist with m g lever.
struct PickReport {
  double object_mass = 0.0;   // kg
  double lever = 0.0;         // m
  double wrist_torque = 0.0;  // N*m
  bool buckled = false;
  double tip_deflection = 0.0;  // m
  bool deflection_unbounded = false;
  bool pass = false;
};

inline PickReport check_pick_place(const WristModel& model, const GripperSpec& gripper,
                                   double object_mass, double lever = 0.0,
                                   double deflection_limit = 0.010) {
  if (object_mass < 0.0) throw std::invalid_argument("check_pick_place: mass must be >= 0");
  PickReport rep;
  rep.object_mass = object_mass;
  rep.lever = lever > 0.0 ? lever : gripper.length;
  rep.wrist_torque = object_mass * units::standard_gravity * rep.lever;
  rep.buckled = !model.rigid && rep.wrist_torque >= model.buckling.torque;
  const TipDeflection td = tip_deflection(model, gripper, rep.wrist_torque);
  rep.tip_deflection = td.deflection;
  rep.deflection_unbounded = td.post_buckling;
  rep.pass = !rep.buckled && rep.tip_deflection < deflection_limit;
  return rep;
}

// Constrained grasp: fingers slide on a rigid table while the hand is
// commanded d below the surface. A compliant wrist absorbs d kinematically
// (theta = asin(d / L)); the rigid baseline pushes through its residual
// contact stiffness instead.
struct GraspOutcome {
  double depth = 0.0;          // m
  double contact_force = 0.0;  // N
  double wrist_angle = 0.0;    // rad
  double wrist_torque = 0.0;   // N*m
  bool buckled = false;
  bool success = false;
};

inline std::vector<GraspOutcome> simulate_constrained_grasp(const ContactScenario& scenario,
                                                            const std::vector<double>& depths) {
  detail::require_scenario(scenario);
  std::vector<GraspOutcome> out;
  out.reserve(depths.size());
  for (const double d : depths) {
    if (d < 0.0) throw std::invalid_argument("simulate_constrained_grasp: depth must be >= 0");
    if (d >= scenario.gripper.length)
      throw analysis_error("simulate_constrained_grasp: depth " +
                           std::to_string(units::m_to_mm(d)) +
                           " mm >= gripper length; kinematically impossible");
    GraspOutcome g;
    g.depth = d;
    if (scenario.wrist.rigid) {
      g.contact_force = scenario.residual_stiffness * d;
    } else if (d > 0.0) {
      g.wrist_angle = std::asin(d / scenario.gripper.length);
      g.wrist_torque = torque_at(scenario.wrist, g.wrist_angle);
      g.contact_force = g.wrist_torque / (scenario.gripper.length * std::cos(g.wrist_angle));
      g.buckled = g.wrist_angle > scenario.wrist.buckling.angle;
    }
    g.success = g.contact_force < scenario.safety_force;
    out.push_back(g);
  }
  return out;
}

}  // namespace biflex
