#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

#include "biflex/module_mechanics.hpp"
#include "biflex/types.hpp"
#include "biflex/units.hpp"

namespace biflex {

// Wrist range of motion; used to warn, never to clip.
inline constexpr double range_of_motion_limit = units::deg_to_rad(40.0);

// Assembled wrist: n modules on a ring of radius R behind an ideal 2-DoF
// universal joint (no yaw, no axial compression). The torque-angle law is
// linear up to the buckling point, then holds a constant plateau; modules on
// the extension side stay linear with the same stiffness (the printed
// structure carries tension), only compression-side modules buckle.
struct WristModel {
  double rotational_stiffness = 0.0;  // N*m/rad, pre-buckling
  BucklingPoint buckling;
  double plateau_torque = 0.0;  // N*m
  HoneycombGeometry geometry;
  Material material;
  bool rigid = false;  // baseline stand-in: linear law, no plateau

  static WristModel rigid_baseline(double rotational_stiffness) {
    WristModel w;
    w.rotational_stiffness = rotational_stiffness;
    w.buckling.angle = std::numeric_limits<double>::infinity();
    w.buckling.torque = std::numeric_limits<double>::infinity();
    w.plateau_torque = std::numeric_limits<double>::infinity();
    w.rigid = true;
    return w;
  }
};

inline WristModel assemble(const HoneycombGeometry& g, const Material& m) {
  const ModuleResponse resp = module_response(g, m);
  const double n = static_cast<double>(g.n_modules);
  const double r = g.ring_radius;

  // A small tilt theta about an in-plane axis at angle phi_a compresses module
  // i by delta_i = r sin(phi_i - phi_a) theta, so the restoring torque is
  // k_eq theta sum_i r^2 sin^2(phi_i - phi_a). For n >= 3 evenly spaced
  // modules the sum is n/2 for every axis; spot-check before relying on it.
  {
    double sum = 0.0;
    const double axis = 0.37;
    for (int i = 0; i < g.n_modules; ++i) {
      const double s = std::sin(2.0 * units::pi * i / n - axis);
      sum += s * s;
    }
    if (std::abs(sum - n / 2.0) > 1e-9 * (n / 2.0))
      throw std::logic_error("assemble: ring sin^2 identity violated");
  }
  const double k_rot = resp.k_eq * n * r * r / 2.0;

  // Worst-case bending axis puts one module at the full lever arm r, so
  // buckling starts when k_eq * r * theta reaches f_cr. The buckling torque
  // (n/2) r f_cr follows from the pre-buckling linear law.
  const double theta_cr = resp.f_cr / (resp.k_eq * r);

  WristModel w;
  w.rotational_stiffness = k_rot;
  w.buckling.angle = theta_cr;
  w.buckling.torque = k_rot * theta_cr;
  w.plateau_torque = w.buckling.torque;
  w.geometry = g;
  w.material = m;
  return w;
}

// Piecewise torque law: linear below the buckling angle, plateau above,
// continuous at the transition.
inline double torque_at(const WristModel& w, double angle) {
  if (angle < 0.0) throw std::invalid_argument("torque_at: angle must be >= 0");
  if (!w.rigid && angle > w.buckling.angle) return w.plateau_torque;
  return w.rotational_stiffness * angle;
}

inline TorqueDeflectionCurve predicted_curve(const WristModel& w, double max_angle, int n_samples) {
  if (!(max_angle > 0.0)) throw std::invalid_argument("predicted_curve: max_angle must be > 0");
  if (n_samples < 4) throw std::invalid_argument("predicted_curve: need at least 4 samples");
  TorqueDeflectionCurve curve;
  curve.samples.reserve(static_cast<std::size_t>(n_samples));
  for (int i = 0; i < n_samples; ++i) {
    const double theta = max_angle * static_cast<double>(i) / static_cast<double>(n_samples - 1);
    curve.samples.push_back({theta, torque_at(w, theta)});
  }
  return curve;
}

struct TipDeflection {
  double wrist_angle = 0.0;  // rad
  double deflection = 0.0;   // m, lateral fingertip travel
  bool post_buckling = false;  // at/above the plateau: deflection unbounded under this model
};

// Fingertip lateral travel under a wrist torque. Past the buckling torque the
// plateau holds no more load, so the deflection is reported at the buckling
// angle (a lower bound) with the post_buckling flag set.
inline TipDeflection tip_deflection(const WristModel& w, const GripperSpec& grip,
                                    double wrist_torque) {
  if (wrist_torque < 0.0) throw std::invalid_argument("tip_deflection: torque must be >= 0");
  TipDeflection out;
  if (!w.rigid && wrist_torque >= w.buckling.torque) {
    out.post_buckling = true;
    out.wrist_angle = w.buckling.angle;
  } else {
    out.wrist_angle = wrist_torque / w.rotational_stiffness;
  }
  out.deflection = grip.length * std::sin(out.wrist_angle);
  return out;
}

// Largest wrist angle that keeps the fingertip within tip_limit lateral travel.
inline double angle_limit_for(const GripperSpec& grip, double tip_limit) {
  if (!(tip_limit > 0.0))
    throw std::invalid_argument("tip deflection limit must be > 0");
  if (!(grip.length > 0.0)) throw std::invalid_argument("gripper length must be > 0");
  if (tip_limit >= grip.length)
    throw std::invalid_argument("tip deflection limit must be smaller than the gripper length");
  return std::asin(tip_limit / grip.length);
}

}  // namespace biflex
