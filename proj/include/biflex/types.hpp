#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "biflex/units.hpp"

namespace biflex {

// Unreadable or malformed input: missing files, bad JSON/CSV, schema or
// invariant violations at the file boundary. The CLI maps these to exit 2.
class parse_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Valid inputs for which the requested analysis has no answer: no plateau in
// a measured curve, an underdetermined calibration, impossible kinematics.
// The CLI maps these to exit 1.
class analysis_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Material {
  std::string name;
  double young_modulus = 0.0;  // Pa
};

// One buckling cell: two diagonal beams tilted +/-gamma from vertical, joined
// by a horizontal central beam, extruded to depth L. n_modules cells sit on a
// ring of radius ring_radius around the wrist axis.
struct HoneycombGeometry {
  double b = 0.0;      // diagonal-beam width, m
  double b_c = 0.0;    // central-beam width, m
  double L = 0.0;      // out-of-plane depth of the cell, m
  double h_c = 0.0;    // central-beam height (its axial length), m
  double H = 0.0;      // total module height, m
  double gamma = 0.0;  // diagonal-beam tilt from vertical, rad
  int n_modules = 12;
  double ring_radius = 0.0;      // module centers to wrist axis, m
  double boundary_factor = 1.0;  // Euler effective-length factor on the diagonal beam

  // The diagonal beam spans half the module height, so its axial length is
  // H / (2 cos gamma).
  double diagonal_beam_length() const { return H / (2.0 * std::cos(gamma)); }
  double diagonal_area() const { return b * L; }
  double central_area() const { return b_c * L; }
  double second_moment() const { return L * b * b * b / 12.0; }
};

struct GripperSpec {
  std::string name;
  double mass = 0.0;    // kg
  double length = 0.0;  // wrist flange to fingertip, m
};

struct DesignTargets {
  double buckling_torque = 0.0;         // N*m
  double buckling_angle_limit = 0.0;    // rad
  double torque_tolerance = 0.10;       // fraction of buckling_torque
  double tip_deflection_limit = 0.010;  // m
  double payload = 0.500;               // kg
};

struct BucklingPoint {
  double angle = 0.0;   // rad
  double torque = 0.0;  // N*m
};

struct CurveSample {
  double angle = 0.0;   // rad
  double torque = 0.0;  // N*m
};

// Sampled torque-deflection data, measured or simulated. Angles strictly
// increasing.
struct TorqueDeflectionCurve {
  std::vector<CurveSample> samples;
};

inline void require_curve(const TorqueDeflectionCurve& curve, std::size_t min_samples,
                          const std::string& label) {
  if (curve.samples.size() < min_samples)
    throw analysis_error(label + ": needs at least " + std::to_string(min_samples) +
                         " samples, got " + std::to_string(curve.samples.size()));
  for (std::size_t i = 1; i < curve.samples.size(); ++i)
    if (!(curve.samples[i].angle > curve.samples[i - 1].angle))
      throw analysis_error(label + ": angles must be strictly increasing (sample " +
                           std::to_string(i) + ")");
}

// Verdict of a buckling point against a target tolerance box: torque within
// +/- torque_tolerance of the target, angle at or below the limit.
struct ToleranceVerdict {
  bool torque_ok = false;
  bool angle_ok = false;
  bool in_tolerance = false;
  double torque_error = 0.0;  // |point - target| / target
  double angle_margin = 0.0;  // limit - point angle, rad
};

inline ToleranceVerdict check_tolerance(const BucklingPoint& point, const DesignTargets& t) {
  ToleranceVerdict v;
  v.torque_error = std::abs(point.torque - t.buckling_torque) / t.buckling_torque;
  v.angle_margin = t.buckling_angle_limit - point.angle;
  v.torque_ok = v.torque_error <= t.torque_tolerance;
  v.angle_ok = point.angle <= t.buckling_angle_limit;
  v.in_tolerance = v.torque_ok && v.angle_ok;
  return v;
}

enum class CheckStatus { pass, warn, fail };

struct Check {
  CheckStatus status = CheckStatus::pass;
  std::string name;
  std::string message;
};

struct ValidationReport {
  std::vector<Check> checks;

  bool ok() const {
    for (const auto& c : checks)
      if (c.status == CheckStatus::fail) return false;
    return true;
  }

  std::vector<std::string> failures() const {
    std::vector<std::string> out;
    for (const auto& c : checks)
      if (c.status == CheckStatus::fail) out.push_back(c.name + ": " + c.message);
    return out;
  }
};

// One module plus its share of the adapter plates has to fit the 40 mm wrist
// height, leaving about 21 mm for the honeycomb itself. Exceeding it is a
// warning, not an error.
inline constexpr double module_height_budget = 0.021;  // m

inline ValidationReport validate(const HoneycombGeometry& g) {
  ValidationReport rep;
  auto check = [&rep](bool ok, const std::string& name, const std::string& fail_msg) {
    rep.checks.push_back({ok ? CheckStatus::pass : CheckStatus::fail, name,
                          ok ? "ok" : fail_msg});
  };
  check(g.b > 0.0, "b", "b must be positive");
  check(g.b_c > 0.0, "b_c", "b_c must be positive");
  check(g.L > 0.0, "L", "L must be positive");
  check(g.h_c > 0.0, "h_c", "h_c must be positive");
  check(g.H > 0.0, "H", "H must be positive");
  check(g.gamma >= 0.0 && g.gamma < units::pi / 2.0, "gamma",
        "gamma must satisfy 0 <= gamma < 90 deg (cos gamma = 0 is singular)");
  check(g.n_modules >= 3, "n_modules",
        "ring aggregation requires at least 3 modules");
  check(g.ring_radius > 0.0, "ring_radius", "ring_radius must be positive");
  check(g.boundary_factor > 0.0, "boundary_factor", "boundary_factor must be positive");
  if (g.H > 0.0 && g.gamma >= 0.0 && g.gamma < units::pi / 2.0) {
    check(g.diagonal_beam_length() > 0.0, "diagonal_beam_length",
          "derived diagonal beam length must be positive");
  }
  if (g.H > module_height_budget) {
    rep.checks.push_back({CheckStatus::warn, "module_height_budget",
                          "H exceeds the 21 mm module height budget"});
  }
  return rep;
}

inline void require_valid(const HoneycombGeometry& g, const std::string& label = "geometry") {
  const auto rep = validate(g);
  if (rep.ok()) return;
  std::string msg = label + ": invalid:";
  for (const auto& f : rep.failures()) msg += " [" + f + "]";
  throw parse_error(msg);
}

}  // namespace biflex
