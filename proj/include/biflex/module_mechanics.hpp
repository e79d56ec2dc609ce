#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "biflex/detail/small_linalg.hpp"
#include "biflex/types.hpp"
#include "biflex/units.hpp"

namespace biflex {

// Derived per-module quantities under a centered vertical load.
struct ModuleResponse {
  double k1 = 0.0;    // diagonal-beam axial stiffness, N/m
  double k2 = 0.0;    // central-beam axial stiffness, N/m
  double k_eq = 0.0;  // effective vertical module stiffness, N/m
  double f_cr = 0.0;  // vertical load at which a diagonal beam buckles, N
  double delta_y_at_buckling = 0.0;  // m
};

// Full state of one loaded module as solved by the spring-network oracle.
struct ModuleState {
  double f_i = 0.0;      // applied vertical load, N
  double delta_y = 0.0;  // vertical displacement, m
  double delta_x = 0.0;  // horizontal displacement of the side node, m
  double delta_h = 0.0;  // diagonal-beam axial shortening, m
  double f_a = 0.0;      // diagonal-beam axial force, N
};

// Axial stiffnesses of the diagonal and central beams (EA over axial length).
inline std::pair<double, double> beam_stiffnesses(const HoneycombGeometry& g, const Material& m) {
  const double k1 = m.young_modulus * g.diagonal_area() / g.diagonal_beam_length();
  const double k2 = m.young_modulus * g.central_area() / g.h_c;
  return {k1, k2};
}

// Effective vertical stiffness of one module.
//
// Load path: each diagonal carries f_a = f_i / (2 cos g) axially; the
// horizontal component f_a sin g compresses the central beam, letting the side
// node move out by delta_x = f_a sin g / k2; that motion feeds back into the
// diagonal shortening delta_h = delta_y cos g - delta_x sin g. Eliminating the
// internal unknowns:
//
//   k_eq = 2 k1 k2 cos^2 g / (k2 + k1 sin^2 g)
//
// The central-beam term carries sin^2 g: one sine from the force component
// loading the beam, one from delta_x feeding back into the diagonal
// shortening. At g = 0 the central beam is unloaded and the two diagonals act
// in parallel, k_eq = 2 k1. A rigid central beam (k2 -> inf) leaves
// k_eq = 2 k1 cos^2 g.
inline double effective_stiffness(const HoneycombGeometry& g, const Material& m) {
  const auto [k1, k2] = beam_stiffnesses(g, m);
  const double c = std::cos(g.gamma);
  const double s = std::sin(g.gamma);
  return 2.0 * k1 * k2 * c * c / (k2 + k1 * s * s);
}

// Vertical module load at which a diagonal beam reaches its Euler critical
// load. The beam buckles about its thin axis (I = L b^3 / 12) at
// p_cr = pi^2 E I / (kappa h)^2, where h is the diagonal beam length stated
// explicitly (not pre-substituted) so the effective-length factor kappa can
// rescale it: kappa = 1 is pinned-pinned, printed ends are closer to clamped.
// The module load producing axial force p_cr in a diagonal is
// f_cr = 2 p_cr cos g.
inline double critical_module_load(const HoneycombGeometry& g, const Material& m) {
  const double h = g.diagonal_beam_length();
  const double h_eff = g.boundary_factor * h;
  const double p_cr = units::pi * units::pi * m.young_modulus * g.second_moment() / (h_eff * h_eff);
  return 2.0 * p_cr * std::cos(g.gamma);
}

inline ModuleResponse module_response(const HoneycombGeometry& g, const Material& m) {
  ModuleResponse r;
  const auto [k1, k2] = beam_stiffnesses(g, m);
  r.k1 = k1;
  r.k2 = k2;
  r.k_eq = effective_stiffness(g, m);
  r.f_cr = critical_module_load(g, m);
  r.delta_y_at_buckling = r.f_cr / r.k_eq;
  return r;
}

// Independent check of the closed forms: assemble the three-spring module
// (two diagonals at +/-g with stiffness k1, one horizontal central spring k2),
// impose the symmetric load split, and solve the 2x2 equilibrium system for
// (delta_y, delta_x) numerically:
//
//   vertical at the loaded plate:  2 cos(g) k1 (dy cos g - dx sin g) = f_i
//   horizontal at the side node:       sin(g) k1 (dy cos g - dx sin g) = k2 dx
//
// The solution is expected to satisfy, exactly, the compatibility and
// force-balance identities delta_h = dy cos g - dx sin g, f_a = f_i/(2 cos g),
// f_a = k1 delta_h and k2 dx = f_a sin g.
inline ModuleState oracle_solve(const HoneycombGeometry& g, const Material& m, double f_i) {
  if (f_i < 0.0) throw std::invalid_argument("oracle_solve: f_i must be >= 0");
  const auto [k1, k2] = beam_stiffnesses(g, m);
  const double c = std::cos(g.gamma);
  const double s = std::sin(g.gamma);
  const std::vector<double> a = {2.0 * k1 * c * c, -2.0 * k1 * c * s,
                                 k1 * s * c, -(k1 * s * s + k2)};
  const std::vector<double> rhs = {f_i, 0.0};
  std::vector<double> x;
  if (!detail::solve_dense(a, rhs, 2, x))
    throw analysis_error("oracle_solve: singular spring system (cos gamma = 0?)");
  ModuleState st;
  st.f_i = f_i;
  st.delta_y = x[0];
  st.delta_x = x[1];
  st.delta_h = st.delta_y * c - st.delta_x * s;
  st.f_a = k1 * st.delta_h;
  return st;
}

}  // namespace biflex
