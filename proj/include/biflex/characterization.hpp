#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "biflex/detail/small_linalg.hpp"
#include "biflex/wrist.hpp"

namespace biflex {

// Knobs of the buckling-point extraction. The rising branch is fitted with a
// least-squares line over samples whose torque lies in
// [window_low, window_high] of the peak; interp_level is the interpolation
// line's nominal level (the fit window's upper end by default).
struct ExtractionParams {
  double window_low = 0.20;
  double window_high = 0.80;
  double interp_level = 0.80;
  double plateau_tolerance = 0.02;  // band half-width around the plateau level, fraction of peak
};

namespace detail {

inline void require_params(const ExtractionParams& p) {
  if (!(p.window_low > 0.0 && p.window_low < p.window_high && p.window_high <= p.interp_level &&
        p.interp_level <= 1.0))
    throw std::invalid_argument(
        "extraction params: need 0 < window_low < window_high <= interp_level <= 1");
  if (!(p.plateau_tolerance > 0.0 && p.plateau_tolerance < 1.0))
    throw std::invalid_argument("extraction params: plateau_tolerance must be in (0, 1)");
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

inline LineFit fit_line(const std::vector<CurveSample>& pts) {
  const double n = static_cast<double>(pts.size());
  double sx = 0.0, sy = 0.0;
  for (const auto& p : pts) {
    sx += p.angle;
    sy += p.torque;
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& p : pts) {
    sxx += (p.angle - mx) * (p.angle - mx);
    sxy += (p.angle - mx) * (p.torque - my);
  }
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  return f;
}

}  // namespace detail

struct CharacterizationReport {
  BucklingPoint extracted;
  double peak_torque = 0.0;
  double pre_buckling_stiffness = 0.0;  // N*m/rad, fitted rising slope
  double fit_intercept = 0.0;           // N*m
  double plateau_level = 0.0;           // N*m, == extracted.torque
  // Per-curve results when averaging replicates (one entry per input curve).
  std::vector<BucklingPoint> replicates;
  double angle_spread = 0.0;   // max |replicate - mean|, rad
  double torque_spread = 0.0;  // max |replicate - mean|, N*m
  std::optional<ToleranceVerdict> vs_targets;
};

// Extract the buckling point of a loading curve: fit the rising-branch
// interpolation line, estimate the plateau level, and intersect the two. The
// intersection abscissa is read on the angle axis, so the extracted point is
// (intersection angle, plateau torque).
//
// The plateau level starts from the trailing-tail mean and is re-estimated
// twice over the samples past the current knee whose torque sits within
// plateau_tolerance * peak of the level. Centering the band on the level
// rather than anchoring it below the (noise-inflated) maximum keeps the
// estimate unbiased on noisy data while staying exact on clean curves.
inline CharacterizationReport extract_buckling_point(const TorqueDeflectionCurve& curve,
                                                     const ExtractionParams& params = {}) {
  detail::require_params(params);
  require_curve(curve, 4, "extract_buckling_point");
  const auto& s = curve.samples;
  const std::size_t n = s.size();

  std::size_t peak_idx = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (s[i].torque > s[peak_idx].torque) peak_idx = i;
  const double peak = s[peak_idx].torque;
  if (!(peak > 0.0)) throw analysis_error("extract_buckling_point: peak torque must be > 0");

  // Rising-branch fit window: samples before the peak with torque inside the
  // window band.
  std::vector<CurveSample> window;
  for (std::size_t i = 0; i < peak_idx; ++i)
    if (s[i].torque >= params.window_low * peak && s[i].torque <= params.window_high * peak)
      window.push_back(s[i]);
  if (window.size() < 3)
    throw analysis_error("extract_buckling_point: fewer than 3 samples in the fit window");
  const detail::LineFit line = detail::fit_line(window);
  if (!(line.slope > 0.0))
    throw analysis_error("extract_buckling_point: non-monotone rising branch (slope <= 0)");

  const std::size_t tail_count = std::max<std::size_t>(3, n / 20);
  double level = 0.0;
  for (std::size_t i = n - tail_count; i < n; ++i) level += s[i].torque;
  level /= static_cast<double>(tail_count);

  const double band = params.plateau_tolerance * peak;
  std::vector<CurveSample> plateau;
  for (int pass = 0; pass < 2; ++pass) {
    const double knee = (level - line.intercept) / line.slope;
    plateau.clear();
    for (std::size_t i = 0; i < n; ++i)
      if (s[i].angle > knee && std::abs(s[i].torque - level) <= band) plateau.push_back(s[i]);
    if (plateau.size() < 3) throw analysis_error("extract_buckling_point: no plateau detected");
    double sum = 0.0;
    for (const auto& p : plateau) sum += p.torque;
    level = sum / static_cast<double>(plateau.size());
  }

  // A trailing branch that still climbs at a sizable fraction of the rising
  // slope is not a plateau (e.g. a purely linear curve).
  const detail::LineFit plateau_fit = detail::fit_line(plateau);
  if (plateau_fit.slope > 0.25 * line.slope)
    throw analysis_error("extract_buckling_point: no plateau detected (trailing branch still rising)");

  const double knee = (level - line.intercept) / line.slope;
  if (!(knee > 0.0))
    throw analysis_error("extract_buckling_point: degenerate intersection (knee angle <= 0)");

  CharacterizationReport rep;
  rep.extracted = {knee, level};
  rep.peak_torque = peak;
  rep.pre_buckling_stiffness = line.slope;
  rep.fit_intercept = line.intercept;
  rep.plateau_level = level;
  rep.replicates = {rep.extracted};
  return rep;
}

// Extract each replicate independently and report the arithmetic mean as the
// headline point.
inline CharacterizationReport average_replicates(const std::vector<TorqueDeflectionCurve>& curves,
                                                 const ExtractionParams& params = {}) {
  if (curves.empty()) throw std::invalid_argument("average_replicates: need at least 1 curve");
  std::vector<CharacterizationReport> parts;
  parts.reserve(curves.size());
  for (std::size_t i = 0; i < curves.size(); ++i) {
    try {
      parts.push_back(extract_buckling_point(curves[i], params));
    } catch (const analysis_error& e) {
      throw analysis_error("curve " + std::to_string(i + 1) + ": " + e.what());
    }
  }

  CharacterizationReport rep;
  for (const auto& p : parts) {
    rep.replicates.push_back(p.extracted);
    rep.extracted.angle += p.extracted.angle;
    rep.extracted.torque += p.extracted.torque;
    rep.peak_torque += p.peak_torque;
    rep.pre_buckling_stiffness += p.pre_buckling_stiffness;
    rep.fit_intercept += p.fit_intercept;
  }
  const double k = static_cast<double>(parts.size());
  rep.extracted.angle /= k;
  rep.extracted.torque /= k;
  rep.peak_torque /= k;
  rep.pre_buckling_stiffness /= k;
  rep.fit_intercept /= k;
  rep.plateau_level = rep.extracted.torque;
  for (const auto& p : parts) {
    rep.angle_spread = std::max(rep.angle_spread, std::abs(p.extracted.angle - rep.extracted.angle));
    rep.torque_spread =
        std::max(rep.torque_spread, std::abs(p.extracted.torque - rep.extracted.torque));
  }
  return rep;
}

// --- model calibration against measured buckling points ---

enum class CalibParam { young_modulus, ring_radius, boundary_factor };

inline const char* to_string(CalibParam p) {
  switch (p) {
    case CalibParam::young_modulus: return "young_modulus";
    case CalibParam::ring_radius: return "ring_radius";
    case CalibParam::boundary_factor: return "boundary_factor";
  }
  return "?";
}

struct CalibrationMeasurement {
  HoneycombGeometry geometry;
  BucklingPoint measured;
  std::string label;
};

struct CalibrationResidual {
  std::string label;
  double torque_rel = 0.0;  // model/measured - 1
  double angle_rel = 0.0;
};

struct CalibrationResult {
  Material material;
  double ring_radius = 0.0;
  double boundary_factor = 0.0;
  std::vector<CalibrationResidual> residuals;
  double rms = 0.0;  // of the relative residuals
};

// Least-squares fit of the chosen shared constants so the assembled model
// reproduces the measured buckling points. The fit runs on log-space relative
// residuals of torque and angle, which are exactly linear in
// (log E, log R, log kappa):
//
//   log tau   row:  +1 logE  +1 logR  -2 logKappa
//   log theta row:   0       -1       -2
//
// so a single linear solve lands the optimum. Rank-deficient selections (for
// example all three parameters, which torque and angle cannot separate) raise
// an underdetermined-fit error.
inline CalibrationResult calibrate(const std::vector<CalibrationMeasurement>& measurements,
                                   const Material& guess,
                                   const std::vector<CalibParam>& free_params) {
  if (measurements.empty())
    throw std::invalid_argument("calibrate: need at least one measurement");
  for (std::size_t i = 0; i < free_params.size(); ++i)
    for (std::size_t j = i + 1; j < free_params.size(); ++j)
      if (free_params[i] == free_params[j])
        throw std::invalid_argument("calibrate: duplicate free parameter");
  const std::size_t n_constraints = 2 * measurements.size();
  auto describe = [&] {
    std::string msg;
    for (const auto p : free_params) {
      if (!msg.empty()) msg += ", ";
      msg += to_string(p);
    }
    return "free parameters {" + msg + "} vs " + std::to_string(n_constraints) +
           " measured quantities";
  };
  if (free_params.size() > n_constraints)
    throw analysis_error("calibrate: underdetermined fit: " + describe());
  for (const auto& m : measurements)
    if (!(m.measured.angle > 0.0 && m.measured.torque > 0.0))
      throw std::invalid_argument("calibrate: measured points must be positive");

  const double e0 = guess.young_modulus;
  const double r0 = measurements.front().geometry.ring_radius;
  const double kappa0 = measurements.front().geometry.boundary_factor;

  auto model_point = [&](double e, double r, double kappa, const HoneycombGeometry& g) {
    HoneycombGeometry gg = g;
    gg.ring_radius = r;
    gg.boundary_factor = kappa;
    Material mat = guess;
    mat.young_modulus = e;
    return assemble(gg, mat).buckling;
  };

  double e1 = e0, r1 = r0, kappa1 = kappa0;
  const std::size_t p = free_params.size();
  if (p > 0) {
    auto coeff = [](CalibParam param, bool torque_row) {
      switch (param) {
        case CalibParam::young_modulus: return torque_row ? 1.0 : 0.0;
        case CalibParam::ring_radius: return torque_row ? 1.0 : -1.0;
        case CalibParam::boundary_factor: return -2.0;
      }
      return 0.0;
    };
    // Normal equations A^T A x = A^T y over all torque/angle rows.
    std::vector<double> ata(p * p, 0.0), aty(p, 0.0);
    for (const auto& m : measurements) {
      const BucklingPoint model0 = model_point(e0, r0, kappa0, m.geometry);
      const double y_rows[2] = {std::log(m.measured.torque / model0.torque),
                                std::log(m.measured.angle / model0.angle)};
      for (int row = 0; row < 2; ++row) {
        for (std::size_t a = 0; a < p; ++a) {
          const double ca = coeff(free_params[a], row == 0);
          for (std::size_t b2 = 0; b2 < p; ++b2)
            ata[a * p + b2] += ca * coeff(free_params[b2], row == 0);
          aty[a] += ca * y_rows[row];
        }
      }
    }
    std::vector<double> x;
    if (!detail::solve_dense(ata, aty, p, x))
      throw analysis_error("calibrate: underdetermined fit (rank-deficient): " + describe());
    for (std::size_t a = 0; a < p; ++a) {
      const double f = std::exp(x[a]);
      switch (free_params[a]) {
        case CalibParam::young_modulus: e1 = e0 * f; break;
        case CalibParam::ring_radius: r1 = r0 * f; break;
        case CalibParam::boundary_factor: kappa1 = kappa0 * f; break;
      }
    }
  }

  CalibrationResult out;
  out.material = guess;
  out.material.young_modulus = e1;
  out.ring_radius = r1;
  out.boundary_factor = kappa1;
  double sq = 0.0;
  for (const auto& m : measurements) {
    const BucklingPoint mp = model_point(e1, r1, kappa1, m.geometry);
    CalibrationResidual res;
    res.label = m.label;
    res.torque_rel = mp.torque / m.measured.torque - 1.0;
    res.angle_rel = mp.angle / m.measured.angle - 1.0;
    sq += res.torque_rel * res.torque_rel + res.angle_rel * res.angle_rel;
    out.residuals.push_back(res);
  }
  out.rms = std::sqrt(sq / static_cast<double>(n_constraints));
  return out;
}

}  // namespace biflex
