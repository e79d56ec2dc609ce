#pragma once

#include <numbers>

// All internal quantities are SI (m, kg, N, N*m, rad, Pa). Millimetres,
// degrees and MPa exist only at the file/CLI boundary; these helpers are the
// one place the conversions happen.
namespace biflex::units {

inline constexpr double pi = std::numbers::pi;
inline constexpr double standard_gravity = 9.80665;  // m/s^2

constexpr double deg_to_rad(double deg) { return deg * (pi / 180.0); }
constexpr double rad_to_deg(double rad) { return rad * (180.0 / pi); }
constexpr double mm_to_m(double mm) { return mm * 1e-3; }
constexpr double m_to_mm(double m) { return m * 1e3; }
constexpr double mpa_to_pa(double mpa) { return mpa * 1e6; }
constexpr double pa_to_mpa(double pa) { return pa * 1e-6; }
constexpr double g_to_kg(double g) { return g * 1e-3; }
constexpr double kg_to_g(double kg) { return kg * 1e3; }

}  // namespace biflex::units
