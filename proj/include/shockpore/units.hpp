#pragma once

// Conversions between the units used on the command line and in reports
// (nm, ps, GPa, nm/ps) and the SI units used everywhere inside the library.

namespace shockpore::units {

inline constexpr double kNano = 1e-9;
inline constexpr double kPico = 1e-12;
inline constexpr double kGiga = 1e9;

constexpr double nm_to_m(double nm) { return nm * kNano; }
constexpr double m_to_nm(double m) { return m / kNano; }
constexpr double ps_to_s(double ps) { return ps * kPico; }
constexpr double s_to_ps(double s) { return s / kPico; }
constexpr double gpa_to_pa(double gpa) { return gpa * kGiga; }
constexpr double pa_to_gpa(double pa) { return pa / kGiga; }

// 1 nm/ps = 1000 m/s
constexpr double nm_per_ps_to_m_per_s(double v) { return v * kNano / kPico; }
constexpr double m_per_s_to_nm_per_ps(double v) { return v * kPico / kNano; }

}  // namespace shockpore::units
