#include "shockpore/materials.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "shockpore/errors.hpp"

namespace shockpore {

namespace {

void require_density(double rho, const char* who) {
    if (!std::isfinite(rho) || rho <= 0.0) {
        throw DomainError(std::string(who) + ": density must be finite and positive, got " +
                          std::to_string(rho));
    }
}

// 3/4 (K0' - 4), the third-order Birch-Murnaghan correction coefficient.
double bm_coefficient(const MaterialModel& m) { return 0.75 * (m.K0p - 4.0); }

}  // namespace

void MaterialModel::validate() const {
    auto fail = [](const std::string& msg) { throw ConfigError("material: " + msg); };
    auto finite = [](double v) { return std::isfinite(v); };
    for (double v : {rho0, K0, K0p, G0, a1, a2, G_floor_fraction, Gamma0, gamma1, gamma2, A, B, n,
                     m, C, epsdot0, Tref, Tmelt_ref, pref, a_melt, c_melt, melt_bracket_floor, cv,
                     chi, T0, e0, beta}) {
        if (!finite(v)) fail("all parameters must be finite");
    }
    if (rho0 <= 0.0) fail("rho0 must be positive");
    if (K0 <= 0.0) fail("K0 must be positive");
    if (G0 <= 0.0) fail("G0 must be positive");
    if (cv <= 0.0) fail("cv must be positive");
    if (chi < 0.0) fail("chi must be non-negative");
    if (beta < 0.0 || beta > 1.0) fail("beta must lie in [0, 1]");
    if (epsdot0 <= 0.0) fail("epsdot0 must be positive");
    if (a_melt <= 0.0 || c_melt <= 0.0) fail("melt curve a and c must be positive");
    if (G_floor_fraction <= 0.0 || G_floor_fraction > 1.0) fail("G floor fraction must lie in (0, 1]");
    if (melt_bracket_floor <= 0.0) fail("melt bracket floor must be positive");
    if (A < 0.0 || B < 0.0 || m <= 0.0 || n < 0.0) fail("Johnson-Cook A, B, n must be >= 0 and m > 0");
}

MaterialModel rdx_table1() {
    MaterialModel rdx;
    rdx.K0 = 13e9;
    rdx.K0p = 9.2;
    rdx.G0 = 5.314e9;
    rdx.a1 = 3.3774;
    rdx.a2 = -10.356e6;
    rdx.Gamma0 = 0.667;
    rdx.gamma1 = 2.00878;
    rdx.gamma2 = -0.805669;
    rdx.A = 0.3e9;
    rdx.B = 0.1e9;
    rdx.m = 3.0;
    rdx.n = 0.1;
    rdx.C = 1.8;
    rdx.epsdot0 = 4.36e4;
    rdx.Tmelt_ref = 478.0;
    rdx.pref = 0.0001e9;
    rdx.a_melt = 0.9631e9;
    rdx.c_melt = 2.8855;
    rdx.cv = 1980.0;
    rdx.chi = 0.178;
    rdx.T0 = 298.0;
    rdx.e0 = 0.0;
    return rdx;
}

double cold_pressure(const MaterialModel& m, double rho) {
    require_density(rho, "cold_pressure");
    const double x = rho / m.rho0;
    const double x13 = std::cbrt(x);
    const double x23 = x13 * x13;
    const double x53 = x * x23;
    const double x73 = x53 * x23;
    return 1.5 * m.K0 * (x73 - x53) * (1.0 + bm_coefficient(m) * (x23 - 1.0));
}

double cold_pressure_derivative(const MaterialModel& m, double rho) {
    require_density(rho, "cold_pressure_derivative");
    const double x = rho / m.rho0;
    const double x13 = std::cbrt(x);
    const double x23 = x13 * x13;
    const double x43 = x * x13;
    const double x53 = x * x23;
    const double x73 = x53 * x23;
    const double b = bm_coefficient(m);
    const double dpdx = 1.5 * m.K0 *
                        ((7.0 / 3.0 * x43 - 5.0 / 3.0 * x23) * (1.0 + b * (x23 - 1.0)) +
                         (x73 - x53) * b * (2.0 / 3.0) / x13);
    return dpdx / m.rho0;
}

double gruneisen(const MaterialModel& m, double rho) {
    require_density(rho, "gruneisen");
    const double r = m.rho0 / rho;
    return m.Gamma0 + m.gamma1 * r + m.gamma2 * r * r;
}

double shear_modulus(const MaterialModel& m, double p, double T) {
    const double g = m.G0 + m.a1 * p + m.a2 * (T - m.T0);
    return std::max(g, m.G_floor_fraction * m.G0);
}

double melt_temperature(const MaterialModel& m, double p) {
    const double bracket = std::max(1.0 + (p - m.pref) / m.a_melt, m.melt_bracket_floor);
    return m.Tmelt_ref * std::pow(bracket, 1.0 / m.c_melt);
}

double yield_stress_jc(const MaterialModel& m, double eps_pl, double epsdot, double T, double p) {
    if (!(eps_pl >= 0.0) || !(epsdot >= 0.0)) {
        throw DomainError("yield_stress_jc: plastic strain and strain rate must be non-negative");
    }
    const double t_melt = melt_temperature(m, p);
    if (T >= t_melt) return 0.0;

    const double hardening = m.A + m.B * std::pow(eps_pl, m.n);
    const double rate = epsdot > m.epsdot0 ? 1.0 + m.C * std::log(epsdot / m.epsdot0) : 1.0;

    double theta = 0.0;
    if (t_melt > m.Tref) theta = std::clamp((T - m.Tref) / (t_melt - m.Tref), 0.0, 1.0);
    const double thermal = 1.0 - std::pow(theta, m.m);

    return std::max(0.0, hardening * rate * thermal);
}

double pressure_mie_gruneisen(const MaterialModel& m, double rho, double e, double e_c) {
    if (!std::isfinite(e) || !std::isfinite(e_c)) {
        throw DomainError("pressure_mie_gruneisen: non-finite energy");
    }
    return cold_pressure(m, rho) + gruneisen(m, rho) * rho * (e - e_c);
}

double cold_energy_hydro(const MaterialModel& m, double rho) {
    require_density(rho, "cold_energy_hydro");
    if (rho == m.rho0) return m.e0;
    auto integrand = [&m](double r) { return cold_pressure(m, r) / (r * r); };
    using boost::math::quadrature::gauss_kronrod;
    const double integral = gauss_kronrod<double, 31>::integrate(integrand, m.rho0, rho, 20, 1e-12);
    return m.e0 + integral;
}

double temperature_from_state(const MaterialModel& m, double e, double e_c) {
    return m.T0 + (e - e_c) / m.cv;
}

double bulk_sound_speed(const MaterialModel& m, double rho, double G) {
    require_density(rho, "bulk_sound_speed");
    const double dpdrho = std::max(0.0, cold_pressure_derivative(m, rho));
    return std::sqrt(dpdrho + 4.0 / 3.0 * G / rho);
}

double adiabatic_sound_speed(const MaterialModel& m, double rho, double e_minus_ec, double G) {
    require_density(rho, "adiabatic_sound_speed");
    const double gamma = gruneisen(m, rho);
    const double r2 = (m.rho0 / rho) * (m.rho0 / rho);
    const double d_gamma_rho = m.Gamma0 - m.gamma2 * r2;
    // p - p_c = Gamma rho (e - e_c), so Gamma (p - p_c)/rho = Gamma^2 (e - e_c).
    const double c2 = cold_pressure_derivative(m, rho) + (d_gamma_rho + gamma * gamma) * e_minus_ec;
    return std::sqrt(std::max(0.0, c2) + 4.0 / 3.0 * G / rho);
}

// ---------------------------------------------------------------------------

ColdEnergyTable::ColdEnergyTable(const MaterialModel& m, int n_nodes, double rho_lo_ratio,
                                 double rho_hi_ratio)
    : model_(m) {
    if (n_nodes < 4 || !(rho_lo_ratio > 0.0) || !(rho_lo_ratio < 1.0) || !(rho_hi_ratio > 1.0)) {
        throw DomainError("ColdEnergyTable: need >= 4 nodes and a range bracketing rho0");
    }
    const double s_lo = std::log(rho_lo_ratio);
    const double s_hi = std::log(rho_hi_ratio);
    log_step_ = (s_hi - s_lo) / (n_nodes - 1);
    first_index_ = static_cast<int>(std::floor(s_lo / log_step_));
    const int last_index = static_cast<int>(std::ceil(s_hi / log_step_));
    const int count = last_index - first_index_ + 1;

    rho_min_ = m.rho0 * std::exp(first_index_ * log_step_);
    rho_max_ = m.rho0 * std::exp(last_index * log_step_);

    values_.assign(count, 0.0);
    slopes_.assign(count, 0.0);

    auto rho_at = [&](int k) { return m.rho0 * std::exp(k * log_step_); };
    auto integrand = [&m](double r) { return cold_pressure(m, r) / (r * r); };
    using boost::math::quadrature::gauss_kronrod;

    // Accumulate outward from rho0 so the reference node is exactly e0.
    const int zero = -first_index_;
    values_[zero] = m.e0;
    for (int k = zero + 1; k < count; ++k) {
        values_[k] = values_[k - 1] + gauss_kronrod<double, 15>::integrate(
                                          integrand, rho_at(k - 1 + first_index_),
                                          rho_at(k + first_index_), 0, 0.0);
    }
    for (int k = zero - 1; k >= 0; --k) {
        values_[k] = values_[k + 1] - gauss_kronrod<double, 15>::integrate(
                                          integrand, rho_at(k + first_index_),
                                          rho_at(k + 1 + first_index_), 0, 0.0);
    }

    // d e / d ln rho = p_c / rho, then Fritsch-Carlson limiting.
    for (int k = 0; k < count; ++k) {
        const double r = rho_at(k + first_index_);
        slopes_[k] = cold_pressure(m, r) / r;
    }
    for (int k = 0; k + 1 < count; ++k) {
        const double delta = (values_[k + 1] - values_[k]) / log_step_;
        if (delta == 0.0) {
            slopes_[k] = slopes_[k + 1] = 0.0;
            continue;
        }
        const double a = slopes_[k] / delta;
        const double b = slopes_[k + 1] / delta;
        if (a < 0.0) slopes_[k] = 0.0;
        if (b < 0.0) slopes_[k + 1] = 0.0;
        const double norm = a * a + b * b;
        if (norm > 9.0) {
            const double tau = 3.0 / std::sqrt(norm);
            slopes_[k] = tau * a * delta;
            slopes_[k + 1] = tau * b * delta;
        }
    }
}

double ColdEnergyTable::operator()(double rho) const {
    require_density(rho, "ColdEnergyTable");
    if (rho < rho_min_ || rho > rho_max_) return cold_energy_hydro(model_, rho);

    const double s = std::log(rho / model_.rho0);
    const double pos = s / log_step_ - first_index_;
    const int last = static_cast<int>(values_.size()) - 1;
    int k = std::clamp(static_cast<int>(std::floor(pos)), 0, last - 1);
    const double t = pos - k;
    if (t == 0.0) return values_[k];

    const double t2 = t * t;
    const double t3 = t2 * t;
    const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    const double h10 = t3 - 2.0 * t2 + t;
    const double h01 = -2.0 * t3 + 3.0 * t2;
    const double h11 = t3 - t2;
    return h00 * values_[k] + h10 * log_step_ * slopes_[k] + h01 * values_[k + 1] +
           h11 * log_step_ * slopes_[k + 1];
}

}  // namespace shockpore
