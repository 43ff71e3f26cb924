#pragma once

#include <vector>

namespace shockpore {

/// Complete constitutive parameter set for a single solid explosive.
///
/// All values are SI. The defaults (see rdx_table1()) are the RDX
/// parameters: third-order Birch-Murnaghan cold curve, linear P/T shear
/// modulus, quadratic Grueneisen polynomial, Johnson-Cook strength and a
/// Simon-Glatzel type melt curve.
///
/// rho0, T0 of the reference state and the Taylor-Quinney fraction beta are
/// not part of the published table; their defaults (1800 kg/m^3, 298 K, 0.9)
/// are conventional values and can be overridden from the run config.
struct MaterialModel {
    // Cold curve
    double rho0 = 1800.0;  // kg/m^3
    double K0 = 13e9;      // Pa
    double K0p = 9.2;

    // Shear modulus G(P,T) = G0 + a1 P + a2 (T - T0)
    double G0 = 5.314e9;     // Pa
    double a1 = 3.3774;
    double a2 = -10.356e6;   // Pa/K
    double G_floor_fraction = 0.01;

    // Grueneisen coefficient
    double Gamma0 = 0.667;
    double gamma1 = 2.00878;
    double gamma2 = -0.805669;

    // Johnson-Cook
    double A = 0.3e9;        // Pa
    double B = 0.1e9;        // Pa
    double n = 0.1;
    double m = 3.0;
    double C = 1.8;
    double epsdot0 = 4.36e4; // 1/s
    double Tref = 298.0;     // K

    // Melt curve T_m(P) = Tmelt_ref [1 + (P - pref)/a_melt]^(1/c_melt)
    double Tmelt_ref = 478.0;   // K
    double pref = 0.0001e9;     // Pa
    double a_melt = 0.9631e9;   // Pa
    double c_melt = 2.8855;
    double melt_bracket_floor = 1e-6;

    // Thermal
    double cv = 1980.0;   // J/(kg K)
    double chi = 0.178;   // W/(m K)
    double T0 = 298.0;    // K
    double e0 = 0.0;      // J/kg
    double beta = 0.9;

    /// Throws ConfigError when a parameter violates the model invariants.
    void validate() const;
};

/// The bundled RDX preset.
MaterialModel rdx_table1();

// Cold curve and its analytic density derivative.
double cold_pressure(const MaterialModel& m, double rho);
double cold_pressure_derivative(const MaterialModel& m, double rho);

double gruneisen(const MaterialModel& m, double rho);

/// G(P,T), clamped below at G_floor_fraction * G0.
double shear_modulus(const MaterialModel& m, double p, double T);

double melt_temperature(const MaterialModel& m, double p);

/// Johnson-Cook flow stress. The rate bracket is held at 1 for
/// epsdot < epsdot0 and the homologous temperature uses the pressure
/// dependent melt curve. Returns 0 at or above melt.
double yield_stress_jc(const MaterialModel& m, double eps_pl, double epsdot, double T, double p);

/// p = p_c(rho) + Gamma(rho) rho (e - e_c)
double pressure_mie_gruneisen(const MaterialModel& m, double rho, double e, double e_c);

/// e0 + int_{rho0}^{rho} p_c(r) / r^2 dr by adaptive Gauss-Kronrod quadrature.
double cold_energy_hydro(const MaterialModel& m, double rho);

/// T = T0 + (e - e_c)/cv. May be negative; callers flag that.
double temperature_from_state(const MaterialModel& m, double e, double e_c);

/// sqrt(max(0, dp_c/drho) + 4G/(3 rho)).
double bulk_sound_speed(const MaterialModel& m, double rho, double G);

/// Isentropic longitudinal wave speed of the full Mie-Grueneisen closure,
/// including the thermal pressure contribution the cold-curve speed omits:
/// c^2 = p_c' + (Gamma rho)' (e - e_c) + Gamma (p - p_c)/rho + 4G/(3 rho).
double adiabatic_sound_speed(const MaterialModel& m, double rho, double e_minus_ec, double G);

/// Dense tabulation of cold_energy_hydro for the solver hot loop.
///
/// Nodes are log-spaced in rho/rho0 with a constant ratio and include
/// rho0 itself, so the table is exact (== e0) at the reference density.
/// Between nodes a monotone (Fritsch-Carlson) cubic Hermite interpolant is
/// used; outside the tabulated range evaluation falls back to quadrature.
class ColdEnergyTable {
public:
    explicit ColdEnergyTable(const MaterialModel& m, int n_nodes = 4096,
                             double rho_lo_ratio = 0.5, double rho_hi_ratio = 3.0);

    double operator()(double rho) const;

    double rho_min() const { return rho_min_; }
    double rho_max() const { return rho_max_; }
    std::size_t size() const { return values_.size(); }

private:
    MaterialModel model_;
    double log_step_ = 0.0;
    int first_index_ = 0;   // node k corresponds to ln(rho/rho0) = k * log_step_
    double rho_min_ = 0.0;
    double rho_max_ = 0.0;
    std::vector<double> values_;
    std::vector<double> slopes_;  // d value / d ln(rho/rho0)
};

}  // namespace shockpore
