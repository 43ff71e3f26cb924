#pragma once

#include "shockpore/field2d.hpp"

namespace shockpore {

/// Solver state on the shared cell-centred grid.
///
/// Conserved hydrodynamic variables are stored as densities (rho, rho u,
/// rho v, rho E). The in-plane deviatoric stress components are stored;
/// Szz = -(Sxx + Syy) is implied. p and T are caches rebuilt by eos_sync and
/// are never evolved directly.
struct SimState {
    Field2D rho;
    Field2D mom_x;
    Field2D mom_y;
    Field2D energy;  // rho (e + |u|^2 / 2)

    Field2D sxx;
    Field2D syy;
    Field2D sxy;

    Field2D eps_pl;     // cumulative effective plastic strain
    Field2D epsdot_pl;  // plastic strain rate of the last step (lagged rate for JC)
    Field2D e_el;       // elastic cold energy, J/kg
    Field2D e_cpl;      // stored plastic cold energy, J/kg
    Field2D mu;         // material volume fraction

    Field2D p;
    Field2D T;

    double t = 0.0;
    long step = 0;

    explicit SimState(int nx = 1, int ny = 1, double dx = 1.0);

    int nx() const { return rho.nx(); }
    int ny() const { return rho.ny(); }
    double dx() const { return rho.dx(); }

    double velocity_x(int i, int j) const;
    double velocity_y(int i, int j) const;
    Field2D velocity_x() const;
    Field2D velocity_y() const;

    double total_mass() const;
    double total_energy() const;
};

}  // namespace shockpore
