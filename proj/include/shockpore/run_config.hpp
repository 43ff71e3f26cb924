#pragma once

#include <limits>

#include "shockpore/materials.hpp"

namespace shockpore {

enum class BoundaryKind {
    Wall,          // rigid reflecting wall
    ZeroGradient,  // replicate the edge cell
    Periodic,
};

struct Boundaries {
    BoundaryKind x_lo = BoundaryKind::ZeroGradient;
    BoundaryKind x_hi = BoundaryKind::ZeroGradient;
    BoundaryKind y_lo = BoundaryKind::Wall;
    BoundaryKind y_hi = BoundaryKind::ZeroGradient;
};

enum class ConductionIntegrator { Euler, RK4 };

/// Everything needed to reproduce one simulation. SI units throughout.
struct RunConfig {
    double Up = 0.0;  // impact speed, m/s (block moves towards y = 0)

    // Geometry. pore_diameter = 0 disables the pore. A NaN centre selects
    // the default placement: horizontally centred, at half the block height.
    double pore_diameter = 50e-9;
    double pore_center_x = std::numeric_limits<double>::quiet_NaN();
    double pore_center_y = std::numeric_limits<double>::quiet_NaN();
    double block_height_fraction = 0.85;

    int nx = 128;
    int ny = 256;
    double dx = 1.1719e-9;

    double snapshot_dt = 2.5e-12;
    int n_snapshots = 50;  // frames after t = 0

    double cfl = 0.4;
    double T_init = 298.0;
    double mu_vac = 0.5;

    bool strength = true;
    bool conduction = true;
    /// Minmod-limited linear reconstruction on faces between material cells.
    bool second_order = false;
    ConductionIntegrator conduction_integrator = ConductionIntegrator::Euler;
    Boundaries boundaries;

    /// Energy and mass bookkeeping for every step (small overhead).
    bool audit = false;
    /// Progress line cadence in steps; 0 prints only at snapshots.
    int progress_every = 0;

    MaterialModel material = rdx_table1();

    double domain_width() const { return nx * dx; }
    double domain_height() const { return ny * dx; }
    double block_top() const { return block_height_fraction * domain_height(); }
    double pore_x() const;
    double pore_y() const;
    double t_end() const { return n_snapshots * snapshot_dt; }

    /// Throws ConfigError on any invariant violation.
    void validate() const;
};

}  // namespace shockpore
