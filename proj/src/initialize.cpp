#include <cmath>

#include "shockpore/errors.hpp"
#include "shockpore/run_config.hpp"
#include "shockpore/solver.hpp"

namespace shockpore {

double RunConfig::pore_x() const {
    return std::isnan(pore_center_x) ? 0.5 * domain_width() : pore_center_x;
}

double RunConfig::pore_y() const {
    return std::isnan(pore_center_y) ? 0.5 * block_top() : pore_center_y;
}

void RunConfig::validate() const {
    auto fail = [](const std::string& msg) { throw ConfigError(msg); };
    material.validate();
    if (!std::isfinite(Up) || Up < 0.0) fail("impact speed Up must be finite and >= 0");
    if (nx < 1 || ny < 1) fail("grid must have at least one cell per axis");
    if (!(dx > 0.0) || !std::isfinite(dx)) fail("dx must be positive");
    if (!(snapshot_dt > 0.0) || !std::isfinite(snapshot_dt)) fail("snapshot_dt must be positive");
    if (n_snapshots < 0) fail("n_snapshots must be >= 0");
    if (!(cfl > 0.0 && cfl < 1.0)) fail("cfl must lie in (0, 1)");
    if (!(T_init >= 0.0) || !std::isfinite(T_init)) fail("T_init must be finite and >= 0");
    if (!(mu_vac > 0.0 && mu_vac < 1.0)) fail("mu_vac must lie in (0, 1)");
    if (!(block_height_fraction > 0.0 && block_height_fraction <= 1.0)) {
        fail("block_height_fraction must lie in (0, 1]");
    }
    if (progress_every < 0) fail("progress_every must be >= 0");
    const Boundaries& b = boundaries;
    if ((b.x_lo == BoundaryKind::Periodic) != (b.x_hi == BoundaryKind::Periodic) ||
        (b.y_lo == BoundaryKind::Periodic) != (b.y_hi == BoundaryKind::Periodic)) {
        fail("periodic boundaries must be set on both sides of an axis");
    }
    if (!std::isfinite(pore_diameter) || pore_diameter < 0.0) fail("pore_diameter must be >= 0");
    if (pore_diameter > 0.0) {
        const double r = 0.5 * pore_diameter;
        const double cx = pore_x();
        const double cy = pore_y();
        if (!std::isfinite(cx) || !std::isfinite(cy)) fail("pore centre must be finite");
        if (cx - r <= 0.0 || cx + r >= domain_width() || cy - r <= 0.0 || cy + r >= block_top()) {
            fail("pore must lie strictly inside the material block");
        }
    }
}

SimState initialize_reverse_ballistic(const RunConfig& cfg) {
    cfg.validate();
    const MaterialModel& m = cfg.material;
    SimState s(cfg.nx, cfg.ny, cfg.dx);

    const double top = cfg.block_top();
    const double r = 0.5 * cfg.pore_diameter;
    const double cx = cfg.pore_x();
    const double cy = cfg.pore_y();
    // e_c = e0 at rho0 with empty accumulators.
    const double e = m.e0 + m.cv * (cfg.T_init - m.T0);

    for (int j = 0; j < cfg.ny; ++j) {
        const double y = (j + 0.5) * cfg.dx;
        for (int i = 0; i < cfg.nx; ++i) {
            const double x = (i + 0.5) * cfg.dx;
            bool material = y < top;
            if (material && r > 0.0) {
                const double ddx = x - cx;
                const double ddy = y - cy;
                if (ddx * ddx + ddy * ddy < r * r) material = false;
            }
            if (!material) continue;
            s.mu(i, j) = 1.0;
            s.rho(i, j) = m.rho0;
            s.mom_y(i, j) = -m.rho0 * cfg.Up;
            s.energy(i, j) = m.rho0 * (e + 0.5 * cfg.Up * cfg.Up);
        }
    }

    Solver solver(cfg);
    return solver.eos_sync(s);
}

}  // namespace shockpore
