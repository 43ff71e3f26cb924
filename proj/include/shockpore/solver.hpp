#pragma once

#include <limits>
#include <utility>

#include "shockpore/field2d.hpp"
#include "shockpore/materials.hpp"
#include "shockpore/run_config.hpp"
#include "shockpore/sim_state.hpp"

namespace shockpore {

/// Mass and total energy crossing the domain boundary during one
/// hyperbolic update (positive = into the domain), per metre of depth.
struct BoundaryFlux {
    double mass = 0.0;
    double energy = 0.0;
};

/// Conservation bookkeeping for one full step.
struct StepAudit {
    double mass_before = 0.0;
    double mass_after = 0.0;
    double energy_before = 0.0;
    double energy_after = 0.0;
    BoundaryFlux boundary;
    double conduction_boundary_energy = 0.0;

    /// (after - before - boundary inflow) / before
    double mass_residual() const;
    double energy_residual() const;
};

/// Builds the reverse-ballistic initial condition: a block of material
/// moving at -Up towards the rigid wall at y = 0, with a circular vacuum
/// pore and a vacuum band above the block.
SimState initialize_reverse_ballistic(const RunConfig& cfg);

/// Operator-split explicit Eulerian solver.
///
/// One step is compute_dt -> hyperbolic_step -> stress_predictor ->
/// radial_return -> conduction_step -> eos_sync. Every substep takes a state
/// by const reference and returns the updated state.
///
/// Material/vacuum interfaces use a diffuse volume fraction: mu is carried
/// with the flow and cells with mu < mu_vac are vacuum, where pressure and
/// deviatoric stress are zero. Faces between a material cell and a vacuum
/// cell are free surfaces: the flux is a pure donor-cell transport at the
/// material velocity with no pressure or stress contribution.
class Solver {
public:
    explicit Solver(RunConfig cfg);

    const RunConfig& config() const { return cfg_; }
    const MaterialModel& material() const { return cfg_.material; }
    const ColdEnergyTable& cold_energy() const { return cold_; }

    bool is_material(const SimState& s, int i, int j) const {
        return s.mu(i, j) >= cfg_.mu_vac;
    }

    /// Stable step: cfl * dx / max(|u| + |v| + c), the explicit conduction
    /// bound, and never past t_limit.
    double compute_dt(const SimState& s, double t_limit = std::numeric_limits<double>::infinity()) const;

    SimState hyperbolic_step(const SimState& s, double dt, BoundaryFlux* flux = nullptr) const;
    SimState stress_predictor(const SimState& s, double dt) const;
    SimState radial_return(const SimState& s, double dt) const;
    SimState conduction_step(const SimState& s, double dt) const;
    SimState eos_sync(const SimState& s) const;

    /// One full step, clipped so that t never passes t_limit. Numerical
    /// failures are rethrown as NumericalError with the step index and time.
    SimState advance(const SimState& s, double t_limit = std::numeric_limits<double>::infinity());

    /// Bookkeeping of the last advance() when cfg.audit is set.
    const StepAudit& last_audit() const { return audit_; }
    double last_dt() const { return last_dt_; }

    /// Velocity used for passive transport and velocity gradients: the cell
    /// velocity in material cells, the mean of adjacent material cells in
    /// vacuum cells next to an interface, else the (dust) cell velocity.
    std::pair<Field2D, Field2D> transport_velocity(const SimState& s) const;

    /// Material density of a material cell (rho / mu).
    double material_density(const SimState& s, int i, int j) const;

private:
    PadSpec passive_padding() const;

    RunConfig cfg_;
    ColdEnergyTable cold_;
    StepAudit audit_;
    double last_dt_ = 0.0;
};

}  // namespace shockpore
