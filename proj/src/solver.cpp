#include "shockpore/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>
#include <utility>

#include "shockpore/errors.hpp"
#include "shockpore/rk4.hpp"

namespace shockpore {

// ---------------------------------------------------------------------------
// SimState

SimState::SimState(int nx, int ny, double dx)
    : rho(nx, ny, dx), mom_x(nx, ny, dx), mom_y(nx, ny, dx), energy(nx, ny, dx),
      sxx(nx, ny, dx), syy(nx, ny, dx), sxy(nx, ny, dx), eps_pl(nx, ny, dx),
      epsdot_pl(nx, ny, dx), e_el(nx, ny, dx), e_cpl(nx, ny, dx), mu(nx, ny, dx), p(nx, ny, dx),
      T(nx, ny, dx) {}

double SimState::velocity_x(int i, int j) const {
    const double r = rho(i, j);
    return r > 0.0 ? mom_x(i, j) / r : 0.0;
}

double SimState::velocity_y(int i, int j) const {
    const double r = rho(i, j);
    return r > 0.0 ? mom_y(i, j) / r : 0.0;
}

Field2D SimState::velocity_x() const {
    Field2D out(nx(), ny(), dx());
    for (int j = 0; j < ny(); ++j)
        for (int i = 0; i < nx(); ++i) out(i, j) = velocity_x(i, j);
    return out;
}

Field2D SimState::velocity_y() const {
    Field2D out(nx(), ny(), dx());
    for (int j = 0; j < ny(); ++j)
        for (int i = 0; i < nx(); ++i) out(i, j) = velocity_y(i, j);
    return out;
}

double SimState::total_mass() const {
    double sum = 0.0;
    for (double v : rho.values()) sum += v;
    return sum * dx() * dx();
}

double SimState::total_energy() const {
    double sum = 0.0;
    for (double v : energy.values()) sum += v;
    return sum * dx() * dx();
}

double StepAudit::mass_residual() const {
    return (mass_after - mass_before - boundary.mass) / mass_before;
}

double StepAudit::energy_residual() const {
    return (energy_after - energy_before - boundary.energy - conduction_boundary_energy) /
           energy_before;
}

// ---------------------------------------------------------------------------

namespace {

struct Prim {
    double rho = 0.0;
    double mx = 0.0;
    double my = 0.0;
    double en = 0.0;
    double u = 0.0;
    double v = 0.0;
    double p = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    double sxy = 0.0;
    double c = 0.0;
    double frac = 1.0;  // volume fraction of material cells
    bool material = false;
};

struct Flux {
    double mass = 0.0;
    double mx = 0.0;
    double my = 0.0;
    double en = 0.0;
};

Flux physical_flux(const Prim& q, int axis) {
    Flux f;
    if (axis == 0) {
        f.mass = q.rho * q.u;
        f.mx = q.mx * q.u + q.p - q.sxx;
        f.my = q.my * q.u - q.sxy;
        f.en = (q.en + q.p) * q.u - (q.sxx * q.u + q.sxy * q.v);
    } else {
        f.mass = q.rho * q.v;
        f.mx = q.mx * q.v - q.sxy;
        f.my = q.my * q.v + q.p - q.syy;
        f.en = (q.en + q.p) * q.v - (q.sxy * q.u + q.syy * q.v);
    }
    return f;
}

Flux rusanov(const Prim& l, const Prim& r, int axis, double a) {
    const Flux fl = physical_flux(l, axis);
    const Flux fr = physical_flux(r, axis);
    return {0.5 * (fl.mass + fr.mass) - 0.5 * a * (r.rho - l.rho),
            0.5 * (fl.mx + fr.mx) - 0.5 * a * (r.mx - l.mx),
            0.5 * (fl.my + fr.my) - 0.5 * a * (r.my - l.my),
            0.5 * (fl.en + fr.en) - 0.5 * a * (r.en - l.en)};
}

Prim per_material_volume(Prim q) {
    q.rho /= q.frac;
    q.mx /= q.frac;
    q.my /= q.frac;
    q.en /= q.frac;
    return q;
}

Flux face_flux(const Prim& l, const Prim& r, int axis) {
    const double unl = axis == 0 ? l.u : l.v;
    const double unr = axis == 0 ? r.u : r.v;
    if (l.material && r.material) {
        // Upwind on the material state so partially filled cells do not
        // look like density jumps; the face is wetted by the fuller side.
        const double a = std::max(std::abs(unl) + l.c, std::abs(unr) + r.c);
        Flux f = rusanov(per_material_volume(l), per_material_volume(r), axis, a);
        const double wet = std::max(l.frac, r.frac);
        f.mass *= wet;
        f.mx *= wet;
        f.my *= wet;
        f.en *= wet;
        return f;
    }
    if (l.material != r.material) {
        // Free surface: transport at the material velocity, no surface traction.
        const double uf = l.material ? unl : unr;
        const Prim& donor = uf > 0.0 ? l : r;
        if (uf == 0.0) return {};
        return {uf * donor.rho, uf * donor.mx, uf * donor.my, uf * donor.en};
    }
    const double a = std::max(std::abs(unl), std::abs(unr));
    return rusanov(l, r, axis, a);
}

double minmod(double a, double b) {
    if (a * b <= 0.0) return 0.0;
    return std::abs(a) < std::abs(b) ? a : b;
}

// Limited face states between b and c from the stencil a, b | c, d, on the
// per-material-volume variables. Velocities follow from the reconstructed
// momenta; the sound speed stays the cell value.
std::pair<Prim, Prim> muscl(const Prim& a, const Prim& b, const Prim& c, const Prim& d) {
    const Prim A = per_material_volume(a);
    const Prim B = per_material_volume(b);
    const Prim C = per_material_volume(c);
    const Prim D = per_material_volume(d);
    Prim l = B;
    Prim r = C;
    auto fill = [](double Prim::*f, const Prim& q0, const Prim& q1, const Prim& q2, Prim& out, double sign) {
        out.*f = q1.*f + sign * 0.5 * minmod(q1.*f - q0.*f, q2.*f - q1.*f);
    };
    for (double Prim::*f : {&Prim::rho, &Prim::mx, &Prim::my, &Prim::en, &Prim::p, &Prim::sxx, &Prim::syy,
                            &Prim::sxy}) {
        fill(f, A, B, C, l, 1.0);
        fill(f, B, C, D, r, -1.0);
    }
    for (Prim* q : {&l, &r}) {
        q->u = q->mx / q->rho;
        q->v = q->my / q->rho;
        // Rebuild the cell-based representation expected by face_flux.
        q->rho *= q->frac;
        q->mx *= q->frac;
        q->my *= q->frac;
        q->en *= q->frac;
    }
    return {l, r};
}

Prim mirrored(Prim q, int axis) {
    if (axis == 0) {
        q.u = -q.u;
        q.mx = -q.mx;
    } else {
        q.v = -q.v;
        q.my = -q.my;
    }
    q.sxy = -q.sxy;
    return q;
}

PadMode::Kind pad_kind(BoundaryKind b) {
    return b == BoundaryKind::Periodic ? PadMode::Kind::Circular : PadMode::Kind::Replicate;
}

PadMode pad_mode(BoundaryKind b) { return PadMode{pad_kind(b), 0.0}; }

}  // namespace

// ---------------------------------------------------------------------------
// Solver

Solver::Solver(RunConfig cfg) : cfg_(std::move(cfg)), cold_(cfg_.material) { cfg_.validate(); }

PadSpec Solver::passive_padding() const {
    const Boundaries& b = cfg_.boundaries;
    return {pad_mode(b.x_lo), pad_mode(b.x_hi), pad_mode(b.y_lo), pad_mode(b.y_hi)};
}

double Solver::material_density(const SimState& s, int i, int j) const {
    return s.rho(i, j) / std::max(s.mu(i, j), cfg_.mu_vac);
}

std::pair<Field2D, Field2D> Solver::transport_velocity(const SimState& s) const {
    const int nx = s.nx();
    const int ny = s.ny();
    Field2D u(nx, ny, s.dx());
    Field2D v(nx, ny, s.dx());
    const int di[4] = {-1, 1, 0, 0};
    const int dj[4] = {0, 0, -1, 1};
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            if (is_material(s, i, j)) {
                u(i, j) = s.velocity_x(i, j);
                v(i, j) = s.velocity_y(i, j);
                continue;
            }
            double su = 0.0;
            double sv = 0.0;
            int count = 0;
            for (int k = 0; k < 4; ++k) {
                const int ii = i + di[k];
                const int jj = j + dj[k];
                if (ii < 0 || ii >= nx || jj < 0 || jj >= ny) continue;
                if (!is_material(s, ii, jj)) continue;
                su += s.velocity_x(ii, jj);
                sv += s.velocity_y(ii, jj);
                ++count;
            }
            if (count > 0) {
                u(i, j) = su / count;
                v(i, j) = sv / count;
            } else {
                u(i, j) = s.velocity_x(i, j);
                v(i, j) = s.velocity_y(i, j);
            }
        }
    }
    return {std::move(u), std::move(v)};
}

double Solver::compute_dt(const SimState& s, double t_limit) const {
    const MaterialModel& m = cfg_.material;
    double max_speed = 0.0;
    double min_rho = std::numeric_limits<double>::infinity();
    bool any_material = false;
    for (int j = 0; j < s.ny(); ++j) {
        for (int i = 0; i < s.nx(); ++i) {
            const double speed = std::abs(s.velocity_x(i, j)) + std::abs(s.velocity_y(i, j));
            if (!is_material(s, i, j)) {
                max_speed = std::max(max_speed, speed);
                continue;
            }
            any_material = true;
            const double rho_m = material_density(s, i, j);
            const double G = cfg_.strength ? shear_modulus(m, s.p(i, j), s.T(i, j)) : 0.0;
            const double c = adiabatic_sound_speed(m, rho_m, m.cv * (s.T(i, j) - m.T0), G);
            max_speed = std::max(max_speed, speed + c);
            min_rho = std::min(min_rho, rho_m);
        }
    }
    if (!any_material) throw DomainError("compute_dt: no material cells");

    const double dx = s.dx();
    double dt = cfg_.cfl * dx / max_speed;
    if (cfg_.conduction && m.chi > 0.0) {
        dt = std::min(dt, 0.25 * dx * dx * min_rho * m.cv / m.chi);
    }
    const double remaining = t_limit - s.t;
    if (remaining > 0.0 && dt >= remaining) dt = remaining;
    return dt;
}

SimState Solver::hyperbolic_step(const SimState& s, double dt, BoundaryFlux* flux) const {
    const int nx = s.nx();
    const int ny = s.ny();
    const double dx = s.dx();
    const MaterialModel& m = cfg_.material;
    const Boundaries& bc = cfg_.boundaries;

    std::vector<Prim> cells(static_cast<std::size_t>(nx) * ny);
    auto at = [&](int i, int j) -> Prim& { return cells[static_cast<std::size_t>(j) * nx + i]; };
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            Prim& q = at(i, j);
            q.rho = s.rho(i, j);
            q.mx = s.mom_x(i, j);
            q.my = s.mom_y(i, j);
            q.en = s.energy(i, j);
            q.u = s.velocity_x(i, j);
            q.v = s.velocity_y(i, j);
            q.material = is_material(s, i, j);
            if (q.material) {
                q.frac = s.mu(i, j);
                q.p = s.p(i, j);
                q.sxx = s.sxx(i, j);
                q.syy = s.syy(i, j);
                q.sxy = s.sxy(i, j);
                const double G = cfg_.strength ? shear_modulus(m, q.p, s.T(i, j)) : 0.0;
                q.c = adiabatic_sound_speed(m, material_density(s, i, j),
                                            m.cv * (s.T(i, j) - m.T0), G);
            }
        }
    }

    auto ghost = [&](const Prim& edge, const Prim& opposite, BoundaryKind kind, int axis) {
        switch (kind) {
            case BoundaryKind::Wall:
                return mirrored(edge, axis);
            case BoundaryKind::Periodic:
                return opposite;
            case BoundaryKind::ZeroGradient:
                break;
        }
        return edge;
    };

    // fx(i, j) is the flux through the face between cells i-1 and i.
    std::vector<Flux> fx(static_cast<std::size_t>(nx + 1) * ny);
    std::vector<Flux> fy(static_cast<std::size_t>(nx) * (ny + 1));
    // Interior faces whose four-cell stencil is all material; others stay first order.
    auto reconstructs = [&](const Prim& a, const Prim& b, const Prim& c, const Prim& d) {
        return cfg_.second_order && a.material && b.material && c.material && d.material;
    };
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i <= nx; ++i) {
            Prim l = i > 0 ? at(i - 1, j) : ghost(at(0, j), at(nx - 1, j), bc.x_lo, 0);
            Prim r = i < nx ? at(i, j) : ghost(at(nx - 1, j), at(0, j), bc.x_hi, 0);
            if (i >= 2 && i + 1 < nx && reconstructs(at(i - 2, j), l, r, at(i + 1, j))) {
                std::tie(l, r) = muscl(at(i - 2, j), l, r, at(i + 1, j));
            }
            fx[static_cast<std::size_t>(j) * (nx + 1) + i] = face_flux(l, r, 0);
        }
    }
    for (int j = 0; j <= ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            Prim l = j > 0 ? at(i, j - 1) : ghost(at(i, 0), at(i, ny - 1), bc.y_lo, 1);
            Prim r = j < ny ? at(i, j) : ghost(at(i, ny - 1), at(i, 0), bc.y_hi, 1);
            if (j >= 2 && j + 1 < ny && reconstructs(at(i, j - 2), l, r, at(i, j + 1))) {
                std::tie(l, r) = muscl(at(i, j - 2), l, r, at(i, j + 1));
            }
            fy[static_cast<std::size_t>(j) * nx + i] = face_flux(l, r, 1);
        }
    }
    auto FX = [&](int i, int j) -> const Flux& { return fx[static_cast<std::size_t>(j) * (nx + 1) + i]; };
    auto FY = [&](int i, int j) -> const Flux& { return fy[static_cast<std::size_t>(j) * nx + i]; };

    if (flux != nullptr) {
        BoundaryFlux b;
        for (int j = 0; j < ny; ++j) {
            b.mass += FX(0, j).mass - FX(nx, j).mass;
            b.energy += FX(0, j).en - FX(nx, j).en;
        }
        for (int i = 0; i < nx; ++i) {
            b.mass += FY(i, 0).mass - FY(i, ny).mass;
            b.energy += FY(i, 0).en - FY(i, ny).en;
        }
        flux->mass = b.mass * dt * dx;
        flux->energy = b.energy * dt * dx;
    }

    SimState out = s;
    const double k = dt / dx;
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const Flux& w = FX(i, j);
            const Flux& e = FX(i + 1, j);
            const Flux& so = FY(i, j);
            const Flux& n = FY(i, j + 1);
            out.rho(i, j) -= k * ((e.mass - w.mass) + (n.mass - so.mass));
            out.mom_x(i, j) -= k * ((e.mx - w.mx) + (n.mx - so.mx));
            out.mom_y(i, j) -= k * ((e.my - w.my) + (n.my - so.my));
            out.energy(i, j) -= k * ((e.en - w.en) + (n.en - so.en));
            if (out.rho(i, j) < 0.0 || !std::isfinite(out.rho(i, j))) {
                throw NumericalError("negative or non-finite density at cell (" +
                                         std::to_string(i) + ", " + std::to_string(j) + ")",
                                     s.step, s.t);
            }
        }
    }

    // Passive transport of the volume fraction and the material history.
    const auto [ut, vt] = transport_velocity(s);
    const PadSpec padding = passive_padding();
    auto transport = [&](const Field2D& q, Field2D& target) {
        Field2D rate = upwind_advect(q, ut, vt, padding);
        rate *= dt;
        target += rate;
    };
    transport(s.mu, out.mu);
    transport(s.sxx, out.sxx);
    transport(s.syy, out.syy);
    transport(s.sxy, out.sxy);
    transport(s.eps_pl, out.eps_pl);
    transport(s.epsdot_pl, out.epsdot_pl);
    transport(s.e_el, out.e_el);
    transport(s.e_cpl, out.e_cpl);

    // Cells touched by an interface (transported mu below 1) hold material
    // in equilibrium with the void, at the reference density: compression
    // closes the void first and a receding surface cannot sustain tension.
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            if (out.mu(i, j) < 1.0) {
                out.mu(i, j) = std::min(1.0, out.rho(i, j) / m.rho0);
            } else {
                out.mu(i, j) = 1.0;
            }
            out.eps_pl(i, j) = std::max(out.eps_pl(i, j), 0.0);
            out.epsdot_pl(i, j) = std::max(out.epsdot_pl(i, j), 0.0);
            out.e_cpl(i, j) = std::max(out.e_cpl(i, j), 0.0);
        }
    }
    return eos_sync(out);
}

SimState Solver::stress_predictor(const SimState& s, double dt) const {
    if (!cfg_.strength) return s;
    const MaterialModel& m = cfg_.material;
    const auto [ut, vt] = transport_velocity(s);
    const auto [dudx, dudy] = gradient(ut);
    const auto [dvdx, dvdy] = gradient(vt);

    SimState out = s;
    for (int j = 0; j < s.ny(); ++j) {
        for (int i = 0; i < s.nx(); ++i) {
            if (!is_material(s, i, j)) continue;
            const double sxx = s.sxx(i, j);
            const double syy = s.syy(i, j);
            const double sxy = s.sxy(i, j);
            const double szz = -(sxx + syy);
            const double div = dudx(i, j) + dvdy(i, j);
            const double dxx = dudx(i, j) - div / 3.0;
            const double dyy = dvdy(i, j) - div / 3.0;
            const double dzz = -div / 3.0;
            const double dxy = 0.5 * (dudy(i, j) + dvdx(i, j));
            const double spin = 0.5 * (dudy(i, j) - dvdx(i, j));  // W_xy
            const double G = shear_modulus(m, s.p(i, j), s.T(i, j));

            // dS/dt = -(SW - WS) + 2 G D'
            out.sxx(i, j) = sxx + dt * (2.0 * spin * sxy + 2.0 * G * dxx);
            out.syy(i, j) = syy + dt * (-2.0 * spin * sxy + 2.0 * G * dyy);
            out.sxy(i, j) = sxy + dt * (-spin * (sxx - syy) + 2.0 * G * dxy);

            const double power = sxx * dxx + syy * dyy + szz * dzz + 2.0 * sxy * dxy;
            out.e_el(i, j) += dt * power / material_density(s, i, j);
        }
    }
    return out;
}

SimState Solver::radial_return(const SimState& s, double dt) const {
    if (!cfg_.strength) return s;
    const MaterialModel& m = cfg_.material;
    SimState out = s;
    for (int j = 0; j < s.ny(); ++j) {
        for (int i = 0; i < s.nx(); ++i) {
            if (!is_material(s, i, j)) {
                out.epsdot_pl(i, j) = 0.0;
                continue;
            }
            const double sxx = s.sxx(i, j);
            const double syy = s.syy(i, j);
            const double sxy = s.sxy(i, j);
            const double szz = -(sxx + syy);
            const double svm =
                std::sqrt(1.5 * (sxx * sxx + syy * syy + szz * szz + 2.0 * sxy * sxy));
            const double yield =
                yield_stress_jc(m, s.eps_pl(i, j), s.epsdot_pl(i, j), s.T(i, j), s.p(i, j));
            if (svm <= yield) {
                out.epsdot_pl(i, j) = 0.0;
                continue;
            }
            const double G = shear_modulus(m, s.p(i, j), s.T(i, j));
            if (!(G > 0.0)) {
                throw NumericalError("non-positive shear modulus in radial return", s.step, s.t);
            }
            const double scale = yield / svm;
            out.sxx(i, j) = sxx * scale;
            out.syy(i, j) = syy * scale;
            out.sxy(i, j) = sxy * scale;
            const double deps = (svm - yield) / (3.0 * G);
            out.eps_pl(i, j) = s.eps_pl(i, j) + deps;
            out.epsdot_pl(i, j) = deps / dt;
            const double work = yield * deps / material_density(s, i, j);
            out.e_cpl(i, j) += (1.0 - m.beta) * work;
            out.e_el(i, j) -= work;
        }
    }
    return out;
}

SimState Solver::conduction_step(const SimState& s, double dt) const {
    const MaterialModel& m = cfg_.material;
    if (!cfg_.conduction || m.chi == 0.0) return s;
    const int nx = s.nx();
    const int ny = s.ny();
    const double dx = s.dx();
    const Boundaries& bc = cfg_.boundaries;
    const bool periodic_x = bc.x_lo == BoundaryKind::Periodic;
    const bool periodic_y = bc.y_lo == BoundaryKind::Periodic;

    // Everything except e is frozen during this substep.
    Field2D kinetic(nx, ny, dx);
    Field2D cold(nx, ny, dx);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const double u = s.velocity_x(i, j);
            const double v = s.velocity_y(i, j);
            kinetic(i, j) = 0.5 * (u * u + v * v);
            if (is_material(s, i, j)) {
                cold(i, j) = cold_(material_density(s, i, j)) + s.e_el(i, j) + s.e_cpl(i, j);
            }
        }
    }

    // d(rho E)/dt = div(chi grad T) with zero flux into vacuum and at the edges.
    auto rate = [&](const Field2D& energy) {
        Field2D temp(nx, ny, dx);
        for (int j = 0; j < ny; ++j) {
            for (int i = 0; i < nx; ++i) {
                if (!is_material(s, i, j)) continue;
                const double e = energy(i, j) / s.rho(i, j) - kinetic(i, j);
                temp(i, j) = temperature_from_state(m, e, cold(i, j));
            }
        }
        Field2D out(nx, ny, dx);
        const double k = m.chi / (dx * dx);
        auto face = [&](int il, int jl, int ir, int jr) {
            if (!is_material(s, il, jl) || !is_material(s, ir, jr)) return 0.0;
            return k * (temp(il, jl) - temp(ir, jr));  // flow from l to r
        };
        for (int j = 0; j < ny; ++j) {
            for (int i = 0; i < nx; ++i) {
                if (!is_material(s, i, j)) continue;
                double west = 0.0, east = 0.0, south = 0.0, north = 0.0;
                if (i > 0) west = face(i - 1, j, i, j);
                else if (periodic_x) west = face(nx - 1, j, i, j);
                if (i < nx - 1) east = face(i, j, i + 1, j);
                else if (periodic_x) east = face(i, j, 0, j);
                if (j > 0) south = face(i, j - 1, i, j);
                else if (periodic_y) south = face(i, ny - 1, i, j);
                if (j < ny - 1) north = face(i, j, i, j + 1);
                else if (periodic_y) north = face(i, j, i, 0);
                out(i, j) = (west - east) + (south - north);
            }
        }
        return out;
    };

    SimState out = s;
    if (cfg_.conduction_integrator == ConductionIntegrator::RK4) {
        out.energy = rk4_integrate(s.energy, rate, dt);
    } else {
        Field2D r = rate(s.energy);
        r *= dt;
        out.energy += r;
    }
    return out;
}

SimState Solver::eos_sync(const SimState& s) const {
    const MaterialModel& m = cfg_.material;
    SimState out = s;
    for (int j = 0; j < s.ny(); ++j) {
        for (int i = 0; i < s.nx(); ++i) {
            if (!is_material(s, i, j)) {
                out.p(i, j) = 0.0;
                out.T(i, j) = 0.0;
                out.sxx(i, j) = 0.0;
                out.syy(i, j) = 0.0;
                out.sxy(i, j) = 0.0;
                continue;
            }
            const double rho_m = material_density(s, i, j);
            const double u = s.velocity_x(i, j);
            const double v = s.velocity_y(i, j);
            const double e = s.energy(i, j) / s.rho(i, j) - 0.5 * (u * u + v * v);
            const double e_c = cold_(rho_m) + s.e_el(i, j) + s.e_cpl(i, j);
            out.p(i, j) = pressure_mie_gruneisen(m, rho_m, e, e_c);
            out.T(i, j) = temperature_from_state(m, e, e_c);
        }
    }
    return out;
}

SimState Solver::advance(const SimState& s, double t_limit) {
    try {
        const double dt = compute_dt(s, t_limit);
        StepAudit audit;
        if (cfg_.audit) {
            audit.mass_before = s.total_mass();
            audit.energy_before = s.total_energy();
        }
        SimState next = hyperbolic_step(s, dt, cfg_.audit ? &audit.boundary : nullptr);
        next = stress_predictor(next, dt);
        next = radial_return(next, dt);
        next = conduction_step(next, dt);
        next = eos_sync(next);

        const double remaining = t_limit - s.t;
        next.t = (remaining > 0.0 && dt == remaining) ? t_limit : s.t + dt;
        next.step = s.step + 1;
        if (cfg_.audit) {
            audit.mass_after = next.total_mass();
            audit.energy_after = next.total_energy();
            audit_ = audit;
        }
        for (double v : next.energy.values()) {
            if (!std::isfinite(v)) throw NumericalError("non-finite energy", next.step, next.t);
        }
        last_dt_ = dt;
        return next;
    } catch (const NumericalError&) {
        throw;
    } catch (const std::exception& e) {
        throw NumericalError(e.what(), s.step, s.t);
    }
}

}  // namespace shockpore
