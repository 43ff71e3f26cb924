// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "shockpore/analysis.hpp"
#include "shockpore/cli.hpp"
#include "shockpore/dataset.hpp"
#include "shockpore/materials.hpp"
#include "shockpore/solver.hpp"

using namespace shockpore;
namespace fs = std::filesystem;

namespace {

// Tolerances
constexpr double kConstitutiveRel = 1e-12;
constexpr double kReturnRel = 1e-9;
constexpr double kHugoniotRel = 0.05;
constexpr double kMassDrift = 1e-8;
constexpr double kEnergyPerStep = 1e-5;
constexpr double kSymmetry = 1e-8;
constexpr double kCollapseHeating = 2.0;
constexpr double kCollapseOnset = 0.9;  // pore area fraction below which collapse is under way
constexpr double kExitedMass = 1e-12;   // boundary mass flux (relative) that counts as material exiting
constexpr std::size_t kPdfBins = 64;
constexpr double kNormRoundTrip = 1e-12;
constexpr double kParseval = 1e-9;

struct Outcome {
    bool pass = true;
    std::string detail;
};

class Check {
public:
    void require(bool ok, const std::string& what) {
        if (!ok) {
            out_.pass = false;
            if (!failures_.empty()) failures_ += "; ";
            failures_ += what;
        }
    }
    void note(const std::string& s) {
        if (!notes_.empty()) notes_ += ", ";
        notes_ += s;
    }
    Outcome done() {
        out_.detail = out_.pass ? notes_ : failures_ + (notes_.empty() ? "" : " [" + notes_ + "]");
        return out_;
    }

private:
    Outcome out_;
    std::string failures_;
    std::string notes_;
};

std::string num(double v, int prec = 6) {
    std::ostringstream s;
    s.precision(prec);
    s << v;
    return s.str();
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// -- 1 ------------------------------------------------------------------------------

Outcome constitutive() {
    Check c;
    const MaterialModel m = rdx_table1();
    c.require(cold_pressure(m, m.rho0) == 0.0, "cold_pressure(rho0) != 0");
    const double y = yield_stress_jc(m, 0.0, m.epsdot0, m.Tref, m.pref);
    c.require(rel(y, 0.3e9) <= kConstitutiveRel, "yield at reference = " + num(y, 17));
    const double G = shear_modulus(m, 0.0, m.T0);
    c.require(rel(G, 5.314e9) <= kConstitutiveRel, "G(0,T0) = " + num(G, 17));
    const double Tm = melt_temperature(m, m.pref);
    c.require(rel(Tm, 478.0) <= kConstitutiveRel, "Tm(pref) = " + num(Tm, 17));
    const double gamma = gruneisen(m, m.rho0);
    c.require(rel(gamma, 1.870111) <= kConstitutiveRel, "Gamma(rho0) = " + num(gamma, 17));
    c.note("Gamma(rho0)=" + num(gamma, 10) + " Tm=" + num(Tm, 10) + " K");
    return c.done();
}

// -- 2 ------------------------------------------------------------------------------

double von_mises(double sxx, double syy, double sxy) {
    const double szz = -(sxx + syy);
    return std::sqrt(1.5 * (sxx * sxx + syy * syy + szz * szz + 2.0 * sxy * sxy));
}

Outcome radial_return_suite() {
    Check c;
    RunConfig cfg;
    cfg.nx = cfg.ny = 1;
    cfg.pore_diameter = 0.0;
    Solver solver(cfg);
    const MaterialModel& m = solver.material();
    std::mt19937_64 rng(20240607);
    std::uniform_real_distribution<double> stress(-2e9, 2e9);
    std::uniform_real_distribution<double> strain(0.0, 1.0);
    std::uniform_real_distribution<double> rate(0.0, 1e6);
    std::uniform_real_distribution<double> temp(200.0, 600.0);
    std::uniform_real_distribution<double> pres(-0.5e9, 10e9);
    int plastic = 0, elastic = 0, bad_yield = 0, bad_axis = 0, bad_elastic = 0;
    for (int n = 0; n < 10000; ++n) {
        SimState s(1, 1, cfg.dx);
        s.mu(0, 0) = 1.0;
        s.rho(0, 0) = m.rho0;
        s.sxx(0, 0) = stress(rng);
        s.syy(0, 0) = stress(rng);
        s.sxy(0, 0) = stress(rng);
        s.eps_pl(0, 0) = strain(rng);
        s.epsdot_pl(0, 0) = rate(rng);
        s.T(0, 0) = temp(rng);
        s.p(0, 0) = pres(rng);
        const double yield = yield_stress_jc(m, s.eps_pl(0, 0), s.epsdot_pl(0, 0), s.T(0, 0), s.p(0, 0));
        const double vm0 = von_mises(s.sxx(0, 0), s.syy(0, 0), s.sxy(0, 0));
        const SimState r = solver.radial_return(s, 1e-13);
        const double vm = von_mises(r.sxx(0, 0), r.syy(0, 0), r.sxy(0, 0));
        if (vm0 <= yield) {
            ++elastic;
            if (r.sxx(0, 0) != s.sxx(0, 0) || r.syy(0, 0) != s.syy(0, 0) || r.sxy(0, 0) != s.sxy(0, 0) ||
                r.eps_pl(0, 0) != s.eps_pl(0, 0)) {
                ++bad_elastic;
            }
            continue;
        }
        ++plastic;
        if (vm > yield * (1.0 + kReturnRel) + 1e-300) ++bad_yield;
        const double k = vm / vm0;
        const double scale = std::max({std::abs(s.sxx(0, 0)), std::abs(s.syy(0, 0)), std::abs(s.sxy(0, 0))});
        for (auto [a, b] : {std::pair{r.sxx(0, 0), s.sxx(0, 0)}, std::pair{r.syy(0, 0), s.syy(0, 0)},
                            std::pair{r.sxy(0, 0), s.sxy(0, 0)}}) {
            if (std::abs(a - k * b) > kReturnRel * k * scale) {
                ++bad_axis;
                break;
            }
        }
    }
    c.require(bad_yield == 0, std::to_string(bad_yield) + " states above yield");
    c.require(bad_axis == 0, std::to_string(bad_axis) + " states not coaxial");
    c.require(bad_elastic == 0, std::to_string(bad_elastic) + " elastic states modified");
    c.require(plastic > 1000 && elastic > 100, "sample does not cover both regimes");
    c.note(std::to_string(plastic) + " plastic, " + std::to_string(elastic) + " elastic of 10000");
    return c.done();
}

// -- 3 ------------------------------------------------------------------------------

// Shock speed from the Rankine-Hugoniot conditions for the same Mie-Grueneisen
// closure, with its own cold curve, cold energy and root finder.
double rankine_hugoniot_us(double up) {
    const double rho0 = 1800.0, K0 = 13e9, K0p = 9.2;
    auto pc = [&](double rho) {
        const double x = rho / rho0;
        return 1.5 * K0 * (std::pow(x, 7.0 / 3.0) - std::pow(x, 5.0 / 3.0)) *
               (1.0 + 0.75 * (K0p - 4.0) * (std::pow(x, 2.0 / 3.0) - 1.0));
    };
    auto ec = [&](double rho) {
        const int n = 20000;
        const double h = (rho - rho0) / n;
        double s = 0.5 * (pc(rho0) / (rho0 * rho0) + pc(rho) / (rho * rho));
        for (int k = 1; k < n; ++k) {
            const double r = rho0 + k * h;
            s += pc(r) / (r * r);
        }
        return s * h;
    };
    auto gamma = [&](double rho) {
        const double r = rho0 / rho;
        return 0.667 + 2.00878 * r - 0.805669 * r * r;
    };
    // Jump from rest at (rho0, e = 0, p = 0): e1 = up^2 / 2, p1 = rho0 Us up,
    // Us = up eta / (eta - 1).
    const double e1 = 0.5 * up * up;
    auto residual = [&](double eta) {
        const double rho = eta * rho0;
        const double p_eos = pc(rho) + gamma(rho) * rho * (e1 - ec(rho));
        const double us = up * eta / (eta - 1.0);
        return p_eos - rho0 * us * up;
    };
    double lo = 1.0 + 1e-6, hi = 3.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if ((residual(lo) < 0.0) == (residual(mid) < 0.0)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    const double eta = 0.5 * (lo + hi);
    return up * eta / (eta - 1.0);
}

Outcome hugoniot() {
    Check c;
    for (double up : {1000.0, 2000.0}) {
        RunConfig cfg;
        cfg.Up = up;
        cfg.nx = 1;
        cfg.ny = 512;
        cfg.pore_diameter = 0.0;
        cfg.block_height_fraction = 1.0;
        cfg.strength = false;
        cfg.snapshot_dt = 2.5e-12;
        cfg.n_snapshots = 40;
        const SnapshotSeries s = simulate(cfg);
        const ShockSpeed measured = measure_shock_speed(s);
        const double oracle = rankine_hugoniot_us(up);
        const double err = rel(measured.Us, oracle);
        c.require(err <= kHugoniotRel, "Up=" + num(up) + ": Us " + num(measured.Us) + " vs " + num(oracle));
        c.note("Up=" + num(up) + " Us=" + num(measured.Us, 5) + " oracle=" + num(oracle, 5) + " (" +
               num(100.0 * err, 2) + "%)");
    }
    return c.done();
}

// -- 4 and 5 ------------------------------------------------------------------------

struct PoreRun {
    SnapshotSeries series;
    double max_mass_residual = 0.0;
    double max_raw_drift = 0.0;
    long raw_steps = 0;
    double max_energy_residual = 0.0;
    long steps = 0;
};

PoreRun pore_collapse_run() {
    RunConfig cfg;
    cfg.Up = 1800.0;
    cfg.n_snapshots = 20;
    cfg.audit = true;
    PoreRun r;
    double m0 = -1.0;
    double inflow = 0.0;
    bool exited = false;
    r.series = simulate(cfg, nullptr, [&](const SimState& s, const Solver& solver, bool) {
        if (s.step == 0) return;
        const StepAudit& a = solver.last_audit();
        if (m0 < 0.0) m0 = a.mass_before;
        inflow += a.boundary.mass;
        // Raw drift only while nothing has crossed the domain boundary.
        exited = exited || std::abs(inflow) > kExitedMass * m0;
        if (!exited) {
            r.max_raw_drift = std::max(r.max_raw_drift, std::abs(s.total_mass() - m0) / m0);
            ++r.raw_steps;
        }
        r.max_mass_residual = std::max(r.max_mass_residual, std::abs(a.mass_residual()));
        r.max_energy_residual = std::max(r.max_energy_residual, std::abs(a.energy_residual()));
        ++r.steps;
    });
    return r;
}

double mirror_error(const SnapshotSeries& s) {
    double worst = 0.0;
    for (std::size_t k = 0; k < s.n_frames(); ++k) {
        for (int c = 0; c < kChannelCount; ++c) {
            const Channel ch = static_cast<Channel>(c);
            const double sign = ch == Channel::U ? -1.0 : 1.0;
            double scale = 0.0;
            for (double v : s.channel(k, ch)) scale = std::max(scale, std::abs(v));
            if (scale == 0.0) continue;
            for (int j = 0; j < s.ny; ++j) {
                for (int i = 0; i < s.nx / 2; ++i) {
                    const double d = std::abs(s.at(k, ch, i, j) - sign * s.at(k, ch, s.nx - 1 - i, j));
                    worst = std::max(worst, d / scale);
                }
            }
        }
    }
    return worst;
}

Outcome conservation(const PoreRun& r) {
    Check c;
    const double sym = mirror_error(r.series);
    c.require(r.raw_steps > 0 && r.max_raw_drift <= kMassDrift, "raw mass drift " + num(r.max_raw_drift));
    c.require(r.max_mass_residual <= kMassDrift, "mass balance residual " + num(r.max_mass_residual));
    c.require(r.max_energy_residual <= kEnergyPerStep, "energy residual " + num(r.max_energy_residual));
    c.require(sym <= kSymmetry, "mirror asymmetry " + num(sym));
    c.note(std::to_string(r.steps) + " steps, mass drift " + num(r.max_raw_drift, 3) + " over " +
           std::to_string(r.raw_steps) + " closed steps, mass residual " + num(r.max_mass_residual, 3) +
           ", energy residual " + num(r.max_energy_residual, 3) + ", asymmetry " + num(sym, 3));
    return c.done();
}

double frame_max_T(const SnapshotSeries& s, std::size_t k) {
    double t = 0.0;
    for (double v : s.channel(k, Channel::T)) t = std::max(t, v);
    return t;
}

Outcome qualitative(const PoreRun& r) {
    Check c;
    const SnapshotSeries& s = r.series;
    const auto collapse = pore_collapse_time(s);
    c.require(collapse.has_value(), "pore did not collapse");
    if (!collapse) return c.done();
    // Pre-collapse: frames before the pore has started to close.
    const double area0 = static_cast<double>(enclosed_vacuum_cells(s, 0));
    std::size_t onset = 0;
    while (onset < s.n_frames() && enclosed_vacuum_cells(s, onset) >= kCollapseOnset * area0) ++onset;
    double pre = 0.0, post = 0.0;
    for (std::size_t k = 0; k < onset; ++k) pre = std::max(pre, frame_max_T(s, k));
    for (std::size_t k = *collapse; k < s.n_frames(); ++k) post = std::max(post, frame_max_T(s, k));
    c.require(onset > 0 && post >= kCollapseHeating * pre, "post/pre max T = " + num(post / pre));
    const Histogram h = field_pdf(s, Channel::T, *collapse, kPdfBins);
    const std::size_t regions = occupied_regions(h);
    c.require(regions >= 2, "T pdf at collapse has " + std::to_string(regions) + " occupied region(s)");
    c.note("closing from frame " + std::to_string(onset) + ", collapse frame " + std::to_string(*collapse) +
           " (" + num(*collapse * s.dt_snap * 1e12) + " ps), max T " + num(pre, 5) + " K -> " + num(post, 5) + " K, " + std::to_string(regions) +
           " pdf regions");
    return c.done();
}

// -- 6 ------------------------------------------------------------------------------

Outcome dataset_pipeline() {
    Check c;
    const VelocitySplit sp = split_velocities();
    c.require(sp.train.size() == 70 && sp.validation.size() == 18 && sp.test.size() == 26,
              "split counts " + std::to_string(sp.train.size()) + "/" + std::to_string(sp.validation.size()) +
                  "/" + std::to_string(sp.test.size()));

    RunConfig cfg;
    cfg.Up = 1500.0;
    cfg.nx = 32;
    cfg.ny = 48;
    cfg.pore_diameter = 10 * cfg.dx;
    cfg.snapshot_dt = 1e-12;
    cfg.n_snapshots = 6;
    const SnapshotSeries s = simulate(cfg);
    const NormStats st = fit_norm(std::span<const SnapshotSeries>(&s, 1));
    const SnapshotSeries back = denormalize(normalize(s, st), st);
    double worst = 0.0;
    for (std::size_t k = 0; k < s.n_frames(); ++k) {
        for (std::size_t q = 0; q < s.frame_size(); ++q) {
            const double a = s.frames[k][q];
            worst = std::max(worst, std::abs(back.frames[k][q] - a) / std::max(1.0, std::abs(a)));
        }
    }
    c.require(worst <= kNormRoundTrip, "normalization round trip " + num(worst));

    std::ostringstream first(std::ios::binary);
    write_series(s, first);
    std::istringstream in(first.str(), std::ios::binary);
    const SnapshotSeries read = read_series(in);
    std::ostringstream second(std::ios::binary);
    write_series(read, second);
    c.require(first.str() == second.str(), "container round trip is not bitwise");
    const std::size_t expected = kHeaderBytes + s.n_frames() * 5u * 4u * s.nx * s.ny;
    c.require(first.str().size() == expected, "file size " + std::to_string(first.str().size()));
    c.note("norm round trip " + num(worst, 3) + ", " + std::to_string(expected) + " bytes");
    return c.done();
}

// -- 7 ------------------------------------------------------------------------------

Outcome metric_oracles() {
    Check c;
    std::mt19937 rng(7);
    std::normal_distribution<double> noise(0.0, 1.0);

    // RMSE: a constant offset per channel is recovered exactly.
    SnapshotSeries truth;
    truth.nx = 12;
    truth.ny = 10;
    truth.dx = 1e-9;
    truth.dt_snap = 1e-12;
    truth.frames.assign(4, Frame(truth.frame_size()));
    for (auto& f : truth.frames) {
        for (auto& v : f) v = std::abs(noise(rng));
        for (std::size_t q = 2 * 120; q < 3 * 120; ++q) f[q] = std::min(f[q], 1.0);
    }
    SnapshotSeries pred = truth;
    const double offsets[kChannelCount] = {50.0, 2e8, 0.0, 3.0, -7.0};
    for (std::size_t k = 0; k < 4; ++k) {
        for (int ch = 0; ch < kChannelCount; ++ch) {
            for (auto& v : pred.channel(k, static_cast<Channel>(ch))) v += offsets[ch];
        }
    }
    const auto rmse = rollout_rmse(pred, truth);
    for (int ch = 0; ch < kChannelCount; ++ch) {
        c.require(std::abs(rmse[ch] - std::abs(offsets[ch])) <= 1e-9 * std::max(1.0, std::abs(offsets[ch])),
                  std::string("rmse ") + kChannelNames[ch]);
    }

    // Parseval for the radial spectrum.
    Field2D f(48, 40, 1e-9);
    double energy = 0.0;
    for (double& v : f.values()) {
        v = noise(rng);
        energy += v * v;
    }
    const RadialSpectrum spec = radial_spectrum(f);
    double binned = 0.0;
    for (double p : spec.power) binned += p;
    const double parseval = std::abs(binned - energy) / energy;
    c.require(parseval <= kParseval, "Parseval " + num(parseval));

    // Haar: 2x2 checkerboard has all its detail in the diagonal band.
    Field2D board(8, 8, 1e-9);
    for (int j = 0; j < 8; ++j) {
        for (int i = 0; i < 8; ++i) board(i, j) = (i + j) % 2 ? -1.0 : 1.0;
    }
    const double haar = haar_highfreq_energy(board);
    c.require(std::abs(haar - 2.0) <= 1e-12, "checkerboard Haar energy " + num(haar));

    // Gaussian band on a cut of cells k * dx.
    const double dx = 1.1719e-9;
    const double sigma = 3.0e-9;
    const int peak_row = 97;
    Profile prof;
    for (int j = 25; j < 150; ++j) {
        const double y = j * dx;
        prof.y.push_back(y);
        prof.T.push_back(300.0 + 400.0 * std::exp(-0.5 * std::pow((y - peak_row * dx) / sigma, 2)));
    }
    const auto band = dominant_band(prof);
    c.require(band.has_value(), "Gaussian band not detected");
    if (band) {
        const double fwhm = 2.0 * std::sqrt(2.0 * std::log(2.0)) * sigma;
        c.require(std::abs(band->y_peakT - peak_row * dx) <= dx, "band location " + num(band->y_peakT));
        c.require(std::abs(band->width - fwhm) <= dx, "band width " + num(band->width) + " vs " + num(fwhm));
        c.note("FWHM " + num(band->width * 1e9, 5) + " nm vs " + num(fwhm * 1e9, 5) + " nm");
    }
    c.note("Parseval " + num(parseval, 3) + ", Haar " + num(haar));
    return c.done();
}

// -- 8 ------------------------------------------------------------------------------

Outcome determinism() {
    Check c;
    const fs::path dir = fs::temp_directory_path() / "shockpore_acceptance_sweep";
    fs::remove_all(dir);
    fs::create_directories(dir);
    {
        std::ofstream cfg(dir / "tiny.cfg");
        cfg << "[geometry]\nnx = 24\nny = 32\npore_diameter_nm = 8\n"
               "[solver]\nsnapshot_dt_ps = 1\nn_snapshots = 5\n";
    }
    auto sweep = [&](const std::string& jobs, const std::string& out) {
        const std::string cfg = (dir / "tiny.cfg").string();
        const std::string target = (dir / out).string();
        const char* argv[] = {"shockpore", "sweep", cfg.c_str(), "--velocities", "900,1300,1700,2100",
                              "--jobs", jobs.c_str(), "--out", target.c_str()};
        std::ostringstream sink;
        return cli::run(static_cast<int>(std::size(argv)), argv, sink, sink);
    };
    c.require(sweep("1", "serial") == 0, "serial sweep failed");
    c.require(sweep("3", "parallel") == 0, "parallel sweep failed");
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        return std::string(std::istreambuf_iterator<char>(in), {});
    };
    int files = 0;
    for (const char* name : {"v900.shrb", "v1300.shrb", "v1700.shrb", "v2100.shrb"}) {
        const std::string a = slurp(dir / "serial" / name);
        const std::string b = slurp(dir / "parallel" / name);
        c.require(!a.empty() && a == b, std::string(name) + " differs");
        ++files;
    }
    c.note(std::to_string(files) + " series identical for --jobs 1 and 3");
    fs::remove_all(dir);
    return c.done();
}

}  // namespace

int main() {
    using clock = std::chrono::steady_clock;
    int failed = 0;
    auto report = [&](int id, const char* name, const std::function<Outcome()>& fn) {
        const auto t0 = clock::now();
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(clock::now() - t0).count();
        if (!o.pass) ++failed;
        std::printf("%s [%d] %s (%.1f s): %s\n", o.pass ? "PASS" : "FAIL", id, name, secs, o.detail.c_str());
        std::fflush(stdout);
    };

    report(1, "constitutive exactness", constitutive);
    report(2, "radial return properties", radial_return_suite);
    report(3, "1D piston Hugoniot", hugoniot);
    PoreRun run;
    const auto t0 = clock::now();
    try {
        run = pore_collapse_run();
    } catch (const std::exception& e) {
        std::printf("pore collapse run failed: %s\n", e.what());
    }
    std::printf("     pore collapse run at 1800 m/s: %.1f s\n",
                std::chrono::duration<double>(clock::now() - t0).count());
    report(4, "conservation audit", [&] { return conservation(run); });
    report(5, "pore collapse physics", [&] { return qualitative(run); });
    report(6, "dataset pipeline", dataset_pipeline);
    report(7, "metric oracles", metric_oracles);
    report(8, "sweep determinism", determinism);
    return failed == 0 ? 0 : 1;
}
