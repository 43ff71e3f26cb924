#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "shockpore/run_config.hpp"

namespace shockpore::cli {

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,     // a run in a sweep failed, I/O error, metric not available
    kConfigError = 2, // bad config, bad flags, unreadable or mismatched inputs
    kNumerical = 3,   // solver aborted
};

/// Extra settings read from the [output] section.
struct OutputSettings {
    std::filesystem::path dir = ".";
    unsigned long long split_seed = 0;
    bool has_seed = false;
};

/// Parses an ini-style config:
///
///   [material]  any MaterialModel field, SI units (rho0, K0, G0, A, ...)
///   [geometry]  nx, ny, dx_nm, pore_diameter_nm, pore_center_x_nm,
///               pore_center_y_nm, block_height_fraction, T_init
///   [solver]    v0 (m/s), cfl, snapshot_dt_ps, n_snapshots, mu_vac,
///               strength, conduction, second_order, conduction_integrator (euler|rk4),
///               boundary_x_lo/x_hi/y_lo/y_hi (wall|zero-gradient|periodic),
///               audit, progress_every
///   [output]    dir, split_seed
///
/// Comments start with ';' or '#'. Unknown sections or keys and malformed
/// values throw ConfigError. The result is not validated.
RunConfig parse_config(std::istream& in, OutputSettings* output = nullptr);
RunConfig load_config(const std::filesystem::path& path, OutputSettings* output = nullptr);

/// Writes cfg in the format accepted by parse_config.
void write_config(std::ostream& out, const RunConfig& cfg, const OutputSettings& output = {});

/// "v1800" for integral speeds, "v1812p5" otherwise.
std::string series_stem(double v0);

/// Entry point for the shockpore command. Never throws.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace shockpore::cli
