#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cctype>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include "shockpore/cli.hpp"
#include "shockpore/errors.hpp"
#include "shockpore/units.hpp"

namespace shockpore::cli {

namespace {

namespace pt = boost::property_tree;

double to_double(const std::string& key, const std::string& text) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || text.find_first_not_of(" \t", used) != std::string::npos) {
        throw ConfigError("'" + key + "': expected a number, got '" + text + "'");
    }
    return v;
}

int to_int(const std::string& key, const std::string& text) {
    const double v = to_double(key, text);
    if (v != std::floor(v) || std::abs(v) > 1e9) {
        throw ConfigError("'" + key + "': expected an integer, got '" + text + "'");
    }
    return static_cast<int>(v);
}

bool to_bool(const std::string& key, const std::string& text) {
    if (text == "true" || text == "yes" || text == "on" || text == "1") return true;
    if (text == "false" || text == "no" || text == "off" || text == "0") return false;
    throw ConfigError("'" + key + "': expected true or false, got '" + text + "'");
}

BoundaryKind to_boundary(const std::string& key, const std::string& text) {
    if (text == "wall") return BoundaryKind::Wall;
    if (text == "zero-gradient") return BoundaryKind::ZeroGradient;
    if (text == "periodic") return BoundaryKind::Periodic;
    throw ConfigError("'" + key + "': expected wall, zero-gradient or periodic, got '" + text + "'");
}

const char* boundary_name(BoundaryKind b) {
    switch (b) {
        case BoundaryKind::Wall: return "wall";
        case BoundaryKind::Periodic: return "periodic";
        default: return "zero-gradient";
    }
}

using Setter = std::function<void(RunConfig&, OutputSettings&, const std::string& key, const std::string&)>;

Setter real(double MaterialModel::*field) {
    return [field](RunConfig& c, OutputSettings&, const std::string& k, const std::string& v) {
        c.material.*field = to_double(k, v);
    };
}

Setter scaled(double RunConfig::*field, double factor) {
    return [field, factor](RunConfig& c, OutputSettings&, const std::string& k, const std::string& v) {
        c.*field = to_double(k, v) * factor;
    };
}

Setter integer(int RunConfig::*field) {
    return [field](RunConfig& c, OutputSettings&, const std::string& k, const std::string& v) {
        c.*field = to_int(k, v);
    };
}

Setter flag(bool RunConfig::*field) {
    return [field](RunConfig& c, OutputSettings&, const std::string& k, const std::string& v) {
        c.*field = to_bool(k, v);
    };
}

Setter boundary(BoundaryKind Boundaries::*field) {
    return [field](RunConfig& c, OutputSettings&, const std::string& k, const std::string& v) {
        c.boundaries.*field = to_boundary(k, v);
    };
}

const std::map<std::string, std::map<std::string, Setter>>& registry() {
    static const std::map<std::string, std::map<std::string, Setter>> r = {
        {"material",
         {{"rho0", real(&MaterialModel::rho0)},
          {"K0", real(&MaterialModel::K0)},
          {"K0p", real(&MaterialModel::K0p)},
          {"G0", real(&MaterialModel::G0)},
          {"a1", real(&MaterialModel::a1)},
          {"a2", real(&MaterialModel::a2)},
          {"G_floor_fraction", real(&MaterialModel::G_floor_fraction)},
          {"Gamma0", real(&MaterialModel::Gamma0)},
          {"gamma1", real(&MaterialModel::gamma1)},
          {"gamma2", real(&MaterialModel::gamma2)},
          {"A", real(&MaterialModel::A)},
          {"B", real(&MaterialModel::B)},
          {"n", real(&MaterialModel::n)},
          {"m", real(&MaterialModel::m)},
          {"C", real(&MaterialModel::C)},
          {"epsdot0", real(&MaterialModel::epsdot0)},
          {"Tref", real(&MaterialModel::Tref)},
          {"Tmelt_ref", real(&MaterialModel::Tmelt_ref)},
          {"pref", real(&MaterialModel::pref)},
          {"a_melt", real(&MaterialModel::a_melt)},
          {"c_melt", real(&MaterialModel::c_melt)},
          {"melt_bracket_floor", real(&MaterialModel::melt_bracket_floor)},
          {"cv", real(&MaterialModel::cv)},
          {"chi", real(&MaterialModel::chi)},
          {"T0", real(&MaterialModel::T0)},
          {"e0", real(&MaterialModel::e0)},
          {"beta", real(&MaterialModel::beta)}}},
        {"geometry",
         {{"nx", integer(&RunConfig::nx)},
          {"ny", integer(&RunConfig::ny)},
          {"dx_nm", scaled(&RunConfig::dx, 1e-9)},
          {"pore_diameter_nm", scaled(&RunConfig::pore_diameter, 1e-9)},
          {"pore_center_x_nm", scaled(&RunConfig::pore_center_x, 1e-9)},
          {"pore_center_y_nm", scaled(&RunConfig::pore_center_y, 1e-9)},
          {"block_height_fraction", scaled(&RunConfig::block_height_fraction, 1.0)},
          {"T_init", scaled(&RunConfig::T_init, 1.0)}}},
        {"solver",
         {{"v0", scaled(&RunConfig::Up, 1.0)},
          {"cfl", scaled(&RunConfig::cfl, 1.0)},
          {"snapshot_dt_ps", scaled(&RunConfig::snapshot_dt, 1e-12)},
          {"n_snapshots", integer(&RunConfig::n_snapshots)},
          {"mu_vac", scaled(&RunConfig::mu_vac, 1.0)},
          {"strength", flag(&RunConfig::strength)},
          {"conduction", flag(&RunConfig::conduction)},
          {"second_order", flag(&RunConfig::second_order)},
          {"conduction_integrator",
           [](RunConfig& c, OutputSettings&, const std::string& k, const std::string& v) {
               if (v == "euler") {
                   c.conduction_integrator = ConductionIntegrator::Euler;
               } else if (v == "rk4") {
                   c.conduction_integrator = ConductionIntegrator::RK4;
               } else {
                   throw ConfigError("'" + k + "': expected euler or rk4, got '" + v + "'");
               }
           }},
          {"boundary_x_lo", boundary(&Boundaries::x_lo)},
          {"boundary_x_hi", boundary(&Boundaries::x_hi)},
          {"boundary_y_lo", boundary(&Boundaries::y_lo)},
          {"boundary_y_hi", boundary(&Boundaries::y_hi)},
          {"audit", flag(&RunConfig::audit)},
          {"progress_every", integer(&RunConfig::progress_every)}}},
        {"output",
         {{"dir", [](RunConfig&, OutputSettings& o, const std::string&,
                     const std::string& v) { o.dir = v; }},
          {"split_seed",
           [](RunConfig&, OutputSettings& o, const std::string& k, const std::string& v) {
               std::size_t used = 0;
               try {
                   if (!v.empty() && std::isdigit(static_cast<unsigned char>(v[0]))) {
                       o.split_seed = std::stoull(v, &used);
                   }
               } catch (const std::exception&) {
                   used = 0;
               }
               if (used == 0 || used != v.size()) {
                   throw ConfigError("'" + k + "': expected a non-negative integer");
               }
               o.has_seed = true;
           }}}},
    };
    return r;
}

}  // namespace

RunConfig parse_config(std::istream& in, OutputSettings* output) {
    // The ini reader only knows ';' comments.
    std::ostringstream cleaned;
    std::string line;
    while (std::getline(in, line)) {
        const auto first = line.find_first_not_of(" \t");
        if (first != std::string::npos && line[first] == '#') line.clear();
        cleaned << line << '\n';
    }
    std::istringstream src(cleaned.str());
    pt::ptree tree;
    try {
        pt::read_ini(src, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError("config line " + std::to_string(e.line()) + ": " + e.message());
    }

    RunConfig cfg;
    OutputSettings out;
    const auto& reg = registry();
    for (const auto& [section, body] : tree) {
        auto sec = reg.find(section);
        if (!body.data().empty()) throw ConfigError("key '" + section + "' is outside any section");
        if (sec == reg.end()) throw ConfigError("unknown config section [" + section + "]");
        for (const auto& [key, node] : body) {
            auto it = sec->second.find(key);
            if (it == sec->second.end()) {
                throw ConfigError("unknown key '" + key + "' in section [" + section + "]");
            }
            it->second(cfg, out, section + "." + key, node.get_value<std::string>());
        }
    }
    if (output) *output = out;
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path, OutputSettings* output) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    return parse_config(in, output);
}

void write_config(std::ostream& out, const RunConfig& c, const OutputSettings& o) {
    const MaterialModel& m = c.material;
    out << std::setprecision(17);
    out << "[material]\n"
        << "rho0 = " << m.rho0 << "\nK0 = " << m.K0 << "\nK0p = " << m.K0p << "\nG0 = " << m.G0
        << "\na1 = " << m.a1 << "\na2 = " << m.a2 << "\nG_floor_fraction = " << m.G_floor_fraction
        << "\nGamma0 = " << m.Gamma0 << "\ngamma1 = " << m.gamma1 << "\ngamma2 = " << m.gamma2
        << "\nA = " << m.A << "\nB = " << m.B << "\nn = " << m.n << "\nm = " << m.m << "\nC = " << m.C
        << "\nepsdot0 = " << m.epsdot0 << "\nTref = " << m.Tref << "\nTmelt_ref = " << m.Tmelt_ref
        << "\npref = " << m.pref << "\na_melt = " << m.a_melt << "\nc_melt = " << m.c_melt
        << "\nmelt_bracket_floor = " << m.melt_bracket_floor << "\ncv = " << m.cv << "\nchi = " << m.chi
        << "\nT0 = " << m.T0 << "\ne0 = " << m.e0 << "\nbeta = " << m.beta << "\n\n";
    out << "[geometry]\n"
        << "nx = " << c.nx << "\nny = " << c.ny << "\ndx_nm = " << units::m_to_nm(c.dx)
        << "\npore_diameter_nm = " << units::m_to_nm(c.pore_diameter);
    if (!std::isnan(c.pore_center_x)) out << "\npore_center_x_nm = " << units::m_to_nm(c.pore_center_x);
    if (!std::isnan(c.pore_center_y)) out << "\npore_center_y_nm = " << units::m_to_nm(c.pore_center_y);
    out << "\nblock_height_fraction = " << c.block_height_fraction << "\nT_init = " << c.T_init << "\n\n";
    out << "[solver]\n"
        << "v0 = " << c.Up << "\ncfl = " << c.cfl << "\nsnapshot_dt_ps = " << units::s_to_ps(c.snapshot_dt)
        << "\nn_snapshots = " << c.n_snapshots << "\nmu_vac = " << c.mu_vac
        << "\nstrength = " << (c.strength ? "true" : "false")
        << "\nconduction = " << (c.conduction ? "true" : "false")
        << "\nsecond_order = " << (c.second_order ? "true" : "false") << "\nconduction_integrator = "
        << (c.conduction_integrator == ConductionIntegrator::RK4 ? "rk4" : "euler")
        << "\nboundary_x_lo = " << boundary_name(c.boundaries.x_lo)
        << "\nboundary_x_hi = " << boundary_name(c.boundaries.x_hi)
        << "\nboundary_y_lo = " << boundary_name(c.boundaries.y_lo)
        << "\nboundary_y_hi = " << boundary_name(c.boundaries.y_hi)
        << "\naudit = " << (c.audit ? "true" : "false") << "\nprogress_every = " << c.progress_every
        << "\n\n";
    out << "[output]\ndir = " << o.dir.string() << '\n';
    if (o.has_seed) out << "split_seed = " << o.split_seed << '\n';
}

}  // namespace shockpore::cli
