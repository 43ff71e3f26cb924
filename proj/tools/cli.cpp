#include <CLI11.hpp>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include "shockpore/analysis.hpp"
#include "shockpore/cli.hpp"
#include "shockpore/dataset.hpp"
#include "shockpore/errors.hpp"
#include "shockpore/units.hpp"

namespace shockpore::cli {

namespace fs = std::filesystem;

std::string series_stem(double v0) {
    std::ostringstream s;
    if (v0 == std::round(v0) && std::abs(v0) < 1e15) {
        s << 'v' << static_cast<long long>(v0);
        return s.str();
    }
    s << 'v' << std::setprecision(10) << v0;
    std::string out = s.str();
    for (char& c : out) {
        if (c == '.') c = 'p';
        if (c == '-') c = 'm';
    }
    return out;
}

namespace {

/// Usage or input problem (maps to exit code 2).
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

fs::path default_out_dir(const OutputSettings& settings) {
    if (const char* env = std::getenv("SHOCKPORE_OUT_DIR"); env && *env) return env;
    return settings.dir;
}

fs::path report_dir(const std::string& flag) {
    if (!flag.empty()) return flag;
    if (const char* env = std::getenv("SHOCKPORE_OUT_DIR"); env && *env) return env;
    return ".";
}

SnapshotSeries load_series(const std::string& path) {
    if (!fs::exists(path)) throw UsageError("no such file: " + path);
    return read_series(fs::path(path));
}

/// Frame selector: an index, "first", "last", "collapse" or "prominent".
std::size_t select_frame(const SnapshotSeries& s, const std::string& sel, double x = 0.0, double y_lo = 0.0,
                         double y_hi = 0.0) {
    if (sel == "first") return 0;
    if (sel == "last") return s.n_frames() - 1;
    if (sel == "collapse") {
        auto k = pore_collapse_time(s);
        if (!k) throw std::runtime_error("pore does not collapse within the series");
        return *k;
    }
    if (sel == "prominent") {
        auto k = most_prominent_band_frame(s, x, y_lo, y_hi);
        if (!k) throw std::runtime_error("no frame has a temperature band on this cut");
        return *k;
    }
    std::size_t used = 0;
    unsigned long k = 0;
    try {
        k = std::stoul(sel, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != sel.size()) {
        throw UsageError("--frame expects an index, first, last, collapse or prominent");
    }
    if (k >= s.n_frames()) {
        throw UsageError("frame " + sel + " out of range (series has " + std::to_string(s.n_frames()) + ")");
    }
    return k;
}

void emit_report(std::ostream& out, const fs::path& dir, const std::string& name,
                 const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
    fs::create_directories(dir);
    const fs::path path = dir / name;
    std::ofstream file(path, std::ios::trunc);
    if (!file) throw std::runtime_error("cannot write report " + path.string());
    write_table(file, header, rows);
    write_table(out, header, rows);
    out << "# report: " << path.string() << '\n';
}

std::string num(double v) { return format_number(v); }

fs::path manifest_path_for(const fs::path& series_path) {
    fs::path m = series_path;
    m.replace_extension(".manifest");
    return m;
}

std::uint64_t seed_of(const OutputSettings& o, const std::optional<unsigned long long>& flag) {
    if (flag) return *flag;
    return o.has_seed ? o.split_seed : kDefaultSplitSeed;
}

// -- run -----------------------------------------------------------------------------

struct RunArgs {
    std::string config;
    std::optional<double> v0;
    std::string out;
    std::optional<int> snapshots;
    bool quiet = false;
};

int cmd_run(const RunArgs& a, std::ostream& out, std::ostream& err) {
    OutputSettings settings;
    RunConfig cfg = load_config(a.config, &settings);
    if (a.v0) cfg.Up = *a.v0;
    if (a.snapshots) cfg.n_snapshots = *a.snapshots;
    cfg.validate();

    const fs::path path = a.out.empty() ? default_out_dir(settings) / (series_stem(cfg.Up) + ".shrb") : fs::path(a.out);
    if (path.has_parent_path()) fs::create_directories(path.parent_path());

    const SnapshotSeries s = simulate(cfg, a.quiet ? nullptr : &err);
    write_series(s, path);

    const std::uint64_t seed = seed_of(settings, std::nullopt);
    Manifest m;
    m.set("split.seed", std::to_string(seed));
    m.set("series.count", "1");
    m.set("series.0.path", path.filename().string());
    m.set("series.0.v0", cfg.Up);
    m.set("series.0.split", split_label(split_velocities(seed), cfg.Up));
    m.set("series.0.status", "ok");
    m.set("series.0.n_frames", std::to_string(s.n_frames()));
    m.write(manifest_path_for(path));

    out << path.string() << ": " << s.n_frames() << " frames, v0 = " << cfg.Up << " m/s\n";
    return kOk;
}

// -- sweep ---------------------------------------------------------------------------

struct SweepArgs {
    std::string config;
    std::string preset;
    std::vector<double> velocities;
    std::string out;
    int jobs = 1;
    std::optional<unsigned long long> seed;
};

int cmd_sweep(const SweepArgs& a, std::ostream& out, std::ostream& err) {
    OutputSettings settings;
    RunConfig base = load_config(a.config, &settings);
    const std::uint64_t seed = seed_of(settings, a.seed);
    const VelocitySplit split = split_velocities(seed);

    std::vector<double> velocities;
    if (!a.preset.empty() && !a.velocities.empty()) throw UsageError("give either --preset or --velocities");
    if (a.preset == "paper-trainval") {
        velocities = split.pool();
    } else if (a.preset == "paper-test") {
        velocities = split.test;
    } else if (!a.preset.empty()) {
        throw UsageError("unknown preset '" + a.preset + "' (paper-trainval or paper-test)");
    } else {
        velocities = a.velocities;
    }
    if (velocities.empty()) throw UsageError("no velocities to run");
    if (a.jobs < 1) throw UsageError("--jobs must be >= 1");
    for (double v : velocities) {
        RunConfig c = base;
        c.Up = v;
        c.validate();
    }

    const fs::path dir = a.out.empty() ? default_out_dir(settings) : fs::path(a.out);
    fs::create_directories(dir);

    std::vector<std::string> status(velocities.size());
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> done{0};
    std::mutex log_mutex;
    auto worker = [&]() {
        for (std::size_t q = next++; q < velocities.size(); q = next++) {
            RunConfig c = base;
            c.Up = velocities[q];
            std::string st = "ok";
            try {
                write_series(simulate(c), dir / (series_stem(c.Up) + ".shrb"));
            } catch (const std::exception& e) {
                st = std::string("failed: ") + e.what();
            }
            status[q] = st;
            std::lock_guard<std::mutex> lock(log_mutex);
            err << "v0=" << c.Up << " m/s " << st << " (" << ++done << "/" << velocities.size() << ")\n";
        }
    };
    const int n_threads = std::min<int>(a.jobs, static_cast<int>(velocities.size()));
    std::vector<std::thread> pool;
    for (int t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    Manifest m;
    m.set("split.seed", std::to_string(seed));
    m.set("series.count", std::to_string(velocities.size()));
    std::size_t failed = 0;
    for (std::size_t q = 0; q < velocities.size(); ++q) {
        const std::string k = "series." + std::to_string(q) + ".";
        m.set(k + "path", series_stem(velocities[q]) + ".shrb");
        m.set(k + "v0", velocities[q]);
        m.set(k + "split", split_label(split, velocities[q]));
        m.set(k + "status", status[q]);
        if (status[q] != "ok") ++failed;
    }
    m.write(dir / "manifest.txt");
    out << (velocities.size() - failed) << "/" << velocities.size() << " runs succeeded; manifest "
        << (dir / "manifest.txt").string() << '\n';
    return failed ? kFailure : kOk;
}

// -- export-dataset ------------------------------------------------------------------

struct ExportArgs {
    std::string manifest;
    std::string out;
};

int cmd_export(const ExportArgs& a, std::ostream& out, std::ostream& err) {
    if (!fs::exists(a.manifest)) throw UsageError("no such manifest: " + a.manifest);
    const Manifest in = Manifest::read(a.manifest);
    const fs::path src_dir = fs::path(a.manifest).parent_path();
    const std::size_t count = std::stoul(in.get("series.count").empty() ? "0" : in.get("series.count"));

    struct Entry {
        std::string path;
        std::string split;
        std::string v0;
    };
    std::vector<Entry> entries;
    for (std::size_t q = 0; q < count; ++q) {
        const std::string k = "series." + std::to_string(q) + ".";
        if (in.get(k + "status") != "ok") {
            err << "skipping " << in.get(k + "path") << " (" << in.get(k + "status") << ")\n";
            continue;
        }
        entries.push_back({in.get(k + "path"), in.get(k + "split"), in.get(k + "v0")});
    }

    // Statistics from the training series only, one file at a time.
    std::optional<NormStats> stats;
    for (const Entry& e : entries) {
        if (e.split != "train") continue;
        const SnapshotSeries s = load_series((src_dir / e.path).string());
        const NormStats st = fit_norm(std::span<const SnapshotSeries>(&s, 1));
        if (!stats) {
            stats = st;
        } else {
            stats->T_min = std::min(stats->T_min, st.T_min);
            stats->T_max = std::max(stats->T_max, st.T_max);
            stats->p_min = std::min(stats->p_min, st.p_min);
            stats->p_max = std::max(stats->p_max, st.p_max);
            stats->vel_scale = std::max(stats->vel_scale, st.vel_scale);
        }
    }
    if (!stats) throw UsageError("the manifest lists no successful training series");
    stats->validate();

    const fs::path dir = a.out.empty() ? report_dir("") : fs::path(a.out);
    fs::create_directories(dir);
    Manifest m;
    m.set("split.seed", in.get("split.seed"));
    store_norm(m, *stats);
    m.set("series.count", std::to_string(entries.size()));
    for (std::size_t q = 0; q < entries.size(); ++q) {
        const Entry& e = entries[q];
        write_series(normalize(load_series((src_dir / e.path).string()), *stats), dir / e.path);
        const std::string k = "series." + std::to_string(q) + ".";
        m.set(k + "path", e.path);
        m.set(k + "v0", e.v0);
        m.set(k + "split", e.split);
    }
    m.write(dir / "manifest.txt");
    out << "exported " << entries.size() << " normalized series to " << dir.string() << '\n';
    return kOk;
}

// -- analyze ---------------------------------------------------------------------------

struct AnalyzeArgs {
    std::vector<std::string> series;
    std::string metric;
    std::string channel = "T";
    std::string frame;
    std::size_t bins = 64;
    double x_nm = 29.30;
    double y_lo_nm = 29.30;
    double y_hi_nm = 175.79;
    double collapse_fraction = kCollapseFraction;
    std::string out_dir;
};

int cmd_analyze(const AnalyzeArgs& a, std::ostream& out, std::ostream&) {
    const fs::path dir = report_dir(a.out_dir);
    const Channel ch = channel_from_name(a.channel);
    std::vector<SnapshotSeries> all;
    for (const auto& p : a.series) all.push_back(load_series(p));

    if (a.metric == "pdf") {
        std::vector<const SnapshotSeries*> ptrs;
        std::vector<std::size_t> frames;
        for (const auto& s : all) {
            ptrs.push_back(&s);
            frames.push_back(select_frame(s, a.frame.empty() ? "collapse" : a.frame));
        }
        const auto edges = shared_edges(ptrs, ch, frames, a.bins);
        for (std::size_t q = 0; q < all.size(); ++q) {
            const Histogram h = field_pdf(all[q], ch, frames[q], edges);
            std::vector<std::vector<std::string>> rows;
            for (std::size_t b = 0; b < h.n_bins(); ++b) {
                rows.push_back({num(h.edges[b]), num(h.edges[b + 1]), num(h.density[b])});
            }
            emit_report(out, dir,
                        "pdf_" + a.channel + "_" + series_stem(all[q].v0) + "_f" + std::to_string(frames[q]) + ".tsv",
                        {"bin_lo", "bin_hi", "density"}, rows);
        }
        return kOk;
    }
    for (const auto& s : all) {
        const std::string stem = series_stem(s.v0);
        if (a.metric == "band") {
            const double x = units::nm_to_m(a.x_nm);
            const double y0 = units::nm_to_m(a.y_lo_nm);
            const double y1 = units::nm_to_m(a.y_hi_nm);
            const std::size_t k = select_frame(s, a.frame.empty() ? "prominent" : a.frame, x, y0, y1);
            const auto band = dominant_band(vertical_cut(s, k, x, y0, y1));
            std::vector<std::string> row = {num(s.v0), std::to_string(k), num(a.x_nm)};
            if (band) {
                row.insert(row.end(), {num(units::m_to_nm(band->y_peakT)), num(units::m_to_nm(band->width)),
                                       num(band->deltaT), num(band->background)});
            } else {
                row.insert(row.end(), {"Fail", "Fail", "Fail", "Fail"});
            }
            emit_report(out, dir, "band_" + stem + "_f" + std::to_string(k) + ".tsv",
                        {"v0_m_per_s", "frame", "x_nm", "y_peakT_nm", "width_nm", "deltaT_K", "background_K"},
                        {row});
        } else if (a.metric == "collapse") {
            const auto k = pore_collapse_time(s, a.collapse_fraction);
            std::vector<std::string> row = {num(s.v0)};
            if (k) {
                row.insert(row.end(), {std::to_string(*k), num(units::s_to_ps(*k * s.dt_snap))});
            } else {
                row.insert(row.end(), {"not collapsed", "not collapsed"});
            }
            emit_report(out, dir, "collapse_" + stem + ".tsv", {"v0_m_per_s", "frame", "t_ps"}, {row});
        } else if (a.metric == "shock-speed") {
            const ShockSpeed u = measure_shock_speed(s);
            emit_report(out, dir, "shock_" + stem + ".tsv", {"v0_m_per_s", "Uw_m_per_s", "Us_m_per_s", "frames"},
                        {{num(s.v0), num(u.Uw), num(u.Us), std::to_string(u.frames_used)}});
        } else if (a.metric == "haar") {
            std::vector<std::vector<std::string>> rows;
            for (std::size_t k = 0; k < s.n_frames(); ++k) {
                rows.push_back({std::to_string(k), num(haar_highfreq_energy(s.channel_field(k, ch)))});
            }
            emit_report(out, dir, "haar_" + a.channel + "_" + stem + ".tsv", {"frame", "energy"}, rows);
        } else {
            throw UsageError("unknown metric '" + a.metric + "' (pdf, band, collapse, shock-speed, haar)");
        }
    }
    return kOk;
}

// -- compare ---------------------------------------------------------------------------

struct CompareArgs {
    std::string pred;
    std::string truth;
    std::string metric;
    std::string channel = "T";
    std::string frame = "last";
    double p = 10.0;
    std::string out_dir;
};

int cmd_compare(const CompareArgs& a, std::ostream& out, std::ostream&) {
    const fs::path dir = report_dir(a.out_dir);
    const SnapshotSeries pred = load_series(a.pred);
    const SnapshotSeries truth = load_series(a.truth);
    if (!pred.same_layout(truth)) throw DomainError("prediction and truth differ in shape or frame count");
    const Channel ch = channel_from_name(a.channel);
    const std::string stem = series_stem(truth.v0);

    if (a.metric == "rmse") {
        const auto r = rollout_rmse(pred, truth);
        const char* unit[] = {"K", "Pa", "1", "m/s", "m/s"};
        std::vector<std::vector<std::string>> rows;
        for (int c = 0; c < kChannelCount; ++c) rows.push_back({kChannelNames[c], num(r[c]), unit[c]});
        emit_report(out, dir, "rmse_" + stem + ".tsv", {"channel", "rmse", "unit"}, rows);
    } else if (a.metric == "lp") {
        emit_report(out, dir, "lp_" + a.channel + "_" + stem + ".tsv", {"channel", "p", "error"},
                    {{a.channel, num(a.p), num(lp_error(pred, truth, ch, a.p))}});
    } else if (a.metric == "spectrum") {
        const std::size_t k = select_frame(truth, a.frame);
        const SpectrumError e = spectrum_relative_error(pred.channel_field(k, ch), truth.channel_field(k, ch));
        std::vector<std::vector<std::string>> rows;
        for (std::size_t b = 0; b < e.k.size(); ++b) {
            rows.push_back({num(e.k[b]), num(units::m_to_nm(e.wavelength[b])), num(e.rel_error[b])});
        }
        emit_report(out, dir, "spectrum_" + a.channel + "_" + stem + "_f" + std::to_string(k) + ".tsv",
                    {"k_per_m", "wavelength_nm", "rel_error"}, rows);
    } else if (a.metric == "haar") {
        std::vector<std::vector<std::string>> rows;
        for (std::size_t k = 0; k < truth.n_frames(); ++k) {
            rows.push_back({std::to_string(k), num(haar_loss(pred.channel_field(k, ch), truth.channel_field(k, ch)))});
        }
        emit_report(out, dir, "haarloss_" + a.channel + "_" + stem + ".tsv", {"frame", "loss"}, rows);
    } else {
        throw UsageError("unknown metric '" + a.metric + "' (rmse, lp, spectrum, haar)");
    }
    return kOk;
}

// -- info ------------------------------------------------------------------------------

int cmd_info(const std::string& path, std::ostream& out) {
    if (!fs::exists(path)) throw UsageError("no such file: " + path);
    const SeriesHeader h = read_header(path);
    out << std::setprecision(17);
    out << "magic = SHRB\nversion = " << h.version << "\nnx = " << h.nx << "\nny = " << h.ny
        << "\nn_channels = " << h.n_channels << "\nn_frames = " << h.n_frames << "\ndx_m = " << h.dx
        << "\ndt_snap_s = " << h.dt_snap << "\nv0_m_per_s = " << h.v0 << "\nchannels =";
    for (const auto& n : h.channel_names) out << ' ' << n;
    out << "\nfile_bytes = " << fs::file_size(path) << '\n';
    return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Shock-driven pore collapse simulator and analysis toolkit", "shockpore"};
    app.require_subcommand(1);

    RunArgs run_args;
    auto* run_cmd = app.add_subcommand("run", "Simulate one impact and write a series");
    run_cmd->add_option("config", run_args.config, "Config file")->required();
    run_cmd->add_option("--v0", run_args.v0, "Impact speed, m/s");
    run_cmd->add_option("--out", run_args.out, "Output series path");
    run_cmd->add_option("--snapshots", run_args.snapshots, "Snapshot intervals after t = 0");
    run_cmd->add_flag("--quiet", run_args.quiet, "No progress lines");

    SweepArgs sweep_args;
    auto* sweep_cmd = app.add_subcommand("sweep", "Simulate a list of impact speeds");
    sweep_cmd->add_option("config", sweep_args.config, "Config file")->required();
    sweep_cmd->add_option("--preset", sweep_args.preset, "paper-trainval or paper-test");
    sweep_cmd->add_option("--velocities", sweep_args.velocities, "Impact speeds, m/s")->delimiter(',');
    sweep_cmd->add_option("--out", sweep_args.out, "Output directory");
    sweep_cmd->add_option("--jobs", sweep_args.jobs, "Concurrent runs");
    sweep_cmd->add_option("--seed", sweep_args.seed, "Train/validation shuffle seed");

    ExportArgs export_args;
    auto* export_cmd = app.add_subcommand("export-dataset", "Normalize a sweep with training-set statistics");
    export_cmd->add_option("--manifest", export_args.manifest, "Sweep manifest")->required();
    export_cmd->add_option("--out", export_args.out, "Output directory");

    AnalyzeArgs an;
    auto* analyze_cmd = app.add_subcommand("analyze", "Metrics of single series");
    analyze_cmd->add_option("series", an.series, "Series files")->required();
    analyze_cmd->add_option("--metric", an.metric, "pdf, band, collapse, shock-speed or haar")->required();
    analyze_cmd->add_option("--channel", an.channel, "T, p, mu, U or V");
    analyze_cmd->add_option("--frame", an.frame, "Index, first, last, collapse or prominent");
    analyze_cmd->add_option("--bins", an.bins, "Histogram bins");
    analyze_cmd->add_option("--x-nm", an.x_nm, "Cut position, nm");
    analyze_cmd->add_option("--y-lo-nm", an.y_lo_nm, "Cut start, nm");
    analyze_cmd->add_option("--y-hi-nm", an.y_hi_nm, "Cut end, nm");
    analyze_cmd->add_option("--collapse-fraction", an.collapse_fraction, "Remaining pore area counted as collapsed");
    analyze_cmd->add_option("--out-dir", an.out_dir, "Report directory");

    CompareArgs cmp;
    auto* compare_cmd = app.add_subcommand("compare", "Error metrics between a prediction and the truth");
    compare_cmd->add_option("pred", cmp.pred, "Predicted series")->required();
    compare_cmd->add_option("truth", cmp.truth, "Reference series")->required();
    compare_cmd->add_option("--metric", cmp.metric, "rmse, lp, spectrum or haar")->required();
    compare_cmd->add_option("--channel", cmp.channel, "T, p, mu, U or V");
    compare_cmd->add_option("--frame", cmp.frame, "Frame for the spectrum");
    compare_cmd->add_option("--p", cmp.p, "Exponent for lp");
    compare_cmd->add_option("--out-dir", cmp.out_dir, "Report directory");

    std::string info_path;
    auto* info_cmd = app.add_subcommand("info", "Print a series header");
    info_cmd->add_option("series", info_path, "Series file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e, out, err);
        return rc == 0 ? kOk : kConfigError;
    }

    try {
        if (*run_cmd) return cmd_run(run_args, out, err);
        if (*sweep_cmd) return cmd_sweep(sweep_args, out, err);
        if (*export_cmd) return cmd_export(export_args, out, err);
        if (*analyze_cmd) return cmd_analyze(an, out, err);
        if (*compare_cmd) return cmd_compare(cmp, out, err);
        if (*info_cmd) return cmd_info(info_path, out);
    } catch (const NumericalError& e) {
        err << "numerical abort: " << e.what() << '\n';
        return kNumerical;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    } catch (const FormatError& e) {
        err << "format error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kFailure;
    }
    return kConfigError;
}

}  // namespace shockpore::cli
