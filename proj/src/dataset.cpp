#include "shockpore/dataset.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

#include "shockpore/errors.hpp"
#include "shockpore/solver.hpp"

namespace shockpore {

Channel channel_from_name(const std::string& name) {
    for (int c = 0; c < kChannelCount; ++c) {
        if (name == kChannelNames[c]) return static_cast<Channel>(c);
    }
    throw DomainError("unknown channel '" + name + "' (expected T, p, mu, U or V)");
}

std::span<const double> SnapshotSeries::channel(std::size_t frame, Channel c) const {
    const std::size_t n = static_cast<std::size_t>(nx) * ny;
    return std::span<const double>(frames.at(frame)).subspan(static_cast<std::size_t>(c) * n, n);
}

std::span<double> SnapshotSeries::channel(std::size_t frame, Channel c) {
    const std::size_t n = static_cast<std::size_t>(nx) * ny;
    return std::span<double>(frames.at(frame)).subspan(static_cast<std::size_t>(c) * n, n);
}

Field2D SnapshotSeries::channel_field(std::size_t frame, Channel c) const {
    Field2D f(nx, ny, dx);
    auto src = channel(frame, c);
    std::copy(src.begin(), src.end(), f.values().begin());
    return f;
}

void SnapshotSeries::validate() const {
    if (nx < 1 || ny < 1) throw DomainError("series grid must be at least 1x1");
    if (!(dx > 0.0) || !(dt_snap > 0.0)) throw DomainError("series dx and dt_snap must be positive");
    if (frames.empty()) throw DomainError("series has no frames");
    for (std::size_t k = 0; k < frames.size(); ++k) {
        if (frames[k].size() != frame_size()) {
            throw DomainError("frame " + std::to_string(k) + " has the wrong size");
        }
        for (double v : frames[k]) {
            if (!std::isfinite(v)) throw DomainError("frame " + std::to_string(k) + " is not finite");
        }
        for (double m : channel(k, Channel::mu)) {
            if (m < 0.0 || m > 1.0) throw DomainError("mu outside [0, 1] in frame " + std::to_string(k));
        }
    }
}

Frame record(const SimState& s, double mu_vac) {
    const int nx = s.nx();
    const int ny = s.ny();
    const std::size_t n = static_cast<std::size_t>(nx) * ny;
    Frame f(kChannelCount * n, 0.0);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const std::size_t k = static_cast<std::size_t>(j) * nx + i;
            const double mu = s.mu(i, j);
            f[2 * n + k] = std::clamp(mu, 0.0, 1.0);
            if (mu < mu_vac) continue;
            f[k] = s.T(i, j);
            f[n + k] = s.p(i, j);
            f[3 * n + k] = s.velocity_x(i, j);
            f[4 * n + k] = s.velocity_y(i, j);
        }
    }
    return f;
}

namespace {

void print_progress(std::ostream& out, const SimState& s, double dt) {
    double tmax = 0.0;
    double pmax = 0.0;
    for (double v : s.T.values()) tmax = std::max(tmax, v);
    for (double v : s.p.values()) pmax = std::max(pmax, v);
    std::ostringstream line;
    line << "step=" << s.step << std::fixed << std::setprecision(4) << " t=" << s.t * 1e12
         << std::scientific << std::setprecision(4) << " dt=" << dt * 1e12 << std::fixed
         << std::setprecision(1) << " Tmax=" << tmax << std::setprecision(3)
         << " pmax=" << pmax * 1e-9 << '\n';
    out << line.str() << std::flush;
}

}  // namespace

SnapshotSeries simulate(const RunConfig& cfg, std::ostream* progress, const StepObserver& observer) {
    cfg.validate();
    Solver solver(cfg);
    SimState s = initialize_reverse_ballistic(cfg);

    SnapshotSeries out;
    out.nx = cfg.nx;
    out.ny = cfg.ny;
    out.dx = cfg.dx;
    out.dt_snap = cfg.snapshot_dt;
    out.v0 = cfg.Up;
    out.frames.reserve(static_cast<std::size_t>(cfg.n_snapshots) + 1);
    out.frames.push_back(record(s, cfg.mu_vac));
    if (observer) observer(s, solver, true);

    for (int k = 1; k <= cfg.n_snapshots; ++k) {
        const double t_k = k * cfg.snapshot_dt;
        while (s.t < t_k) {
            s = solver.advance(s, t_k);
            const bool snap = s.t >= t_k;
            if (observer) observer(s, solver, snap);
            if (progress && (snap || (cfg.progress_every > 0 && s.step % cfg.progress_every == 0))) {
                print_progress(*progress, s, solver.last_dt());
            }
        }
        out.frames.push_back(record(s, cfg.mu_vac));
    }
    return out;
}

// -- normalization ------------------------------------------------------------

void NormStats::validate() const {
    if (!std::isfinite(T_min) || !std::isfinite(T_max) || !(T_max > T_min)) {
        throw DomainError("degenerate temperature normalization (T_max must exceed T_min)");
    }
    if (!std::isfinite(p_min) || !std::isfinite(p_max) || !(p_max > p_min)) {
        throw DomainError("degenerate pressure normalization (p_max must exceed p_min)");
    }
    if (!std::isfinite(vel_scale) || !(vel_scale > 0.0)) {
        throw DomainError("velocity scale must be positive");
    }
}

NormStats fit_norm(std::span<const SnapshotSeries> training) {
    if (training.empty()) throw DomainError("fit_norm needs at least one training series");
    constexpr double inf = std::numeric_limits<double>::infinity();
    NormStats st{inf, -inf, inf, -inf, 0.0};
    for (const SnapshotSeries& s : training) {
        for (std::size_t k = 0; k < s.n_frames(); ++k) {
            for (double v : s.channel(k, Channel::T)) {
                st.T_min = std::min(st.T_min, v);
                st.T_max = std::max(st.T_max, v);
            }
            for (double v : s.channel(k, Channel::p)) {
                st.p_min = std::min(st.p_min, v);
                st.p_max = std::max(st.p_max, v);
            }
            for (double v : s.channel(k, Channel::U)) st.vel_scale = std::max(st.vel_scale, std::abs(v));
            for (double v : s.channel(k, Channel::V)) st.vel_scale = std::max(st.vel_scale, std::abs(v));
        }
    }
    return st;
}

namespace {

template <class Fn>
SnapshotSeries map_channels(const SnapshotSeries& s, Fn&& fn) {
    SnapshotSeries out = s;
    for (std::size_t k = 0; k < out.n_frames(); ++k) {
        for (int c = 0; c < kChannelCount; ++c) {
            const Channel ch = static_cast<Channel>(c);
            for (double& v : out.channel(k, ch)) v = fn(ch, v);
        }
    }
    return out;
}

}  // namespace

SnapshotSeries normalize(const SnapshotSeries& s, const NormStats& st) {
    st.validate();
    const double dT = st.T_max - st.T_min;
    const double dp = st.p_max - st.p_min;
    return map_channels(s, [&](Channel c, double v) {
        switch (c) {
            case Channel::T: return (v - st.T_min) / dT;
            case Channel::p: return (v - st.p_min) / dp;
            case Channel::U:
            case Channel::V: return v / st.vel_scale;
            default: return v;
        }
    });
}

SnapshotSeries denormalize(const SnapshotSeries& s, const NormStats& st) {
    st.validate();
    const double dT = st.T_max - st.T_min;
    const double dp = st.p_max - st.p_min;
    return map_channels(s, [&](Channel c, double v) {
        switch (c) {
            case Channel::T: return v * dT + st.T_min;
            case Channel::p: return v * dp + st.p_min;
            case Channel::U:
            case Channel::V: return v * st.vel_scale;
            default: return v;
        }
    });
}

// -- splits -------------------------------------------------------------------

std::vector<double> VelocitySplit::pool() const {
    std::vector<double> p = train;
    p.insert(p.end(), validation.begin(), validation.end());
    std::sort(p.begin(), p.end());
    return p;
}

VelocitySplit split_velocities(std::uint64_t seed) {
    VelocitySplit out;
    out.seed = seed;
    std::vector<double> pool;
    for (int v = 720; v <= 2880; v += 20) {
        if (v % 100 == 0) {
            out.test.push_back(v);
        } else {
            pool.push_back(v);
        }
    }
    for (int v : {500, 600, 700}) out.test.push_back(v);
    for (int v = 2900; v <= 3080; v += 100) out.test.push_back(v);
    std::sort(out.test.begin(), out.test.end());

    std::mt19937_64 rng(seed);
    std::shuffle(pool.begin(), pool.end(), rng);
    out.train.assign(pool.begin(), pool.begin() + kTrainCount);
    out.validation.assign(pool.begin() + kTrainCount, pool.end());
    std::sort(out.train.begin(), out.train.end());
    std::sort(out.validation.begin(), out.validation.end());
    return out;
}

std::string split_label(const VelocitySplit& split, double v0) {
    auto in = [v0](const std::vector<double>& set) {
        return std::find(set.begin(), set.end(), v0) != set.end();
    };
    if (in(split.train)) return "train";
    if (in(split.validation)) return "validation";
    if (in(split.test)) return "test";
    return "";
}

// -- container ----------------------------------------------------------------

namespace {

constexpr std::uint32_t kVersion = 1;
constexpr std::size_t kNameBytes = 16;

void put_u32(std::string& buf, std::uint32_t v) {
    for (int b = 0; b < 4; ++b) buf.push_back(static_cast<char>((v >> (8 * b)) & 0xFFu));
}

void put_u64(std::string& buf, std::uint64_t v) {
    for (int b = 0; b < 8; ++b) buf.push_back(static_cast<char>((v >> (8 * b)) & 0xFFu));
}

std::uint32_t get_u32(const unsigned char* p) {
    std::uint32_t v = 0;
    for (int b = 3; b >= 0; --b) v = (v << 8) | p[b];
    return v;
}

std::uint64_t get_u64(const unsigned char* p) {
    std::uint64_t v = 0;
    for (int b = 7; b >= 0; --b) v = (v << 8) | p[b];
    return v;
}

std::string encode_header(const SnapshotSeries& s) {
    std::string h;
    h.reserve(kHeaderBytes);
    h.append("SHRB");
    put_u32(h, kVersion);
    put_u32(h, static_cast<std::uint32_t>(s.nx));
    put_u32(h, static_cast<std::uint32_t>(s.ny));
    put_u32(h, kChannelCount);
    put_u32(h, static_cast<std::uint32_t>(s.n_frames()));
    put_u64(h, std::bit_cast<std::uint64_t>(s.dx));
    put_u64(h, std::bit_cast<std::uint64_t>(s.dt_snap));
    put_u64(h, std::bit_cast<std::uint64_t>(s.v0));
    for (const char* name : kChannelNames) {
        std::string n(name);
        n.resize(kNameBytes, ' ');
        h.append(n);
    }
    return h;
}

// Reads exactly n bytes or throws with the offset of the first missing byte.
void read_exact(std::istream& in, unsigned char* dst, std::size_t n, std::uint64_t offset,
                const char* what) {
    in.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(n));
    const auto got = static_cast<std::uint64_t>(in.gcount());
    if (got != n) throw FormatError(std::string("truncated file while reading ") + what, offset + got);
}

SeriesHeader decode_header(std::istream& in) {
    unsigned char h[kHeaderBytes];
    read_exact(in, h, 4, 0, "magic");
    if (std::memcmp(h, "SHRB", 4) != 0) throw FormatError("bad magic (expected SHRB)", 0);
    read_exact(in, h + 4, kHeaderBytes - 4, 4, "header");
    SeriesHeader hd;
    hd.version = get_u32(h + 4);
    if (hd.version != kVersion) {
        throw FormatError("unsupported version " + std::to_string(hd.version), 4);
    }
    hd.nx = get_u32(h + 8);
    hd.ny = get_u32(h + 12);
    hd.n_channels = get_u32(h + 16);
    hd.n_frames = get_u32(h + 20);
    hd.dx = std::bit_cast<double>(get_u64(h + 24));
    hd.dt_snap = std::bit_cast<double>(get_u64(h + 32));
    hd.v0 = std::bit_cast<double>(get_u64(h + 40));
    for (int c = 0; c < kChannelCount; ++c) {
        std::string n(reinterpret_cast<const char*>(h + 48 + c * kNameBytes), kNameBytes);
        n.erase(n.find_last_not_of(' ') + 1);
        hd.channel_names[c] = n;
    }

    if (hd.nx == 0 || hd.nx > (1u << 16)) throw FormatError("nx out of range", 8);
    if (hd.ny == 0 || hd.ny > (1u << 16)) throw FormatError("ny out of range", 12);
    if (hd.n_frames == 0) throw FormatError("series has no frames", 20);
    if (hd.n_channels != kChannelCount) {
        throw FormatError("expected 5 channels, found " + std::to_string(hd.n_channels), 16);
    }
    const std::uint64_t frame_bytes = std::uint64_t{4} * hd.nx * hd.ny * hd.n_channels;
    if (hd.n_frames > std::numeric_limits<std::uint64_t>::max() / 2 / frame_bytes) {
        throw FormatError("frame count overflows the file size", 20);
    }
    for (int c = 0; c < kChannelCount; ++c) {
        if (hd.channel_names[c] != kChannelNames[c]) {
            throw FormatError("unexpected channel name '" + hd.channel_names[c] + "'",
                              48 + c * kNameBytes);
        }
    }
    return hd;
}

}  // namespace

void write_series(const SnapshotSeries& s, std::ostream& out) {
    s.validate();
    const std::string header = encode_header(s);
    out.write(header.data(), static_cast<std::streamsize>(header.size()));
    std::string block;
    block.reserve(4 * s.frame_size());
    for (const Frame& f : s.frames) {
        block.clear();
        for (double v : f) put_u32(block, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
        out.write(block.data(), static_cast<std::streamsize>(block.size()));
    }
    if (!out) throw std::runtime_error("failed to write series");
}

void write_series(const SnapshotSeries& s, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    write_series(s, out);
}

SnapshotSeries read_series(std::istream& in) {
    const SeriesHeader hd = decode_header(in);
    SnapshotSeries s;
    s.nx = static_cast<int>(hd.nx);
    s.ny = static_cast<int>(hd.ny);
    s.dx = hd.dx;
    s.dt_snap = hd.dt_snap;
    s.v0 = hd.v0;
    const std::size_t n = s.frame_size();
    std::vector<unsigned char> raw(4 * n);
    std::uint64_t offset = kHeaderBytes;
    for (std::uint32_t k = 0; k < hd.n_frames; ++k) {
        read_exact(in, raw.data(), raw.size(), offset, "frame data");
        Frame f(n);
        for (std::size_t q = 0; q < n; ++q) {
            f[q] = std::bit_cast<float>(get_u32(raw.data() + 4 * q));
        }
        s.frames.push_back(std::move(f));
        offset += raw.size();
    }
    if (in.peek() != std::char_traits<char>::eof()) {
        throw FormatError("trailing bytes after the last frame", offset);
    }
    return s;
}

SnapshotSeries read_series(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return read_series(in);
}

SeriesHeader read_header(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return decode_header(in);
}

// -- manifest -----------------------------------------------------------------

void Manifest::set(const std::string& key, const std::string& value) {
    if (key.empty() || key.find_first_of("=\n") != std::string::npos) {
        throw DomainError("invalid manifest key '" + key + "'");
    }
    if (value.find('\n') != std::string::npos) throw DomainError("manifest values are single-line");
    for (auto& [k, v] : entries_) {
        if (k == key) {
            v = value;
            return;
        }
    }
    entries_.emplace_back(key, value);
}

void Manifest::set(const std::string& key, double value) {
    std::ostringstream s;
    s << std::setprecision(17) << value;
    set(key, s.str());
}

std::string Manifest::get(const std::string& key) const {
    for (const auto& [k, v] : entries_) {
        if (k == key) return v;
    }
    return "";
}

bool Manifest::has(const std::string& key) const {
    return std::any_of(entries_.begin(), entries_.end(), [&](const auto& e) { return e.first == key; });
}

void Manifest::write(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    for (const auto& [k, v] : entries_) out << k << '=' << v << '\n';
    if (!out) throw std::runtime_error("failed to write " + path.string());
}

Manifest Manifest::read(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    Manifest m;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw DomainError("malformed manifest line: " + line);
        m.set(line.substr(0, eq), line.substr(eq + 1));
    }
    return m;
}

void store_norm(Manifest& m, const NormStats& st) {
    m.set("norm.T_min", st.T_min);
    m.set("norm.T_max", st.T_max);
    m.set("norm.p_min", st.p_min);
    m.set("norm.p_max", st.p_max);
    m.set("norm.vel_scale", st.vel_scale);
}

NormStats load_norm(const Manifest& m) {
    auto num = [&](const char* key) {
        const std::string v = m.get(key);
        if (v.empty()) throw DomainError(std::string("manifest is missing ") + key);
        return std::stod(v);
    };
    NormStats st{num("norm.T_min"), num("norm.T_max"), num("norm.p_min"), num("norm.p_max"),
                 num("norm.vel_scale")};
    st.validate();
    return st;
}

}  // namespace shockpore
