#include <gtest/gtest.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <set>
#include <sstream>
#include <string>

#include "shockpore/dataset.hpp"
#include "shockpore/errors.hpp"
#include "shockpore/solver.hpp"

using namespace shockpore;

static_assert(std::endian::native == std::endian::little, "byte-level fixtures assume a little-endian host");

namespace {

SnapshotSeries synthetic(int nx, int ny, int n_frames, double v0 = 1500.0) {
    SnapshotSeries s;
    s.nx = nx;
    s.ny = ny;
    s.dx = 1.1719e-9;
    s.dt_snap = 2.5e-12;
    s.v0 = v0;
    for (int k = 0; k < n_frames; ++k) {
        Frame f(s.frame_size());
        for (std::size_t q = 0; q < f.size(); ++q) f[q] = static_cast<float>(0.25 * q + k);
        s.frames.push_back(f);
        for (int j = 0; j < ny; ++j) {
            for (int i = 0; i < nx; ++i) s.at(k, Channel::mu, i, j) = ((i + j + k) % 3) / 2.0;
        }
    }
    return s;
}

std::string encode(const SnapshotSeries& s) {
    std::ostringstream out(std::ios::binary);
    write_series(s, out);
    return out.str();
}

SnapshotSeries decode(const std::string& bytes) {
    std::istringstream in(bytes, std::ios::binary);
    return read_series(in);
}

std::uint64_t format_offset(const std::string& bytes) {
    try {
        decode(bytes);
    } catch (const FormatError& e) {
        return e.offset();
    }
    ADD_FAILURE() << "expected FormatError";
    return ~std::uint64_t{0};
}

RunConfig tiny_config() {
    RunConfig c;
    c.Up = 1500.0;
    c.nx = 16;
    c.ny = 24;
    c.pore_diameter = 6 * c.dx;
    c.snapshot_dt = 0.5e-12;
    c.n_snapshots = 4;
    return c;
}

}  // namespace

TEST(Channels, NamesRoundTrip) {
    for (int c = 0; c < kChannelCount; ++c) {
        EXPECT_EQ(static_cast<int>(channel_from_name(kChannelNames[c])), c);
    }
    EXPECT_THROW(channel_from_name("rho"), DomainError);
}

TEST(Splits, CountsAndMembership) {
    const VelocitySplit sp = split_velocities();
    EXPECT_EQ(sp.seed, kDefaultSplitSeed);
    EXPECT_EQ(sp.train.size(), 70u);
    EXPECT_EQ(sp.validation.size(), 18u);
    EXPECT_EQ(sp.test.size(), 26u);
    EXPECT_EQ(split_label(sp, 800.0), "test");
    EXPECT_EQ(split_label(sp, 500.0), "test");
    EXPECT_EQ(split_label(sp, 3000.0), "test");
    EXPECT_EQ(split_label(sp, 810.0), "");
    const std::string l820 = split_label(sp, 820.0);
    EXPECT_TRUE(l820 == "train" || l820 == "validation");

    std::vector<double> expected_pool;
    for (int v = 720; v <= 2880; v += 20) {
        if (v % 100 != 0) expected_pool.push_back(v);
    }
    EXPECT_EQ(sp.pool(), expected_pool);

    std::set<double> all;
    for (const auto* set : {&sp.train, &sp.validation, &sp.test}) {
        EXPECT_TRUE(std::is_sorted(set->begin(), set->end()));
        all.insert(set->begin(), set->end());
    }
    EXPECT_EQ(all.size(), 70u + 18u + 26u);
}

TEST(Splits, SeedDeterminesAssignment) {
    const VelocitySplit a = split_velocities(7);
    const VelocitySplit b = split_velocities(7);
    const VelocitySplit c = split_velocities(8);
    EXPECT_EQ(a.train, b.train);
    EXPECT_EQ(a.validation, b.validation);
    EXPECT_NE(a.train, c.train);
    EXPECT_EQ(a.pool(), c.pool());
    EXPECT_EQ(a.test, c.test);
}

TEST(Norm, FitAndRoundTrip) {
    SnapshotSeries s = synthetic(4, 3, 3);
    for (std::size_t k = 0; k < 3; ++k) {
        for (int j = 0; j < 3; ++j) {
            for (int i = 0; i < 4; ++i) {
                s.at(k, Channel::T, i, j) = 300.0 + 10.0 * i + k;
                s.at(k, Channel::p, i, j) = -1e8 + 1e9 * j;
                s.at(k, Channel::U, i, j) = -200.0 * i;
                s.at(k, Channel::V, i, j) = 150.0 * j;
            }
        }
    }
    const NormStats st = fit_norm(std::span<const SnapshotSeries>(&s, 1));
    EXPECT_EQ(st.T_min, 300.0);
    EXPECT_EQ(st.T_max, 332.0);
    EXPECT_EQ(st.p_min, -1e8);
    EXPECT_EQ(st.p_max, 1.9e9);
    EXPECT_EQ(st.vel_scale, 600.0);

    const SnapshotSeries n = normalize(s, st);
    EXPECT_EQ(n.at(0, Channel::T, 0, 0), 0.0);
    EXPECT_EQ(n.at(2, Channel::T, 3, 0), 1.0);
    EXPECT_EQ(n.at(1, Channel::U, 3, 1), -1.0);
    EXPECT_EQ(n.at(1, Channel::mu, 2, 2), s.at(1, Channel::mu, 2, 2));
    const SnapshotSeries back = denormalize(n, st);
    for (std::size_t k = 0; k < 3; ++k) {
        for (std::size_t q = 0; q < s.frame_size(); ++q) {
            EXPECT_NEAR(back.frames[k][q], s.frames[k][q], 1e-12 * std::max(1.0, std::abs(s.frames[k][q])));
        }
    }
}

TEST(Norm, DegenerateStatsAreRejected) {
    EXPECT_THROW(fit_norm(std::span<const SnapshotSeries>()), DomainError);
    NormStats st;
    st.T_max = st.T_min;
    EXPECT_THROW(st.validate(), DomainError);
    SnapshotSeries s = synthetic(2, 2, 1);
    EXPECT_THROW(normalize(s, st), DomainError);
}

TEST(Norm, ManifestRoundTripIsExact) {
    const NormStats st{298.0, 4123.456789012345, -2.5e8, 3.3333333333333333e10, 1812.5};
    Manifest m;
    store_norm(m, st);
    const auto path = std::filesystem::temp_directory_path() / "shockpore_norm_manifest.txt";
    m.write(path);
    const NormStats back = load_norm(Manifest::read(path));
    std::filesystem::remove(path);
    EXPECT_EQ(back.T_min, st.T_min);
    EXPECT_EQ(back.T_max, st.T_max);
    EXPECT_EQ(back.p_min, st.p_min);
    EXPECT_EQ(back.p_max, st.p_max);
    EXPECT_EQ(back.vel_scale, st.vel_scale);
    EXPECT_THROW(load_norm(Manifest()), DomainError);
}

TEST(Manifest, OrderedSetAndGet) {
    Manifest m;
    m.set("b", "2");
    m.set("a", "1");
    m.set("b", "3");
    ASSERT_EQ(m.entries().size(), 2u);
    EXPECT_EQ(m.entries()[0].first, "b");
    EXPECT_EQ(m.get("b"), "3");
    EXPECT_EQ(m.get("missing"), "");
    EXPECT_TRUE(m.has("a"));
    EXPECT_THROW(m.set("x=y", "1"), DomainError);
    EXPECT_THROW(m.set("k", "two\nlines"), DomainError);
}

TEST(Container, HeaderLayout) {
    const SnapshotSeries s = synthetic(3, 2, 2, 1812.5);
    const std::string bytes = encode(s);
    ASSERT_EQ(bytes.size(), kHeaderBytes + 2u * 5u * 3u * 2u * 4u);
    EXPECT_EQ(bytes.substr(0, 4), "SHRB");
    auto u32 = [&](std::size_t at) {
        std::uint32_t v;
        std::memcpy(&v, bytes.data() + at, 4);
        return v;
    };
    auto f64 = [&](std::size_t at) {
        double v;
        std::memcpy(&v, bytes.data() + at, 8);
        return v;
    };
    EXPECT_EQ(u32(4), 1u);
    EXPECT_EQ(u32(8), 3u);
    EXPECT_EQ(u32(12), 2u);
    EXPECT_EQ(u32(16), 5u);
    EXPECT_EQ(u32(20), 2u);
    EXPECT_EQ(f64(24), s.dx);
    EXPECT_EQ(f64(32), s.dt_snap);
    EXPECT_EQ(f64(40), 1812.5);
    EXPECT_EQ(bytes.substr(48, 16), "T               ");
    EXPECT_EQ(bytes.substr(64, 16), "p               ");
    EXPECT_EQ(bytes.substr(80, 16), "mu              ");
    EXPECT_EQ(bytes.substr(96, 16), "U               ");
    EXPECT_EQ(bytes.substr(112, 16), "V               ");
    // First payload value: frame 0, channel T, cell (0, 0) as f32.
    float first;
    std::memcpy(&first, bytes.data() + 128, 4);
    EXPECT_EQ(first, static_cast<float>(s.frames[0][0]));
    float second_frame;
    std::memcpy(&second_frame, bytes.data() + 128 + 4 * s.frame_size(), 4);
    EXPECT_EQ(second_frame, static_cast<float>(s.frames[1][0]));
}

TEST(Container, RoundTripIsBitwise) {
    const SnapshotSeries s = synthetic(5, 4, 3);
    const std::string bytes = encode(s);
    const SnapshotSeries back = decode(bytes);
    EXPECT_EQ(back.nx, 5);
    EXPECT_EQ(back.ny, 4);
    EXPECT_EQ(back.dx, s.dx);
    EXPECT_EQ(back.dt_snap, s.dt_snap);
    EXPECT_EQ(back.v0, s.v0);
    ASSERT_EQ(back.n_frames(), 3u);
    for (std::size_t k = 0; k < 3; ++k) EXPECT_EQ(back.frames[k], s.frames[k]);
    EXPECT_EQ(encode(back), bytes);

    const auto path = std::filesystem::temp_directory_path() / "shockpore_roundtrip.shrb";
    write_series(s, path);
    EXPECT_EQ(std::filesystem::file_size(path), bytes.size());
    const SeriesHeader hd = read_header(path);
    EXPECT_EQ(hd.n_frames, 3u);
    EXPECT_EQ(hd.channel_names[2], "mu");
    EXPECT_EQ(read_series(path).frames, s.frames);
    std::filesystem::remove(path);
}

TEST(Container, DefaultRunFileSize) {
    const SnapshotSeries s = synthetic(128, 256, 51);
    EXPECT_EQ(encode(s).size(), 128u + 51u * 655360u);
}

TEST(Container, CorruptionReportsOffsets) {
    const std::string good = encode(synthetic(3, 2, 2));

    std::string bad = good;
    bad[1] = 'X';
    EXPECT_EQ(format_offset(bad), 0u);

    bad = good;
    bad[4] = 2;
    EXPECT_EQ(format_offset(bad), 4u);

    bad = good;
    std::memset(bad.data() + 8, 0, 4);
    EXPECT_EQ(format_offset(bad), 8u);

    bad = good;
    bad[16] = 4;
    EXPECT_EQ(format_offset(bad), 16u);

    bad = good;
    std::memset(bad.data() + 20, 0, 4);
    EXPECT_EQ(format_offset(bad), 20u);

    bad = good;
    bad[81] = 'x';
    EXPECT_EQ(format_offset(bad), 80u);

    EXPECT_EQ(format_offset(good.substr(0, 100)), 100u);
    EXPECT_EQ(format_offset(good.substr(0, good.size() - 3)), good.size() - 3);
    EXPECT_EQ(format_offset(good + "z"), good.size());
}

TEST(Container, InvalidSeriesIsNotWritten) {
    SnapshotSeries s = synthetic(2, 2, 1);
    s.at(0, Channel::mu, 0, 0) = 1.5;
    EXPECT_THROW(encode(s), DomainError);
    s = synthetic(2, 2, 1);
    s.frames[0][3] = std::nan("");
    EXPECT_THROW(encode(s), DomainError);
    s.frames.clear();
    EXPECT_THROW(encode(s), DomainError);
}

TEST(Record, VacuumCellsAreZeroed) {
    SimState st(2, 1, 1e-9);
    st.mu(0, 0) = 1.0;
    st.rho(0, 0) = 1800.0;
    st.mom_x(0, 0) = 1800.0 * 5.0;
    st.mom_y(0, 0) = -1800.0 * 7.0;
    st.T(0, 0) = 300.0;
    st.p(0, 0) = 1e9;
    st.mu(1, 0) = 0.3;
    st.rho(1, 0) = 100.0;
    st.mom_x(1, 0) = 100.0 * 3.0;
    st.T(1, 0) = 50.0;
    const Frame f = record(st, 0.5);
    const std::vector<double> expected = {300.0, 0.0, 1e9, 0.0, 1.0, 0.3, 5.0, 0.0, -7.0, 0.0};
    EXPECT_EQ(f, expected);
}

TEST(Simulate, FrameCountAndDeterminism) {
    const RunConfig cfg = tiny_config();
    int snapshots = 0;
    const SnapshotSeries a = simulate(cfg, nullptr, [&](const SimState&, const Solver&, bool snap) {
        snapshots += snap ? 1 : 0;
    });
    EXPECT_EQ(a.n_frames(), 5u);
    EXPECT_EQ(snapshots, 5);
    EXPECT_EQ(a.v0, 1500.0);
    EXPECT_NO_THROW(a.validate());
    const SnapshotSeries b = simulate(cfg);
    for (std::size_t k = 0; k < a.n_frames(); ++k) EXPECT_EQ(a.frames[k], b.frames[k]);
    // Frame 0 is the initial condition.
    EXPECT_EQ(a.at(0, Channel::V, 8, 2), -1500.0);
    EXPECT_NE(a.frames[4], a.frames[0]);
}

TEST(Simulate, ProgressLines) {
    RunConfig cfg = tiny_config();
    cfg.n_snapshots = 2;
    std::ostringstream log;
    simulate(cfg, &log);
    std::istringstream lines(log.str());
    std::string line;
    int n = 0;
    while (std::getline(lines, line)) {
        EXPECT_EQ(line.rfind("step=", 0), 0u) << line;
        EXPECT_NE(line.find(" Tmax="), std::string::npos);
        EXPECT_NE(line.find(" pmax="), std::string::npos);
        ++n;
    }
    EXPECT_EQ(n, 2);
}
