#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "shockpore/analysis.hpp"
#include "shockpore/dataset.hpp"

using namespace shockpore;
namespace fs = std::filesystem;

namespace {

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() / (std::string("shockpore_cli_") + info->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
        std::ofstream cfg(dir_ / "tiny.cfg");
        cfg << "[geometry]\nnx = 16\nny = 24\ndx_nm = 1.1719\npore_diameter_nm = 7.0\n"
               "[solver]\nv0 = 1500\nsnapshot_dt_ps = 0.5\nn_snapshots = 4\n"
               "[output]\ndir = "
            << (dir_ / "runs").string() << "\n";
    }

    void TearDown() override { fs::remove_all(dir_); }

    // Runs the CLI with stdout and stderr captured; returns the exit code.
    int shockpore(const std::string& args) {
        const std::string cmd = std::string(SHOCKPORE_CLI) + " " + args + " > " + (dir_ / "stdout").string() +
                                " 2> " + (dir_ / "stderr").string();
        const int status = std::system(cmd.c_str());
        out_ = slurp(dir_ / "stdout");
        err_ = slurp(dir_ / "stderr");
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }

    static std::string slurp(const fs::path& p) {
        std::ifstream in(p);
        std::stringstream s;
        s << in.rdbuf();
        return s.str();
    }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    fs::path dir_;
    std::string out_;
    std::string err_;
};

}  // namespace

TEST_F(CliTest, RunWritesSeriesAndManifest) {
    ASSERT_EQ(shockpore("run " + path("tiny.cfg") + " --quiet"), 0) << err_;
    const fs::path series = dir_ / "runs" / "v1500.shrb";
    ASSERT_TRUE(fs::exists(series));
    EXPECT_TRUE(fs::exists(dir_ / "runs" / "v1500.manifest"));
    EXPECT_EQ(fs::file_size(series), 128u + 5u * 5u * 16u * 24u * 4u);
    const SnapshotSeries s = read_series(series);
    EXPECT_EQ(s.n_frames(), 5u);
    EXPECT_EQ(s.v0, 1500.0);
    EXPECT_EQ(err_, "");
}

TEST_F(CliTest, RunOverridesAndProgress) {
    ASSERT_EQ(shockpore("run " + path("tiny.cfg") + " --v0 1812.5 --snapshots 2 --out " + path("a.shrb")), 0)
        << err_;
    const SnapshotSeries s = read_series(path("a.shrb"));
    EXPECT_EQ(s.n_frames(), 3u);
    EXPECT_EQ(s.v0, 1812.5);
    EXPECT_NE(err_.find("step="), std::string::npos);
}

TEST_F(CliTest, ExitCodes) {
    EXPECT_EQ(shockpore("run " + path("tiny.cfg") + " --v0 -5"), 2);
    EXPECT_NE(err_.find("config error"), std::string::npos);
    EXPECT_EQ(shockpore("run " + path("missing.cfg")), 2);
    EXPECT_EQ(shockpore("frobnicate"), 2);
    EXPECT_EQ(shockpore("--help"), 0);
    EXPECT_EQ(shockpore("info " + path("missing.shrb")), 2);
    {
        std::ofstream bad(dir_ / "bad.shrb", std::ios::binary);
        bad << "SHRX and some more bytes to fill";
    }
    EXPECT_EQ(shockpore("info " + path("bad.shrb")), 2);
    EXPECT_NE(err_.find("byte offset 0"), std::string::npos);
    std::ofstream(dir_ / "broken.cfg") << "[solver]\nwarp = 9\n";
    EXPECT_EQ(shockpore("run " + path("broken.cfg")), 2);
}

TEST_F(CliTest, InfoAnalyzeAndCompare) {
    ASSERT_EQ(shockpore("run " + path("tiny.cfg") + " --quiet --out " + path("s.shrb")), 0) << err_;
    ASSERT_EQ(shockpore("info " + path("s.shrb")), 0);
    EXPECT_NE(out_.find("n_frames = 5"), std::string::npos);
    EXPECT_NE(out_.find("file_bytes = 38528"), std::string::npos);

    const std::string reports = " --out-dir " + path("reports");
    ASSERT_EQ(shockpore("analyze " + path("s.shrb") + " --metric pdf --channel T --frame last --bins 16" + reports), 0)
        << err_;
    EXPECT_TRUE(fs::exists(dir_ / "reports" / "pdf_T_v1500_f4.tsv"));
    ASSERT_EQ(shockpore("analyze " + path("s.shrb") + " --metric haar --channel p" + reports), 0) << err_;
    EXPECT_TRUE(fs::exists(dir_ / "reports" / "haar_p_v1500.tsv"));
    EXPECT_EQ(shockpore("analyze " + path("s.shrb") + " --metric wobble" + reports), 2);

    ASSERT_EQ(shockpore("compare " + path("s.shrb") + " " + path("s.shrb") + " --metric rmse" + reports), 0) << err_;
    const std::string rmse = slurp(dir_ / "reports" / "rmse_v1500.tsv");
    EXPECT_EQ(rmse.rfind("channel\trmse\tunit\n", 0), 0u);
    EXPECT_NE(rmse.find("T\t0\t"), std::string::npos);
    ASSERT_EQ(shockpore("compare " + path("s.shrb") + " " + path("s.shrb") + " --metric lp --p 10" + reports), 0);
    ASSERT_EQ(shockpore("compare " + path("s.shrb") + " " + path("s.shrb") + " --metric spectrum --channel T" +
                        reports),
              0)
        << err_;

    ASSERT_EQ(shockpore("run " + path("tiny.cfg") + " --quiet --snapshots 2 --out " + path("short.shrb")), 0);
    EXPECT_EQ(shockpore("compare " + path("short.shrb") + " " + path("s.shrb") + " --metric rmse" + reports), 2);
}

TEST_F(CliTest, SweepAndExport) {
    const VelocitySplit split = split_velocities();
    const double train = split.train.front();
    const double val = split.validation.front();
    std::ostringstream list;
    list << train << ',' << val << ",800";
    ASSERT_EQ(shockpore("sweep " + path("tiny.cfg") + " --velocities " + list.str() + " --jobs 2 --out " +
                        path("sweep")),
              0)
        << err_;
    const Manifest m = Manifest::read(dir_ / "sweep" / "manifest.txt");
    EXPECT_EQ(m.get("series.count"), "3");
    EXPECT_EQ(m.get("series.0.split"), "train");
    EXPECT_EQ(m.get("series.1.split"), "validation");
    EXPECT_EQ(m.get("series.2.split"), "test");
    EXPECT_EQ(m.get("series.2.status"), "ok");
    EXPECT_TRUE(fs::exists(dir_ / "sweep" / "v800.shrb"));

    ASSERT_EQ(shockpore("export-dataset --manifest " + path("sweep/manifest.txt") + " --out " + path("norm")), 0)
        << err_;
    const Manifest nm = Manifest::read(dir_ / "norm" / "manifest.txt");
    const NormStats st = load_norm(nm);
    const SnapshotSeries raw_train = read_series(dir_ / "sweep" / m.get("series.0.path"));
    const NormStats expected = fit_norm(std::span<const SnapshotSeries>(&raw_train, 1));
    EXPECT_EQ(st.T_max, expected.T_max);
    EXPECT_EQ(st.p_max, expected.p_max);
    EXPECT_EQ(st.vel_scale, expected.vel_scale);
    const SnapshotSeries normed = read_series(dir_ / "norm" / m.get("series.0.path"));
    double lo = 1e300, hi = -1e300;
    for (std::size_t k = 0; k < normed.n_frames(); ++k) {
        for (double v : normed.channel(k, Channel::T)) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    EXPECT_NEAR(lo, 0.0, 1e-6);
    EXPECT_NEAR(hi, 1.0, 1e-6);

    EXPECT_EQ(shockpore("sweep " + path("tiny.cfg") + " --preset nonsense"), 2);
}
