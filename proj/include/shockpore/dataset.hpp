#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "shockpore/field2d.hpp"
#include "shockpore/run_config.hpp"
#include "shockpore/sim_state.hpp"

namespace shockpore {

class Solver;

enum class Channel : int { T = 0, p = 1, mu = 2, U = 3, V = 4 };

inline constexpr int kChannelCount = 5;
inline constexpr std::array<const char*, kChannelCount> kChannelNames = {"T", "p", "mu", "U", "V"};

/// Parses "T", "p", "mu", "U", "V". Throws DomainError otherwise.
Channel channel_from_name(const std::string& name);

/// One snapshot: kChannelCount blocks of ny x nx values, channel-major,
/// each block row-major with x fastest.
using Frame = std::vector<double>;

/// Time-ordered snapshots on a uniform grid. Frame k is at t = k * dt_snap.
struct SnapshotSeries {
    int nx = 0;
    int ny = 0;
    double dx = 0.0;
    double dt_snap = 0.0;
    double v0 = 0.0;
    std::vector<Frame> frames;

    std::size_t frame_size() const { return static_cast<std::size_t>(kChannelCount) * nx * ny; }
    std::size_t n_frames() const { return frames.size(); }

    double& at(std::size_t frame, Channel c, int i, int j) {
        return frames[frame][offset(c, i, j)];
    }
    double at(std::size_t frame, Channel c, int i, int j) const {
        return frames[frame][offset(c, i, j)];
    }

    std::span<const double> channel(std::size_t frame, Channel c) const;
    std::span<double> channel(std::size_t frame, Channel c);
    /// Copy of one channel as a Field2D (cell (0,0) centred at (0,0)).
    Field2D channel_field(std::size_t frame, Channel c) const;

    /// Throws DomainError when the invariants (shape, frame sizes, mu in
    /// [0, 1], finite values) do not hold.
    void validate() const;

    bool same_layout(const SnapshotSeries& o) const {
        return nx == o.nx && ny == o.ny && frames.size() == o.frames.size();
    }

private:
    std::size_t offset(Channel c, int i, int j) const {
        return (static_cast<std::size_t>(c) * ny + j) * nx + i;
    }
};

/// Copies (T, p, mu, U, V) out of a solver state. Vacuum cells (mu below
/// mu_vac) are written as T = 0, p = 0, U = V = 0.
Frame record(const SimState& s, double mu_vac = 0.5);

/// Called after every solver step; the flag is true when the step landed
/// on a snapshot time.
using StepObserver = std::function<void(const SimState&, const Solver&, bool snapshot)>;

/// Runs cfg from t = 0 to cfg.t_end(), recording a frame at every
/// multiple of cfg.snapshot_dt (including t = 0). Progress lines go to
/// `progress` when non-null.
SnapshotSeries simulate(const RunConfig& cfg, std::ostream* progress = nullptr,
                        const StepObserver& observer = {});

// -- normalization ----------------------------------------------------------

struct NormStats {
    double T_min = 0.0;
    double T_max = 1.0;
    double p_min = 0.0;
    double p_max = 1.0;
    double vel_scale = 1.0;  // shared by both velocity components

    void validate() const;
};

/// Min-max statistics for T and p, and the largest |U| or |V| over every
/// frame and cell of the training series.
NormStats fit_norm(std::span<const SnapshotSeries> training);

/// T, p -> (x - min)/(max - min); U, V -> x / vel_scale; mu untouched.
SnapshotSeries normalize(const SnapshotSeries& s, const NormStats& stats);
SnapshotSeries denormalize(const SnapshotSeries& s, const NormStats& stats);

// -- velocity splits ---------------------------------------------------------

struct VelocitySplit {
    std::vector<double> train;
    std::vector<double> validation;
    std::vector<double> test;
    std::uint64_t seed = 0;

    /// train + validation, ascending.
    std::vector<double> pool() const;
};

inline constexpr std::size_t kTrainCount = 70;
inline constexpr std::size_t kValidationCount = 18;
inline constexpr std::uint64_t kDefaultSplitSeed = 20240607;

/// Impact speeds 720..2880 m/s in 20 m/s steps minus multiples of 100 form
/// the train/validation pool (shuffled with `seed`, then 70/18); the test
/// set is the multiples of 100 in that range plus 500-700 and 2900-3080.
VelocitySplit split_velocities(std::uint64_t seed = kDefaultSplitSeed);

/// "train", "validation", "test" or "" for a speed outside every set.
std::string split_label(const VelocitySplit& split, double v0);

// -- container ----------------------------------------------------------------

inline constexpr std::size_t kHeaderBytes = 128;

/// Writes the little-endian SHRB container (f32 payload).
void write_series(const SnapshotSeries& s, const std::filesystem::path& path);
void write_series(const SnapshotSeries& s, std::ostream& out);

/// Reads an SHRB container. Throws FormatError with the failing offset.
SnapshotSeries read_series(const std::filesystem::path& path);
SnapshotSeries read_series(std::istream& in);

struct SeriesHeader {
    std::uint32_t version = 0;
    std::uint32_t nx = 0;
    std::uint32_t ny = 0;
    std::uint32_t n_channels = 0;
    std::uint32_t n_frames = 0;
    double dx = 0.0;
    double dt_snap = 0.0;
    double v0 = 0.0;
    std::array<std::string, kChannelCount> channel_names;
};

/// Reads and validates only the 128-byte header.
SeriesHeader read_header(const std::filesystem::path& path);

// -- manifest -----------------------------------------------------------------

/// Ordered key=value text file.
class Manifest {
public:
    void set(const std::string& key, const std::string& value);
    void set(const std::string& key, double value);
    /// Empty string when absent.
    std::string get(const std::string& key) const;
    bool has(const std::string& key) const;
    const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

    void write(const std::filesystem::path& path) const;
    static Manifest read(const std::filesystem::path& path);

private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

void store_norm(Manifest& manifest, const NormStats& stats);
NormStats load_norm(const Manifest& manifest);

}  // namespace shockpore
