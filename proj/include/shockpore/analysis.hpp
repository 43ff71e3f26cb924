#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "shockpore/dataset.hpp"
#include "shockpore/field2d.hpp"

namespace shockpore {

// -- roll-out error -----------------------------------------------------------

/// Per-channel RMSE over every frame and cell, in physical units, indexed
/// by Channel.
std::array<double, kChannelCount> rollout_rmse(const SnapshotSeries& pred, const SnapshotSeries& truth);

/// (mean |pred - truth|^p)^(1/p). Throws DomainError for p < 1 or a size
/// mismatch.
double lp_error(std::span<const double> pred, std::span<const double> truth, double p);
/// Same over one channel of every frame.
double lp_error(const SnapshotSeries& pred, const SnapshotSeries& truth, Channel c, double p);

// -- distributions ------------------------------------------------------------

struct Histogram {
    std::vector<double> edges;    // n_bins + 1, strictly increasing
    std::vector<double> density;  // n_bins; sum(density * width) == 1

    std::size_t n_bins() const { return density.size(); }
    double bin_width(std::size_t b) const { return edges[b + 1] - edges[b]; }
    double integral() const;
};

/// n_bins equal-width edges spanning the value range of `channel` in the
/// given frames of every series, so that compared histograms share edges.
/// A constant range is widened by 0.5 on each side.
std::vector<double> shared_edges(std::span<const SnapshotSeries* const> series, Channel c,
                                 std::span<const std::size_t> frames, std::size_t n_bins);

/// Normalized histogram of one channel of one frame over fixed edges.
/// Values outside the edges are ignored; throws DomainError when nothing
/// falls inside.
Histogram field_pdf(const SnapshotSeries& s, Channel c, std::size_t frame, const std::vector<double>& edges);
/// Histogram over edges spanning this frame's own range.
Histogram field_pdf(const SnapshotSeries& s, Channel c, std::size_t frame, std::size_t n_bins);

/// Number of maximal runs of occupied bins (density > 0).
std::size_t occupied_regions(const Histogram& h);

// -- pore collapse --------------------------------------------------------------

inline constexpr double kCollapseFraction = 0.01;

/// Number of cells with mu < mu_vac that belong to enclosed vacuum regions
/// (4-connected components not touching the domain edge).
std::size_t enclosed_vacuum_cells(const SnapshotSeries& s, std::size_t frame, double mu_vac = 0.5);

/// First frame whose enclosed vacuum area is at most collapse_fraction of
/// the area in frame 0. std::nullopt means not collapsed (or no pore).
std::optional<std::size_t> pore_collapse_time(const SnapshotSeries& s,
                                              double collapse_fraction = kCollapseFraction,
                                              double mu_vac = 0.5);

// -- shear-band profiles ----------------------------------------------------------

struct Profile {
    std::vector<double> y;  // m
    std::vector<double> T;  // K
};

/// Temperature along the cell column nearest to x, for rows
/// round(y_lo/dx) .. round(y_hi/dx) - 1. Cell k sits at k * dx.
Profile vertical_cut(const SnapshotSeries& s, std::size_t frame, double x, double y_lo, double y_hi);

struct BandMetrics {
    double y_peakT = 0.0;     // m
    double width = 0.0;       // m, full width at half of deltaT
    double deltaT = 0.0;      // K
    double background = 0.0;  // K, median of the profile
};

inline constexpr double kBandMinContrast = 20.0;

/// Dominant temperature band of a profile; std::nullopt is the "Fail"
/// outcome (too short, or peak less than min_contrast above background).
std::optional<BandMetrics> dominant_band(const Profile& profile, double min_contrast = kBandMinContrast);

/// Frame maximizing deltaT of the band on the given cut; nullopt when every
/// frame fails.
std::optional<std::size_t> most_prominent_band_frame(const SnapshotSeries& s, double x, double y_lo,
                                                     double y_hi, double min_contrast = kBandMinContrast);

// -- spectra ------------------------------------------------------------------------

struct RadialSpectrum {
    std::vector<double> k;      // 1/m, bin centres b * dk
    std::vector<double> power;  // sum of |F|^2 / N over the bin
    double dk = 0.0;
};

/// Isotropic power spectrum of a 2D field with bins of width
/// 2 pi / (max(nx, ny) dx). The binned powers sum to sum(f^2).
RadialSpectrum radial_spectrum(const Field2D& f);

struct SpectrumError {
    std::vector<double> k;           // 1/m
    std::vector<double> wavelength;  // m, 2 pi / k (infinite for k = 0)
    std::vector<double> rel_error;   // |E_pred - E_truth| / E_truth
};

/// Relative error of the radial power spectrum per bin; bins whose truth
/// power is below 1e-12 of the total are omitted.
SpectrumError spectrum_relative_error(const Field2D& pred, const Field2D& truth);

// -- wavelets -------------------------------------------------------------------------

struct HaarDetails {
    Field2D lh;  // horizontal detail
    Field2D hl;  // vertical detail
    Field2D hh;  // diagonal detail
};

/// One level of the orthonormal 2D Haar transform (details only).
/// Throws DomainError for odd dimensions.
HaarDetails haar_details(const Field2D& f);

/// Sum over the three detail subbands of their mean absolute coefficient.
double haar_highfreq_energy(const Field2D& f);
/// Sum over the detail subbands of the mean absolute coefficient difference.
double haar_loss(const Field2D& pred, const Field2D& truth);

// -- shock speed ------------------------------------------------------------------------

struct ShockSpeed {
    double Uw = 0.0;  // front speed in the wall frame, m/s
    double Us = 0.0;  // Uw + |Up|
    std::size_t frames_used = 0;
};

/// Tracks the row of maximum |dp/dy| on the centre column and fits its
/// height against time. Frames where the front is not yet resolved or is
/// within two cells of the first vacuum cell above it are skipped.
/// Throws DomainError with fewer than three usable frames.
ShockSpeed measure_shock_speed(const SnapshotSeries& s);

// -- reports ------------------------------------------------------------------------

/// Writes a tab-separated table: one header line, then rows.
void write_table(std::ostream& out, const std::vector<std::string>& header,
                 const std::vector<std::vector<std::string>>& rows);

std::string format_number(double v);

}  // namespace shockpore
