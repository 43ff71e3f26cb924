#include "shockpore/analysis.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <iomanip>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>

#include "shockpore/errors.hpp"

namespace shockpore {

namespace {

void require_same_layout(const SnapshotSeries& a, const SnapshotSeries& b) {
    if (!a.same_layout(b)) {
        throw DomainError("series shapes differ: " + std::to_string(a.nx) + "x" + std::to_string(a.ny) +
                          "x" + std::to_string(a.n_frames()) + " vs " + std::to_string(b.nx) + "x" +
                          std::to_string(b.ny) + "x" + std::to_string(b.n_frames()));
    }
}

void require_frame(const SnapshotSeries& s, std::size_t frame) {
    if (frame >= s.n_frames()) {
        throw DomainError("frame " + std::to_string(frame) + " out of range (series has " +
                          std::to_string(s.n_frames()) + ")");
    }
}

}  // namespace

std::array<double, kChannelCount> rollout_rmse(const SnapshotSeries& pred, const SnapshotSeries& truth) {
    require_same_layout(pred, truth);
    if (pred.n_frames() == 0) throw DomainError("rollout_rmse needs at least one frame");
    std::array<double, kChannelCount> out{};
    for (int c = 0; c < kChannelCount; ++c) {
        const Channel ch = static_cast<Channel>(c);
        double sum = 0.0;
        std::size_t n = 0;
        for (std::size_t k = 0; k < pred.n_frames(); ++k) {
            auto a = pred.channel(k, ch);
            auto b = truth.channel(k, ch);
            for (std::size_t q = 0; q < a.size(); ++q) {
                const double d = a[q] - b[q];
                sum += d * d;
            }
            n += a.size();
        }
        out[c] = std::sqrt(sum / static_cast<double>(n));
    }
    return out;
}

double lp_error(std::span<const double> pred, std::span<const double> truth, double p) {
    if (!(p >= 1.0) || !std::isfinite(p)) throw DomainError("lp_error needs a finite p >= 1");
    if (pred.size() != truth.size()) throw DomainError("lp_error inputs differ in size");
    if (pred.empty()) throw DomainError("lp_error needs non-empty inputs");
    double scale = 0.0;
    for (std::size_t q = 0; q < pred.size(); ++q) scale = std::max(scale, std::abs(pred[q] - truth[q]));
    if (scale == 0.0) return 0.0;
    // Scaled by the largest difference so large p cannot overflow.
    double sum = 0.0;
    for (std::size_t q = 0; q < pred.size(); ++q) sum += std::pow(std::abs(pred[q] - truth[q]) / scale, p);
    return scale * std::pow(sum / static_cast<double>(pred.size()), 1.0 / p);
}

double lp_error(const SnapshotSeries& pred, const SnapshotSeries& truth, Channel c, double p) {
    require_same_layout(pred, truth);
    std::vector<double> a;
    std::vector<double> b;
    for (std::size_t k = 0; k < pred.n_frames(); ++k) {
        auto pa = pred.channel(k, c);
        auto pb = truth.channel(k, c);
        a.insert(a.end(), pa.begin(), pa.end());
        b.insert(b.end(), pb.begin(), pb.end());
    }
    return lp_error(a, b, p);
}

// -- distributions ------------------------------------------------------------

double Histogram::integral() const {
    double s = 0.0;
    for (std::size_t b = 0; b < n_bins(); ++b) s += density[b] * bin_width(b);
    return s;
}

std::vector<double> shared_edges(std::span<const SnapshotSeries* const> series, Channel c,
                                 std::span<const std::size_t> frames, std::size_t n_bins) {
    if (n_bins < 1) throw DomainError("need at least one bin");
    if (series.size() != frames.size() || series.empty()) {
        throw DomainError("shared_edges needs one frame index per series");
    }
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t q = 0; q < series.size(); ++q) {
        require_frame(*series[q], frames[q]);
        for (double v : series[q]->channel(frames[q], c)) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    if (!(lo <= hi)) throw DomainError("empty frame");
    if (lo == hi) {
        lo -= 0.5;
        hi += 0.5;
    }
    std::vector<double> edges(n_bins + 1);
    for (std::size_t b = 0; b <= n_bins; ++b) {
        edges[b] = lo + (hi - lo) * static_cast<double>(b) / static_cast<double>(n_bins);
    }
    edges.back() = hi;
    return edges;
}

Histogram field_pdf(const SnapshotSeries& s, Channel c, std::size_t frame, const std::vector<double>& edges) {
    require_frame(s, frame);
    if (edges.size() < 2) throw DomainError("need at least two bin edges");
    for (std::size_t b = 1; b < edges.size(); ++b) {
        if (!(edges[b] > edges[b - 1])) throw DomainError("bin edges must be strictly increasing");
    }
    const std::size_t nb = edges.size() - 1;
    std::vector<double> counts(nb, 0.0);
    std::size_t inside = 0;
    for (double v : s.channel(frame, c)) {
        if (!(v >= edges.front() && v <= edges.back())) continue;
        auto it = std::upper_bound(edges.begin(), edges.end(), v);
        std::size_t b = static_cast<std::size_t>(it - edges.begin());
        b = b == 0 ? 0 : std::min(b - 1, nb - 1);  // right edge belongs to the last bin
        counts[b] += 1.0;
        ++inside;
    }
    if (inside == 0) throw DomainError("no values fall inside the histogram edges");
    Histogram h;
    h.edges = edges;
    h.density.resize(nb);
    for (std::size_t b = 0; b < nb; ++b) {
        h.density[b] = counts[b] / (static_cast<double>(inside) * h.bin_width(b));
    }
    return h;
}

Histogram field_pdf(const SnapshotSeries& s, Channel c, std::size_t frame, std::size_t n_bins) {
    const SnapshotSeries* one[] = {&s};
    const std::size_t idx[] = {frame};
    return field_pdf(s, c, frame, shared_edges(one, c, idx, n_bins));
}

std::size_t occupied_regions(const Histogram& h) {
    std::size_t runs = 0;
    bool prev = false;
    for (double d : h.density) {
        const bool occ = d > 0.0;
        if (occ && !prev) ++runs;
        prev = occ;
    }
    return runs;
}

// -- pore collapse --------------------------------------------------------------

std::size_t enclosed_vacuum_cells(const SnapshotSeries& s, std::size_t frame, double mu_vac) {
    require_frame(s, frame);
    const int nx = s.nx;
    const int ny = s.ny;
    auto mu = s.channel(frame, Channel::mu);
    std::vector<char> seen(mu.size(), 0);
    std::vector<int> stack;
    std::size_t total = 0;
    for (std::size_t start = 0; start < mu.size(); ++start) {
        if (seen[start] || mu[start] >= mu_vac) continue;
        std::size_t size = 0;
        bool touches_edge = false;
        stack.assign(1, static_cast<int>(start));
        seen[start] = 1;
        while (!stack.empty()) {
            const int q = stack.back();
            stack.pop_back();
            ++size;
            const int i = q % nx;
            const int j = q / nx;
            if (i == 0 || j == 0 || i == nx - 1 || j == ny - 1) touches_edge = true;
            const int nb[4][2] = {{i - 1, j}, {i + 1, j}, {i, j - 1}, {i, j + 1}};
            for (const auto& n : nb) {
                if (n[0] < 0 || n[1] < 0 || n[0] >= nx || n[1] >= ny) continue;
                const int r = n[1] * nx + n[0];
                if (seen[r] || mu[r] >= mu_vac) continue;
                seen[r] = 1;
                stack.push_back(r);
            }
        }
        if (!touches_edge) total += size;
    }
    return total;
}

std::optional<std::size_t> pore_collapse_time(const SnapshotSeries& s, double collapse_fraction,
                                              double mu_vac) {
    if (!(collapse_fraction >= 0.0)) throw DomainError("collapse_fraction must be >= 0");
    if (s.n_frames() == 0) return std::nullopt;
    const double initial = static_cast<double>(enclosed_vacuum_cells(s, 0, mu_vac));
    if (initial == 0.0) return std::nullopt;
    for (std::size_t k = 1; k < s.n_frames(); ++k) {
        if (static_cast<double>(enclosed_vacuum_cells(s, k, mu_vac)) <= collapse_fraction * initial) {
            return k;
        }
    }
    return std::nullopt;
}

// -- shear-band profiles ------------------------------------------------------------

Profile vertical_cut(const SnapshotSeries& s, std::size_t frame, double x, double y_lo, double y_hi) {
    require_frame(s, frame);
    if (!std::isfinite(x) || !std::isfinite(y_lo) || !std::isfinite(y_hi) || !(y_hi > y_lo)) {
        throw DomainError("vertical_cut needs finite x and y_lo < y_hi");
    }
    const long i = std::lround(x / s.dx);
    const long j0 = std::lround(y_lo / s.dx);
    const long j1 = std::lround(y_hi / s.dx);
    if (x < 0.0 || i < 0 || i >= s.nx) throw DomainError("cut column lies outside the domain");
    if (y_lo < 0.0 || j0 < 0 || j1 > s.ny || j1 <= j0) throw DomainError("cut rows lie outside the domain");
    Profile p;
    for (long j = j0; j < j1; ++j) {
        p.y.push_back(static_cast<double>(j) * s.dx);
        p.T.push_back(s.at(frame, Channel::T, static_cast<int>(i), static_cast<int>(j)));
    }
    return p;
}

std::optional<BandMetrics> dominant_band(const Profile& profile, double min_contrast) {
    const std::vector<double>& T = profile.T;
    const std::vector<double>& y = profile.y;
    if (T.size() < 8 || y.size() != T.size()) return std::nullopt;

    std::vector<double> sorted = T;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    const double background = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);

    const auto peak_it = std::max_element(T.begin(), T.end());
    const std::size_t ip = static_cast<std::size_t>(peak_it - T.begin());
    const double dT = *peak_it - background;
    if (!(dT >= min_contrast) || !std::isfinite(dT)) return std::nullopt;

    const double half = background + 0.5 * dT;
    auto crossing = [&](std::size_t a, std::size_t b) {
        // a is above half, b is at or below it
        return y[a] + (half - T[a]) * (y[b] - y[a]) / (T[b] - T[a]);
    };
    double left = y.front();
    for (std::size_t q = ip; q > 0; --q) {
        if (T[q - 1] <= half) {
            left = crossing(q, q - 1);
            break;
        }
    }
    double right = y.back();
    for (std::size_t q = ip; q + 1 < T.size(); ++q) {
        if (T[q + 1] <= half) {
            right = crossing(q, q + 1);
            break;
        }
    }
    const double width = right - left;
    if (!(width > 0.0)) return std::nullopt;
    return BandMetrics{y[ip], width, dT, background};
}

std::optional<std::size_t> most_prominent_band_frame(const SnapshotSeries& s, double x, double y_lo,
                                                     double y_hi, double min_contrast) {
    std::optional<std::size_t> best;
    double best_dT = -1.0;
    for (std::size_t k = 0; k < s.n_frames(); ++k) {
        auto band = dominant_band(vertical_cut(s, k, x, y_lo, y_hi), min_contrast);
        if (band && band->deltaT > best_dT) {
            best_dT = band->deltaT;
            best = k;
        }
    }
    return best;
}

// -- spectra ----------------------------------------------------------------------

namespace {

// FFTW planning is not thread-safe; execution is.
std::mutex& fftw_plan_mutex() {
    static std::mutex m;
    return m;
}

std::vector<std::complex<double>> dft2(const Field2D& f) {
    const int nx = f.nx();
    const int ny = f.ny();
    const std::size_t n = static_cast<std::size_t>(nx) * ny;
    auto* in = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
    auto* out = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
    if (!in || !out) {
        fftw_free(in);
        fftw_free(out);
        throw std::bad_alloc();
    }
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(fftw_plan_mutex());
        // Row-major with x fastest: the slow dimension is y.
        plan = fftw_plan_dft_2d(ny, nx, in, out, FFTW_FORWARD, FFTW_ESTIMATE);
    }
    auto vals = f.values();
    for (std::size_t q = 0; q < n; ++q) {
        in[q][0] = vals[q];
        in[q][1] = 0.0;
    }
    fftw_execute(plan);
    std::vector<std::complex<double>> F(n);
    for (std::size_t q = 0; q < n; ++q) F[q] = {out[q][0], out[q][1]};
    {
        std::lock_guard<std::mutex> lock(fftw_plan_mutex());
        fftw_destroy_plan(plan);
    }
    fftw_free(in);
    fftw_free(out);
    return F;
}

// Signed frequency index of DFT bin m out of n.
int signed_index(int m, int n) { return m <= n / 2 ? m : m - n; }

}  // namespace

RadialSpectrum radial_spectrum(const Field2D& f) {
    if (f.size() == 0) throw DomainError("empty field");
    const int nx = f.nx();
    const int ny = f.ny();
    const double dx = f.dx();
    const double N = static_cast<double>(nx) * ny;
    const auto F = dft2(f);

    RadialSpectrum s;
    s.dk = 2.0 * M_PI / (std::max(nx, ny) * dx);
    const double kxmax = 2.0 * M_PI * (nx / 2) / (nx * dx);
    const double kymax = 2.0 * M_PI * (ny / 2) / (ny * dx);
    const std::size_t nbins =
        static_cast<std::size_t>(std::floor(std::hypot(kxmax, kymax) / s.dk + 0.5)) + 1;
    s.power.assign(nbins, 0.0);
    for (int my = 0; my < ny; ++my) {
        const double ky = 2.0 * M_PI * signed_index(my, ny) / (ny * dx);
        for (int mx = 0; mx < nx; ++mx) {
            const double kx = 2.0 * M_PI * signed_index(mx, nx) / (nx * dx);
            const auto b = static_cast<std::size_t>(std::floor(std::hypot(kx, ky) / s.dk + 0.5));
            s.power[std::min(b, nbins - 1)] += std::norm(F[static_cast<std::size_t>(my) * nx + mx]) / N;
        }
    }
    s.k.resize(nbins);
    for (std::size_t b = 0; b < nbins; ++b) s.k[b] = static_cast<double>(b) * s.dk;
    return s;
}

SpectrumError spectrum_relative_error(const Field2D& pred, const Field2D& truth) {
    if (!pred.same_shape(truth)) throw DomainError("spectrum frames differ in shape");
    const RadialSpectrum P = radial_spectrum(pred);
    const RadialSpectrum T = radial_spectrum(truth);
    double total = 0.0;
    for (double v : T.power) total += v;
    SpectrumError e;
    for (std::size_t b = 0; b < T.power.size(); ++b) {
        if (!(T.power[b] > 1e-12 * total)) continue;
        e.k.push_back(T.k[b]);
        e.wavelength.push_back(T.k[b] > 0.0 ? 2.0 * M_PI / T.k[b] : std::numeric_limits<double>::infinity());
        e.rel_error.push_back(std::abs(P.power[b] - T.power[b]) / T.power[b]);
    }
    return e;
}

// -- wavelets ---------------------------------------------------------------------

HaarDetails haar_details(const Field2D& f) {
    if (f.nx() % 2 || f.ny() % 2 || f.size() == 0) {
        throw DomainError("Haar transform needs even, non-zero dimensions");
    }
    const int hx = f.nx() / 2;
    const int hy = f.ny() / 2;
    HaarDetails d{Field2D(hx, hy, 2 * f.dx()), Field2D(hx, hy, 2 * f.dx()), Field2D(hx, hy, 2 * f.dx())};
    for (int j = 0; j < hy; ++j) {
        for (int i = 0; i < hx; ++i) {
            const double a = f(2 * i, 2 * j);
            const double b = f(2 * i + 1, 2 * j);
            const double c = f(2 * i, 2 * j + 1);
            const double e = f(2 * i + 1, 2 * j + 1);
            d.lh(i, j) = 0.5 * (a - b + c - e);
            d.hl(i, j) = 0.5 * (a + b - c - e);
            d.hh(i, j) = 0.5 * (a - b - c + e);
        }
    }
    return d;
}

namespace {

double mean_abs(const Field2D& f) {
    double s = 0.0;
    for (double v : f.values()) s += std::abs(v);
    return s / static_cast<double>(f.size());
}

}  // namespace

double haar_highfreq_energy(const Field2D& f) {
    const HaarDetails d = haar_details(f);
    return mean_abs(d.lh) + mean_abs(d.hl) + mean_abs(d.hh);
}

double haar_loss(const Field2D& pred, const Field2D& truth) {
    if (!pred.same_shape(truth)) throw DomainError("haar_loss frames differ in shape");
    const HaarDetails a = haar_details(pred);
    const HaarDetails b = haar_details(truth);
    return mean_abs(a.lh - b.lh) + mean_abs(a.hl - b.hl) + mean_abs(a.hh - b.hh);
}

// -- shock speed ----------------------------------------------------------------------

ShockSpeed measure_shock_speed(const SnapshotSeries& s) {
    if (s.ny < 4) throw DomainError("shock tracking needs at least 4 rows");
    const int ic = s.nx / 2;
    std::vector<double> ts;
    std::vector<double> ys;
    for (std::size_t k = 0; k < s.n_frames(); ++k) {
        int j_vac = s.ny;
        for (int j = 0; j < s.ny; ++j) {
            if (s.at(k, Channel::mu, ic, j) < 0.5) {
                j_vac = j;
                break;
            }
        }
        // |dp/dy| on the faces j + 1/2 below the first vacuum cell
        int jbest = -1;
        double gbest = 0.0;
        for (int j = 0; j + 1 < j_vac; ++j) {
            const double g = std::abs(s.at(k, Channel::p, ic, j + 1) - s.at(k, Channel::p, ic, j));
            if (g > gbest) {
                gbest = g;
                jbest = j;
            }
        }
        if (jbest < 1 || jbest + 3 >= j_vac || jbest + 3 >= s.ny) continue;
        // Sub-cell peak from a parabola through the neighbouring face gradients.
        auto grad = [&](int j) {
            return std::abs(s.at(k, Channel::p, ic, j + 1) - s.at(k, Channel::p, ic, j));
        };
        const double gm = grad(jbest - 1);
        const double g0 = grad(jbest);
        const double gp = grad(jbest + 1);
        const double denom = gm - 2.0 * g0 + gp;
        const double shift = denom < 0.0 ? std::clamp(0.5 * (gm - gp) / denom, -0.5, 0.5) : 0.0;
        ts.push_back(static_cast<double>(k) * s.dt_snap);
        ys.push_back((jbest + 0.5 + shift) * s.dx);
    }
    if (ts.size() < 3) {
        throw DomainError("fewer than three frames with a resolvable shock front");
    }
    const double n = static_cast<double>(ts.size());
    double mt = 0.0;
    double my = 0.0;
    for (std::size_t q = 0; q < ts.size(); ++q) {
        mt += ts[q];
        my += ys[q];
    }
    mt /= n;
    my /= n;
    double sty = 0.0;
    double stt = 0.0;
    for (std::size_t q = 0; q < ts.size(); ++q) {
        sty += (ts[q] - mt) * (ys[q] - my);
        stt += (ts[q] - mt) * (ts[q] - mt);
    }
    ShockSpeed out;
    out.Uw = std::abs(sty / stt);
    out.Us = out.Uw + std::abs(s.v0);
    out.frames_used = ts.size();
    return out;
}

// -- reports ----------------------------------------------------------------------------

std::string format_number(double v) {
    std::ostringstream s;
    s << std::setprecision(10) << v;
    return s.str();
}

void write_table(std::ostream& out, const std::vector<std::string>& header,
                 const std::vector<std::vector<std::string>>& rows) {
    auto line = [&out](const std::vector<std::string>& cells) {
        for (std::size_t q = 0; q < cells.size(); ++q) out << (q ? "\t" : "") << cells[q];
        out << '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
}

}  // namespace shockpore
