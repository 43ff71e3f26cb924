#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace shockpore {

/// Cell-centred scalar field on a uniform square-cell grid.
///
/// Storage is row-major with x fastest: value (i, j) lives at j * nx + i,
/// where i indexes x (columns) and j indexes y (rows, j = 0 at the bottom).
class Field2D {
public:
    Field2D() = default;
    Field2D(int nx, int ny, double dx, double fill = 0.0, double x0 = 0.0, double y0 = 0.0);

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    double dx() const { return dx_; }
    /// Physical coordinates of the centre of cell (0, 0).
    double x0() const { return x0_; }
    double y0() const { return y0_; }
    std::size_t size() const { return data_.size(); }

    double& operator()(int i, int j) { return data_[static_cast<std::size_t>(j) * nx_ + i]; }
    double operator()(int i, int j) const { return data_[static_cast<std::size_t>(j) * nx_ + i]; }

    std::span<double> values() { return data_; }
    std::span<const double> values() const { return data_; }

    bool same_shape(const Field2D& other) const {
        return nx_ == other.nx_ && ny_ == other.ny_;
    }
    /// True when every value is finite.
    bool all_finite() const;

    void fill(double v);

    Field2D& operator+=(const Field2D& o);
    Field2D& operator-=(const Field2D& o);
    Field2D& operator*=(double s);

    friend Field2D operator+(Field2D a, const Field2D& b) { return a += b; }
    friend Field2D operator-(Field2D a, const Field2D& b) { return a -= b; }
    friend Field2D operator*(Field2D a, double s) { return a *= s; }
    friend Field2D operator*(double s, Field2D a) { return a *= s; }

private:
    int nx_ = 0;
    int ny_ = 0;
    double dx_ = 1.0;
    double x0_ = 0.0;
    double y0_ = 0.0;
    std::vector<double> data_;
};

/// Ghost-cell fill rule for one side of the domain.
struct PadMode {
    enum class Kind { Constant, Replicate, Reflect, Circular };

    Kind kind = Kind::Replicate;
    double value = 0.0;  // only meaningful for Constant

    static constexpr PadMode constant(double v) { return {Kind::Constant, v}; }
    static constexpr PadMode replicate() { return {Kind::Replicate, 0.0}; }
    static constexpr PadMode reflect() { return {Kind::Reflect, 0.0}; }
    static constexpr PadMode circular() { return {Kind::Circular, 0.0}; }
};

/// One PadMode per side. Circular is only consistent when both sides of an
/// axis use it; pad() rejects a half-periodic axis.
struct PadSpec {
    PadMode x_lo = PadMode::replicate();
    PadMode x_hi = PadMode::replicate();
    PadMode y_lo = PadMode::replicate();
    PadMode y_hi = PadMode::replicate();

    static constexpr PadSpec uniform(PadMode m) { return {m, m, m, m}; }
};

/// Returns an (nx + 2w) x (ny + 2w) field. Corners are filled by padding x
/// first and then y over the x-padded rows.
Field2D pad(const Field2D& f, int width, const PadSpec& sides);

/// Inverse of pad(): strips `width` cells from every side.
Field2D crop(const Field2D& f, int width);

/// -(u dq/dx + v dq/dy) with first-order upwind differences. Where the
/// velocity component is exactly zero the centred difference is used.
Field2D upwind_advect(const Field2D& q, const Field2D& u, const Field2D& v,
                      const PadSpec& sides = PadSpec{});

/// Second-order centred differences inside, second-order one-sided at the
/// domain edges.
std::pair<Field2D, Field2D> gradient(const Field2D& f);
Field2D divergence(const Field2D& fx, const Field2D& fy);
/// divergence(gradient(f)).
Field2D laplacian(const Field2D& f);

}  // namespace shockpore
