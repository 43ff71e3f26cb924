#include "shockpore/field2d.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "shockpore/errors.hpp"

namespace shockpore {

Field2D::Field2D(int nx, int ny, double dx, double fill, double x0, double y0)
    : nx_(nx), ny_(ny), dx_(dx), x0_(x0), y0_(y0) {
    if (nx < 1 || ny < 1) throw DomainError("Field2D: nx and ny must be >= 1");
    if (!(dx > 0.0) || !std::isfinite(dx)) throw DomainError("Field2D: dx must be positive");
    data_.assign(static_cast<std::size_t>(nx) * ny, fill);
}

bool Field2D::all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

void Field2D::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

Field2D& Field2D::operator+=(const Field2D& o) {
    if (!same_shape(o)) throw DomainError("Field2D +=: shape mismatch");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
}

Field2D& Field2D::operator-=(const Field2D& o) {
    if (!same_shape(o)) throw DomainError("Field2D -=: shape mismatch");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
}

Field2D& Field2D::operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
}

namespace {

// Index of the interior cell feeding ghost offset `g` (g < 0 below the low
// edge, g >= n above the high edge). Returns -1 for Constant.
int ghost_source(int g, int n, PadMode::Kind kind) {
    switch (kind) {
        case PadMode::Kind::Constant:
            return -1;
        case PadMode::Kind::Replicate:
            return g < 0 ? 0 : n - 1;
        case PadMode::Kind::Reflect:
            return g < 0 ? -g : 2 * (n - 1) - g;
        case PadMode::Kind::Circular:
            return g < 0 ? g + n : g - n;
    }
    return -1;
}

void check_axis(const PadMode& lo, const PadMode& hi, int n, int width, const char* axis) {
    const bool lo_circ = lo.kind == PadMode::Kind::Circular;
    const bool hi_circ = hi.kind == PadMode::Kind::Circular;
    if (lo_circ != hi_circ) {
        throw DomainError(std::string("pad: circular padding on only one ") + axis + " side");
    }
    for (const PadMode* m : {&lo, &hi}) {
        if (m->kind == PadMode::Kind::Reflect && width > n - 1) {
            throw DomainError(std::string("pad: reflect width exceeds ") + axis + " extent");
        }
        if (m->kind == PadMode::Kind::Circular && width > n) {
            throw DomainError(std::string("pad: circular width exceeds ") + axis + " extent");
        }
    }
}

}  // namespace

Field2D pad(const Field2D& f, int width, const PadSpec& sides) {
    if (width < 1) throw DomainError("pad: width must be >= 1");
    const int nx = f.nx();
    const int ny = f.ny();
    check_axis(sides.x_lo, sides.x_hi, nx, width, "x");
    check_axis(sides.y_lo, sides.y_hi, ny, width, "y");

    const int px = nx + 2 * width;
    const int py = ny + 2 * width;
    Field2D out(px, py, f.dx(), 0.0, f.x0() - width * f.dx(), f.y0() - width * f.dx());

    // Interior rows with x ghosts.
    for (int j = 0; j < ny; ++j) {
        for (int i = -width; i < nx + width; ++i) {
            double v;
            if (i >= 0 && i < nx) {
                v = f(i, j);
            } else {
                const PadMode& mode = i < 0 ? sides.x_lo : sides.x_hi;
                const int src = ghost_source(i, nx, mode.kind);
                v = src < 0 ? mode.value : f(src, j);
            }
            out(i + width, j + width) = v;
        }
    }
    // y ghosts copy whole padded rows, so corners inherit the x treatment.
    for (int j = -width; j < 0; ++j) {
        const int src = ghost_source(j, ny, sides.y_lo.kind);
        for (int i = 0; i < px; ++i) {
            out(i, j + width) = src < 0 ? sides.y_lo.value : out(i, src + width);
        }
    }
    for (int j = ny; j < ny + width; ++j) {
        const int src = ghost_source(j, ny, sides.y_hi.kind);
        for (int i = 0; i < px; ++i) {
            out(i, j + width) = src < 0 ? sides.y_hi.value : out(i, src + width);
        }
    }
    return out;
}

Field2D crop(const Field2D& f, int width) {
    if (width < 0 || 2 * width >= f.nx() || 2 * width >= f.ny()) {
        throw DomainError("crop: width leaves no interior");
    }
    Field2D out(f.nx() - 2 * width, f.ny() - 2 * width, f.dx(), 0.0, f.x0() + width * f.dx(),
                f.y0() + width * f.dx());
    for (int j = 0; j < out.ny(); ++j) {
        for (int i = 0; i < out.nx(); ++i) out(i, j) = f(i + width, j + width);
    }
    return out;
}

Field2D upwind_advect(const Field2D& q, const Field2D& u, const Field2D& v, const PadSpec& sides) {
    if (!q.same_shape(u) || !q.same_shape(v)) throw DomainError("upwind_advect: shape mismatch");
    const Field2D g = pad(q, 1, sides);
    const double inv_dx = 1.0 / q.dx();
    Field2D out(q.nx(), q.ny(), q.dx(), 0.0, q.x0(), q.y0());
    for (int j = 0; j < q.ny(); ++j) {
        for (int i = 0; i < q.nx(); ++i) {
            const double c = g(i + 1, j + 1);
            const double uu = u(i, j);
            const double vv = v(i, j);
            double dqdx;
            if (uu > 0.0) {
                dqdx = (c - g(i, j + 1)) * inv_dx;
            } else if (uu < 0.0) {
                dqdx = (g(i + 2, j + 1) - c) * inv_dx;
            } else {
                dqdx = 0.5 * (g(i + 2, j + 1) - g(i, j + 1)) * inv_dx;
            }
            double dqdy;
            if (vv > 0.0) {
                dqdy = (c - g(i + 1, j)) * inv_dx;
            } else if (vv < 0.0) {
                dqdy = (g(i + 1, j + 2) - c) * inv_dx;
            } else {
                dqdy = 0.5 * (g(i + 1, j + 2) - g(i + 1, j)) * inv_dx;
            }
            out(i, j) = -(uu * dqdx + vv * dqdy);
        }
    }
    return out;
}

namespace {

// Derivative along one axis; `at(k)` reads the k-th sample of the line.
template <class Sample>
double line_derivative(Sample at, int k, int n, double inv_dx) {
    if (n == 1) return 0.0;
    if (n == 2) return (at(1) - at(0)) * inv_dx;
    if (k == 0) return (-3.0 * at(0) + 4.0 * at(1) - at(2)) * 0.5 * inv_dx;
    if (k == n - 1) return (3.0 * at(n - 1) - 4.0 * at(n - 2) + at(n - 3)) * 0.5 * inv_dx;
    return (at(k + 1) - at(k - 1)) * 0.5 * inv_dx;
}

Field2D d_dx(const Field2D& f) {
    Field2D out(f.nx(), f.ny(), f.dx(), 0.0, f.x0(), f.y0());
    const double inv_dx = 1.0 / f.dx();
    for (int j = 0; j < f.ny(); ++j) {
        auto at = [&](int i) { return f(i, j); };
        for (int i = 0; i < f.nx(); ++i) out(i, j) = line_derivative(at, i, f.nx(), inv_dx);
    }
    return out;
}

Field2D d_dy(const Field2D& f) {
    Field2D out(f.nx(), f.ny(), f.dx(), 0.0, f.x0(), f.y0());
    const double inv_dx = 1.0 / f.dx();
    for (int i = 0; i < f.nx(); ++i) {
        auto at = [&](int j) { return f(i, j); };
        for (int j = 0; j < f.ny(); ++j) out(i, j) = line_derivative(at, j, f.ny(), inv_dx);
    }
    return out;
}

}  // namespace

std::pair<Field2D, Field2D> gradient(const Field2D& f) { return {d_dx(f), d_dy(f)}; }

Field2D divergence(const Field2D& fx, const Field2D& fy) {
    if (!fx.same_shape(fy)) throw DomainError("divergence: shape mismatch");
    return d_dx(fx) + d_dy(fy);
}

Field2D laplacian(const Field2D& f) {
    auto [gx, gy] = gradient(f);
    return divergence(gx, gy);
}

}  // namespace shockpore
