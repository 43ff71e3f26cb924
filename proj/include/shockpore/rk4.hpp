#pragma once

#include <cmath>
#include <vector>

#include "shockpore/errors.hpp"
#include "shockpore/field2d.hpp"

namespace shockpore {

inline bool all_finite(double v) { return std::isfinite(v); }
inline bool all_finite(const Field2D& f) { return f.all_finite(); }
inline bool all_finite(const std::vector<double>& v) {
    for (double x : v) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

/// Classical fourth-order Runge-Kutta step for any state with `+` and
/// scalar `*`. Throws IntegrationError naming the first stage (1-4) whose
/// slope is non-finite, or stage 5 for the combined update.
template <class State, class Rhs>
State rk4_integrate(const State& s, Rhs&& rhs, double dt) {
    if (!(dt > 0.0)) throw DomainError("rk4_integrate: dt must be positive");
    auto checked = [](State k, int stage) {
        if (!all_finite(k)) throw IntegrationError("non-finite slope", stage);
        return k;
    };
    const State k1 = checked(rhs(s), 1);
    const State k2 = checked(rhs(s + k1 * (0.5 * dt)), 2);
    const State k3 = checked(rhs(s + k2 * (0.5 * dt)), 3);
    const State k4 = checked(rhs(s + k3 * dt), 4);
    State out = s + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
    if (!all_finite(out)) throw IntegrationError("non-finite state", 5);
    return out;
}

}  // namespace shockpore
