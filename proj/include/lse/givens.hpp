#pragma once

#include <cmath>

namespace lse {

/// Plane rotation [c s; -s c] with c^2 + s^2 = 1.
struct GivensRotation {
    double c = 1.0;
    double s = 0.0;

    /// Rotation mapping (a, b) to (r, 0); `r` receives hypot(a, b).
    static GivensRotation make(double a, double b, double& r)
    {
        r = std::hypot(a, b);
        if (r == 0.0) {
            return {1.0, 0.0};
        }
        return {a / r, b / r};
    }

    /// (x, y) <- (c x + s y, -s x + c y)
    void apply(double& x, double& y) const
    {
        const double t = c * x + s * y;
        y = -s * x + c * y;
        x = t;
    }
};

}  // namespace lse
