#include "lse/vector.hpp"

#include <cmath>

#include "lse/error.hpp"

namespace lse {

Vector add(std::span<const double> a, std::span<const double> b)
{
    if (a.size() != b.size()) {
        throw DimensionError("add: vector lengths differ");
    }
    Vector out(a.begin(), a.end());
    axpy(1.0, b, out);
    return out;
}

Vector subtract(std::span<const double> a, std::span<const double> b)
{
    if (a.size() != b.size()) {
        throw DimensionError("subtract: vector lengths differ");
    }
    Vector out(a.begin(), a.end());
    axpy(-1.0, b, out);
    return out;
}

double relative_error(std::span<const double> a, std::span<const double> b)
{
    const Vector diff = subtract(a, b);
    const double ref = norm2(b);
    const double err = norm2(diff);
    return ref > 0.0 ? err / ref : err;
}

bool all_finite(std::span<const double> a)
{
    for (double v : a) {
        if (!std::isfinite(v)) {
            return false;
        }
    }
    return true;
}

}  // namespace lse
