#include "lse/dense_linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "lse/error.hpp"
#include "lse/givens.hpp"

namespace lse {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

/// Implicit-shift QR sweeps on an upper bidiagonal matrix (Golub-Reinsch).
/// `w` holds the diagonal and `e[i]` couples entries i-1 and i (e[0] unused).
/// Rotations are accumulated into the columns of `u` (m x n) and `v` (n x n)
/// when they are given.
void bidiagonal_qr(std::vector<double>& w, std::vector<double>& e, DenseMatrix* u, DenseMatrix* v)
{
    const std::size_t n = w.size();
    if (n == 0) {
        return;
    }
    e[0] = 0.0;
    double anorm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        anorm = std::max(anorm, std::abs(w[i]) + std::abs(e[i]));
    }
    const double small = kEps * anorm;
    constexpr int kMaxSweeps = 75;

    auto rotate_cols = [](DenseMatrix* m, std::size_t a, std::size_t b, double c, double s) {
        if (m == nullptr) {
            return;
        }
        for (std::size_t r = 0; r < m->rows(); ++r) {
            const double ya = (*m)(r, a);
            const double yb = (*m)(r, b);
            (*m)(r, a) = ya * c + yb * s;
            (*m)(r, b) = yb * c - ya * s;
        }
    };

    for (std::size_t kk = n; kk-- > 0;) {
        for (int its = 0;; ++its) {
            // Find the top l of the unreduced block ending at kk.
            std::size_t l = kk;
            bool cancel = true;
            for (;; --l) {
                if (l == 0 || std::abs(e[l]) <= small) {
                    cancel = false;
                    break;
                }
                if (std::abs(w[l - 1]) <= small) {
                    break;
                }
            }
            if (cancel) {
                // w[l-1] is negligible: chase e[l] out with rotations from the left.
                const std::size_t nm = l - 1;
                double c = 0.0;
                double s = 1.0;
                for (std::size_t i = l; i <= kk; ++i) {
                    const double f = s * e[i];
                    e[i] *= c;
                    if (std::abs(f) <= small) {
                        break;
                    }
                    const double g = w[i];
                    const double h = std::hypot(f, g);
                    w[i] = h;
                    c = g / h;
                    s = -f / h;
                    rotate_cols(u, nm, i, c, s);
                }
            }
            double z = w[kk];
            if (l == kk) {
                if (z < 0.0) {
                    w[kk] = -z;
                    if (v != nullptr) {
                        for (std::size_t r = 0; r < v->rows(); ++r) {
                            (*v)(r, kk) = -(*v)(r, kk);
                        }
                    }
                }
                break;
            }
            if (its == kMaxSweeps) {
                throw NumericalError("SVD: implicit QR failed to converge after " +
                                     std::to_string(kMaxSweeps) + " sweeps");
            }
            // Wilkinson-type shift from the trailing 2x2 block.
            double x = w[l];
            const std::size_t nm = kk - 1;
            double y = w[nm];
            double g = e[nm];
            double h = e[kk];
            double f = ((y - z) * (y + z) + (g - h) * (g + h)) / (2.0 * h * y);
            g = std::hypot(f, 1.0);
            f = ((x - z) * (x + z) + h * ((y / (f + std::copysign(g, f))) - h)) / x;
            double c = 1.0;
            double s = 1.0;
            for (std::size_t j = l; j <= nm; ++j) {
                const std::size_t i = j + 1;
                g = e[i];
                y = w[i];
                h = s * g;
                g = c * g;
                z = std::hypot(f, h);
                e[j] = z;
                c = f / z;
                s = h / z;
                f = x * c + g * s;
                g = g * c - x * s;
                h = y * s;
                y *= c;
                rotate_cols(v, j, i, c, s);
                z = std::hypot(f, h);
                w[j] = z;
                if (z != 0.0) {
                    c = f / z;
                    s = h / z;
                }
                f = c * g + s * y;
                x = c * y - s * g;
                rotate_cols(u, j, i, c, s);
            }
            e[l] = 0.0;
            e[kk] = f;
            w[kk] = x;
        }
    }
}

/// Householder bidiagonalization of a (m >= n) in place. On return the
/// diagonal is in w, the superdiagonal in e (e[i] couples i-1 and i), and
/// the reflectors are accumulated into a (becomes U) and v when requested.
void householder_bidiagonalize(DenseMatrix& a, std::vector<double>& w, std::vector<double>& e,
                               DenseMatrix* v)
{
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    w.assign(n, 0.0);
    e.assign(n, 0.0);
    double g = 0.0;
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t l = i + 1;
        e[i] = scale * g;
        g = 0.0;
        scale = 0.0;
        double s = 0.0;
        if (i < m) {
            for (std::size_t k = i; k < m; ++k) {
                scale += std::abs(a(k, i));
            }
            if (scale != 0.0) {
                for (std::size_t k = i; k < m; ++k) {
                    a(k, i) /= scale;
                    s += a(k, i) * a(k, i);
                }
                double f = a(i, i);
                g = -std::copysign(std::sqrt(s), f);
                const double h = f * g - s;
                a(i, i) = f - g;
                for (std::size_t j = l; j < n; ++j) {
                    s = 0.0;
                    for (std::size_t k = i; k < m; ++k) {
                        s += a(k, i) * a(k, j);
                    }
                    f = s / h;
                    for (std::size_t k = i; k < m; ++k) {
                        a(k, j) += f * a(k, i);
                    }
                }
                for (std::size_t k = i; k < m; ++k) {
                    a(k, i) *= scale;
                }
            }
        }
        w[i] = scale * g;
        g = 0.0;
        scale = 0.0;
        s = 0.0;
        if (i < m && i + 1 != n) {
            for (std::size_t k = l; k < n; ++k) {
                scale += std::abs(a(i, k));
            }
            if (scale != 0.0) {
                for (std::size_t k = l; k < n; ++k) {
                    a(i, k) /= scale;
                    s += a(i, k) * a(i, k);
                }
                const double f = a(i, l);
                g = -std::copysign(std::sqrt(s), f);
                const double h = f * g - s;
                a(i, l) = f - g;
                for (std::size_t k = l; k < n; ++k) {
                    e[k] = a(i, k) / h;
                }
                for (std::size_t j = l; j < m; ++j) {
                    s = 0.0;
                    for (std::size_t k = l; k < n; ++k) {
                        s += a(j, k) * a(i, k);
                    }
                    for (std::size_t k = l; k < n; ++k) {
                        a(j, k) += s * e[k];
                    }
                }
                for (std::size_t k = l; k < n; ++k) {
                    a(i, k) *= scale;
                }
            }
        }
    }
    if (v == nullptr) {
        return;
    }
    // Right-hand transformations.
    *v = DenseMatrix(n, n);
    DenseMatrix& vv = *v;
    std::size_t l = n;
    for (std::size_t i = n; i-- > 0;) {
        if (i + 1 < n) {
            if (g != 0.0) {
                for (std::size_t j = l; j < n; ++j) {
                    vv(j, i) = (a(i, j) / a(i, l)) / g;
                }
                for (std::size_t j = l; j < n; ++j) {
                    double s = 0.0;
                    for (std::size_t k = l; k < n; ++k) {
                        s += a(i, k) * vv(k, j);
                    }
                    for (std::size_t k = l; k < n; ++k) {
                        vv(k, j) += s * vv(k, i);
                    }
                }
            }
            for (std::size_t j = l; j < n; ++j) {
                vv(i, j) = 0.0;
                vv(j, i) = 0.0;
            }
        }
        vv(i, i) = 1.0;
        g = e[i];
        l = i;
    }
    // Left-hand transformations.
    for (std::size_t i = std::min(m, n); i-- > 0;) {
        const std::size_t li = i + 1;
        double gi = w[i];
        for (std::size_t j = li; j < n; ++j) {
            a(i, j) = 0.0;
        }
        if (gi != 0.0) {
            gi = 1.0 / gi;
            for (std::size_t j = li; j < n; ++j) {
                double s = 0.0;
                for (std::size_t k = li; k < m; ++k) {
                    s += a(k, i) * a(k, j);
                }
                const double f = (s / a(i, i)) * gi;
                for (std::size_t k = i; k < m; ++k) {
                    a(k, j) += f * a(k, i);
                }
            }
            for (std::size_t j = i; j < m; ++j) {
                a(j, i) *= gi;
            }
        } else {
            for (std::size_t j = i; j < m; ++j) {
                a(j, i) = 0.0;
            }
        }
        a(i, i) += 1.0;
    }
}

/// SVD for m >= n.
SvdFactorization svd_tall(const DenseMatrix& m)
{
    DenseMatrix a = m;
    std::vector<double> w;
    std::vector<double> e;
    DenseMatrix v;
    householder_bidiagonalize(a, w, e, &v);
    bidiagonal_qr(w, e, &a, &v);

    const std::size_t n = w.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return w[x] > w[y]; });

    SvdFactorization out{DenseMatrix(m.rows(), n), Vector(n), DenseMatrix(m.cols(), n)};
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t src = order[j];
        out.sigma[j] = w[src];
        std::copy(a.col(src).begin(), a.col(src).end(), out.u.col(j).begin());
        std::copy(v.col(src).begin(), v.col(src).end(), out.v.col(j).begin());
    }
    return out;
}

std::size_t rank_from_sigma(std::span<const double> sigma, double rel_tol)
{
    if (sigma.empty() || sigma[0] == 0.0) {
        return 0;
    }
    const double cut = rel_tol * sigma[0];
    std::size_t r = 0;
    while (r < sigma.size() && sigma[r] > cut) {
        ++r;
    }
    return r;
}

}  // namespace

std::size_t QrFactorization::rank(double rel_tol) const
{
    const std::size_t k = std::min(r.rows(), r.cols());
    if (k == 0 || r(0, 0) == 0.0) {
        return 0;
    }
    const double cut = rel_tol * std::abs(r(0, 0));
    std::size_t out = 0;
    while (out < k && std::abs(r(out, out)) > cut) {
        ++out;
    }
    return out;
}

DenseMatrix QrFactorization::permutation_matrix() const
{
    DenseMatrix p(perm.size(), perm.size());
    for (std::size_t j = 0; j < perm.size(); ++j) {
        p(perm[j], j) = 1.0;
    }
    return p;
}

QrFactorization dense_qr(const DenseMatrix& m, bool pivoting)
{
    if (m.empty()) {
        throw DimensionError("dense_qr: empty matrix");
    }
    const std::size_t rows = m.rows();
    const std::size_t cols = m.cols();
    const std::size_t k = std::min(rows, cols);
    DenseMatrix a = m;
    std::vector<std::size_t> perm(cols);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<Vector> reflectors;
    reflectors.reserve(k);

    for (std::size_t j = 0; j < k; ++j) {
        if (pivoting) {
            std::size_t best = j;
            double best_norm = -1.0;
            for (std::size_t c = j; c < cols; ++c) {
                double s = 0.0;
                for (std::size_t i = j; i < rows; ++i) {
                    s += a(i, c) * a(i, c);
                }
                if (s > best_norm) {
                    best_norm = s;
                    best = c;
                }
            }
            if (best != j) {
                for (std::size_t i = 0; i < rows; ++i) {
                    std::swap(a(i, j), a(i, best));
                }
                std::swap(perm[j], perm[best]);
            }
        }
        Vector v(a.col(j).begin() + static_cast<std::ptrdiff_t>(j), a.col(j).end());
        const double xnorm = norm2(v);
        if (xnorm == 0.0) {
            reflectors.emplace_back();
            continue;
        }
        const double alpha = -std::copysign(xnorm, v[0]);
        v[0] -= alpha;
        const double vnorm2 = dot(v, v);
        for (std::size_t c = j; c < cols; ++c) {
            double s = 0.0;
            for (std::size_t i = j; i < rows; ++i) {
                s += v[i - j] * a(i, c);
            }
            const double f = 2.0 * s / vnorm2;
            for (std::size_t i = j; i < rows; ++i) {
                a(i, c) -= f * v[i - j];
            }
        }
        a(j, j) = alpha;
        for (std::size_t i = j + 1; i < rows; ++i) {
            a(i, j) = 0.0;
        }
        reflectors.push_back(std::move(v));
    }

    QrFactorization out{DenseMatrix(rows, k), DenseMatrix(k, cols), std::move(perm)};
    for (std::size_t j = 0; j < cols; ++j) {
        for (std::size_t i = 0; i <= std::min(j, k - 1); ++i) {
            out.r(i, j) = a(i, j);
        }
    }
    for (std::size_t i = 0; i < k; ++i) {
        out.q(i, i) = 1.0;
    }
    for (std::size_t j = reflectors.size(); j-- > 0;) {
        const Vector& v = reflectors[j];
        if (v.empty()) {
            continue;
        }
        const double vnorm2 = dot(v, v);
        for (std::size_t c = 0; c < k; ++c) {
            double s = 0.0;
            for (std::size_t i = j; i < rows; ++i) {
                s += v[i - j] * out.q(i, c);
            }
            const double f = 2.0 * s / vnorm2;
            for (std::size_t i = j; i < rows; ++i) {
                out.q(i, c) -= f * v[i - j];
            }
        }
    }
    for (std::size_t i = 0; i < k; ++i) {
        if (out.r(i, i) < 0.0) {
            for (std::size_t c = 0; c < cols; ++c) {
                out.r(i, c) = -out.r(i, c);
            }
            for (std::size_t r = 0; r < rows; ++r) {
                out.q(r, i) = -out.q(r, i);
            }
        }
    }
    return out;
}

SvdFactorization dense_svd(const DenseMatrix& m)
{
    if (m.rows() >= m.cols()) {
        return svd_tall(m);
    }
    SvdFactorization t = svd_tall(m.transpose());
    return {std::move(t.v), std::move(t.sigma), std::move(t.u)};
}

Vector singular_values(const DenseMatrix& m)
{
    DenseMatrix a = m.rows() >= m.cols() ? m : m.transpose();
    std::vector<double> w;
    std::vector<double> e;
    householder_bidiagonalize(a, w, e, nullptr);
    bidiagonal_qr(w, e, nullptr, nullptr);
    std::sort(w.begin(), w.end(), std::greater<>());
    return w;
}

Vector bidiagonal_singular_values(std::span<const double> diag, std::span<const double> super)
{
    const std::size_t k = diag.size();
    if (k == 0) {
        return {};
    }
    if (super.size() != k && super.size() + 1 != k) {
        throw DimensionError("bidiagonal_singular_values: superdiagonal length must be k or k - 1");
    }
    std::vector<double> w(diag.begin(), diag.end());
    std::vector<double> sup(super.begin(), super.end());
    if (sup.size() == k) {
        // Fold the extra column into the square part: a rotation of columns
        // i and k zeroes the bulge at (i, k) and pushes it to (i - 1, k).
        double bulge = sup[k - 1];
        sup.pop_back();
        for (std::size_t i = k; i-- > 0 && bulge != 0.0;) {
            double r = 0.0;
            const GivensRotation rot = GivensRotation::make(w[i], bulge, r);
            w[i] = r;
            if (i > 0) {
                const double above = sup[i - 1];
                sup[i - 1] = rot.c * above;
                bulge = -rot.s * above;
            }
        }
    }
    std::vector<double> e(k, 0.0);
    for (std::size_t i = 1; i < k; ++i) {
        e[i] = sup[i - 1];
    }
    bidiagonal_qr(w, e, nullptr, nullptr);
    std::sort(w.begin(), w.end(), std::greater<>());
    return w;
}

double default_rank_tol(const DenseMatrix& m)
{
    return static_cast<double>(std::max(m.rows(), m.cols())) * kEps;
}

std::size_t numerical_rank(const DenseMatrix& m, std::optional<double> rank_tol)
{
    if (m.empty()) {
        return 0;
    }
    return rank_from_sigma(singular_values(m), rank_tol.value_or(default_rank_tol(m)));
}

DenseMatrix dense_pinv(const DenseMatrix& m, std::optional<double> rank_tol)
{
    if (rank_tol && *rank_tol < 0.0) {
        throw InputError("dense_pinv: rank_tol must be nonnegative");
    }
    DenseMatrix out(m.cols(), m.rows());
    if (m.empty()) {
        return out;
    }
    const SvdFactorization f = dense_svd(m);
    const std::size_t r = rank_from_sigma(f.sigma, rank_tol.value_or(default_rank_tol(m)));
    for (std::size_t l = 0; l < r; ++l) {
        const double inv = 1.0 / f.sigma[l];
        for (std::size_t j = 0; j < m.rows(); ++j) {
            const double ujl = f.u(j, l) * inv;
            if (ujl == 0.0) {
                continue;
            }
            for (std::size_t i = 0; i < m.cols(); ++i) {
                out(i, j) += f.v(i, l) * ujl;
            }
        }
    }
    return out;
}

DenseMatrix null_basis(const DenseMatrix& m, std::optional<double> rank_tol)
{
    const std::size_t n = m.cols();
    if (n == 0) {
        return DenseMatrix(0, 0);
    }
    if (m.rows() == 0) {
        return DenseMatrix::identity(n);
    }
    const double tol = rank_tol.value_or(default_rank_tol(m));
    DenseMatrix padded = m;
    if (m.rows() < n) {
        padded = vstack(m, DenseMatrix(n - m.rows(), n));
    }
    const SvdFactorization f = dense_svd(padded);
    const std::size_t r = rank_from_sigma(f.sigma, tol);
    return f.v.columns(r, n - r);
}

DenseMatrix range_basis(const DenseMatrix& m, std::optional<double> rank_tol)
{
    if (m.empty()) {
        return DenseMatrix(m.rows(), 0);
    }
    const SvdFactorization f = dense_svd(m);
    const std::size_t r = rank_from_sigma(f.sigma, rank_tol.value_or(default_rank_tol(m)));
    return f.u.columns(0, r);
}

Vector project_onto(const DenseMatrix& q, std::span<const double> y)
{
    return matvec(q, matvec_transpose(q, y));
}

Vector project_out(const DenseMatrix& q, std::span<const double> y)
{
    Vector out(y.begin(), y.end());
    axpy(-1.0, project_onto(q, y), out);
    return out;
}

LuFactorization::LuFactorization(const DenseMatrix& m) : lu_(m), piv_(m.rows())
{
    const std::size_t n = m.rows();
    if (m.cols() != n) {
        throw DimensionError("LuFactorization: matrix must be square");
    }
    const double cut = static_cast<double>(std::max<std::size_t>(n, 1)) * kEps * m.max_abs();
    std::iota(piv_.begin(), piv_.end(), 0);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < n; ++i) {
            if (std::abs(lu_(i, k)) > std::abs(lu_(p, k))) {
                p = i;
            }
        }
        if (std::abs(lu_(p, k)) <= cut) {
            throw NumericalError("LU: matrix is singular to working precision (pivot " + std::to_string(k) +
                                 ")");
        }
        if (p != k) {
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(lu_(k, j), lu_(p, j));
            }
            std::swap(piv_[k], piv_[p]);
        }
        const double inv = 1.0 / lu_(k, k);
        for (std::size_t i = k + 1; i < n; ++i) {
            lu_(i, k) *= inv;
        }
        for (std::size_t j = k + 1; j < n; ++j) {
            const double ukj = lu_(k, j);
            if (ukj == 0.0) {
                continue;
            }
            for (std::size_t i = k + 1; i < n; ++i) {
                lu_(i, j) -= lu_(i, k) * ukj;
            }
        }
    }
}

Vector LuFactorization::solve(std::span<const double> rhs) const
{
    const std::size_t n = lu_.rows();
    if (rhs.size() != n) {
        throw DimensionError("LuFactorization::solve: rhs length mismatch");
    }
    Vector x(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = rhs[piv_[i]];
    }
    for (std::size_t j = 0; j < n; ++j) {
        const double xj = x[j];
        for (std::size_t i = j + 1; i < n; ++i) {
            x[i] -= lu_(i, j) * xj;
        }
    }
    for (std::size_t j = n; j-- > 0;) {
        x[j] /= lu_(j, j);
        const double xj = x[j];
        for (std::size_t i = 0; i < j; ++i) {
            x[i] -= lu_(i, j) * xj;
        }
    }
    return x;
}

Vector back_substitute(const DenseMatrix& r, std::span<const double> y, std::size_t k)
{
    if (k > r.rows() || k > r.cols() || y.size() < k) {
        throw DimensionError("back_substitute: block exceeds factor");
    }
    Vector x(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(k));
    for (std::size_t j = k; j-- > 0;) {
        x[j] /= r(j, j);
        for (std::size_t i = 0; i < j; ++i) {
            x[i] -= r(i, j) * x[j];
        }
    }
    return x;
}

}  // namespace lse
