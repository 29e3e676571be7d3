// Copyright 2026 The spinframe Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "matrix.hpp"

namespace spinframe {

/// Real symmetric tridiagonal matrix.
struct SymTridiag {
    std::vector<double> diag;
    std::vector<double> offdiag; // offdiag[i] couples i and i+1

    [[nodiscard]] std::size_t size() const noexcept { return diag.size(); }

    [[nodiscard]] std::vector<double> apply(std::span<const double> v) const {
        const std::size_t n = diag.size();
        std::vector<double> out(n);
        for (std::size_t i = 0; i < n; ++i) {
            double s = diag[i] * v[i];
            if (i > 0)
                s += offdiag[i - 1] * v[i - 1];
            if (i + 1 < n)
                s += offdiag[i] * v[i + 1];
            out[i] = s;
        }
        return out;
    }

    [[nodiscard]] RealMatrix dense() const {
        const std::size_t n = diag.size();
        RealMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            m(i, i) = diag[i];
            if (i + 1 < n)
                m(i, i + 1) = m(i + 1, i) = offdiag[i];
        }
        return m;
    }
};

/// Dense complex matrix expected to equal its conjugate transpose.
using HermitianMatrix = ComplexMatrix;

[[nodiscard]] inline double hermiticity_error(const HermitianMatrix &m) {
    double worst = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = i; j < m.cols(); ++j)
            worst = std::max(worst, std::abs(m(i, j) - std::conj(m(j, i))));
    return worst;
}

template <typename T> struct EigenPair {
    double value = 0.0;
    std::vector<T> vector;
};

namespace detail {

template <typename T> [[nodiscard]] double norm2(std::span<const T> v) {
    double s = 0.0;
    for (const auto &x : v)
        s += std::norm(x);
    return std::sqrt(s);
}

/// Index of the largest-magnitude entry; near-ties go to the lowest index
/// so the choice is stable under rounding.
template <typename T> [[nodiscard]] std::size_t dominant_index(std::span<const T> v) {
    double best = 0.0;
    for (const auto &x : v)
        best = std::max(best, std::abs(x));
    for (std::size_t i = 0; i < v.size(); ++i)
        if (std::abs(v[i]) >= best * (1.0 - 1e-9))
            return i;
    return 0;
}

inline void canonicalize(std::vector<double> &v) {
    const double n = norm2<double>(v);
    const std::size_t k = dominant_index<double>(v);
    const double s = (v[k] < 0.0 ? -1.0 : 1.0) / n;
    for (auto &x : v)
        x *= s;
}

inline void canonicalize(std::vector<cplx> &v) {
    const double n = norm2<cplx>(v);
    const std::size_t k = dominant_index<cplx>(v);
    const cplx phase = std::abs(v[k]) > 0.0 ? std::conj(v[k]) / std::abs(v[k]) : cplx(1.0);
    for (auto &x : v)
        x *= phase / n;
    v[k] = cplx(v[k].real(), 0.0);
}

/// Number of eigenvalues of t strictly below x (Sturm sequence count).
[[nodiscard]] inline std::size_t sturm_count(const SymTridiag &t, double x) {
    const double tiny = std::numeric_limits<double>::min();
    std::size_t count = 0;
    double q = 1.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double e2 = i > 0 ? t.offdiag[i - 1] * t.offdiag[i - 1] : 0.0;
        q = t.diag[i] - x - (i > 0 ? e2 / q : 0.0);
        if (q == 0.0)
            q = -tiny;
        if (q < 0.0)
            ++count;
    }
    return count;
}

/// In-place LU with partial pivoting of a tridiagonal matrix and solve.
class TridiagLU {
  public:
    TridiagLU(const SymTridiag &t, double shift) : n_(t.size()) {
        d_.resize(n_);
        for (std::size_t i = 0; i < n_; ++i)
            d_[i] = t.diag[i] - shift;
        dl_ = t.offdiag;
        du_ = t.offdiag;
        du2_.assign(n_ > 2 ? n_ - 2 : 0, 0.0);
        swapped_.assign(n_ > 1 ? n_ - 1 : 0, false);
        double scale = 0.0;
        for (std::size_t i = 0; i < n_; ++i)
            scale = std::max(scale, std::abs(t.diag[i]) + (i > 0 ? std::abs(t.offdiag[i - 1]) : 0.0) +
                                        (i + 1 < n_ ? std::abs(t.offdiag[i]) : 0.0));
        floor_ = std::max(scale, 1.0) * std::numeric_limits<double>::epsilon();
        for (std::size_t i = 0; i + 1 < n_; ++i) {
            if (std::abs(d_[i]) >= std::abs(dl_[i])) {
                if (d_[i] == 0.0)
                    d_[i] = floor_;
                const double f = dl_[i] / d_[i];
                dl_[i] = f;
                d_[i + 1] -= f * du_[i];
            } else {
                const double f = d_[i] / dl_[i];
                d_[i] = dl_[i];
                dl_[i] = f;
                const double tmp = du_[i];
                du_[i] = d_[i + 1];
                d_[i + 1] = tmp - f * d_[i + 1];
                if (i + 2 < n_) {
                    du2_[i] = du_[i + 1];
                    du_[i + 1] = -f * du_[i + 1];
                }
                swapped_[i] = true;
            }
        }
        for (auto &x : d_)
            if (std::abs(x) < floor_)
                x = x < 0.0 ? -floor_ : floor_;
    }

    void solve(std::vector<double> &b) const {
        for (std::size_t i = 0; i + 1 < n_; ++i) {
            if (!swapped_[i]) {
                b[i + 1] -= dl_[i] * b[i];
            } else {
                const double tmp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = tmp - dl_[i] * b[i];
            }
        }
        for (std::size_t ii = n_; ii-- > 0;) {
            double s = b[ii];
            if (ii + 1 < n_)
                s -= du_[ii] * b[ii + 1];
            if (ii + 2 < n_)
                s -= du2_[ii] * b[ii + 2];
            b[ii] = s / d_[ii];
        }
    }

  private:
    std::size_t n_;
    double floor_ = 0.0;
    std::vector<double> d_, dl_, du_, du2_;
    std::vector<bool> swapped_;
};

} // namespace detail

/// Largest eigenvalue of a symmetric tridiagonal matrix by Sturm-sequence
/// bisection, eigenvector by inverse iteration. The eigenvector is unit
/// norm with its largest-magnitude entry positive.
[[nodiscard]] inline EigenPair<double> symtridiag_top_eig(const SymTridiag &t,
                                                          double tol = 1e-12) {
    const std::size_t n = t.size();
    if (n == 0 || t.offdiag.size() + 1 != n)
        throw InvalidIndex("symtridiag_top_eig: inconsistent tridiagonal shape");
    if (n == 1)
        return {t.diag[0], {1.0}};

    double lo = std::numeric_limits<double>::max();
    double hi = std::numeric_limits<double>::lowest();
    for (std::size_t i = 0; i < n; ++i) {
        const double r = (i > 0 ? std::abs(t.offdiag[i - 1]) : 0.0) +
                         (i + 1 < n ? std::abs(t.offdiag[i]) : 0.0);
        lo = std::min(lo, t.diag[i] - r);
        hi = std::max(hi, t.diag[i] + r);
    }
    const double span = std::max(hi - lo, 1.0);
    lo -= 1e-3 * span;
    hi += 1e-3 * span;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi)
            break;
        if (detail::sturm_count(t, mid) == n)
            hi = mid;
        else
            lo = mid;
    }
    const double lambda = 0.5 * (lo + hi);

    detail::TridiagLU lu(t, lambda);
    std::vector<double> v(n, 1.0 / std::sqrt(static_cast<double>(n)));
    for (int it = 0; it < 8; ++it) {
        lu.solve(v);
        detail::canonicalize(v);
        const auto tv = t.apply(v);
        double rq = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            rq += v[i] * tv[i];
        double res = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            res += (tv[i] - rq * v[i]) * (tv[i] - rq * v[i]);
        if (std::sqrt(res) <= tol)
            return {rq, std::move(v)};
    }
    throw NonConvergence("symtridiag_top_eig: inverse iteration did not reach tolerance " +
                         std::to_string(tol));
}

namespace detail {

/// Solve (m - shift I) x = b by Gaussian elimination with partial pivoting.
[[nodiscard]] inline std::vector<cplx> shifted_solve(const HermitianMatrix &m, double shift,
                                                     std::vector<cplx> b) {
    const std::size_t n = m.rows();
    ComplexMatrix a = m;
    double scale = 0.0;
    for (auto x : m.data())
        scale = std::max(scale, std::abs(x));
    const double floor = std::max(scale, 1.0) * std::numeric_limits<double>::epsilon();
    for (std::size_t i = 0; i < n; ++i)
        a(i, i) -= shift;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(a(i, k)) > std::abs(a(p, k)))
                p = i;
        if (p != k) {
            for (std::size_t j = 0; j < n; ++j)
                std::swap(a(k, j), a(p, j));
            std::swap(b[k], b[p]);
        }
        if (std::abs(a(k, k)) < floor)
            a(k, k) = floor;
        for (std::size_t i = k + 1; i < n; ++i) {
            const cplx f = a(i, k) / a(k, k);
            if (f == cplx(0.0))
                continue;
            for (std::size_t j = k; j < n; ++j)
                a(i, j) -= f * a(k, j);
            b[i] -= f * b[k];
        }
    }
    for (std::size_t ii = n; ii-- > 0;) {
        cplx s = b[ii];
        for (std::size_t j = ii + 1; j < n; ++j)
            s -= a(ii, j) * b[j];
        b[ii] = s / a(ii, ii);
    }
    return b;
}

/// Rayleigh quotient and residual norm of a unit vector.
[[nodiscard]] inline std::pair<double, double> rayleigh(const HermitianMatrix &m,
                                                        std::span<const cplx> v) {
    const auto mv = m.apply(v);
    cplx rq = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
        rq += std::conj(v[i]) * mv[i];
    double res = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
        res += std::norm(mv[i] - rq.real() * v[i]);
    return {rq.real(), std::sqrt(res)};
}

} // namespace detail

/// Largest eigenvalue and eigenvector of a Hermitian matrix.
///
/// Householder reduction to a Hermitian tridiagonal, a diagonal phase change
/// to make it real, then symtridiag_top_eig and back-transformation. A few
/// steps of dense inverse iteration polish the vector if the residual is
/// still above tol. The eigenvector's largest-magnitude entry is real and
/// positive.
[[nodiscard]] inline EigenPair<cplx> hermitian_top_eig(const HermitianMatrix &m,
                                                       double tol = 1e-12) {
    const std::size_t n = m.rows();
    if (n == 0 || m.cols() != n)
        throw InvalidIndex("hermitian_top_eig: matrix must be square and non-empty");
    if (n == 1)
        return {m(0, 0).real(), {cplx(1.0)}};

    ComplexMatrix a = m;
    // Symmetrise so rounding asymmetry in the input does not leak through.
    for (std::size_t i = 0; i < n; ++i) {
        a(i, i) = a(i, i).real();
        for (std::size_t j = i + 1; j < n; ++j) {
            const cplx avg = 0.5 * (a(i, j) + std::conj(a(j, i)));
            a(i, j) = avg;
            a(j, i) = std::conj(avg);
        }
    }
    ComplexMatrix q = ComplexMatrix::identity(n);
    std::vector<cplx> v(n), p(n), w(n);
    for (std::size_t k = 0; k + 2 < n; ++k) {
        double xnorm = 0.0;
        for (std::size_t i = k + 1; i < n; ++i)
            xnorm += std::norm(a(i, k));
        xnorm = std::sqrt(xnorm);
        if (xnorm == 0.0)
            continue;
        const cplx x0 = a(k + 1, k);
        const cplx phase = std::abs(x0) > 0.0 ? x0 / std::abs(x0) : cplx(1.0);
        const cplx alpha = -phase * xnorm;
        std::fill(v.begin(), v.end(), cplx(0.0));
        for (std::size_t i = k + 1; i < n; ++i)
            v[i] = a(i, k);
        v[k + 1] -= alpha;
        const double vnorm = detail::norm2<cplx>(v);
        if (vnorm == 0.0)
            continue;
        for (auto &x : v)
            x /= vnorm;
        // A <- H A H with H = I - 2 v v^H, as a rank-2 update.
        for (std::size_t i = k; i < n; ++i) {
            cplx s = 0.0;
            for (std::size_t j = k + 1; j < n; ++j)
                s += a(i, j) * v[j];
            p[i] = s;
        }
        cplx kappa = 0.0;
        for (std::size_t i = k + 1; i < n; ++i)
            kappa += std::conj(v[i]) * p[i];
        for (std::size_t i = k; i < n; ++i)
            w[i] = 2.0 * (p[i] - kappa.real() * v[i]);
        for (std::size_t i = k; i < n; ++i)
            for (std::size_t j = k; j < n; ++j)
                a(i, j) -= v[i] * std::conj(w[j]) + w[i] * std::conj(v[j]);
        // Q <- Q H
        for (std::size_t i = 0; i < n; ++i) {
            cplx s = 0.0;
            for (std::size_t j = k + 1; j < n; ++j)
                s += q(i, j) * v[j];
            for (std::size_t j = k + 1; j < n; ++j)
                q(i, j) -= 2.0 * s * std::conj(v[j]);
        }
    }

    SymTridiag t;
    t.diag.resize(n);
    t.offdiag.resize(n - 1);
    std::vector<cplx> ph(n, cplx(1.0));
    for (std::size_t i = 0; i < n; ++i)
        t.diag[i] = a(i, i).real();
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const cplx e = a(i + 1, i);
        const double mag = std::abs(e);
        t.offdiag[i] = mag;
        ph[i + 1] = mag > 0.0 ? ph[i] * e / mag : ph[i];
    }
    const auto top = symtridiag_top_eig(t, std::max(tol * 1e-2, 1e-15));

    std::vector<cplx> vec(n, cplx(0.0));
    for (std::size_t i = 0; i < n; ++i) {
        cplx s = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            s += q(i, j) * ph[j] * top.vector[j];
        vec[i] = s;
    }
    detail::canonicalize(vec);
    auto [value, res] = detail::rayleigh(m, vec);
    for (int it = 0; it < 4 && res > tol; ++it) {
        vec = detail::shifted_solve(m, value, std::move(vec));
        detail::canonicalize(vec);
        std::tie(value, res) = detail::rayleigh(m, vec);
    }
    if (res > tol)
        throw NonConvergence("hermitian_top_eig: residual " + std::to_string(res) +
                             " above tolerance");
    return {value, std::move(vec)};
}

/// Gauss-Legendre nodes (ascending) and weights on [-1, 1].
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;

    template <typename F> [[nodiscard]] double integrate(F &&f) const {
        double s = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i)
            s += weights[i] * f(nodes[i]);
        return s;
    }
};

[[nodiscard]] inline QuadratureRule gauss_legendre(int order) {
    if (order < 1)
        throw InvalidIndex("gauss_legendre: order must be positive");
    QuadratureRule rule;
    rule.nodes.assign(order, 0.0);
    rule.weights.assign(order, 0.0);
    if (order == 1) {
        rule.weights[0] = 2.0;
        return rule;
    }
    // Legendre P_order(x) and its derivative.
    auto legendre = [order](double x) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= order; ++k) {
            const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = pk;
        }
        return std::pair{p1, order * (x * p1 - p0) / (x * x - 1.0)};
    };
    for (int i = 0; i < (order + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
        for (int it = 0; it < 100; ++it) {
            const auto [p, dp] = legendre(x);
            const double dx = p / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16)
                break;
        }
        const double dp = legendre(x).second;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.weights[i] = w;
        rule.nodes[order - 1 - i] = x;
        rule.weights[order - 1 - i] = w;
    }
    if (order % 2 == 1)
        rule.nodes[order / 2] = 0.0;
    return rule;
}

struct MaximizeResult {
    std::vector<double> argmax;
    double value = 0.0;
    int iterations = 0;
};

struct MaximizeOptions {
    int max_iters = 2000;
    double initial_step = 0.1;
};

namespace detail {

/// Brent minimisation of g on the bracket (a, b, c) with b the lowest.
template <typename G>
[[nodiscard]] std::pair<double, double> brent_min(G &&g, double ax, double bx, double cx) {
    constexpr double cgold = 0.3819660112501051;
    constexpr double zeps = 1e-18;
    const double tol = 1e-10;
    double a = std::min(ax, cx), b = std::max(ax, cx);
    double x = bx, w = bx, v = bx;
    double fx = g(x), fw = fx, fv = fx;
    double d = 0.0, e = 0.0;
    for (int it = 0; it < 200; ++it) {
        const double xm = 0.5 * (a + b);
        const double tol1 = tol * std::abs(x) + zeps;
        const double tol2 = 2.0 * tol1;
        if (std::abs(x - xm) <= tol2 - 0.5 * (b - a))
            break;
        if (std::abs(e) > tol1) {
            const double r = (x - w) * (fx - fv);
            double qq = (x - v) * (fx - fw);
            double pp = (x - v) * qq - (x - w) * r;
            qq = 2.0 * (qq - r);
            if (qq > 0.0)
                pp = -pp;
            qq = std::abs(qq);
            const double etemp = e;
            e = d;
            if (std::abs(pp) >= std::abs(0.5 * qq * etemp) || pp <= qq * (a - x) ||
                pp >= qq * (b - x)) {
                e = x >= xm ? a - x : b - x;
                d = cgold * e;
            } else {
                d = pp / qq;
                const double u = x + d;
                if (u - a < tol2 || b - u < tol2)
                    d = xm - x >= 0 ? tol1 : -tol1;
            }
        } else {
            e = x >= xm ? a - x : b - x;
            d = cgold * e;
        }
        const double u = std::abs(d) >= tol1 ? x + d : x + (d >= 0 ? tol1 : -tol1);
        const double fu = g(u);
        if (fu <= fx) {
            if (u >= x)
                a = x;
            else
                b = x;
            v = w, w = x, x = u;
            fv = fw, fw = fx, fx = fu;
        } else {
            if (u < x)
                a = u;
            else
                b = u;
            if (fu <= fw || w == x) {
                v = w, w = u;
                fv = fw, fw = fu;
            } else if (fu <= fv || v == x || v == w) {
                v = u;
                fv = fu;
            }
        }
    }
    return {x, fx};
}

/// Line minimisation of g(t) starting at t = 0 with trial step `step`.
template <typename G> [[nodiscard]] std::pair<double, double> line_min(G &&g, double step) {
    constexpr double golden = 1.618033988749895;
    double a = 0.0, b = step;
    double fa = g(a), fb = g(b);
    if (fb > fa) {
        std::swap(a, b);
        std::swap(fa, fb);
    }
    double c = b + golden * (b - a);
    double fc = g(c);
    for (int it = 0; it < 100 && fb > fc; ++it) {
        a = b, fa = fb;
        b = c, fb = fc;
        c = b + golden * (b - a);
        fc = g(c);
    }
    if (fb > fc)
        return {c, fc};
    return brent_min(g, a, b, c);
}

} // namespace detail

/// Derivative-free local maximiser: Powell's direction-set method, i.e.
/// cycles of line searches starting from the coordinate directions, with
/// Brent line searches. Stops when one full cycle raises the objective by
/// less than tol.
[[nodiscard]] inline MaximizeResult
derivative_free_maximize(const std::function<double(std::span<const double>)> &objective,
                         std::vector<double> start, double tol,
                         const MaximizeOptions &options = {}) {
    const std::size_t n = start.size();
    if (n == 0)
        throw InvalidIndex("derivative_free_maximize: empty start point");
    auto neg = [&](std::span<const double> x) { return -objective(x); };

    std::vector<std::vector<double>> dirs(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        dirs[i][i] = options.initial_step;

    std::vector<double> x = std::move(start);
    std::vector<double> trial(n);
    double fx = neg(x);
    auto along = [&](const std::vector<double> &d) {
        return [&, dptr = &d](double t) {
            for (std::size_t i = 0; i < n; ++i)
                trial[i] = x[i] + t * (*dptr)[i];
            return neg(trial);
        };
    };

    for (int iter = 1; iter <= options.max_iters; ++iter) {
        const std::vector<double> x_start = x;
        const double f_start = fx;
        std::size_t biggest = 0;
        double biggest_drop = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double f_before = fx;
            auto [t, ft] = detail::line_min(along(dirs[k]), 1.0);
            if (ft < fx) {
                for (std::size_t i = 0; i < n; ++i)
                    x[i] += t * dirs[k][i];
                fx = ft;
            }
            if (f_before - fx > biggest_drop) {
                biggest_drop = f_before - fx;
                biggest = k;
            }
        }
        if (f_start - fx < tol)
            return {std::move(x), -fx, iter};

        std::vector<double> new_dir(n), extrap(n);
        for (std::size_t i = 0; i < n; ++i) {
            new_dir[i] = x[i] - x_start[i];
            extrap[i] = 2.0 * x[i] - x_start[i];
        }
        const double f_extrap = neg(extrap);
        if (f_extrap < f_start) {
            const double t1 = f_start - fx - biggest_drop;
            const double t2 = f_start - f_extrap;
            if (2.0 * (f_start - 2.0 * fx + f_extrap) * t1 * t1 < biggest_drop * t2 * t2) {
                auto [t, ft] = detail::line_min(along(new_dir), 1.0);
                if (ft < fx) {
                    for (std::size_t i = 0; i < n; ++i)
                        x[i] += t * new_dir[i];
                    fx = ft;
                }
                dirs[biggest] = dirs.back();
                dirs.back() = new_dir;
            }
        }
    }
    throw NonConvergence("derivative_free_maximize: iteration cap reached");
}

} // namespace spinframe
