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

// Angular-momentum special functions.
//
// Basis ordering: every (2j+1)-dimensional vector or matrix in this library
// is indexed by i = 0..2j with m = j - i, i.e. m runs j, j-1, ..., -j.
//
// Rotation convention: Euler angles are z-y-z, active. The classical matrix
// is R(a,b,g) = Rz(a) Ry(b) Rz(g). The unitary representation uses
//     <j,m| D(a,b,g) |j,r> = exp(i(m a + r g)) d^j_{mr}(b)
// with d^j_{mr}(b) = <j,m| exp(-i b J_y) |j,r> in the Condon-Shortley phase
// convention. This D is the complex conjugate of the textbook
// exp(-i a J_z) exp(-i b J_y) exp(-i g J_z); it is still a representation
// of the same rotation group, and it is the form the merit tensors in
// frame.hpp are written against.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>

#include "errors.hpp"
#include "half_int.hpp"
#include "matrix.hpp"

namespace spinframe {

/// Jacobi polynomial P_n^{(a,b)}(x) by the three-term recurrence in n.
[[nodiscard]] inline double jacobi_poly(int n, int a, int b, double x) {
    if (n < 0 || a < 0 || b < 0)
        throw InvalidIndex("jacobi_poly: negative degree or parameter");
    if (n == 0)
        return 1.0;
    const double apb = a + b;
    double p_prev = 1.0;
    double p = 0.5 * ((apb + 2.0) * x + (a - b));
    for (int q = 2; q <= n; ++q) {
        const double two_q_apb = 2.0 * q + apb;
        const double denom = 2.0 * q * (q + apb) * (two_q_apb - 2.0);
        const double c1 = (two_q_apb - 1.0) * two_q_apb * (two_q_apb - 2.0);
        const double c0 = (two_q_apb - 1.0) * (double(a) * a - double(b) * b);
        const double cm = 2.0 * (q + a - 1.0) * (q + b - 1.0) * two_q_apb;
        const double next = ((c1 * x + c0) * p - cm * p_prev) / denom;
        p_prev = p;
        p = next;
    }
    return p;
}

namespace detail {

/// C(n, k) as a double via a running product (exact for small n).
[[nodiscard]] inline double binomial(int n, int k) {
    if (k < 0 || k > n)
        return 0.0;
    k = std::min(k, n - k);
    double r = 1.0;
    for (int i = 1; i <= k; ++i)
        r = r * (n - k + i) / i;
    return r;
}

[[nodiscard]] inline int basis_index(HalfInt j, HalfInt m) {
    return (j.twice() - m.twice()) / 2;
}

} // namespace detail

/// Dimension 2j+1 of the spin-j irreducible representation.
[[nodiscard]] constexpr int irrep_dim(HalfInt j) noexcept { return j.twice() + 1; }

/// Single element d^j_{mr}(beta) via the Jacobi-polynomial closed form.
[[nodiscard]] inline double wigner_small_d_element(HalfInt j, HalfInt m,
                                                   HalfInt r, double beta) {
    require_valid_pair(j, m);
    require_valid_pair(j, r);
    // All of these are integers because j-m and j-r are.
    const int jpm = (j.twice() + m.twice()) / 2;
    const int jmm = (j.twice() - m.twice()) / 2;
    const int jpr = (j.twice() + r.twice()) / 2;
    const int jmr = (j.twice() - r.twice()) / 2;
    const int m_minus_r = (m.twice() - r.twice()) / 2;
    const int k = std::min({jpm, jmm, jpr, jmr});
    int a = 0;
    int sign_exp = 0;
    if (k == jpr) {
        a = m_minus_r;
        sign_exp = m_minus_r;
    } else if (k == jmr) {
        a = -m_minus_r;
    } else if (k == jpm) {
        a = -m_minus_r;
    } else {
        a = m_minus_r;
        sign_exp = m_minus_r;
    }
    const int two_j = j.twice();
    const int b = two_j - 2 * k - a;
    const double norm = std::sqrt(detail::binomial(two_j - k, k + a) /
                                  detail::binomial(k + b, b));
    const double half = 0.5 * beta;
    const double value = norm * std::pow(std::sin(half), a) *
                         std::pow(std::cos(half), b) *
                         jacobi_poly(k, a, b, std::cos(beta));
    return (sign_exp % 2 == 0) ? value : -value;
}

/// Full (2j+1)x(2j+1) small-d matrix, rows m and columns r both ordered
/// j, j-1, ..., -j. Real orthogonal.
[[nodiscard]] inline RealMatrix wigner_small_d(HalfInt j, double beta) {
    if (j.twice() < 0)
        throw InvalidIndex("wigner_small_d: negative j");
    const int dim = irrep_dim(j);
    RealMatrix d(dim, dim);
    for (int i = 0; i < dim; ++i) {
        const auto m = HalfInt::from_twice(j.twice() - 2 * i);
        for (int k = 0; k < dim; ++k) {
            const auto r = HalfInt::from_twice(j.twice() - 2 * k);
            d(i, k) = wigner_small_d_element(j, m, r, beta);
        }
    }
    return d;
}

/// z-y-z Euler angles of an active rotation.
struct EulerAngles {
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;

    /// Wraps alpha and gamma into [0, 2pi); beta is left alone.
    [[nodiscard]] EulerAngles wrapped() const {
        constexpr double two_pi = 2.0 * std::numbers::pi;
        auto wrap = [](double x) {
            double y = std::fmod(x, two_pi);
            if (y < 0.0)
                y += two_pi;
            return y >= two_pi ? 0.0 : y;
        };
        return {wrap(alpha), beta, wrap(gamma)};
    }
};

/// D^j_{mr}(alpha, beta, gamma) = exp(i(m alpha + r gamma)) d^j_{mr}(beta).
[[nodiscard]] inline cplx wigner_D_element(HalfInt j, HalfInt m, HalfInt r,
                                           const EulerAngles &g) {
    const double phase = m.value() * g.alpha + r.value() * g.gamma;
    return std::polar(wigner_small_d_element(j, m, r, g.beta), phase);
}

[[nodiscard]] inline ComplexMatrix wigner_D(HalfInt j, const EulerAngles &g) {
    const RealMatrix d = wigner_small_d(j, g.beta);
    const int dim = irrep_dim(j);
    ComplexMatrix out(dim, dim);
    for (int i = 0; i < dim; ++i) {
        const double m = j.value() - i;
        for (int k = 0; k < dim; ++k) {
            const double r = j.value() - k;
            out(i, k) = std::polar(d(i, k), m * g.alpha + r * g.gamma);
        }
    }
    return out;
}

/// Standard-basis matrices of J_x, J_y, J_z for spin j (Condon-Shortley).
struct AngularMomentumMatrices {
    ComplexMatrix jx, jy, jz;
};

[[nodiscard]] inline AngularMomentumMatrices angular_momentum_matrices(HalfInt j) {
    const int dim = irrep_dim(j);
    AngularMomentumMatrices out{ComplexMatrix(dim, dim), ComplexMatrix(dim, dim),
                                ComplexMatrix(dim, dim)};
    const double jv = j.value();
    for (int i = 0; i < dim; ++i) {
        const double m = jv - i;
        out.jz(i, i) = m;
        if (i > 0) {
            // J+ |m> = sqrt(j(j+1) - m(m+1)) |m+1>, and m+1 sits at i-1.
            const double up = std::sqrt(jv * (jv + 1.0) - m * (m + 1.0));
            out.jx(i - 1, i) += 0.5 * up;
            out.jx(i, i - 1) += 0.5 * up;
            out.jy(i - 1, i) += cplx(0.0, -0.5 * up);
            out.jy(i, i - 1) += cplx(0.0, 0.5 * up);
        }
    }
    return out;
}

/// |j, m(theta, phi)>: the eigenstate of n.J with eigenvalue m, n the unit
/// vector at polar angle theta and azimuth phi.
struct CoherentState {
    HalfInt j;
    HalfInt m;
    double theta = 0.0;
    double phi = 0.0;
    std::vector<cplx> amplitudes;
};

/// Amplitudes are <j,m'| exp(-i phi J_z) exp(-i theta J_y) |j,m>
/// = conj(D^j_{m'm}(phi, theta, 0)); the third Euler angle is fixed to 0.
[[nodiscard]] inline CoherentState coherent_state(HalfInt j, HalfInt m, double theta,
                                                  double phi) {
    require_valid_pair(j, m);
    const int dim = irrep_dim(j);
    CoherentState s{j, m, theta, phi, std::vector<cplx>(dim)};
    for (int i = 0; i < dim; ++i) {
        const auto mp = HalfInt::from_twice(j.twice() - 2 * i);
        s.amplitudes[i] = std::conj(wigner_D_element(j, mp, m, {phi, theta, 0.0}));
    }
    return s;
}

/// Proper orthogonal 3x3 matrix of direction cosines.
struct Rotation3 {
    std::array<std::array<double, 3>, 3> m{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};

    double operator()(int i, int k) const { return m[i][k]; }
    double &operator()(int i, int k) { return m[i][k]; }

    [[nodiscard]] double trace() const { return m[0][0] + m[1][1] + m[2][2]; }

    [[nodiscard]] double determinant() const {
        return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
               m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
               m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    }

    [[nodiscard]] Rotation3 transposed() const {
        Rotation3 t;
        for (int i = 0; i < 3; ++i)
            for (int k = 0; k < 3; ++k)
                t.m[i][k] = m[k][i];
        return t;
    }

    /// max |(R R^T - I)_ik|
    [[nodiscard]] double orthogonality_error() const {
        Rotation3 p = *this * transposed();
        double worst = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int k = 0; k < 3; ++k)
                worst = std::max(worst, std::abs(p.m[i][k] - (i == k ? 1.0 : 0.0)));
        return worst;
    }

    friend Rotation3 operator*(const Rotation3 &a, const Rotation3 &b) {
        Rotation3 c;
        for (int i = 0; i < 3; ++i)
            for (int k = 0; k < 3; ++k) {
                double s = 0.0;
                for (int l = 0; l < 3; ++l)
                    s += a.m[i][l] * b.m[l][k];
                c.m[i][k] = s;
            }
        return c;
    }

    [[nodiscard]] std::array<double, 3> apply(const std::array<double, 3> &v) const {
        std::array<double, 3> out{};
        for (int i = 0; i < 3; ++i)
            out[i] = m[i][0] * v[0] + m[i][1] * v[1] + m[i][2] * v[2];
        return out;
    }
};

/// Rz(alpha) Ry(beta) Rz(gamma).
[[nodiscard]] inline Rotation3 classical_rotation(const EulerAngles &g) {
    const double ca = std::cos(g.alpha), sa = std::sin(g.alpha);
    const double cb = std::cos(g.beta), sb = std::sin(g.beta);
    const double cg = std::cos(g.gamma), sg = std::sin(g.gamma);
    Rotation3 r;
    r.m = {{{ca * cb * cg - sa * sg, -ca * cb * sg - sa * cg, ca * sb},
            {sa * cb * cg + ca * sg, -sa * cb * sg + ca * cg, sa * sb},
            {-sb * cg, sb * sg, cb}}};
    return r;
}

/// Angle of the single rotation equivalent to R, in [0, pi].
[[nodiscard]] inline double rotation_angle(const Rotation3 &r) {
    const double c = std::clamp(0.5 * (r.trace() - 1.0), -1.0, 1.0);
    return std::acos(c);
}

/// Inverse of classical_rotation. At beta = 0 or pi only alpha -+ gamma is
/// determined; gamma is then set to 0.
[[nodiscard]] inline EulerAngles euler_angles_of(const Rotation3 &r) {
    const double sb = std::hypot(r(0, 2), r(1, 2));
    EulerAngles g;
    g.beta = std::atan2(sb, r(2, 2));
    if (sb > 1e-12) {
        g.alpha = std::atan2(r(1, 2), r(0, 2));
        g.gamma = std::atan2(r(2, 1), -r(2, 0));
    } else if (r(2, 2) > 0.0) {
        g.alpha = std::atan2(r(1, 0), r(0, 0));
        g.gamma = 0.0;
    } else {
        g.alpha = std::atan2(-r(1, 0), -r(0, 0));
        g.gamma = 0.0;
    }
    return g.wrapped();
}

/// Number of states when each j from 0 (or 1/2) to N/2 is taken once:
/// sum of (2j+1).
[[nodiscard]] inline long long hilbert_dim(long long spins) {
    if (spins < 1)
        throw InvalidIndex("hilbert_dim: need at least one spin");
    if (spins % 2 == 0)
        return (spins + 2) * (spins + 2) / 4;
    return (spins + 1) * (spins + 3) / 4;
}

} // namespace spinframe
