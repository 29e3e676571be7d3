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

// Transmission of a single spatial direction with N spins.
//
// Alice sends sum_j c_j |j, m(n)> with one magnetic index m and j running
// from m to N/2. Bob's measurement is the rank-one continuous POVM built from
// |theta, phi> = sum_j sqrt(2j+1) |j, m(theta, phi)>. The mean cosine of the
// error angle is the quadratic form c^T A c with A symmetric tridiagonal, so
// the optimal signal is the top eigenvector of A.

#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"
#include "half_int.hpp"
#include "numerics.hpp"
#include "parallel.hpp"
#include "spinmath.hpp"

namespace spinframe::direction {

/// First zero of the Bessel function J0.
inline constexpr double kBesselJ0FirstZero = 2.404825557695773;

[[nodiscard]] inline bool is_admissible(int spins, HalfInt m) noexcept {
    return spins >= 1 && m.twice() >= 0 && m.twice() <= spins &&
           (spins - m.twice()) % 2 == 0;
}

inline void require_admissible(int spins, HalfInt m) {
    if (!is_admissible(spins, m))
        throw InvalidIndex("direction: m=" + m.str() + " is not admissible for N=" +
                           std::to_string(spins) +
                           " (need 0 <= m <= N/2 with N/2 - m integral)");
}

/// Number of j values, m..N/2.
[[nodiscard]] inline int block_count(int spins, HalfInt m) {
    return (spins - m.twice()) / 2 + 1;
}

/// Alice's coefficients c_j, ascending j = m, m+1, ..., N/2.
struct DirectionSignal {
    int spins = 1;
    HalfInt m;
    std::vector<double> coeffs;

    [[nodiscard]] HalfInt j_at(std::size_t i) const {
        return HalfInt::from_twice(m.twice() + 2 * static_cast<int>(i));
    }

    void validate() const {
        require_admissible(spins, m);
        if (static_cast<int>(coeffs.size()) != block_count(spins, m))
            throw InvalidIndex("DirectionSignal: wrong number of coefficients");
        double s = 0.0;
        for (double c : coeffs)
            s += c * c;
        if (std::abs(s - 1.0) > 1e-12)
            throw InvalidIndex("DirectionSignal: coefficients not normalised");
    }

    /// Signal with all weight on j = N/2 (parallel spins when m = N/2).
    [[nodiscard]] static DirectionSignal top_block(int spins, HalfInt m) {
        require_admissible(spins, m);
        DirectionSignal s{spins, m, std::vector<double>(block_count(spins, m), 0.0)};
        s.coeffs.back() = 1.0;
        return s;
    }
};

struct DirectionSolution {
    DirectionSignal signal;
    double x_mean = 0.0; // <cos chi>
    double fidelity = 0.0;
};

/// Tridiagonal A with <cos chi> = c^T A c. Index i is j = m + i.
/// The diagonal m^2 / (j(j+1)) is taken as 0 at j = m = 0.
[[nodiscard]] inline SymTridiag build_A(int spins, HalfInt m) {
    require_admissible(spins, m);
    const int count = block_count(spins, m);
    const double mv = m.value();
    SymTridiag a;
    a.diag.resize(count);
    a.offdiag.resize(count - 1);
    for (int i = 0; i < count; ++i) {
        const double j = mv + i;
        a.diag[i] = j == 0.0 ? 0.0 : mv * mv / (j * (j + 1.0));
        if (i > 0)
            a.offdiag[i - 1] = (j * j - mv * mv) / (j * std::sqrt(4.0 * j * j - 1.0));
    }
    return a;
}

/// c^T A c for an arbitrary signal.
[[nodiscard]] inline double x_mean_of(const DirectionSignal &s) {
    const auto a = build_A(s.spins, s.m);
    const auto ac = a.apply(s.coeffs);
    double x = 0.0;
    for (std::size_t i = 0; i < ac.size(); ++i)
        x += s.coeffs[i] * ac[i];
    return x;
}

[[nodiscard]] inline DirectionSolution solve_optimal(int spins, HalfInt m, double tol = 1e-12) {
    auto top = symtridiag_top_eig(build_A(spins, m), tol);
    DirectionSolution sol;
    sol.signal = {spins, m, std::move(top.vector)};
    sol.x_mean = top.value;
    sol.fidelity = 0.5 * (1.0 + top.value);
    return sol;
}

/// m = 0 for even N, 1/2 for odd N.
[[nodiscard]] inline HalfInt lowest_m(int spins) {
    return HalfInt::from_twice(spins % 2);
}

/// Fidelity (N+1)/(N+2) of N parallel spins.
[[nodiscard]] inline double mp_baseline(int spins) {
    if (spins < 1)
        throw InvalidIndex("mp_baseline: need at least one spin");
    return (spins + 1.0) / (spins + 2.0);
}

/// Large-N limit (j0 / (N+3))^2 of 1 - F.
[[nodiscard]] inline double bessel_limit(int spins) {
    const double r = kBesselJ0FirstZero / (spins + 3.0);
    return r * r;
}

struct AsymptoteGap {
    double one_minus_F = 0.0;
    double limit = 0.0;
    double ratio = 0.0;
};

[[nodiscard]] inline AsymptoteGap asymptote_gap(int spins, double tol = 1e-12) {
    if (spins < 2 || spins % 2 != 0)
        throw InvalidIndex("asymptote_gap: N must be even");
    const auto sol = solve_optimal(spins, HalfInt{0}, tol);
    AsymptoteGap g;
    g.one_minus_F = 1.0 - sol.fidelity;
    g.limit = bessel_limit(spins);
    g.ratio = g.one_minus_F / g.limit;
    return g;
}

/// Probability density of the cosine x of the error angle, normalised on
/// [-1, 1]:
///   p(x) = 1/2 |sum_j c_j sqrt(2j+1) ((1+x)/2)^m P_{j-m}^{(0,2m)}(x)|^2.
[[nodiscard]] inline double outcome_density(const DirectionSignal &s, double x) {
    const double mv = s.m.value();
    const double half_power = std::pow(0.5 * (1.0 + x), mv);
    double amp = 0.0;
    for (std::size_t i = 0; i < s.coeffs.size(); ++i) {
        const double j = mv + static_cast<double>(i);
        amp += s.coeffs[i] * std::sqrt(2.0 * j + 1.0) *
               jacobi_poly(static_cast<int>(i), 0, s.m.twice(), x);
    }
    amp *= half_power;
    return 0.5 * amp * amp;
}

/// Integrates the rank-one POVM elements over a Gauss-Legendre (cos theta)
/// x uniform (phi) grid on the direct sum of j = m..N/2 and returns the
/// largest entry of |integral - identity|, off-diagonal j blocks included.
[[nodiscard]] inline double povm_completeness_check(int spins, HalfInt m, int quad_order,
                                                    int phi_points) {
    require_admissible(spins, m);
    if (quad_order < 1 || phi_points < 1)
        throw InvalidIndex("povm_completeness_check: grid sizes must be positive");
    const int blocks = block_count(spins, m);
    int dim = 0;
    for (int i = 0; i < blocks; ++i)
        dim += m.twice() + 2 * i + 1;

    const auto rule = gauss_legendre(quad_order);
    ComplexMatrix sum(dim, dim);
    std::vector<cplx> v(dim);
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const double theta = std::acos(rule.nodes[q]);
        const double w = 0.5 * rule.weights[q] / phi_points;
        for (int k = 0; k < phi_points; ++k) {
            const double phi = 2.0 * std::numbers::pi * k / phi_points;
            int off = 0;
            for (int i = 0; i < blocks; ++i) {
                const auto j = HalfInt::from_twice(m.twice() + 2 * i);
                const auto cs = coherent_state(j, m, theta, phi);
                const double scale = std::sqrt(static_cast<double>(irrep_dim(j)));
                for (std::size_t a = 0; a < cs.amplitudes.size(); ++a)
                    v[off + a] = scale * cs.amplitudes[a];
                off += irrep_dim(j);
            }
            for (int r = 0; r < dim; ++r) {
                const cplx vr = w * v[r];
                for (int c = 0; c < dim; ++c)
                    sum(r, c) += vr * std::conj(v[c]);
            }
        }
    }
    return max_abs_diff(sum, ComplexMatrix::identity(dim));
}

/// One row of a parameter sweep.
struct SweepRow {
    int spins = 0;
    HalfInt m;
    double fidelity = 0.0;
    double one_minus_F = 0.0;
    double mp_baseline = 0.0;
    double bessel_limit = 0.0;
    double ratio = 0.0;
};

[[nodiscard]] inline SweepRow solve_row(int spins, HalfInt m, double tol = 1e-12) {
    const auto sol = solve_optimal(spins, m, tol);
    SweepRow r;
    r.spins = spins;
    r.m = m;
    r.fidelity = sol.fidelity;
    r.one_minus_F = 1.0 - sol.fidelity;
    r.mp_baseline = direction::mp_baseline(spins);
    r.bessel_limit = direction::bessel_limit(spins);
    r.ratio = r.one_minus_F / r.bessel_limit;
    return r;
}

/// Solves every N in [n_min, n_max] stepping by `step`. Odd N are skipped
/// unless include_odd, in which case they use m = 1/2; even N use m = 0.
/// Rows come back ordered by N whatever the worker count.
[[nodiscard]] inline std::vector<SweepRow> sweep(int n_min, int n_max, int step, bool include_odd,
                                                 unsigned workers, double tol = 1e-12) {
    if (n_min < 1 || n_max < n_min || step < 1)
        throw InvalidIndex("sweep: need 1 <= N-min <= N-max and step >= 1");
    std::vector<int> ns;
    for (int n = n_min; n <= n_max; n += step)
        if (include_odd || n % 2 == 0)
            ns.push_back(n);
    std::vector<SweepRow> rows(ns.size());
    parallel_for(ns.size(), workers,
                 [&](std::size_t i) { rows[i] = solve_row(ns[i], lowest_m(ns[i]), tol); });
    return rows;
}

} // namespace spinframe::direction
