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

// Transmission of a full Cartesian frame with one system carrying the
// angular momenta j = 0..n-1 (n^2 states in all).
//
// Alice sends |A> = sum a_jm |j,m>. Bob measures the covariant POVM generated
// by rotating |B> = sum_j sqrt(2j+1) sum_m b_jm |j,m>, with each j-block of b
// unit norm. The expected axis cosines are contractions
//     <f> = sum f_{jkmnrs} conj(a_jm) b_jr a_kn conj(b_ks)
// of sparse merit tensors. For fixed b this is <A|M(b)|A>, so Alice's best
// signal is the top eigenvector of M(b); Bob's best fiducial vector is taken
// to be Alice's signal renormalised block by block, and the two steps are
// alternated to a fixed point.
//
// Vector layout: index j^2 + (j - m), i.e. j ascending, m descending inside
// each block.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "direction.hpp"
#include "errors.hpp"
#include "numerics.hpp"
#include "parallel.hpp"
#include "rng.hpp"
#include "spinmath.hpp"

namespace spinframe::frame {

[[nodiscard]] constexpr int frame_dim(int n) noexcept { return n * n; }
[[nodiscard]] constexpr int frame_index(int j, int m) noexcept { return j * j + (j - m); }

namespace detail {

inline void require_level(int n) {
    if (n < 1)
        throw InvalidIndex("frame: level n must be >= 1");
}

inline void require_size(int n, std::size_t size, const char *what) {
    require_level(n);
    if (size != static_cast<std::size_t>(frame_dim(n)))
        throw InvalidIndex(std::string(what) + ": expected n^2 amplitudes");
}

[[nodiscard]] inline double block_norm(std::span<const cplx> v, int j) {
    double s = 0.0;
    for (int i = j * j; i < (j + 1) * (j + 1); ++i)
        s += std::norm(v[i]);
    return std::sqrt(s);
}

} // namespace detail

/// Alice's amplitudes a_jm, unit norm overall.
struct FrameSignal {
    int n = 1;
    std::vector<cplx> amplitudes;

    [[nodiscard]] cplx at(int j, int m) const { return amplitudes[frame_index(j, m)]; }

    void validate() const {
        detail::require_size(n, amplitudes.size(), "FrameSignal");
        double s = 0.0;
        for (auto a : amplitudes)
            s += std::norm(a);
        if (std::abs(s - 1.0) > 1e-12)
            throw InvalidIndex("FrameSignal: amplitudes not normalised");
    }
};

/// Bob's b_jm, unit norm within every j-block. The sqrt(2j+1) weight is not
/// stored; it is applied where the vector is used.
struct FiducialVector {
    int n = 1;
    std::vector<cplx> amplitudes;

    [[nodiscard]] cplx at(int j, int m) const { return amplitudes[frame_index(j, m)]; }

    void validate() const {
        detail::require_size(n, amplitudes.size(), "FiducialVector");
        for (int j = 0; j < n; ++j)
            if (std::abs(detail::block_norm(amplitudes, j) - 1.0) > 1e-12)
                throw InvalidIndex("FiducialVector: block j=" + std::to_string(j) +
                                   " not normalised");
    }

    /// b_jm = 1/sqrt(2j+1) in every block.
    [[nodiscard]] static FiducialVector uniform(int n) {
        detail::require_level(n);
        FiducialVector b{n, std::vector<cplx>(frame_dim(n))};
        for (int j = 0; j < n; ++j)
            for (int m = j; m >= -j; --m)
                b.amplitudes[frame_index(j, m)] = 1.0 / std::sqrt(2.0 * j + 1.0);
        return b;
    }

    /// Independent complex Gaussian blocks, normalised.
    [[nodiscard]] static FiducialVector random(int n, CounterRng &rng) {
        detail::require_level(n);
        FiducialVector b{n, std::vector<cplx>(frame_dim(n))};
        for (auto &x : b.amplitudes) {
            auto [re, im] = rng.normal_pair();
            x = {re, im};
        }
        for (int j = 0; j < n; ++j) {
            const double s = detail::block_norm(b.amplitudes, j);
            for (int i = j * j; i < (j + 1) * (j + 1); ++i)
                b.amplitudes[i] /= s;
        }
        return b;
    }
};

enum class MeritKind { ZAxis, XYAxes, AllAxes, Weighted };

/// Which axis cosines are rewarded. The merit is
/// w_x <cos w_x> + w_y <cos w_y> + w_z <cos w_z>.
struct MeritSpec {
    MeritKind kind = MeritKind::AllAxes;
    std::array<double, 3> weights{1.0, 1.0, 1.0};

    [[nodiscard]] static MeritSpec z_axis() { return {MeritKind::ZAxis, {0.0, 0.0, 1.0}}; }
    [[nodiscard]] static MeritSpec xy_axes() { return {MeritKind::XYAxes, {1.0, 1.0, 0.0}}; }
    [[nodiscard]] static MeritSpec all_axes() { return {MeritKind::AllAxes, {1.0, 1.0, 1.0}}; }
    [[nodiscard]] static MeritSpec weighted(double wx, double wy, double wz) {
        return {MeritKind::Weighted, {wx, wy, wz}};
    }
    [[nodiscard]] static MeritSpec of(MeritKind kind) {
        switch (kind) {
        case MeritKind::ZAxis:
            return z_axis();
        case MeritKind::XYAxes:
            return xy_axes();
        case MeritKind::AllAxes:
            return all_axes();
        case MeritKind::Weighted:
            break;
        }
        throw UnsupportedWeights("MeritSpec::of: weighted merit needs explicit weights");
    }

    [[nodiscard]] double merit_from_axes(const std::array<double, 3> &cosines) const {
        return weights[0] * cosines[0] + weights[1] * cosines[1] + weights[2] * cosines[2];
    }
};

[[nodiscard]] inline std::string kind_name(MeritKind k) {
    switch (k) {
    case MeritKind::ZAxis:
        return "z";
    case MeritKind::XYAxes:
        return "xy";
    case MeritKind::AllAxes:
        return "xyz";
    case MeritKind::Weighted:
        return "weighted";
    }
    return "?";
}

/// Coefficient of the cos(beta) tensor, diagonal in m and r.
/// g_jj = n s / (j(j+1)) (0 at j = 0); g_{j,j-1} = g_{j-1,j} =
/// sqrt((j^2-n^2)(j^2-s^2)/(4j^2-1)) / j with j the larger index.
[[nodiscard]] inline double g_element(int j, int k, int n, int s) {
    const int lo = std::min(j, k);
    if (j < 0 || k < 0 || std::abs(j - k) > 1 || std::abs(n) > lo || std::abs(s) > lo)
        throw InvalidIndex("g_element: indices out of range");
    if (j == k)
        return j == 0 ? 0.0 : double(n) * s / (double(j) * (j + 1));
    const double J = std::max(j, k);
    return std::sqrt((J * J - n * n) * (J * J - s * s) / (4.0 * J * J - 1.0)) / J;
}

/// Coefficient of the exp(i(alpha+gamma))(1+cos beta)/2 part of the
/// two-axis tensor, coupling (j, m = n-1, r = s-1) with (k, n, s). Not
/// symmetric in (j, k).
[[nodiscard]] inline double h_element(int j, int k, int n, int s) {
    if (j < 0 || k < 0 || std::abs(j - k) > 1 || std::abs(n - 1) > j || std::abs(n) > k ||
        std::abs(s - 1) > j || std::abs(s) > k)
        throw InvalidIndex("h_element: indices out of range");
    auto radical = [](double v) { return std::sqrt(std::max(v, 0.0)); };
    if (j == k) {
        const double jj = j;
        return radical((jj - n + 1) * (jj + n) * (jj - s + 1) * (jj + s)) / (2.0 * jj * (jj + 1));
    }
    if (j == k + 1) {
        const double J = j;
        return radical((J - n + 1) * (J - n) * (J - s + 1) * (J - s)) /
               (2.0 * J * std::sqrt(4.0 * J * J - 1.0));
    }
    const double J = k;
    return radical((J + n - 1) * (J + n) * (J + s - 1) * (J + s)) /
           (2.0 * J * std::sqrt(4.0 * J * J - 1.0));
}

/// Sparse f_{jkmnrs}.
struct MeritTensor {
    struct Entry {
        int j, k, m, n, r, s;
        double f;
    };

    MeritSpec spec;
    int level = 1;
    std::vector<Entry> entries; // sorted by (j, k, m, n, r, s)

    [[nodiscard]] double coefficient(int j, int k, int m, int n, int r, int s) const {
        const auto key = std::tie(j, k, m, n, r, s);
        auto it = std::lower_bound(entries.begin(), entries.end(), key,
                                   [](const Entry &e, const auto &kk) {
                                       return std::tie(e.j, e.k, e.m, e.n, e.r, e.s) < kk;
                                   });
        if (it != entries.end() && std::tie(it->j, it->k, it->m, it->n, it->r, it->s) == key)
            return it->f;
        return 0.0;
    }
};

/// Assembles the tensor for a merit spec. The two-axis part needs equal x
/// and y weights; otherwise UnsupportedWeights.
[[nodiscard]] inline MeritTensor build_merit_tensor(const MeritSpec &spec, int n) {
    detail::require_level(n);
    const auto [wx, wy, wz] = spec.weights;
    if (std::abs(wx - wy) > 1e-12 * std::max({1.0, std::abs(wx), std::abs(wy)}))
        throw UnsupportedWeights("merit tensor needs equal x and y weights (got " +
                                 std::to_string(wx) + ", " + std::to_string(wy) + ")");
    const double wxy = 0.5 * (wx + wy);

    std::map<std::tuple<int, int, int, int, int, int>, double> acc;
    for (int j = 0; j < n; ++j) {
        for (int k = std::max(0, j - 1); k <= std::min(n - 1, j + 1); ++k) {
            const int lo = std::min(j, k);
            if (wz != 0.0) {
                for (int m = -lo; m <= lo; ++m)
                    for (int r = -lo; r <= lo; ++r) {
                        const double g = g_element(j, k, m, r);
                        if (g != 0.0)
                            acc[{j, k, m, m, r, r}] += wz * g;
                    }
            }
            if (wxy != 0.0) {
                // m = n-1, r = s-1: h_jk(n, s)
                for (int nn = -k; nn <= k; ++nn) {
                    if (std::abs(nn - 1) > j)
                        continue;
                    for (int s = -k; s <= k; ++s) {
                        if (std::abs(s - 1) > j)
                            continue;
                        const double h = h_element(j, k, nn, s);
                        if (h != 0.0)
                            acc[{j, k, nn - 1, nn, s - 1, s}] += wxy * h;
                    }
                }
                // n = m-1, s = r-1: h_kj(m, r)
                for (int m = -j; m <= j; ++m) {
                    if (std::abs(m - 1) > k)
                        continue;
                    for (int r = -j; r <= j; ++r) {
                        if (std::abs(r - 1) > k)
                            continue;
                        const double h = h_element(k, j, m, r);
                        if (h != 0.0)
                            acc[{j, k, m, m - 1, r, r - 1}] += wxy * h;
                    }
                }
            }
        }
    }
    MeritTensor t;
    t.spec = spec;
    t.level = n;
    t.entries.reserve(acc.size());
    for (const auto &[key, f] : acc) {
        const auto [j, k, m, nn, r, s] = key;
        t.entries.push_back({j, k, m, nn, r, s, f});
    }
    return t;
}

/// M_{jm,kn} = sum_{r,s} f_{jkmnrs} b_jr conj(b_ks).
[[nodiscard]] inline HermitianMatrix build_M(const MeritTensor &t, const FiducialVector &bob) {
    detail::require_size(t.level, bob.amplitudes.size(), "build_M");
    const int d = frame_dim(t.level);
    HermitianMatrix m(d, d);
    for (const auto &e : t.entries)
        m(frame_index(e.j, e.m), frame_index(e.k, e.n)) +=
            e.f * bob.at(e.j, e.r) * std::conj(bob.at(e.k, e.s));
    return m;
}

/// Full four-amplitude contraction of the tensor (real part).
[[nodiscard]] inline double merit_expectation(const MeritTensor &t, const FrameSignal &alice,
                                              const FiducialVector &bob) {
    detail::require_size(t.level, alice.amplitudes.size(), "merit_expectation");
    detail::require_size(t.level, bob.amplitudes.size(), "merit_expectation");
    cplx sum = 0.0;
    for (const auto &e : t.entries)
        sum += e.f * std::conj(alice.at(e.j, e.m)) * bob.at(e.j, e.r) * alice.at(e.k, e.n) *
               std::conj(bob.at(e.k, e.s));
    return sum.real();
}

/// Haar averages of |<A|U(g)|B>|^2 times 1 and times each diagonal entry of
/// the classical rotation matrix.
struct HaarExpectations {
    double normalization = 0.0;
    std::array<double, 3> axis_cos{}; // <R_xx>, <R_yy>, <R_zz>
};

/// <A|U(alpha, beta, gamma)|B> with U the direct sum of the D^j.
[[nodiscard]] inline cplx overlap(const FrameSignal &alice, const FiducialVector &bob,
                                  const EulerAngles &g) {
    cplx amp = 0.0;
    for (int j = 0; j < alice.n; ++j) {
        const auto d = wigner_D(HalfInt{j}, g);
        cplx block = 0.0;
        for (int i = 0; i <= 2 * j; ++i)
            for (int k = 0; k <= 2 * j; ++k)
                block += std::conj(alice.amplitudes[j * j + i]) * d(i, k) *
                         bob.amplitudes[j * j + k];
        amp += std::sqrt(2.0 * j + 1.0) * block;
    }
    return amp;
}

/// Tensor-free reference: Gauss-Legendre in cos(beta) with `beta_order`
/// nodes, uniform grids of `angle_points` in alpha and gamma.
[[nodiscard]] inline HaarExpectations haar_expectations(const FrameSignal &alice,
                                                        const FiducialVector &bob,
                                                        int beta_order, int angle_points) {
    detail::require_size(alice.n, alice.amplitudes.size(), "haar_expectations");
    detail::require_size(alice.n, bob.amplitudes.size(), "haar_expectations");
    if (bob.n != alice.n)
        throw InvalidIndex("haar_expectations: mismatched levels");
    if (beta_order < 1 || angle_points < 1)
        throw InvalidIndex("haar_expectations: grid sizes must be positive");
    const int n = alice.n;
    const int dim = frame_dim(n);
    const auto rule = gauss_legendre(beta_order);
    const double two_pi = 2.0 * std::numbers::pi;

    // phases[p][m + n - 1] = exp(i m angle_p)
    std::vector<std::vector<cplx>> phases(angle_points, std::vector<cplx>(2 * n - 1));
    for (int p = 0; p < angle_points; ++p)
        for (int m = -(n - 1); m <= n - 1; ++m)
            phases[p][m + n - 1] = std::polar(1.0, m * two_pi * p / angle_points);

    HaarExpectations out;
    std::vector<cplx> u(dim);
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const double beta = std::acos(rule.nodes[q]);
        std::vector<RealMatrix> d;
        d.reserve(n);
        for (int j = 0; j < n; ++j)
            d.push_back(wigner_small_d(HalfInt{j}, beta));
        const double wq = 0.5 * rule.weights[q] / (double(angle_points) * angle_points);
        for (int pg = 0; pg < angle_points; ++pg) {
            const double gamma = two_pi * pg / angle_points;
            // u_jm = sqrt(2j+1) sum_r d^j_mr(beta) exp(i r gamma) b_jr
            for (int j = 0; j < n; ++j) {
                const double w = std::sqrt(2.0 * j + 1.0);
                for (int i = 0; i <= 2 * j; ++i) {
                    cplx s = 0.0;
                    for (int k = 0; k <= 2 * j; ++k)
                        s += d[j](i, k) * phases[pg][(j - k) + n - 1] * bob.amplitudes[j * j + k];
                    u[j * j + i] = w * s;
                }
            }
            for (int pa = 0; pa < angle_points; ++pa) {
                cplx amp = 0.0;
                for (int j = 0; j < n; ++j)
                    for (int i = 0; i <= 2 * j; ++i)
                        amp += std::conj(alice.amplitudes[j * j + i]) *
                               phases[pa][(j - i) + n - 1] * u[j * j + i];
                const double prob = std::norm(amp) * wq;
                const auto rot = classical_rotation({two_pi * pa / angle_points, beta, gamma});
                out.normalization += prob;
                out.axis_cos[0] += prob * rot(0, 0);
                out.axis_cos[1] += prob * rot(1, 1);
                out.axis_cos[2] += prob * rot(2, 2);
            }
        }
    }
    return out;
}

/// Quadrature value of the merit sum_k w_k <R_kk> (any weights).
[[nodiscard]] inline double quadrature_merit_oracle(const FrameSignal &alice,
                                                    const FiducialVector &bob,
                                                    const MeritSpec &spec, int beta_order,
                                                    int angle_points) {
    return spec.merit_from_axes(
        haar_expectations(alice, bob, beta_order, angle_points).axis_cos);
}

/// Grid sizes for which haar_expectations is exact at level n: the
/// integrand is a polynomial of degree <= 2n-1 in cos(beta) and a
/// trigonometric polynomial of degree <= 2n-1 in alpha and gamma.
[[nodiscard]] inline std::array<double, 3> exact_axis_cosines(const FrameSignal &alice,
                                                              const FiducialVector &bob) {
    return haar_expectations(alice, bob, alice.n + 2, 2 * alice.n + 2).axis_cos;
}

/// b_jm = a_jm / |a_j|. Throws DegenerateBlock if some |a_j| < 1e-14.
[[nodiscard]] inline FiducialVector bob_from_alice(const FrameSignal &alice) {
    detail::require_size(alice.n, alice.amplitudes.size(), "bob_from_alice");
    FiducialVector b{alice.n, alice.amplitudes};
    for (int j = 0; j < alice.n; ++j) {
        const double s = detail::block_norm(alice.amplitudes, j);
        if (s < 1e-14)
            throw DegenerateBlock(j, "bob_from_alice: block j=" + std::to_string(j) +
                                         " of the signal is empty");
        for (int i = j * j; i < (j + 1) * (j + 1); ++i)
            b.amplitudes[i] /= s;
    }
    return b;
}

/// Same as bob_from_alice, but empty blocks become uniform.
[[nodiscard]] inline FiducialVector bob_from_alice_or_uniform(const FrameSignal &alice) {
    FiducialVector b{alice.n, alice.amplitudes};
    for (int j = 0; j < alice.n; ++j) {
        const double s = detail::block_norm(alice.amplitudes, j);
        for (int i = j * j; i < (j + 1) * (j + 1); ++i)
            b.amplitudes[i] = s < 1e-14 ? cplx(1.0 / std::sqrt(2.0 * j + 1.0)) : b.amplitudes[i] / s;
    }
    return b;
}

[[nodiscard]] inline double distance(const FiducialVector &a, const FiducialVector &b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.amplitudes.size(); ++i)
        s += std::norm(a.amplitudes[i] - b.amplitudes[i]);
    return std::sqrt(s);
}

struct FrameSolution {
    FrameSignal alice;
    FiducialVector bob;
    MeritSpec spec;
    double merit = 0.0;
    std::array<double, 3> per_axis{}; // <cos w_x>, <cos w_y>, <cos w_z>
    double mse_total = 0.0;           // sum_k (1 - <cos w_k>)/2 = 1 - <cos Omega>
    int iterations = 0;
    bool converged = false;
    int restarts_used = 0;     // starting points tried
    int best_start = 0;        // index of the winning start (0 = uniform)
    bool nonmonotone = false;  // merit decreased at some step of the winner
    double fixed_point_gap = 0.0;
    double eigen_residual = 0.0;
    std::vector<double> merit_history;
};

struct AlternatingOptions {
    int restarts = 5;
    std::uint64_t seed = 0;
    double tol = 1e-10;
    int max_iters = 500;
    std::optional<FiducialVector> init; // replaces the uniform first start
    unsigned workers = 1;
};

namespace detail {

[[nodiscard]] inline FrameSolution run_alternating(const MeritTensor &tensor, FiducialVector b,
                                                   double tol, int max_iters) {
    FrameSolution best;
    best.merit = -std::numeric_limits<double>::infinity();
    std::vector<double> history;
    const int n = tensor.level;
    for (int it = 1; it <= max_iters; ++it) {
        const auto m = build_M(tensor, b);
        auto top = hermitian_top_eig(m, 1e-12);
        FrameSignal a{n, std::move(top.vector)};
        history.push_back(top.value);
        auto b_next = bob_from_alice_or_uniform(a);
        const double gap = distance(b_next, b);
        const bool done = gap < tol;
        if (done || top.value > best.merit) {
            const auto [value, res] = spinframe::detail::rayleigh(m, a.amplitudes);
            best.alice = std::move(a);
            best.bob = b;
            best.merit = value;
            best.iterations = it;
            best.fixed_point_gap = gap;
            best.eigen_residual = res;
            best.converged = done;
        }
        if (done)
            break;
        b = std::move(b_next);
    }
    for (std::size_t i = 1; i < history.size(); ++i)
        if (history[i] < history[i - 1] - 1e-12)
            best.nonmonotone = true;
    if (!history.empty() && best.merit < history.front() - 1e-12)
        best.nonmonotone = true;
    best.merit_history = std::move(history);
    return best;
}

} // namespace detail

/// Alternates "Alice = top eigenvector of M(b)" and "b = Alice renormalised
/// per block" from a uniform start plus `restarts` random starts, keeping the
/// best merit (ties to the lowest start index). A run that hits max_iters is
/// returned with converged = false.
[[nodiscard]] inline FrameSolution alternating_optimize(int n, const MeritSpec &spec,
                                                        const AlternatingOptions &opt = {}) {
    detail::require_level(n);
    if (opt.restarts < 0 || opt.max_iters < 1 || !(opt.tol > 0.0))
        throw InvalidIndex("alternating_optimize: bad options");
    const auto tensor = build_merit_tensor(spec, n);
    const int starts = 1 + opt.restarts;
    std::vector<FrameSolution> runs(starts);
    parallel_for(starts, opt.workers, [&](std::size_t i) {
        FiducialVector b;
        if (i == 0) {
            b = opt.init ? *opt.init : FiducialVector::uniform(n);
            b.validate();
        } else {
            CounterRng rng(opt.seed, i);
            b = FiducialVector::random(n, rng);
        }
        runs[i] = detail::run_alternating(tensor, std::move(b), opt.tol, opt.max_iters);
    });
    int winner = 0;
    for (int i = 1; i < starts; ++i)
        if (runs[i].merit > runs[winner].merit + 1e-12 ||
            (runs[i].converged && !runs[winner].converged &&
             runs[i].merit >= runs[winner].merit - 1e-12))
            winner = i;
    FrameSolution sol = std::move(runs[winner]);
    sol.spec = spec;
    sol.restarts_used = starts;
    sol.best_start = winner;
    sol.per_axis = exact_axis_cosines(sol.alice, sol.bob);
    sol.mse_total = 0.0;
    for (double c : sol.per_axis)
        sol.mse_total += 0.5 * (1.0 - c);
    return sol;
}

/// Eigen-decomposition of C = sum_mu w_mu e^mu (e^mu)^T.
struct WeightedReduction {
    std::array<double, 3> principal_weights{}; // descending
    Rotation3 principal_axes;                   // column i = axis of weight i
};

[[nodiscard]] inline WeightedReduction
weighted_merit_reduction(std::span<const std::array<double, 3>> directions,
                         std::span<const double> weights) {
    if (directions.empty() || directions.size() != weights.size())
        throw InvalidIndex("weighted_merit_reduction: need one weight per direction");
    std::array<std::array<double, 3>, 3> c{};
    for (std::size_t mu = 0; mu < directions.size(); ++mu) {
        if (!(weights[mu] > 0.0))
            throw InvalidIndex("weighted_merit_reduction: weights must be positive");
        const auto &e = directions[mu];
        const double len = std::sqrt(e[0] * e[0] + e[1] * e[1] + e[2] * e[2]);
        if (len < 1e-12)
            throw InvalidIndex("weighted_merit_reduction: zero direction vector");
        for (int i = 0; i < 3; ++i)
            for (int k = 0; k < 3; ++k)
                c[i][k] += weights[mu] * e[i] * e[k] / (len * len);
    }
    // Cyclic Jacobi on the 3x3 symmetric matrix.
    Rotation3 v;
    for (int sweep = 0; sweep < 50; ++sweep) {
        const double off = c[0][1] * c[0][1] + c[0][2] * c[0][2] + c[1][2] * c[1][2];
        if (off < 1e-30)
            break;
        for (int p = 0; p < 2; ++p)
            for (int q = p + 1; q < 3; ++q) {
                if (std::abs(c[p][q]) < 1e-300)
                    continue;
                const double theta = 0.5 * (c[q][q] - c[p][p]) / c[p][q];
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double cs = 1.0 / std::sqrt(t * t + 1.0), sn = t * cs;
                for (int k = 0; k < 3; ++k) {
                    const double ckp = c[k][p], ckq = c[k][q];
                    c[k][p] = cs * ckp - sn * ckq;
                    c[k][q] = sn * ckp + cs * ckq;
                }
                for (int k = 0; k < 3; ++k) {
                    const double cpk = c[p][k], cqk = c[q][k];
                    c[p][k] = cs * cpk - sn * cqk;
                    c[q][k] = sn * cpk + cs * cqk;
                }
                for (int k = 0; k < 3; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = cs * vkp - sn * vkq;
                    v(k, q) = sn * vkp + cs * vkq;
                }
            }
    }
    std::array<int, 3> order{0, 1, 2};
    std::sort(order.begin(), order.end(), [&](int a, int b) { return c[a][a] > c[b][b]; });
    WeightedReduction out;
    for (int i = 0; i < 3; ++i) {
        out.principal_weights[i] = c[order[i]][order[i]];
        for (int k = 0; k < 3; ++k)
            out.principal_axes(k, i) = v(k, order[i]);
    }
    if (out.principal_axes.determinant() < 0.0)
        for (int k = 0; k < 3; ++k)
            out.principal_axes(k, 2) = -out.principal_axes(k, 2);
    return out;
}

/// Maps a reduction onto a three-axis merit. Two principal weights must
/// coincide (relative tolerance rel_tol); they become x and y and the
/// remaining one becomes z. The returned frame has the chosen axes as
/// columns x, y, z.
[[nodiscard]] inline std::pair<MeritSpec, Rotation3> reduce_to_merit(const WeightedReduction &red,
                                                                     double rel_tol = 1e-9) {
    const auto &w = red.principal_weights;
    const double scale = std::max({std::abs(w[0]), std::abs(w[1]), std::abs(w[2]), 1e-300});
    std::array<int, 3> cols;
    if (std::abs(w[0] - w[1]) <= rel_tol * scale)
        cols = {0, 1, 2};
    else if (std::abs(w[1] - w[2]) <= rel_tol * scale)
        cols = {1, 2, 0};
    else
        throw UnsupportedWeights("principal weights (" + std::to_string(w[0]) + ", " +
                                 std::to_string(w[1]) + ", " + std::to_string(w[2]) +
                                 ") have no equal pair; no analytic merit tensor exists");
    Rotation3 axes;
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k)
            axes(k, i) = red.principal_axes(k, cols[i]);
    if (axes.determinant() < 0.0)
        for (int k = 0; k < 3; ++k)
            axes(k, 2) = -axes(k, 2);
    const double wxy = 0.5 * (w[cols[0]] + w[cols[1]]);
    return {MeritSpec::weighted(wxy, wxy, w[cols[2]]), axes};
}

struct SplitComparison {
    double split_per_axis_mse = 0.0;
    double collective_per_axis_mse = 0.0;
    double bbm_reference = 0.0;
};

/// N spins split into two halves, each sending one axis with the optimal
/// m = 0 direction signal, versus all N spins used collectively as one
/// j_max = N/2 frame carrier with all three axes optimised.
[[nodiscard]] inline SplitComparison split_strategy_compare(int spins,
                                                            const AlternatingOptions &opt = {}) {
    if (spins < 4 || spins % 4 != 0)
        throw InvalidIndex("split_strategy_compare: N must be >= 4 with N/2 even");
    const int half = spins / 2;
    const auto direction_sol = direction::solve_optimal(half, HalfInt{0});
    const auto collective = alternating_optimize(half + 1, MeritSpec::all_axes(), opt);
    SplitComparison out;
    out.split_per_axis_mse = 1.0 - direction_sol.fidelity;
    out.collective_per_axis_mse = collective.mse_total / 3.0;
    out.bbm_reference = 4.0 / (3.0 * spins);
    return out;
}

} // namespace spinframe::frame
