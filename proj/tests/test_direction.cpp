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

#include <cmath>
#include <numbers>
#include <random>

#include <catch2/catch_amalgamated.hpp>

#include "spinframe/direction.hpp"

using namespace spinframe;
using namespace spinframe::direction;
using Catch::Approx;

namespace {

constexpr double pi = std::numbers::pi;

DirectionSignal random_signal(std::mt19937_64 &gen, int spins, HalfInt m) {
    std::normal_distribution<double> g;
    DirectionSignal s{spins, m, std::vector<double>(block_count(spins, m))};
    double n = 0.0;
    for (auto &c : s.coeffs) {
        c = g(gen);
        n += c * c;
    }
    for (auto &c : s.coeffs)
        c /= std::sqrt(n);
    return s;
}

/// <cos theta> from the measurement statistics, with Alice's signal along z
/// and Bob's outcome states built from coherent_state on a (cos theta, phi)
/// grid. Returns {total probability, <cos theta>}.
std::pair<double, double> measured_moments(const DirectionSignal &s, int order, int phi_points) {
    const auto rule = gauss_legendre(order);
    double total = 0.0, mean = 0.0;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const double theta = std::acos(rule.nodes[q]);
        for (int k = 0; k < phi_points; ++k) {
            const double phi = 2 * pi * (k + 0.25) / phi_points;
            cplx amp = 0.0;
            for (std::size_t i = 0; i < s.coeffs.size(); ++i) {
                const auto j = s.j_at(i);
                const auto bob = coherent_state(j, s.m, theta, phi);
                // Alice's state along z is the basis vector |j, m>.
                const int idx = (j.twice() - s.m.twice()) / 2;
                amp += s.coeffs[i] * std::sqrt(double(irrep_dim(j))) * std::conj(bob.amplitudes[idx]);
            }
            const double p = std::norm(amp) * 0.5 * rule.weights[q] / phi_points;
            total += p;
            mean += p * rule.nodes[q];
        }
    }
    return {total, mean};
}

} // namespace

TEST_CASE("build_A examples", "[direction]") {
    const double s3 = 1 / std::sqrt(3.0);
    const auto a2 = build_A(2, HalfInt{0});
    CHECK(a2.diag == std::vector<double>{0.0, 0.0});
    CHECK(a2.offdiag[0] == Approx(s3).margin(1e-15));

    const auto a4 = build_A(4, HalfInt{0});
    CHECK(a4.diag == std::vector<double>{0.0, 0.0, 0.0});
    CHECK(a4.offdiag[0] == Approx(s3).margin(1e-15));
    CHECK(a4.offdiag[1] == Approx(2 / std::sqrt(15.0)).margin(1e-15));

    const auto a21 = build_A(2, HalfInt{1});
    CHECK(a21.diag.size() == 1);
    CHECK(a21.diag[0] == Approx(0.5).margin(1e-15));
    CHECK(a21.offdiag.empty());

    CHECK_THROWS_AS(build_A(2, HalfInt{2}), InvalidIndex);
    CHECK_THROWS_AS(build_A(3, HalfInt{1}), InvalidIndex);
    CHECK_THROWS_AS(build_A(2, HalfInt::from_twice(1)), InvalidIndex);
}

TEST_CASE("solve_optimal examples", "[direction]") {
    const auto one = solve_optimal(1, HalfInt::from_twice(1));
    CHECK(one.fidelity == Approx(2.0 / 3.0).margin(1e-14));
    CHECK(1 - one.fidelity == Approx(1.0 / 3.0).margin(1e-14));

    const auto opp = solve_optimal(2, HalfInt{0});
    CHECK(opp.fidelity == Approx((1 + 1 / std::sqrt(3.0)) / 2).margin(1e-14));
    CHECK(opp.fidelity > 0.75);

    CHECK(solve_optimal(2, HalfInt{1}).fidelity == Approx(0.75).margin(1e-14));
}

TEST_CASE("solution invariants", "[direction][property]") {
    for (int n = 1; n <= 30; ++n)
        for (int tm = n % 2; tm <= n; tm += 2) {
            const auto sol = solve_optimal(n, HalfInt::from_twice(tm));
            sol.signal.validate();
            CHECK(std::abs(sol.fidelity - 0.5 * (1 + sol.x_mean)) <= 1e-15);
            CHECK(sol.fidelity >= 0.0);
            CHECK(sol.fidelity <= 1.0);
            CHECK(std::abs(x_mean_of(sol.signal) - sol.x_mean) < 1e-12);
            if (tm == 0) {
                CHECK(sol.x_mean >= 0.0);
                CHECK(sol.x_mean < 1.0);
            }
        }
}

TEST_CASE("mp_baseline", "[direction]") {
    CHECK(mp_baseline(2) == 0.75);
    CHECK(mp_baseline(1) == Approx(2.0 / 3.0).margin(1e-15));
    CHECK(mp_baseline(10) == Approx(11.0 / 12.0).margin(1e-15));
    for (int n = 1; n <= 12; ++n)
        CHECK(std::abs(solve_optimal(n, HalfInt::from_twice(n)).fidelity - mp_baseline(n)) < 1e-12);
}

TEST_CASE("asymptote_gap", "[direction]") {
    const auto g2 = asymptote_gap(2);
    CHECK(g2.one_minus_F == Approx((1 - 1 / std::sqrt(3.0)) / 2).margin(1e-14));
    CHECK(g2.limit == Approx(std::pow(2.404825557695773 / 5, 2)).margin(1e-15));
    CHECK(kBesselJ0FirstZero == 2.404825557695773);

    const auto g60 = asymptote_gap(60);
    const auto g120 = asymptote_gap(120);
    CHECK(std::abs(g120.ratio - 1) < std::abs(g60.ratio - 1));
    CHECK_THROWS_AS(asymptote_gap(3), InvalidIndex);
}

TEST_CASE("outcome_density examples", "[direction]") {
    for (int n : {1, 2, 5, 8}) {
        const auto mp = DirectionSignal::top_block(n, HalfInt::from_twice(n));
        for (double x : {-0.9, -0.2, 0.0, 0.4, 0.95})
            CHECK(outcome_density(mp, x) ==
                  Approx((n + 1) / 2.0 * std::pow((1 + x) / 2, n)).epsilon(1e-13).margin(1e-15));
    }
    const auto one = DirectionSignal::top_block(1, HalfInt::from_twice(1));
    const auto rule = gauss_legendre(8);
    CHECK(rule.integrate([&](double x) { return x * outcome_density(one, x); }) ==
          Approx(1.0 / 3.0).margin(1e-14));
}

TEST_CASE("the tridiagonal contraction equals the integrated density", "[direction][property]") {
    std::mt19937_64 gen(31);
    for (int n = 1; n <= 10; ++n)
        for (int tm = n % 2; tm <= n; tm += 2)
            for (int rep = 0; rep < 5; ++rep) {
                const auto s = random_signal(gen, n, HalfInt::from_twice(tm));
                const auto rule = gauss_legendre(n + 4);
                const double norm = rule.integrate([&](double x) { return outcome_density(s, x); });
                const double mean =
                    rule.integrate([&](double x) { return x * outcome_density(s, x); });
                CHECK(std::abs(norm - 1.0) < 1e-10);
                CHECK(std::abs(mean - x_mean_of(s)) < 1e-10);
            }
}

TEST_CASE("coherent-state measurement statistics reproduce the contraction",
          "[direction][property]") {
    std::mt19937_64 gen(32);
    for (int n = 1; n <= 6; ++n)
        for (int tm = n % 2; tm <= n; tm += 2) {
            const auto s = random_signal(gen, n, HalfInt::from_twice(tm));
            const auto [total, mean] = measured_moments(s, n + 4, 2 * n + 3);
            CHECK(std::abs(total - 1.0) < 1e-10);
            CHECK(std::abs(mean - x_mean_of(s)) < 1e-10);
        }
}

TEST_CASE("povm_completeness_check", "[direction]") {
    CHECK(povm_completeness_check(2, HalfInt{0}, 40, 64) < 1e-10);
    CHECK(povm_completeness_check(1, HalfInt::from_twice(1), 40, 64) < 1e-10);
    CHECK(povm_completeness_check(2, HalfInt{1}, 40, 64) < 1e-10);
    CHECK(povm_completeness_check(6, HalfInt{1}, 40, 64) < 1e-10);
    CHECK(povm_completeness_check(5, HalfInt::from_twice(1), 40, 64) < 1e-10);
    // Too coarse a phi grid aliases the off-diagonal blocks.
    CHECK(povm_completeness_check(4, HalfInt{0}, 40, 1) > 1e-3);
}

TEST_CASE("fidelity is non-increasing in m", "[direction][property]") {
    for (int n = 1; n <= 20; ++n) {
        double prev = 2.0;
        for (int tm = n % 2; tm <= n; tm += 2) {
            const double f = solve_optimal(n, HalfInt::from_twice(tm)).fidelity;
            CHECK(f <= prev + 1e-14);
            prev = f;
        }
    }
}

TEST_CASE("m=0 eigenvectors are strictly positive", "[direction][property]") {
    for (int n = 2; n <= 100; n += 2) {
        const auto sol = solve_optimal(n, HalfInt{0});
        double smallest = 1.0;
        for (double c : sol.signal.coeffs)
            smallest = std::min(smallest, c);
        CHECK(smallest > 0.0);
    }
}

TEST_CASE("the lowest m uses every irrep once", "[direction][property]") {
    for (int n = 1; n <= 40; ++n) {
        const auto m = lowest_m(n);
        long long dim = 0;
        for (int i = 0; i < block_count(n, m); ++i)
            dim += irrep_dim(HalfInt::from_twice(m.twice() + 2 * i));
        CHECK(dim == hilbert_dim(n));
    }
}

TEST_CASE("optimum matches a direct search over unit signals", "[direction]") {
    for (int n : {4, 5, 7}) {
        const auto m = lowest_m(n);
        const int k = block_count(n, m);
        auto objective = [&](std::span<const double> x) {
            DirectionSignal s{n, m, std::vector<double>(x.begin(), x.end())};
            double norm = 0.0;
            for (double c : s.coeffs)
                norm += c * c;
            for (auto &c : s.coeffs)
                c /= std::sqrt(norm);
            return x_mean_of(s);
        };
        const auto r = derivative_free_maximize(objective, std::vector<double>(k, 1.0), 1e-14);
        CHECK(r.value == Approx(solve_optimal(n, m).x_mean).margin(1e-8));
    }
}

TEST_CASE("sweep", "[direction]") {
    const auto rows = sweep(1, 20, 1, false, 1);
    REQUIRE(rows.size() == 10);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].spins == 2 * int(i) + 2);
        CHECK(rows[i].m.twice() == 0);
        CHECK(rows[i].ratio == Approx(rows[i].one_minus_F / rows[i].bessel_limit).epsilon(1e-15));
    }
    const auto odd = sweep(1, 9, 2, true, 3);
    REQUIRE(odd.size() == 5);
    CHECK(odd[0].m.twice() == 1);
    CHECK(odd[0].fidelity == Approx(2.0 / 3.0).margin(1e-14));

    const auto a = sweep(2, 200, 3, true, 1);
    const auto b = sweep(2, 200, 3, true, 8);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].spins == b[i].spins);
        CHECK(a[i].fidelity == b[i].fidelity);
    }
    CHECK_THROWS_AS(sweep(0, 10, 1, false, 1), InvalidIndex);
    CHECK_THROWS_AS(sweep(5, 4, 1, false, 1), InvalidIndex);
}
