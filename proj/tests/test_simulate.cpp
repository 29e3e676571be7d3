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

#include <algorithm>
#include <cmath>
#include <random>

#include <catch2/catch_amalgamated.hpp>

#include "spinframe/simulate.hpp"

using namespace spinframe;
using namespace spinframe::simulate;
using Catch::Approx;

namespace {

/// Kolmogorov-Smirnov distance against a CDF computed by integrating the
/// density from -1 with a fixed high-order rule.
double ks_distance(std::vector<double> xs, const direction::DirectionSignal &s) {
    std::sort(xs.begin(), xs.end());
    const auto rule = gauss_legendre(40);
    auto cdf = [&](double x) {
        const double mid = 0.5 * (x - 1.0), half = 0.5 * (x + 1.0);
        return half * rule.integrate([&](double t) {
                   return direction::outcome_density(s, mid + half * t);
               });
    };
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = cdf(xs[i]);
        d = std::max({d, std::abs(f - i / n), std::abs(f - (i + 1) / n)});
    }
    return d;
}

frame::FrameSignal random_alice(std::mt19937_64 &gen, int n) {
    std::normal_distribution<double> g;
    frame::FrameSignal a{n, std::vector<cplx>(frame::frame_dim(n))};
    double s = 0.0;
    for (auto &x : a.amplitudes) {
        x = {g(gen), g(gen)};
        s += std::norm(x);
    }
    for (auto &x : a.amplitudes)
        x /= std::sqrt(s);
    return a;
}

} // namespace

TEST_CASE("summarize", "[simulate]") {
    const std::vector<double> ones(50, 1.0);
    const auto r = estimate_direction_fidelity(ones, 1.0);
    CHECK(r.mean == 1.0);
    CHECK(r.std_error == 0.0);
    CHECK(r.sigma_distance == 0.0);
    CHECK(r.shots == 50);

    const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
    const auto s = summarize(v, 2.0);
    CHECK(s.mean == 2.5);
    // sample sd = sqrt(5/3)
    CHECK(s.std_error == Approx(std::sqrt(5.0 / 3.0) / 2.0).epsilon(1e-15));
    CHECK(s.sigma_distance == Approx(0.5 / s.std_error).epsilon(1e-15));

    CHECK_THROWS_AS(summarize(std::span<const double>{}, 0.0), EmptySample);
    CHECK_THROWS_AS(estimate_direction_fidelity(std::span<const double>{}, 0.0), EmptySample);
    CHECK_THROWS_AS(estimate_frame_merit(std::span<const EulerAngles>{}, frame::MeritSpec::z_axis(), 0.0),
                    EmptySample);
}

TEST_CASE("direction sampling reproduces analytic means", "[simulate]") {
    const auto one = direction::DirectionSignal::top_block(1, HalfInt::from_twice(1));
    const auto xs = sample_direction_outcomes(one, {100000, 3, 4});
    CHECK(summarize(xs, 1.0 / 3.0).sigma_distance < 4);

    const auto mp = direction::DirectionSignal::top_block(10, HalfInt{5});
    const auto mp_x = sample_direction_outcomes(mp, {100000, 4, 4});
    CHECK(estimate_direction_fidelity(mp_x, 11.0 / 12.0).sigma_distance < 4);

    const auto opt4 = direction::solve_optimal(4, HalfInt{0});
    const auto x4 = sample_direction_outcomes(opt4.signal, {200000, 5, 4});
    CHECK(estimate_direction_fidelity(x4, opt4.fidelity).sigma_distance < 4);

    const auto opt2 = direction::solve_optimal(2, HalfInt{0});
    const auto x2 = sample_direction_outcomes(opt2.signal, {400000, 6, 4});
    const auto r2 = estimate_direction_fidelity(x2, (1 + 1 / std::sqrt(3.0)) / 2);
    CHECK(r2.sigma_distance < 4);
    CHECK(r2.mean == Approx((1 + 1 / std::sqrt(3.0)) / 2).margin(3e-3));
}

TEST_CASE("direction sampling is deterministic", "[simulate]") {
    const auto sig = direction::solve_optimal(6, HalfInt{0}).signal;
    const auto a = sample_direction_outcomes(sig, {5000, 99, 1});
    const auto b = sample_direction_outcomes(sig, {5000, 99, 1});
    const auto c = sample_direction_outcomes(sig, {5000, 99, 7});
    const auto d = sample_direction_outcomes(sig, {5000, 100, 1});
    CHECK(a == b);
    CHECK(a == c);
    CHECK(a != d);
}

TEST_CASE("inverse-CDF sampling matches the outcome density", "[simulate][property]") {
    std::mt19937_64 gen(51);
    std::normal_distribution<double> g;
    for (int n = 1; n <= 6; ++n)
        for (int tm = n % 2; tm <= n; tm += 2) {
            const auto m = HalfInt::from_twice(tm);
            direction::DirectionSignal s{n, m, std::vector<double>(direction::block_count(n, m))};
            double norm = 0.0;
            for (auto &c : s.coeffs) {
                c = g(gen);
                norm += c * c;
            }
            for (auto &c : s.coeffs)
                c /= std::sqrt(norm);
            const DirectionSampler sampler(s);
            CHECK(std::abs(sampler.total_mass() - 1.0) < 1e-10);
            for (double u : {0.01, 0.3, 0.77, 0.999})
                CHECK(std::abs(sampler.cdf(sampler.quantile(u)) - u) < 1e-9);
            const auto xs = sample_direction_outcomes(s, {100000, std::uint64_t(n * 10 + tm), 4});
            CHECK(ks_distance(xs, s) < 0.01);
        }
}

TEST_CASE("frame sampling", "[simulate]") {
    // Scalar signal: uniform error rotations.
    const frame::FrameSignal scalar{1, {cplx(1.0)}};
    const auto run1 = sample_frame_run(scalar, frame::FiducialVector::uniform(1), {20000, 1, 4});
    CHECK(run1.proposals == 20000);
    CHECK(estimate_frame_merit(run1.samples, frame::MeritSpec::z_axis(), 0.0).sigma_distance < 4);
    CHECK(estimate_frame_merit(run1.samples, frame::MeritSpec::all_axes(), 0.0).sigma_distance < 4);

    const auto z2 = frame::alternating_optimize(2, frame::MeritSpec::z_axis());
    const auto run2 = sample_frame_run(z2.alice, z2.bob, {50000, 2, 4});
    CHECK(run2.max_density_ratio <= 1.0 + 1e-12);
    CHECK(run2.proposals >= run2.samples.size());
    CHECK(estimate_frame_merit(run2.samples, frame::MeritSpec::z_axis(), 1 / std::sqrt(3.0))
              .sigma_distance < 4);

    const auto all2 = frame::alternating_optimize(2, frame::MeritSpec::all_axes());
    const auto run3 = sample_frame_run(all2.alice, all2.bob, {50000, 3, 4});
    CHECK(estimate_frame_merit(run3.samples, frame::MeritSpec::all_axes(), all2.merit)
              .sigma_distance < 4);
    CHECK(estimate_frame_merit(run3.samples, frame::MeritSpec::xy_axes(),
                               all2.per_axis[0] + all2.per_axis[1])
              .sigma_distance < 4);

    const std::vector<EulerAngles> identity(10);
    const auto r = estimate_frame_merit(identity, frame::MeritSpec::z_axis(), 1.0);
    CHECK(r.mean == 1.0);
    CHECK(estimate_frame_merit(identity, frame::MeritSpec::all_axes(), 3.0).mean == 3.0);
}

TEST_CASE("frame sampling is deterministic across workers", "[simulate]") {
    const auto sol = frame::alternating_optimize(3, frame::MeritSpec::all_axes());
    const auto a = sample_frame_run(sol.alice, sol.bob, {3000, 8, 1});
    const auto b = sample_frame_run(sol.alice, sol.bob, {3000, 8, 6});
    CHECK(a.proposals == b.proposals);
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        CHECK(a.samples[i].alpha == b.samples[i].alpha);
        CHECK(a.samples[i].beta == b.samples[i].beta);
        CHECK(a.samples[i].gamma == b.samples[i].gamma);
    }
}

TEST_CASE("the envelope bounds the density", "[simulate][property]") {
    std::mt19937_64 gen(52);
    for (int trial = 0; trial < 12; ++trial) {
        const int n = 1 + trial % 4;
        const auto a = random_alice(gen, n);
        CounterRng rng(trial, 0);
        const auto b = frame::FiducialVector::random(n, rng);
        const auto run = sample_frame_run(a, b, {500, std::uint64_t(trial), 2});
        CHECK(run.max_density_ratio <= 1.0 + 1e-12); // equality is attained at n = 1
        CHECK(run.max_density_ratio > 0.0);
        CHECK(run.samples.size() == 500);
    }
}

TEST_CASE("estimates are calibrated across seeds", "[simulate][property]") {
    const auto opt4 = direction::solve_optimal(4, HalfInt{0});
    const auto z2 = frame::alternating_optimize(2, frame::MeritSpec::all_axes());
    int dir_outliers = 0, frame_outliers = 0;
    for (std::uint64_t seed = 100; seed < 120; ++seed) {
        const auto xs = sample_direction_outcomes(opt4.signal, {20000, seed, 4});
        if (estimate_direction_fidelity(xs, opt4.fidelity).sigma_distance > 3)
            ++dir_outliers;
        const auto gs = sample_frame_outcomes(z2.alice, z2.bob, {5000, seed, 4});
        if (estimate_frame_merit(gs, frame::MeritSpec::all_axes(), z2.merit).sigma_distance > 3)
            ++frame_outliers;
    }
    CHECK(dir_outliers <= 2);
    CHECK(frame_outliers <= 2);
}
