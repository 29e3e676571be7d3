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

// Acceptance suite: one PASS/FAIL line per criterion, with the measured
// numbers and wall time. Exits non-zero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "spinframe/direction.hpp"
#include "spinframe/frame.hpp"
#include "spinframe/simulate.hpp"

using namespace spinframe;

namespace {

constexpr double pi = std::numbers::pi;

struct Outcome {
    bool pass;
    std::string detail;
};

struct Criterion {
    int id;
    std::string name;
    double budget_seconds;
    std::function<Outcome()> check;
};

std::string fmt(const char *f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
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

Outcome parallel_baseline() {
    double worst = 0.0;
    for (int n = 1; n <= 12; ++n) {
        const auto sol = direction::solve_optimal(n, HalfInt::from_twice(n));
        worst = std::max(worst, std::abs((1 - sol.fidelity) - 1.0 / (n + 2)));
    }
    return {worst < 1e-12, fmt("max |(1-F) - 1/(N+2)| = %.3g over N=1..12 (tol 1e-12)", worst)};
}

Outcome opposite_spins() {
    const double f = direction::solve_optimal(2, HalfInt{0}).fidelity;
    const double expect = (1 + 1 / std::sqrt(3.0)) / 2;
    const double dev = std::abs(f - expect);
    return {dev < 1e-12 && f > 0.75, fmt("F = %.15f, |F - (1+1/sqrt3)/2| = %.3g", f, dev)};
}

Outcome bessel_asymptote() {
    const double target = 5.78319;
    auto scaled = [](int n) {
        return (1 - direction::solve_optimal(n, HalfInt{0}).fidelity) * (n + 3.0) * (n + 3.0);
    };
    const double s60 = scaled(60), s120 = scaled(120);
    const double e60 = std::abs(s60 / target - 1), e120 = std::abs(s120 / target - 1);
    return {e60 < 0.05 && e120 < 0.02 && e120 < e60,
            fmt("(1-F)(N+3)^2: N=60 %.5f (%.2f%%), N=120 %.5f (%.2f%%)", s60, 100 * e60, s120,
                100 * e120)};
}

Outcome povm_completeness() {
    const double dev = direction::povm_completeness_check(6, HalfInt{0}, 40, 64);
    return {dev < 1e-10, fmt("max |sum E - I| = %.3g (tol 1e-10)", dev)};
}

Outcome integration_equivalence() {
    std::mt19937_64 gen(1001);
    std::normal_distribution<double> g;
    const auto rule = gauss_legendre(40);
    double worst = 0.0;
    for (int rep = 0; rep < 10; ++rep) {
        direction::DirectionSignal s{10, HalfInt{0}, std::vector<double>(6)};
        double norm = 0.0;
        for (auto &c : s.coeffs) {
            c = g(gen);
            norm += c * c;
        }
        for (auto &c : s.coeffs)
            c /= std::sqrt(norm);
        const double quad = rule.integrate([&](double x) { return x * direction::outcome_density(s, x); });
        worst = std::max(worst, std::abs(quad - direction::x_mean_of(s)));
    }
    return {worst < 1e-10, fmt("max |quadrature <x> - c^T A c| = %.3g over 10 signals", worst)};
}

Outcome tensor_oracle() {
    std::mt19937_64 gen(1002);
    const int n = 3;
    const std::array<frame::MeritSpec, 3> specs{frame::MeritSpec::z_axis(), frame::MeritSpec::xy_axes(),
                                                frame::MeritSpec::all_axes()};
    std::array<frame::MeritTensor, 3> tensors;
    for (int k = 0; k < 3; ++k)
        tensors[k] = frame::build_merit_tensor(specs[k], n);
    double worst = 0.0, worst_norm = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
        const auto a = random_alice(gen, n);
        CounterRng rng(1002, rep);
        const auto b = frame::FiducialVector::random(n, rng);
        const auto haar = frame::haar_expectations(a, b, 40, 64);
        worst_norm = std::max(worst_norm, std::abs(haar.normalization - 1));
        for (int k = 0; k < 3; ++k) {
            const double quad = specs[k].merit_from_axes(haar.axis_cos);
            worst = std::max(worst, std::abs(frame::merit_expectation(tensors[k], a, b) - quad));
        }
    }
    return {worst < 1e-8 && worst_norm < 1e-8,
            fmt("max |tensor - quadrature| = %.3g, max |norm - 1| = %.3g (20 pairs x 3 kinds)", worst,
                worst_norm)};
}

Outcome direction_frame_equivalence() {
    double worst = 0.0;
    for (int n = 2; n <= 8; ++n) {
        const auto sol = frame::alternating_optimize(n, frame::MeritSpec::z_axis());
        worst = std::max(worst, std::abs(sol.merit -
                                         direction::solve_optimal(2 * (n - 1), HalfInt{0}).x_mean));
    }
    return {worst < 1e-10, fmt("max |z-axis merit - direction <x>| = %.3g over n=2..8", worst)};
}

Outcome fixed_point() {
    double gap = 0.0, res = 0.0;
    int runs = 0, converged = 0;
    for (int n = 2; n <= 6; ++n)
        for (auto spec : {frame::MeritSpec::z_axis(), frame::MeritSpec::xy_axes(),
                          frame::MeritSpec::all_axes()}) {
            const auto sol = frame::alternating_optimize(n, spec);
            ++runs;
            if (!sol.converged)
                continue;
            ++converged;
            gap = std::max(gap, frame::distance(frame::bob_from_alice(sol.alice), sol.bob));
            const auto m = frame::build_M(frame::build_merit_tensor(spec, n), sol.bob);
            res = std::max(res, spinframe::detail::rayleigh(m, sol.alice.amplitudes).second);
        }

    // Direct search over the unconstrained amplitudes at n = 2.
    const int n = 2;
    const auto tensor = frame::build_merit_tensor(frame::MeritSpec::all_axes(), n);
    auto objective = [&](std::span<const double> x) {
        frame::FrameSignal a{n, std::vector<cplx>(4)};
        frame::FiducialVector b{n, std::vector<cplx>(4)};
        for (int i = 0; i < 4; ++i) {
            a.amplitudes[i] = {x[2 * i], x[2 * i + 1]};
            b.amplitudes[i] = {x[8 + 2 * i], x[9 + 2 * i]};
        }
        double na = 0.0;
        for (auto v : a.amplitudes)
            na += std::norm(v);
        if (na < 1e-20)
            return -10.0;
        for (auto &v : a.amplitudes)
            v /= std::sqrt(na);
        for (int j = 0; j < n; ++j) {
            double nb = 0.0;
            for (int i = j * j; i < (j + 1) * (j + 1); ++i)
                nb += std::norm(b.amplitudes[i]);
            if (nb < 1e-20)
                return -10.0;
            for (int i = j * j; i < (j + 1) * (j + 1); ++i)
                b.amplitudes[i] /= std::sqrt(nb);
        }
        return frame::merit_expectation(tensor, a, b);
    };
    std::mt19937_64 gen(1003);
    std::normal_distribution<double> g;
    double powell = -10.0;
    for (int start = 0; start < 8; ++start) {
        std::vector<double> x0(16);
        for (auto &v : x0)
            v = g(gen);
        powell = std::max(powell, derivative_free_maximize(objective, x0, 1e-14).value);
    }
    const double alt = frame::alternating_optimize(n, frame::MeritSpec::all_axes()).merit;
    const double diff = std::abs(powell - alt);
    return {converged == runs && gap < 1e-8 && res < 1e-8 && diff < 1e-6,
            fmt("%d/%d converged, max gap %.3g, max residual %.3g; n=2 xyz alternating %.10f vs "
                "direct search %.10f",
                converged, runs, gap, res, alt, powell)};
}

double one_minus_fz_scaled(int n) {
    const auto sol = frame::alternating_optimize(n, frame::MeritSpec::z_axis());
    return 0.5 * (1 - sol.merit) * n * n;
}

Outcome single_axis_asymptote() {
    const double target = 1.446;
    const double s8 = one_minus_fz_scaled(8), s10 = one_minus_fz_scaled(10),
                 s12 = one_minus_fz_scaled(12);
    const bool band = s10 >= 1.37 && s10 <= 1.52;
    const bool closer = std::abs(s12 - target) < std::abs(s8 - target);
    return {band && closer,
            fmt("(1-F_z) n^2: n=8 %.4f, n=10 %.4f (band [1.37, 1.52] %s), n=12 %.4f (closer at 12: "
                "%s)",
                s8, s10, band ? "met" : "missed", s12, closer ? "yes" : "no")};
}

Outcome all_axes_trend() {
    std::vector<double> mse(9, 0.0);
    bool decreasing = true;
    for (int n = 2; n <= 8; ++n) {
        mse[n] = frame::alternating_optimize(n, frame::MeritSpec::all_axes()).mse_total;
        if (n > 2 && !(mse[n] < mse[n - 1]))
            decreasing = false;
    }
    const double r6 = mse[6] * 6, r8 = mse[8] * 8;
    const double spread = std::abs(r6 - r8) / std::min(r6, r8);
    return {decreasing && spread < 0.3,
            fmt("mse_total n=2..8: %.4f %.4f %.4f %.4f %.4f %.4f %.4f; mse*n at 6/8 = %.4f/%.4f "
                "(spread %.1f%%)",
                mse[2], mse[3], mse[4], mse[5], mse[6], mse[7], mse[8], r6, r8, 100 * spread)};
}

Outcome split_vs_collective() {
    const auto cmp = frame::split_strategy_compare(20);
    const double direct = 1 - direction::solve_optimal(10, HalfInt{0}).fidelity;
    return {cmp.split_per_axis_mse < cmp.collective_per_axis_mse && cmp.split_per_axis_mse == direct,
            fmt("split %.6f (direction N=10: %.6f), collective %.6f, 4/(3N) reference %.6f",
                cmp.split_per_axis_mse, direct, cmp.collective_per_axis_mse, cmp.bbm_reference)};
}

Outcome monte_carlo() {
    const auto opt4 = direction::solve_optimal(4, HalfInt{0});
    const auto xs = simulate::sample_direction_outcomes(opt4.signal, {200000, 7, 4});
    const auto xs_again = simulate::sample_direction_outcomes(opt4.signal, {200000, 7, 4});
    const auto xs_other = simulate::sample_direction_outcomes(opt4.signal, {200000, 7, 1});
    const auto rd = simulate::estimate_direction_fidelity(xs, opt4.fidelity);

    const auto z2 = frame::alternating_optimize(2, frame::MeritSpec::z_axis());
    const auto gs = simulate::sample_frame_run(z2.alice, z2.bob, {50000, 1, 4});
    const auto gs_again = simulate::sample_frame_run(z2.alice, z2.bob, {50000, 1, 4});
    const auto rf = simulate::estimate_frame_merit(gs.samples, frame::MeritSpec::z_axis(), z2.merit);
    const auto rf_again =
        simulate::estimate_frame_merit(gs_again.samples, frame::MeritSpec::z_axis(), z2.merit);

    const bool identical = xs == xs_again && xs == xs_other && rf.mean == rf_again.mean &&
                           gs.proposals == gs_again.proposals;
    return {rd.sigma_distance < 4 && rf.sigma_distance < 4 && identical &&
                gs.max_density_ratio <= 1.0 + 1e-12,
            fmt("direction sigma %.2f, frame sigma %.2f, reruns identical: %s, max density/envelope "
                "%.3f",
                rd.sigma_distance, rf.sigma_distance, identical ? "yes" : "no", gs.max_density_ratio)};
}

Outcome euler_identities() {
    std::mt19937_64 gen(1013);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst_trace = 0.0, worst_diag = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const EulerAngles g{2 * pi * u(gen), std::acos(2 * u(gen) - 1), 2 * pi * u(gen)};
        const auto r = classical_rotation(g);
        worst_trace = std::max(worst_trace,
                               std::abs(r.trace() - (1 + 2 * std::cos(rotation_angle(r)))));
        worst_diag = std::max(worst_diag, std::abs(r(2, 2) - std::cos(g.beta)));
        worst_diag = std::max(worst_diag, std::abs(r(0, 0) + r(1, 1) -
                                                   (1 + std::cos(g.beta)) * std::cos(g.alpha + g.gamma)));
    }
    return {worst_trace < 1e-12 && worst_diag < 1e-12,
            fmt("max trace deviation %.3g, max diagonal deviation %.3g (1000 triples)", worst_trace,
                worst_diag)};
}

} // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "parallel-spin baseline", 1, parallel_baseline},
        {2, "opposite-spin improvement", 1, opposite_spins},
        {3, "Bessel-zero asymptote", 5, bessel_asymptote},
        {4, "direction POVM completeness", 10, povm_completeness},
        {5, "analytic integration equivalence", 5, integration_equivalence},
        {6, "frame tensor vs Haar quadrature", 60, tensor_oracle},
        {7, "direction/frame equivalence", 10, direction_frame_equivalence},
        {8, "alternating fixed point", 30, fixed_point},
        {9, "single-axis asymptote", 60, single_axis_asymptote},
        {10, "all-axes trend", 300, all_axes_trend},
        {11, "split vs collective", 300, split_vs_collective},
        {12, "Monte Carlo consistency", 120, monte_carlo},
        {13, "Euler identities", 1, euler_identities},
    };
    int failed = 0;
    for (const auto &c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.check();
        } catch (const std::exception &e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs < c.budget_seconds;
        const bool pass = o.pass && in_time;
        if (!pass)
            ++failed;
        std::printf("%s  %2d  %-34s %s [%.2f s of %.0f s%s]\n", pass ? "PASS" : "FAIL", c.id,
                    c.name.c_str(), o.detail.c_str(), secs, c.budget_seconds,
                    in_time ? "" : ", over budget");
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", int(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
