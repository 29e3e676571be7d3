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

// Monte Carlo simulation of both protocols. Every shot draws from its own
// CounterRng stream keyed by (seed, shot index), and results are reduced in
// shot order, so output is bit-identical for any worker count.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "direction.hpp"
#include "errors.hpp"
#include "frame.hpp"
#include "numerics.hpp"
#include "parallel.hpp"
#include "rng.hpp"
#include "spinmath.hpp"

namespace spinframe::simulate {

struct SimConfig {
    std::uint64_t shots = 1;
    std::uint64_t seed = 0;
    unsigned workers = 1;
};

struct EstimateReport {
    double mean = 0.0;
    double std_error = 0.0; // sample standard deviation / sqrt(shots)
    std::uint64_t shots = 0;
    double analytic = 0.0;
    double sigma_distance = 0.0; // |mean - analytic| / std_error
};

/// Pairwise (cascade) summation in index order.
[[nodiscard]] inline double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 8) {
        double s = 0.0;
        for (double x : v)
            s += x;
        return s;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

[[nodiscard]] inline EstimateReport summarize(std::span<const double> values, double analytic) {
    if (values.empty())
        throw EmptySample("summarize: no samples");
    const double n = static_cast<double>(values.size());
    EstimateReport r;
    r.shots = values.size();
    r.analytic = analytic;
    r.mean = pairwise_sum(values) / n;
    if (values.size() > 1) {
        std::vector<double> sq(values.size());
        for (std::size_t i = 0; i < values.size(); ++i)
            sq[i] = (values[i] - r.mean) * (values[i] - r.mean);
        r.std_error = std::sqrt(pairwise_sum(sq) / (n - 1.0) / n);
    }
    const double diff = std::abs(r.mean - analytic);
    if (r.std_error > 0.0)
        r.sigma_distance = diff / r.std_error;
    else
        r.sigma_distance = diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return r;
}

/// Inverse-CDF sampler for the error-angle cosine of a direction signal.
/// The CDF is tabulated on a uniform grid using Gauss-Legendre rules that are
/// exact for the polynomial density; inside a cell the equation CDF(x) = u is
/// solved by safeguarded Newton steps, so the result is exact up to the root
/// tolerance rather than an interpolation.
class DirectionSampler {
  public:
    explicit DirectionSampler(direction::DirectionSignal signal, int cells = 256)
        : signal_(std::move(signal)),
          rule_(gauss_legendre(signal_.spins / 2 + 2)),
          edges_(cells + 1),
          cdf_(cells + 1, 0.0) {
        signal_.validate();
        for (int i = 0; i <= cells; ++i)
            edges_[i] = -1.0 + 2.0 * i / cells;
        for (int i = 0; i < cells; ++i)
            cdf_[i + 1] = cdf_[i] + mass(edges_[i], edges_[i + 1]);
        total_ = cdf_.back();
    }

    [[nodiscard]] double density(double x) const { return direction::outcome_density(signal_, x); }

    /// Integral of the density over [-1, x].
    [[nodiscard]] double cdf(double x) const {
        x = std::clamp(x, -1.0, 1.0);
        auto it = std::upper_bound(edges_.begin(), edges_.end(), x);
        const std::size_t cell = std::min<std::size_t>(
            std::max<std::ptrdiff_t>(it - edges_.begin() - 1, 0), edges_.size() - 2);
        return cdf_[cell] + mass(edges_[cell], x);
    }

    [[nodiscard]] double total_mass() const noexcept { return total_; }

    /// x with CDF(x) = u * total.
    [[nodiscard]] double quantile(double u) const {
        const double target = u * total_;
        auto it = std::upper_bound(cdf_.begin(), cdf_.end(), target);
        std::size_t cell = std::min<std::size_t>(
            std::max<std::ptrdiff_t>(it - cdf_.begin() - 1, 0), edges_.size() - 2);
        double lo = edges_[cell], hi = edges_[cell + 1];
        const double base = cdf_[cell];
        double x = 0.5 * (lo + hi);
        for (int it2 = 0; it2 < 100; ++it2) {
            const double f = base + mass(edges_[cell], x) - target;
            if (f > 0.0)
                hi = x;
            else
                lo = x;
            const double p = density(x);
            double next = p > 0.0 ? x - f / p : 0.5 * (lo + hi);
            if (!(next > lo && next < hi))
                next = 0.5 * (lo + hi);
            if (std::abs(next - x) < 1e-15 || hi - lo < 1e-15) {
                x = next;
                break;
            }
            x = next;
        }
        return x;
    }

  private:
    [[nodiscard]] double mass(double a, double b) const {
        if (b <= a)
            return 0.0;
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        double s = 0.0;
        for (std::size_t i = 0; i < rule_.nodes.size(); ++i)
            s += rule_.weights[i] * density(mid + half * rule_.nodes[i]);
        return half * s;
    }

    direction::DirectionSignal signal_;
    QuadratureRule rule_;
    std::vector<double> edges_;
    std::vector<double> cdf_;
    double total_ = 1.0;
};

/// Cosines of the angle between the true and the estimated direction, one
/// per shot. The azimuth of the outcome is uniform and is not generated.
[[nodiscard]] inline std::vector<double>
sample_direction_outcomes(const direction::DirectionSignal &signal, const SimConfig &config) {
    if (config.shots < 1)
        throw EmptySample("sample_direction_outcomes: shots must be >= 1");
    const DirectionSampler sampler(signal);
    std::vector<double> xs(config.shots);
    parallel_for(config.shots, config.workers, [&](std::size_t i) {
        CounterRng rng(config.seed, i);
        xs[i] = sampler.quantile(rng.uniform());
    });
    return xs;
}

/// Mean of (1 + x)/2.
[[nodiscard]] inline EstimateReport estimate_direction_fidelity(std::span<const double> samples,
                                                                double analytic) {
    if (samples.empty())
        throw EmptySample("estimate_direction_fidelity: no samples");
    std::vector<double> f(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i)
        f[i] = 0.5 * (1.0 + samples[i]);
    return summarize(f, analytic);
}

/// Bound on |<A|U|B>|^2: (sum_j sqrt(2j+1) |a_j|)^2, by Cauchy-Schwarz in
/// each block and unit-norm b blocks.
[[nodiscard]] inline double frame_envelope(const frame::FrameSignal &alice) {
    double s = 0.0;
    for (int j = 0; j < alice.n; ++j)
        s += std::sqrt(2.0 * j + 1.0) * frame::detail::block_norm(alice.amplitudes, j);
    return s * s;
}

struct FrameSampleRun {
    std::vector<EulerAngles> samples;
    std::uint64_t proposals = 0;
    double envelope = 0.0;
    double max_density_ratio = 0.0; // largest density / envelope seen
};

/// Rejection sampling of Bob's error angles from |<A|U(g)|B>|^2 against the
/// Haar measure, with Haar-uniform proposals.
[[nodiscard]] inline FrameSampleRun sample_frame_run(const frame::FrameSignal &alice,
                                                     const frame::FiducialVector &bob,
                                                     const SimConfig &config) {
    if (config.shots < 1)
        throw EmptySample("sample_frame_outcomes: shots must be >= 1");
    if (alice.n != bob.n)
        throw InvalidIndex("sample_frame_outcomes: mismatched levels");
    const double envelope = frame_envelope(alice);
    const double two_pi = 2.0 * std::numbers::pi;
    FrameSampleRun run;
    run.envelope = envelope;
    run.samples.resize(config.shots);
    std::vector<std::uint64_t> proposals(config.shots, 0);
    std::vector<double> worst(config.shots, 0.0);
    parallel_for(config.shots, config.workers, [&](std::size_t i) {
        CounterRng rng(config.seed, i);
        for (std::uint64_t tries = 1;; ++tries) {
            const double alpha = two_pi * rng.uniform();
            const double cos_beta = 2.0 * rng.uniform() - 1.0;
            const double gamma = two_pi * rng.uniform();
            const EulerAngles g{alpha, std::acos(cos_beta), gamma};
            const double density = std::norm(frame::overlap(alice, bob, g));
            worst[i] = std::max(worst[i], density / envelope);
            if (density > envelope * (1.0 + 1e-9))
                throw EnvelopeViolation("sample_frame_outcomes: density " +
                                        std::to_string(density) + " exceeds envelope " +
                                        std::to_string(envelope));
            if (rng.uniform() * envelope < density) {
                run.samples[i] = g;
                proposals[i] = tries;
                return;
            }
            if (tries > 100'000'000)
                throw NonConvergence("sample_frame_outcomes: acceptance rate collapsed");
        }
    });
    for (std::size_t i = 0; i < config.shots; ++i) {
        run.proposals += proposals[i];
        run.max_density_ratio = std::max(run.max_density_ratio, worst[i]);
    }
    return run;
}

[[nodiscard]] inline std::vector<EulerAngles>
sample_frame_outcomes(const frame::FrameSignal &alice, const frame::FiducialVector &bob,
                      const SimConfig &config) {
    return sample_frame_run(alice, bob, config).samples;
}

/// Per-sample merit: cos(beta) for z, (1 + cos beta) cos(alpha + gamma) for
/// xy, 1 + 2 cos(Omega) for all axes, sum_k w_k R_kk when weighted.
[[nodiscard]] inline double frame_merit_sample(const EulerAngles &g, const frame::MeritSpec &spec) {
    switch (spec.kind) {
    case frame::MeritKind::ZAxis:
        return std::cos(g.beta);
    case frame::MeritKind::XYAxes:
        return (1.0 + std::cos(g.beta)) * std::cos(g.alpha + g.gamma);
    case frame::MeritKind::AllAxes:
        return 1.0 + 2.0 * std::cos(rotation_angle(classical_rotation(g)));
    case frame::MeritKind::Weighted: {
        const auto r = classical_rotation(g);
        return spec.merit_from_axes({r(0, 0), r(1, 1), r(2, 2)});
    }
    }
    return 0.0;
}

[[nodiscard]] inline EstimateReport estimate_frame_merit(std::span<const EulerAngles> samples,
                                                         const frame::MeritSpec &spec,
                                                         double analytic) {
    if (samples.empty())
        throw EmptySample("estimate_frame_merit: no samples");
    std::vector<double> v(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i)
        v[i] = frame_merit_sample(samples[i], spec);
    return summarize(v, analytic);
}

} // namespace spinframe::simulate
