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

// Command-line front end. run_cli() does all the work against caller
// supplied streams so it can be driven in-process; tools/spinframe.cpp is
// a thin main() around it.
//
// Exit codes: 0 success, 2 usage error, 3 numerical failure (the solver did
// not converge), 4 unsupported merit weights.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "direction.hpp"
#include "errors.hpp"
#include "frame.hpp"
#include "half_int.hpp"
#include "parallel.hpp"
#include "simulate.hpp"

namespace spinframe::cli {

inline constexpr const char *kToolVersion = "0.1.0";

enum ExitCode : int { kOk = 0, kUsage = 2, kNumerical = 3, kUnsupported = 4 };

using Cell = std::variant<long long, double, bool, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

/// Usage error tied to a flag; the message always names it.
class UsageError : public Error {
  public:
    UsageError(const std::string &flag, const std::string &what)
        : Error(flag + ": " + what) {}
};

namespace detail {

using json = nlohmann::ordered_json;

[[nodiscard]] inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

[[nodiscard]] inline std::string csv_cell(const Cell &c) {
    return std::visit(
        [](const auto &v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>)
                return format_double(v);
            else if constexpr (std::is_same_v<T, bool>)
                return v ? "true" : "false";
            else if constexpr (std::is_same_v<T, long long>)
                return std::to_string(v);
            else
                return v;
        },
        c);
}

[[nodiscard]] inline json json_cell(const Cell &c) {
    return std::visit(
        [](const auto &v) -> json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>)
                return std::isfinite(v) ? json(v) : json(nullptr);
            else
                return json(v);
        },
        c);
}

inline void write_csv(const Table &t, std::ostream &os) {
    for (std::size_t i = 0; i < t.columns.size(); ++i)
        os << (i ? "," : "") << t.columns[i];
    os << '\n';
    for (const auto &row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            os << (i ? "," : "") << csv_cell(row[i]);
        os << '\n';
    }
}

inline void write_json(const Table &t, std::ostream &os) {
    json arr = json::array();
    for (const auto &row : t.rows) {
        json obj = json::object();
        for (std::size_t i = 0; i < row.size(); ++i)
            obj[t.columns[i]] = json_cell(row[i]);
        arr.push_back(std::move(obj));
    }
    os << arr.dump(2) << '\n';
}

[[nodiscard]] inline std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

/// Options shared by every leaf command.
struct Common {
    std::string format = "csv";
    std::string out;
    unsigned workers = 0; // 0 = hardware concurrency
};

struct Result {
    Table table;
    json parameters = json::object();
    std::uint64_t seed = 0;
    int exit_code = kOk;
};

inline void add_common(CLI::App *cmd, Common &c) {
    cmd->add_option("--format", c.format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    cmd->add_option("--out", c.out, "Output file (stdout when absent)");
    cmd->add_option("--workers", c.workers, "Worker threads (0 = all cores)");
}

[[nodiscard]] inline unsigned workers_of(const Common &c) {
    return c.workers == 0 ? default_workers() : worker_count(c.workers);
}

[[nodiscard]] inline HalfInt parse_m(const std::string &text, int spins, bool given) {
    if (!given)
        return direction::lowest_m(spins);
    const auto m = HalfInt::parse(text);
    if (!m)
        throw UsageError("--m", "'" + text + "' is not an integer or half-integer");
    if (!direction::is_admissible(spins, *m))
        throw UsageError("--m", "m=" + m->str() + " is not admissible for N=" +
                                    std::to_string(spins) +
                                    " (need 0 <= m <= N/2 with N/2 - m integral)");
    return *m;
}

inline void require_positive(long long v, const std::string &flag) {
    if (v < 1)
        throw UsageError(flag, "must be a positive integer");
}

[[nodiscard]] inline frame::MeritSpec merit_of(const std::string &name) {
    if (name == "z")
        return frame::MeritSpec::z_axis();
    if (name == "xy")
        return frame::MeritSpec::xy_axes();
    if (name == "xyz")
        return frame::MeritSpec::all_axes();
    throw UsageError("--merit", "expected z, xy or xyz");
}

inline const std::vector<std::string> kDirectionColumns{
    "N", "m", "fidelity", "one_minus_F", "mp_baseline", "bessel_limit", "ratio"};

inline std::vector<Cell> direction_row(const direction::SweepRow &r) {
    return {static_cast<long long>(r.spins), r.m.value(), r.fidelity, r.one_minus_F,
            r.mp_baseline, r.bessel_limit, r.ratio};
}

inline const std::vector<std::string> kFrameColumns{
    "n", "merit_kind", "merit", "cos_wx", "cos_wy", "cos_wz",
    "mse_total", "iters", "converged", "restarts_used"};

inline std::vector<Cell> frame_row(int n, const frame::FrameSolution &s) {
    return {static_cast<long long>(n),
            frame::kind_name(s.spec.kind),
            s.merit,
            s.per_axis[0],
            s.per_axis[1],
            s.per_axis[2],
            s.mse_total,
            static_cast<long long>(s.iterations),
            s.converged,
            static_cast<long long>(s.restarts_used)};
}

inline const std::vector<std::string> kSimulateColumns{
    "mean", "stderr", "analytic", "sigma_distance", "shots", "seed", "flag"};

inline std::vector<Cell> simulate_row(const simulate::EstimateReport &r, std::uint64_t seed) {
    return {r.mean,
            r.std_error,
            r.analytic,
            r.sigma_distance,
            static_cast<long long>(r.shots),
            static_cast<long long>(seed),
            std::string(r.sigma_distance > 4.0 ? "outlier" : "ok")};
}

/// Alternating-optimiser flags.
struct OptFlags {
    int restarts = 5;
    double tol = 1e-10;
    int max_iters = 500;
    std::uint64_t seed = 0;
};

inline void add_opt_flags(CLI::App *cmd, OptFlags &f) {
    cmd->add_option("--restarts", f.restarts, "Random restarts besides the uniform start")
        ->capture_default_str();
    cmd->add_option("--tol", f.tol, "Fixed-point tolerance")->capture_default_str();
    cmd->add_option("--max-iters", f.max_iters, "Iteration cap per start")->capture_default_str();
    cmd->add_option("--seed", f.seed, "Seed for the random restarts")->capture_default_str();
}

[[nodiscard]] inline frame::AlternatingOptions to_options(const OptFlags &f, unsigned workers) {
    if (f.restarts < 0)
        throw UsageError("--restarts", "must be >= 0");
    if (!(f.tol > 0.0))
        throw UsageError("--tol", "must be positive");
    require_positive(f.max_iters, "--max-iters");
    frame::AlternatingOptions o;
    o.restarts = f.restarts;
    o.tol = f.tol;
    o.max_iters = f.max_iters;
    o.seed = f.seed;
    o.workers = workers;
    return o;
}

inline void put_opt_flags(json &p, const OptFlags &f) {
    p["restarts"] = f.restarts;
    p["tol"] = f.tol;
    p["max_iters"] = f.max_iters;
    p["seed"] = f.seed;
}

/// Reads "x y z [w]" lines; commas or whitespace separate fields, '#'
/// starts a comment, and a missing weight means 1.
inline void read_directions(const std::string &path, std::vector<std::array<double, 3>> &dirs,
                            std::vector<double> &weights) {
    std::ifstream in(path);
    if (!in)
        throw UsageError("--dirs", "cannot open '" + path + "'");
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        for (char &ch : line)
            if (ch == ',')
                ch = ' ';
        std::istringstream ss(line);
        std::vector<double> v;
        double x;
        while (ss >> x)
            v.push_back(x);
        if (!ss.eof())
            throw UsageError("--dirs", "line " + std::to_string(lineno) + ": not a number");
        if (v.empty())
            continue;
        if (v.size() != 3 && v.size() != 4)
            throw UsageError("--dirs", "line " + std::to_string(lineno) +
                                           ": expected 'x y z [weight]'");
        dirs.push_back({v[0], v[1], v[2]});
        weights.push_back(v.size() == 4 ? v[3] : 1.0);
    }
    if (dirs.empty())
        throw UsageError("--dirs", "no directions in '" + path + "'");
}

} // namespace detail

/// Runs one command line (args excludes the program name). Tables go to
/// `out` unless --out is given; diagnostics go to `err`.
inline int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    using detail::json;
    CLI::App app{"Quantum reference-direction and reference-frame transmission toolkit",
                 "spinframe"};
    app.set_version_flag("--version", std::string(kToolVersion));
    app.require_subcommand(1);

    detail::Common common;
    std::function<detail::Result()> action;
    std::string command;

    // direction
    auto *dir = app.add_subcommand("direction", "Transmit a single direction with N spins");
    dir->require_subcommand(1);

    int n_spins = 0;
    std::string m_text;
    auto *solve = dir->add_subcommand("solve", "Optimal signal for one N and m");
    solve->add_option("--N", n_spins, "Number of spins")->required();
    auto *solve_m = solve->add_option("--m", m_text, "Magnetic index (default 0 or 1/2)");
    detail::add_common(solve, common);
    solve->callback([&] {
        command = "direction solve";
        action = [&] {
            detail::require_positive(n_spins, "--N");
            const auto m = detail::parse_m(m_text, n_spins, solve_m->count() > 0);
            detail::Result r;
            r.table.columns = detail::kDirectionColumns;
            r.table.rows.push_back(detail::direction_row(direction::solve_row(n_spins, m)));
            r.parameters = {{"N", n_spins}, {"m", m.str()}};
            return r;
        };
    });

    int n_min = 0, n_max = 0, step = 1;
    bool include_odd = false;
    auto *sweep = dir->add_subcommand("sweep", "Optimal fidelity over a range of N");
    sweep->add_option("--N-min", n_min, "Smallest N")->required();
    sweep->add_option("--N-max", n_max, "Largest N")->required();
    sweep->add_option("--step", step, "Stride in N")->capture_default_str();
    sweep->add_flag("--include-odd", include_odd, "Also solve odd N (at m = 1/2)");
    detail::add_common(sweep, common);
    sweep->callback([&] {
        command = "direction sweep";
        action = [&] {
            detail::require_positive(n_min, "--N-min");
            if (n_max < n_min)
                throw UsageError("--N-max", "must be >= --N-min");
            detail::require_positive(step, "--step");
            detail::Result r;
            r.table.columns = detail::kDirectionColumns;
            for (const auto &row :
                 direction::sweep(n_min, n_max, step, include_odd, detail::workers_of(common)))
                r.table.rows.push_back(detail::direction_row(row));
            r.parameters = {{"N_min", n_min}, {"N_max", n_max}, {"step", step},
                            {"include_odd", include_odd}};
            return r;
        };
    });

    int quad_order = 40, phi_points = 64;
    auto *povm = dir->add_subcommand("povm-check", "Numerical completeness of the measurement");
    povm->add_option("--N", n_spins, "Number of spins")->required();
    auto *povm_m = povm->add_option("--m", m_text, "Magnetic index (default 0 or 1/2)");
    povm->add_option("--quad-order", quad_order, "Gauss-Legendre order in cos(theta)")
        ->capture_default_str();
    povm->add_option("--phi-points", phi_points, "Uniform points in phi")->capture_default_str();
    detail::add_common(povm, common);
    povm->callback([&] {
        command = "direction povm-check";
        action = [&] {
            detail::require_positive(n_spins, "--N");
            const auto m = detail::parse_m(m_text, n_spins, povm_m->count() > 0);
            detail::require_positive(quad_order, "--quad-order");
            detail::require_positive(phi_points, "--phi-points");
            detail::Result r;
            r.table.columns = {"N", "m", "quad_order", "phi_points", "max_abs_deviation"};
            r.table.rows.push_back(
                {static_cast<long long>(n_spins), m.value(), static_cast<long long>(quad_order),
                 static_cast<long long>(phi_points),
                 direction::povm_completeness_check(n_spins, m, quad_order, phi_points)});
            r.parameters = {{"N", n_spins}, {"m", m.str()}, {"quad_order", quad_order},
                            {"phi_points", phi_points}};
            return r;
        };
    });

    // frame
    auto *frm = app.add_subcommand("frame", "Transmit a full Cartesian frame");
    frm->require_subcommand(1);

    int level = 0;
    std::string merit_name;
    detail::OptFlags opt_flags;
    auto *optimize = frm->add_subcommand("optimize", "Alternating optimisation of the signal");
    optimize->add_option("--n", level, "Principal quantum number (j = 0..n-1)")->required();
    optimize->add_option("--merit", merit_name, "Axes to reward")
        ->required()
        ->check(CLI::IsMember({"z", "xy", "xyz"}));
    detail::add_opt_flags(optimize, opt_flags);
    detail::add_common(optimize, common);
    optimize->callback([&] {
        command = "frame optimize";
        action = [&] {
            detail::require_positive(level, "--n");
            const auto spec = detail::merit_of(merit_name);
            const auto sol = frame::alternating_optimize(
                level, spec, detail::to_options(opt_flags, detail::workers_of(common)));
            detail::Result r;
            r.table.columns = detail::kFrameColumns;
            r.table.rows.push_back(detail::frame_row(level, sol));
            r.parameters = {{"n", level}, {"merit", merit_name}};
            detail::put_opt_flags(r.parameters, opt_flags);
            r.seed = opt_flags.seed;
            r.exit_code = sol.converged ? kOk : kNumerical;
            return r;
        };
    });

    int split_spins = 0;
    auto *split = frm->add_subcommand("compare-split", "Split versus collective use of N spins");
    split->add_option("--N", split_spins, "Number of spins (multiple of 4)")->required();
    detail::add_opt_flags(split, opt_flags);
    detail::add_common(split, common);
    split->callback([&] {
        command = "frame compare-split";
        action = [&] {
            if (split_spins < 4 || split_spins % 4 != 0)
                throw UsageError("--N", "must be a multiple of 4, at least 4");
            const auto cmp = frame::split_strategy_compare(
                split_spins, detail::to_options(opt_flags, detail::workers_of(common)));
            detail::Result r;
            r.table.columns = {"N", "split_per_axis_mse", "collective_per_axis_mse",
                               "bbm_reference"};
            r.table.rows.push_back({static_cast<long long>(split_spins), cmp.split_per_axis_mse,
                                    cmp.collective_per_axis_mse, cmp.bbm_reference});
            r.parameters = {{"N", split_spins}};
            detail::put_opt_flags(r.parameters, opt_flags);
            r.seed = opt_flags.seed;
            return r;
        };
    });

    std::string dirs_path;
    int weighted_level = 3;
    auto *weighted = frm->add_subcommand("weighted", "Optimise for a weighted set of directions");
    weighted->add_option("--dirs", dirs_path, "File of 'x y z [weight]' lines")->required();
    weighted->add_option("--n", weighted_level, "Principal quantum number")->capture_default_str();
    detail::add_opt_flags(weighted, opt_flags);
    detail::add_common(weighted, common);
    weighted->callback([&] {
        command = "frame weighted";
        action = [&] {
            detail::require_positive(weighted_level, "--n");
            std::vector<std::array<double, 3>> dirs;
            std::vector<double> weights;
            detail::read_directions(dirs_path, dirs, weights);
            frame::WeightedReduction red;
            try {
                red = frame::weighted_merit_reduction(dirs, weights);
            } catch (const InvalidIndex &e) {
                throw UsageError("--dirs", e.what());
            }
            const auto spec = frame::reduce_to_merit(red).first;
            const auto sol = frame::alternating_optimize(
                weighted_level, spec, detail::to_options(opt_flags, detail::workers_of(common)));
            detail::Result r;
            r.table.columns = detail::kFrameColumns;
            r.table.columns.insert(r.table.columns.end(), {"w_x", "w_y", "w_z"});
            auto row = detail::frame_row(weighted_level, sol);
            row.insert(row.end(), {spec.weights[0], spec.weights[1], spec.weights[2]});
            r.table.rows.push_back(std::move(row));
            r.parameters = {{"dirs", dirs_path}, {"n", weighted_level}};
            detail::put_opt_flags(r.parameters, opt_flags);
            r.seed = opt_flags.seed;
            r.exit_code = sol.converged ? kOk : kNumerical;
            return r;
        };
    });

    // simulate
    auto *sim = app.add_subcommand("simulate", "Monte Carlo check of the analytic results");
    sim->require_subcommand(1);

    std::uint64_t shots = 0, sim_seed = 0;
    auto *sim_dir = sim->add_subcommand("direction", "Sample the direction protocol");
    sim_dir->add_option("--N", n_spins, "Number of spins")->required();
    auto *sim_dir_m = sim_dir->add_option("--m", m_text, "Magnetic index (default 0 or 1/2)");
    sim_dir->add_option("--shots", shots, "Number of shots")->required();
    sim_dir->add_option("--seed", sim_seed, "Random seed")->required();
    detail::add_common(sim_dir, common);
    sim_dir->callback([&] {
        command = "simulate direction";
        action = [&] {
            detail::require_positive(n_spins, "--N");
            const auto m = detail::parse_m(m_text, n_spins, sim_dir_m->count() > 0);
            if (shots < 1)
                throw UsageError("--shots", "must be a positive integer");
            const auto sol = direction::solve_optimal(n_spins, m);
            const auto xs = simulate::sample_direction_outcomes(
                sol.signal, {shots, sim_seed, detail::workers_of(common)});
            detail::Result r;
            r.table.columns = detail::kSimulateColumns;
            r.table.rows.push_back(detail::simulate_row(
                simulate::estimate_direction_fidelity(xs, sol.fidelity), sim_seed));
            r.parameters = {{"N", n_spins}, {"m", m.str()}, {"shots", shots}};
            r.seed = sim_seed;
            return r;
        };
    });

    auto *sim_frame = sim->add_subcommand("frame", "Sample the frame protocol");
    sim_frame->add_option("--n", level, "Principal quantum number")->required();
    sim_frame->add_option("--merit", merit_name, "Axes to reward")
        ->required()
        ->check(CLI::IsMember({"z", "xy", "xyz"}));
    sim_frame->add_option("--shots", shots, "Number of shots")->required();
    sim_frame->add_option("--seed", sim_seed, "Random seed")->required();
    detail::add_common(sim_frame, common);
    sim_frame->callback([&] {
        command = "simulate frame";
        action = [&] {
            detail::require_positive(level, "--n");
            if (shots < 1)
                throw UsageError("--shots", "must be a positive integer");
            const auto spec = detail::merit_of(merit_name);
            const unsigned workers = detail::workers_of(common);
            frame::AlternatingOptions o;
            o.workers = workers;
            const auto sol = frame::alternating_optimize(level, spec, o);
            const auto samples =
                simulate::sample_frame_outcomes(sol.alice, sol.bob, {shots, sim_seed, workers});
            detail::Result r;
            r.table.columns = detail::kSimulateColumns;
            r.table.rows.push_back(detail::simulate_row(
                simulate::estimate_frame_merit(samples, spec, sol.merit), sim_seed));
            r.parameters = {{"n", level}, {"merit", merit_name}, {"shots", shots}};
            r.seed = sim_seed;
            return r;
        };
    });

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    detail::Result result;
    try {
        result = action();
    } catch (const UsageError &e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const UnsupportedWeights &e) {
        err << "error: " << e.what() << '\n';
        return kUnsupported;
    } catch (const NonConvergence &e) {
        err << "error: " << e.what() << '\n';
        return kNumerical;
    } catch (const InvalidIndex &e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const Error &e) {
        err << "error: " << e.what() << '\n';
        return kNumerical;
    }

    auto emit = [&](std::ostream &os) {
        if (common.format == "json")
            detail::write_json(result.table, os);
        else
            detail::write_csv(result.table, os);
    };
    if (common.out.empty()) {
        emit(out);
    } else {
        std::ofstream file(common.out);
        if (!file) {
            err << "error: --out: cannot write '" << common.out << "'\n";
            return kUsage;
        }
        emit(file);
        json manifest = {{"command", command},
                         {"parameters", result.parameters},
                         {"seed", result.seed},
                         {"tool_version", kToolVersion},
                         {"timestamp", detail::utc_timestamp()},
                         {"format", common.format}};
        std::ofstream mf(common.out + ".manifest.json");
        if (!mf) {
            err << "error: --out: cannot write '" << common.out << ".manifest.json'\n";
            return kUsage;
        }
        mf << manifest.dump(2) << '\n';
    }
    if (result.exit_code == kNumerical)
        err << "warning: the alternating optimisation hit --max-iters before converging\n";
    return result.exit_code;
}

} // namespace spinframe::cli
