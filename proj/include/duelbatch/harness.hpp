#pragma once

// Experiment runner: repeated seeded trials of one policy configuration,
// fanned out over worker threads, merged deterministically (trial k always
// uses seed base_seed + k, and aggregation walks trials in seed order, so
// serial and parallel execution produce identical bytes).
//
// Outputs: results CSV (t, mean regret, sample std), a JSON metadata
// sidecar, and optional SVG charts with external-trace and shape-only
// bound overlays.

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "duelbatch/algos.hpp"
#include "duelbatch/bounds.hpp"
#include "duelbatch/env.hpp"
#include "duelbatch/errors.hpp"
#include "duelbatch/prefmat.hpp"
#include "duelbatch/svg.hpp"

namespace duelbatch {

// ---------------------------------------------------------------------------
// Configuration

struct MatrixSource {
    std::string csv_path;  // non-empty: load from file and ignore the generator fields
    SyntheticKind kind = SyntheticKind::UniformGap;
    Arm k = 10;
    double eps = 0.2;
    std::uint64_t gen_seed = 1;

    bool from_file() const noexcept { return !csv_path.empty(); }
};

inline PreferenceMatrix realize(const MatrixSource& src) {
    if (src.from_file()) return load_csv(src.csv_path);
    return generate_synthetic(src.kind, src.k, src.eps, src.gen_seed);
}

// Round budget: an explicit value, or "auto" = floor(log_base T) + offset.
struct BSpec {
    bool automatic = true;
    unsigned value = 0;   // explicit B
    int offset = 0;       // "auto+k"
    double base = 2.0;    // log base for auto mode (2 or e)
};

inline BSpec parse_bspec(const std::string& s) {
    BSpec b;
    if (s.rfind("auto", 0) == 0) {
        b.automatic = true;
        const std::string rest = s.substr(4);
        if (!rest.empty()) {
            if (rest[0] != '+' && rest[0] != '-')
                throw UsageError("bad B spec (want N, auto, or auto+k): " + s);
            b.offset = std::stoi(rest);
        }
        return b;
    }
    try {
        const long v = std::stol(s);
        if (v < 1) throw UsageError("B must be >= 1");
        b.automatic = false;
        b.value = static_cast<unsigned>(v);
    } catch (const std::invalid_argument&) {
        throw UsageError("bad B spec (want N, auto, or auto+k): " + s);
    }
    return b;
}

inline unsigned resolve_b(const BSpec& b, std::uint64_t t_budget) {
    if (!b.automatic) return b.value;
    const double raw = std::floor(std::log(static_cast<double>(t_budget)) / std::log(b.base));
    const long v = static_cast<long>(raw) + b.offset;
    return static_cast<unsigned>(std::max(1L, v));
}

struct RunConfig {
    MatrixSource source;
    Algorithm algo = Algorithm::C2B;
    std::uint64_t t_budget = 100000;
    BSpec b;
    unsigned repeats = 20;
    std::uint64_t base_seed = 1;
    std::optional<double> f_override;
    std::size_t grid_points = 512;
    std::vector<std::uint64_t> extra_checkpoints;
    bool timing = false;  // include wall-clock in the metadata sidecar
};

// ---------------------------------------------------------------------------
// Aggregation

struct TrialSummary {
    std::uint64_t seed = 0;
    double final_regret = 0.0;
    unsigned rounds_used = 0;
    Arm declared_winner = 0;
    bool winner_confirmed = false;
    bool best_arm_eliminated = false;  // only meaningful when a Condorcet winner exists
};

struct AggregateTrace {
    std::vector<std::uint64_t> t;
    std::vector<double> mean_regret;
    std::vector<double> std_regret;  // sample standard deviation (0 for a single trial)
    std::vector<TrialSummary> trials;
};

struct ExperimentResult {
    unsigned resolved_b = 1;
    double q = 1.0;
    std::optional<Arm> condorcet_winner;
    std::optional<double> delta_min;
    std::vector<std::string> warnings;
    AggregateTrace trace;
    double wall_seconds = 0.0;
};

// DUELBATCH_THREADS caps the worker count; 0 or unset means one worker per
// hardware thread.
inline unsigned worker_count() {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (const char* env = std::getenv("DUELBATCH_THREADS")) {
        const long v = std::atol(env);
        if (v > 0) return static_cast<unsigned>(v);
    }
    return hw;
}

inline ExperimentResult run_experiment(const RunConfig& cfg) {
    if (cfg.repeats < 1) throw ConfigError("run_experiment: repeats >= 1 required");
    if (cfg.grid_points == 0 && cfg.extra_checkpoints.empty())
        throw ConfigError("run_experiment: need at least one checkpoint");
    const auto start = std::chrono::steady_clock::now();

    const PreferenceMatrix matrix = realize(cfg.source);
    if (cfg.t_budget < matrix.size())
        throw ConfigError("run_experiment: T must be at least K");

    ExperimentResult out;
    const GapProfile profile = condorcet_analysis(matrix);
    out.condorcet_winner = profile.winner;
    out.delta_min = profile.delta_min;
    if (!profile.winner)
        out.warnings.push_back("matrix has no Condorcet winner; regret is reported as zero");

    out.resolved_b = resolve_b(cfg.b, cfg.t_budget);
    out.q = std::pow(static_cast<double>(cfg.t_budget), 1.0 / static_cast<double>(out.resolved_b));
    if (out.q < 2.0)
        out.warnings.push_back("q = T^(1/B) < 2; the analysis assumes q >= 2 (run proceeds)");

    RunOptions opt;
    opt.f_override = cfg.f_override;
    opt.grid_points = cfg.grid_points;
    opt.extra_checkpoints = cfg.extra_checkpoints;

    std::vector<RunResult> results(cfg.repeats);
    const unsigned workers =
        std::max(1u, std::min(worker_count(), cfg.repeats));
    std::vector<std::exception_ptr> errors(workers);
    auto work = [&](unsigned w) {
        try {
            for (unsigned k = w; k < cfg.repeats; k += workers) {
                results[k] = run_policy(cfg.algo, matrix, cfg.t_budget, out.resolved_b,
                                        cfg.base_seed + k, opt);
            }
        } catch (...) {
            errors[w] = std::current_exception();
        }
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
        for (auto& th : pool) th.join();
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    // Merge in seed order onto the shared checkpoint grid.
    AggregateTrace& tr = out.trace;
    tr.t = results.front().grid;
    tr.mean_regret.assign(tr.t.size(), 0.0);
    tr.std_regret.assign(tr.t.size(), 0.0);
    for (unsigned k = 0; k < cfg.repeats; ++k) {
        const RunResult& r = results[k];
        for (std::size_t g = 0; g < tr.t.size(); ++g) tr.mean_regret[g] += r.grid_regret[g];
        TrialSummary s;
        s.seed = cfg.base_seed + k;
        s.final_regret = r.final_regret;
        s.rounds_used = static_cast<unsigned>(r.rounds.size());
        s.declared_winner = r.declared_winner;
        s.winner_confirmed = r.winner_confirmed;
        if (profile.winner) {
            for (const auto& e : r.eliminations)
                if (e.arm == *profile.winner) s.best_arm_eliminated = true;
        }
        tr.trials.push_back(s);
    }
    const double n = static_cast<double>(cfg.repeats);
    for (std::size_t g = 0; g < tr.t.size(); ++g) tr.mean_regret[g] /= n;
    if (cfg.repeats > 1) {
        for (std::size_t g = 0; g < tr.t.size(); ++g) {
            double acc = 0.0;
            for (const RunResult& r : results) {
                const double d = r.grid_regret[g] - tr.mean_regret[g];
                acc += d * d;
            }
            tr.std_regret[g] = std::sqrt(acc / (n - 1.0));
        }
    }

    out.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

// ---------------------------------------------------------------------------
// Emission

inline void emit_csv(const AggregateTrace& tr, std::ostream& out) {
    if (tr.t.empty()) throw UsageError("emit_csv: empty trace");
    char buf[96];
    out << "t,mean_regret,std_regret\n";
    for (std::size_t g = 0; g < tr.t.size(); ++g) {
        std::snprintf(buf, sizeof buf, "%llu,%.9g,%.9g\n",
                      static_cast<unsigned long long>(tr.t[g]), tr.mean_regret[g],
                      tr.std_regret[g]);
        out << buf;
    }
}

inline void emit_csv(const AggregateTrace& tr, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write results CSV: " + path);
    emit_csv(tr, out);
}

inline nlohmann::json metadata_json(const RunConfig& cfg, const ExperimentResult& res) {
    nlohmann::json j;
    nlohmann::json src;
    if (cfg.source.from_file()) {
        src["csv_path"] = cfg.source.csv_path;
    } else {
        src["kind"] = to_string(cfg.source.kind);
        src["K"] = cfg.source.k;
        src["eps"] = cfg.source.eps;
        src["gen_seed"] = cfg.source.gen_seed;
    }
    j["config"] = {
        {"matrix", src},
        {"algorithm", to_string(cfg.algo)},
        {"T", cfg.t_budget},
        {"B", res.resolved_b},
        {"b_mode", cfg.b.automatic ? "auto" : "explicit"},
        {"q", res.q},
        {"repeats", cfg.repeats},
        {"base_seed", cfg.base_seed},
        {"grid_points", cfg.grid_points},
    };
    if (cfg.f_override) j["config"]["f_override"] = *cfg.f_override;
    if (res.condorcet_winner) j["condorcet_winner"] = *res.condorcet_winner;
    if (res.delta_min) j["delta_min"] = *res.delta_min;
    j["warnings"] = res.warnings;

    double mean_final = 0.0;
    nlohmann::json per_seed = nlohmann::json::array();
    for (const auto& s : res.trace.trials) {
        per_seed.push_back({{"seed", s.seed},
                            {"final_regret", s.final_regret},
                            {"rounds_used", s.rounds_used},
                            {"declared_champion", s.declared_winner},
                            {"champion_confirmed", s.winner_confirmed},
                            {"best_arm_eliminated", s.best_arm_eliminated}});
        mean_final += s.final_regret;
    }
    j["per_seed"] = per_seed;
    j["mean_final_regret"] = mean_final / static_cast<double>(res.trace.trials.size());
    if (cfg.timing) j["wall_clock_seconds"] = res.wall_seconds;
    return j;
}

inline void emit_json(const RunConfig& cfg, const ExperimentResult& res, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write metadata JSON: " + path);
    out << metadata_json(cfg, res).dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// Overlays and charts

struct NamedTrace {
    std::string label;
    std::vector<double> t;
    std::vector<double> value;
    bool dashed = false;
};

inline NamedTrace to_named(const AggregateTrace& tr, std::string label) {
    NamedTrace n;
    n.label = std::move(label);
    n.t.assign(tr.t.begin(), tr.t.end());
    n.value = tr.mean_regret;
    return n;
}

// Piecewise-linear resampling onto a target grid; values outside the source
// range clamp to the nearest endpoint.
inline std::vector<double> resample_linear(const std::vector<double>& xs,
                                           const std::vector<double>& ys,
                                           const std::vector<double>& target) {
    if (xs.empty() || xs.size() != ys.size())
        throw UsageError("resample_linear: bad source series");
    std::vector<double> out;
    out.reserve(target.size());
    for (double x : target) {
        if (x <= xs.front()) {
            out.push_back(ys.front());
        } else if (x >= xs.back()) {
            out.push_back(ys.back());
        } else {
            const auto it = std::upper_bound(xs.begin(), xs.end(), x);
            const std::size_t hi = static_cast<std::size_t>(it - xs.begin());
            const std::size_t lo = hi - 1;
            const double f = (x - xs[lo]) / (xs[hi] - xs[lo]);
            out.push_back(ys[lo] + f * (ys[hi] - ys[lo]));
        }
    }
    return out;
}

// Reads "t,value[,...]" rows; a leading "t,..." header is skipped.
inline NamedTrace load_trace_csv(const std::string& path, const std::string& label = "") {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open trace CSV: " + path);
    NamedTrace tr;
    tr.label = label.empty() ? path : label;
    tr.dashed = true;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (lineno == 1 && !line.empty() && !std::isdigit(static_cast<unsigned char>(line[0])))
            continue;  // header
        std::istringstream ss(line);
        std::string a, b;
        if (!std::getline(ss, a, ',') || !std::getline(ss, b, ','))
            throw ParseError(path + ":" + std::to_string(lineno) + ": want t,value");
        try {
            tr.t.push_back(std::stod(a));
            tr.value.push_back(std::stod(b));
        } catch (const std::exception&) {
            throw ParseError(path + ":" + std::to_string(lineno) + ": bad number");
        }
    }
    if (tr.t.empty()) throw ParseError(path + ": no data rows");
    return tr;
}

struct PlotOptions {
    std::string title;
    bool log_x = false;
};

// Overlays with grids that do not match the first trace are resampled onto
// its grid.
inline void emit_svg(const std::vector<NamedTrace>& traces,
                     const std::vector<NamedTrace>& overlays, const std::string& path,
                     const PlotOptions& popt = {}) {
    if (traces.empty()) throw UsageError("emit_svg: no traces");
    std::vector<svg::Series> series;
    for (const auto& tr : traces)
        series.push_back(svg::Series{tr.label, tr.t, tr.value, tr.dashed});
    const std::vector<double>& native = traces.front().t;
    for (const auto& ov : overlays) {
        svg::Series s{ov.label, native, resample_linear(ov.t, ov.value, native), true};
        series.push_back(std::move(s));
    }
    svg::ChartOptions copt;
    copt.title = popt.title;
    copt.log_x = popt.log_x;
    svg::write_chart(path, series, copt);
}

}  // namespace duelbatch
