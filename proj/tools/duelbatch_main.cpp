// duelbatch: batched dueling-bandit experiments from the command line.
//
//   run    one experiment (repeated seeded trials, aggregated trace)
//   sweep  grid over algorithms and/or round budgets
//   plot   render results CSVs (plus optional overlays) to SVG
//   bound  print analysis quantities for a configuration
//   gen    write a synthetic preference matrix as CSV
//
// Exit codes: 0 success, 1 usage error, 2 runtime error.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "duelbatch/algos.hpp"
#include "duelbatch/bounds.hpp"
#include "duelbatch/harness.hpp"
#include "duelbatch/prefmat.hpp"

namespace {

using namespace duelbatch;

struct MatrixFlags {
    std::string path;
    std::string kind = "uniform-gap";
    unsigned k = 10;
    double eps = 0.2;
    std::uint64_t gen_seed = 1;

    void attach(CLI::App* cmd) {
        cmd->add_option("--matrix", path, "preference matrix CSV (overrides the generator)");
        cmd->add_option("--kind", kind, "generator kind: uniform-gap | linear-order")
            ->default_str(kind);
        cmd->add_option("--K", k, "number of arms for the generator")->default_str("10");
        cmd->add_option("--eps", eps, "generator gap parameter")->default_str("0.2");
        cmd->add_option("--gen-seed", gen_seed, "generator seed")->default_str("1");
    }

    MatrixSource source() const {
        MatrixSource src;
        if (!path.empty()) {
            src.csv_path = path;
        } else {
            src.kind = parse_synthetic_kind(kind);
            src.k = k;
            src.eps = eps;
            src.gen_seed = gen_seed;
        }
        return src;
    }
};

BSpec make_bspec(const std::string& raw, const std::string& auto_base) {
    BSpec b = parse_bspec(raw);
    if (auto_base == "e")
        b.base = std::exp(1.0);
    else if (auto_base != "2")
        throw UsageError("--auto-base must be 2 or e");
    return b;
}

void print_warnings(const ExperimentResult& res) {
    for (const auto& w : res.warnings) std::cerr << "warning: " << w << '\n';
}

NamedTrace shape_bound_overlay(const ExperimentResult& res, const RunConfig& cfg) {
    if (!res.delta_min) throw UsageError("--bound-overlay needs a matrix with a Condorcet winner");
    const PreferenceMatrix m = realize(cfg.source);
    const GapProfile profile = condorcet_analysis(m);
    NamedTrace tr;
    tr.label = "bound (shape-only)";
    tr.dashed = true;
    for (std::uint64_t t : res.trace.t) {
        if (t < 2) continue;
        BoundInputs in;
        in.k = m.size();
        in.t_budget = t;
        in.b_rounds = std::min<unsigned>(res.resolved_b,
                                         static_cast<unsigned>(std::log2(double(t))));
        in.b_rounds = std::max(1u, in.b_rounds);
        in.delta_min = *res.delta_min;
        in.delta = 0.01;
        tr.t.push_back(static_cast<double>(t));
        tr.value.push_back(regret_bound_expected(in, profile.gaps));
    }
    return tr;
}

int cmd_run(const MatrixFlags& mf, const std::string& algo, std::uint64_t t_budget,
            const std::string& b_raw, const std::string& auto_base, unsigned repeats,
            std::uint64_t seed, std::optional<double> fk, std::size_t grid,
            const std::vector<std::uint64_t>& checkpoints, const std::string& out_csv,
            const std::string& out_json, const std::string& out_svg,
            const std::vector<std::string>& overlays, bool bound_overlay, bool log_x,
            bool timing) {
    RunConfig cfg;
    cfg.source = mf.source();
    cfg.algo = parse_algorithm(algo);
    cfg.t_budget = t_budget;
    cfg.b = make_bspec(b_raw, auto_base);
    cfg.repeats = repeats;
    cfg.base_seed = seed;
    cfg.f_override = fk;
    cfg.grid_points = grid;
    cfg.extra_checkpoints = checkpoints;
    cfg.timing = timing;

    const ExperimentResult res = run_experiment(cfg);
    print_warnings(res);

    emit_csv(res.trace, out_csv);
    emit_json(cfg, res, out_json);
    if (!out_svg.empty()) {
        std::vector<NamedTrace> traces{to_named(res.trace, algo)};
        std::vector<NamedTrace> extra;
        for (const auto& p : overlays) extra.push_back(load_trace_csv(p));
        if (bound_overlay) extra.push_back(shape_bound_overlay(res, cfg));
        PlotOptions popt;
        popt.title = "mean cumulative regret";
        popt.log_x = log_x;
        emit_svg(traces, extra, out_svg, popt);
    }
    std::cout << "wrote " << out_csv << " and " << out_json;
    if (!out_svg.empty()) std::cout << " and " << out_svg;
    std::cout << '\n';
    return 0;
}

int cmd_sweep(const MatrixFlags& mf, const std::vector<std::string>& algos,
              const std::vector<std::string>& b_list, const std::string& auto_base,
              std::uint64_t t_budget, unsigned repeats, std::uint64_t seed,
              std::optional<double> fk, std::size_t grid, const std::string& out_dir,
              bool timing) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    std::string summary = "algorithm,B,mean_final_regret,std_final_regret\n";
    char buf[160];
    for (const auto& algo : algos) {
        for (const auto& braw : b_list) {
            RunConfig cfg;
            cfg.source = mf.source();
            cfg.algo = parse_algorithm(algo);
            cfg.t_budget = t_budget;
            cfg.b = make_bspec(braw, auto_base);
            cfg.repeats = repeats;
            cfg.base_seed = seed;
            cfg.f_override = fk;
            cfg.grid_points = grid;
            cfg.timing = timing;
            const ExperimentResult res = run_experiment(cfg);
            print_warnings(res);
            const std::string stem =
                out_dir + "/" + algo + "_B" + std::to_string(res.resolved_b);
            emit_csv(res.trace, stem + ".csv");
            emit_json(cfg, res, stem + ".json");

            double mean = 0.0;
            for (const auto& tr : res.trace.trials) mean += tr.final_regret;
            mean /= static_cast<double>(res.trace.trials.size());
            double var = 0.0;
            for (const auto& tr : res.trace.trials) {
                const double d = tr.final_regret - mean;
                var += d * d;
            }
            const double sd = res.trace.trials.size() > 1
                                  ? std::sqrt(var / double(res.trace.trials.size() - 1))
                                  : 0.0;
            std::snprintf(buf, sizeof buf, "%s,%u,%.9g,%.9g\n", algo.c_str(), res.resolved_b,
                          mean, sd);
            summary += buf;
        }
    }
    std::ofstream out(out_dir + "/summary.csv", std::ios::binary);
    if (!out) throw IoError("cannot write sweep summary");
    out << summary;
    std::cout << "wrote " << out_dir << "/summary.csv\n";
    return 0;
}

int cmd_plot(const std::vector<std::string>& inputs, const std::vector<std::string>& labels,
             const std::vector<std::string>& overlays, const std::string& out,
             const std::string& title, bool log_x) {
    std::vector<NamedTrace> traces;
    for (std::size_t k = 0; k < inputs.size(); ++k) {
        NamedTrace tr = load_trace_csv(inputs[k], k < labels.size() ? labels[k] : inputs[k]);
        tr.dashed = false;
        traces.push_back(std::move(tr));
    }
    std::vector<NamedTrace> extra;
    for (const auto& p : overlays) extra.push_back(load_trace_csv(p));
    PlotOptions popt;
    popt.title = title;
    popt.log_x = log_x;
    emit_svg(traces, extra, out, popt);
    std::cout << "wrote " << out << '\n';
    return 0;
}

int cmd_bound(unsigned k, std::uint64_t t_budget, unsigned b, double delta, double dmin,
              const std::vector<double>& gaps_in) {
    BoundInputs in;
    in.k = k;
    in.t_budget = t_budget;
    in.b_rounds = b;
    in.delta_min = dmin;
    in.delta = delta;
    validate(in);
    const double q = std::pow(static_cast<double>(t_budget), 1.0 / static_cast<double>(b));
    if (q < 2.0) std::cerr << "warning: q = T^(1/B) < 2; the analysis assumes q >= 2\n";
    std::vector<double> gaps = gaps_in;
    if (gaps.empty()) gaps.assign(k > 0 ? k - 1 : 0, dmin);

    char buf[96];
    std::snprintf(buf, sizeof buf, "%.6g", q);
    std::cout << "q = T^(1/B)       = " << buf << '\n';
    std::cout << "C(delta)          = " << c_delta(q, delta) << '\n';
    std::snprintf(buf, sizeof buf, "%.6g", a_constant(k, dmin));
    std::cout << "A                 = " << buf << '\n';
    std::cout << "r(delta)          = " << r_delta(q, delta, k, dmin) << '\n';
    std::snprintf(buf, sizeof buf, "%.6g", regret_bound_expected(in, gaps));
    std::cout << "E[R(T)] bound     = " << buf << "  (shape-only, unit constants)\n";
    return 0;
}

int cmd_gen(const std::string& kind, unsigned k, double eps, std::uint64_t seed,
            const std::string& out) {
    const auto m = generate_synthetic(parse_synthetic_kind(kind), k, eps, seed);
    if (out.empty() || out == "-") {
        save_csv(m, std::cout);
    } else {
        save_csv(m, out);
        std::cout << "wrote " << out << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"duelbatch: batched dueling-bandit simulation harness"};
    app.require_subcommand(1);

    // --- run ---------------------------------------------------------------
    auto* run = app.add_subcommand("run", "run one experiment");
    MatrixFlags run_mf;
    run_mf.attach(run);
    std::string run_algo = "c2b", run_b = "auto", run_base = "2";
    std::uint64_t run_t = 100000, run_seed = 1;
    unsigned run_repeats = 20;
    double run_fk = 0.0;
    bool run_has_fk = false, run_bound_overlay = false, run_logx = false, run_timing = false;
    std::size_t run_grid = 512;
    std::vector<std::uint64_t> run_checkpoints;
    std::string run_csv = "results.csv", run_json = "results.json", run_svg;
    std::vector<std::string> run_overlays;
    run->add_option("--algo", run_algo, "c2b | c2b-kl | allpairs")->default_str("c2b");
    run->add_option("--T", run_t, "total comparison budget")->default_str("100000");
    run->add_option("--B", run_b, "rounds: N, auto, or auto+k")->default_str("auto");
    run->add_option("--auto-base", run_base, "log base for auto B: 2 or e")->default_str("2");
    run->add_option("--repeats", run_repeats, "independent trials")->default_str("20");
    run->add_option("--seed", run_seed, "base seed; trial k uses seed+k")->default_str("1");
    auto* fk_opt = run->add_option("--fK", run_fk, "override f(K) for c2b-kl");
    run->add_option("--grid", run_grid, "checkpoint grid size")->default_str("512");
    run->add_option("--checkpoint", run_checkpoints, "extra checkpoint time(s)");
    run->add_option("--out-csv", run_csv, "results CSV path")->default_str("results.csv");
    run->add_option("--out-json", run_json, "metadata JSON path")->default_str("results.json");
    run->add_option("--out-svg", run_svg, "regret chart SVG path");
    run->add_option("--overlay", run_overlays, "external trace CSV(s) for the chart");
    run->add_flag("--bound-overlay", run_bound_overlay, "add the shape-only bound curve");
    run->add_flag("--log-x", run_logx, "log-scale the t axis");
    run->add_flag("--timing", run_timing, "include wall-clock in the metadata JSON");
    run->callback([&] {
        run_has_fk = fk_opt->count() > 0;
        cmd_run(run_mf, run_algo, run_t, run_b, run_base, run_repeats, run_seed,
                run_has_fk ? std::optional<double>(run_fk) : std::nullopt, run_grid,
                run_checkpoints, run_csv, run_json, run_svg, run_overlays, run_bound_overlay,
                run_logx, run_timing);
    });

    // --- sweep -------------------------------------------------------------
    auto* sweep = app.add_subcommand("sweep", "grid over algorithms and round budgets");
    MatrixFlags sweep_mf;
    sweep_mf.attach(sweep);
    std::vector<std::string> sweep_algos{"c2b"}, sweep_bs{"auto"};
    std::string sweep_base = "2", sweep_dir = "sweep_out";
    std::uint64_t sweep_t = 100000, sweep_seed = 1;
    unsigned sweep_repeats = 20;
    double sweep_fk = 0.0;
    std::size_t sweep_grid = 512;
    bool sweep_timing = false;
    sweep->add_option("--algos", sweep_algos, "algorithms to sweep")->delimiter(',');
    sweep->add_option("--B-list", sweep_bs, "round budgets to sweep")->delimiter(',');
    sweep->add_option("--auto-base", sweep_base, "log base for auto B")->default_str("2");
    sweep->add_option("--T", sweep_t, "total comparison budget")->default_str("100000");
    sweep->add_option("--repeats", sweep_repeats, "independent trials per cell")
        ->default_str("20");
    sweep->add_option("--seed", sweep_seed, "base seed")->default_str("1");
    auto* sweep_fk_opt = sweep->add_option("--fK", sweep_fk, "override f(K) for c2b-kl");
    sweep->add_option("--grid", sweep_grid, "checkpoint grid size")->default_str("512");
    sweep->add_option("--out-dir", sweep_dir, "output directory")->default_str("sweep_out");
    sweep->add_flag("--timing", sweep_timing, "include wall-clock in metadata JSON");
    sweep->callback([&] {
        cmd_sweep(sweep_mf, sweep_algos, sweep_bs, sweep_base, sweep_t, sweep_repeats,
                  sweep_seed,
                  sweep_fk_opt->count() ? std::optional<double>(sweep_fk) : std::nullopt,
                  sweep_grid, sweep_dir, sweep_timing);
    });

    // --- plot --------------------------------------------------------------
    auto* plot = app.add_subcommand("plot", "render results CSVs to an SVG chart");
    std::vector<std::string> plot_in, plot_labels, plot_overlays;
    std::string plot_out = "plot.svg", plot_title = "mean cumulative regret";
    bool plot_logx = false;
    plot->add_option("--in", plot_in, "results CSV(s)")->required();
    plot->add_option("--label", plot_labels, "label(s) for the inputs");
    plot->add_option("--overlay", plot_overlays, "external trace CSV(s)");
    plot->add_option("--out", plot_out, "output SVG path")->default_str("plot.svg");
    plot->add_option("--title", plot_title, "chart title");
    plot->add_flag("--log-x", plot_logx, "log-scale the t axis");
    plot->callback(
        [&] { cmd_plot(plot_in, plot_labels, plot_overlays, plot_out, plot_title, plot_logx); });

    // --- bound -------------------------------------------------------------
    auto* bound = app.add_subcommand("bound", "print analysis quantities");
    unsigned bound_k = 10, bound_b = 16;
    std::uint64_t bound_t = 100000;
    double bound_delta = 0.01, bound_dmin = 0.2;
    std::vector<double> bound_gaps;
    bound->add_option("--K", bound_k, "number of arms")->required();
    bound->add_option("--T", bound_t, "total comparison budget")->required();
    bound->add_option("--B", bound_b, "number of rounds")->required();
    bound->add_option("--delta", bound_delta, "confidence parameter")->default_str("0.01");
    bound->add_option("--dmin", bound_dmin, "minimum positive gap")->required();
    bound->add_option("--gaps", bound_gaps, "per-arm gaps (default: K-1 copies of dmin)")
        ->delimiter(',');
    bound->callback(
        [&] { cmd_bound(bound_k, bound_t, bound_b, bound_delta, bound_dmin, bound_gaps); });

    // --- gen ---------------------------------------------------------------
    auto* gen = app.add_subcommand("gen", "write a synthetic preference matrix CSV");
    std::string gen_kind = "uniform-gap", gen_out;
    unsigned gen_k = 10;
    double gen_eps = 0.2;
    std::uint64_t gen_seed_v = 1;
    gen->add_option("--kind", gen_kind, "uniform-gap | linear-order")->default_str("uniform-gap");
    gen->add_option("--K", gen_k, "number of arms")->required();
    gen->add_option("--eps", gen_eps, "gap parameter")->default_str("0.2");
    gen->add_option("--seed", gen_seed_v, "generator seed")->default_str("1");
    gen->add_option("--out", gen_out, "output path (default: stdout)");
    gen->callback([&] { cmd_gen(gen_kind, gen_k, gen_eps, gen_seed_v, gen_out); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const ParamError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
