#pragma once

// Batch policies over the duel environment.
//
// Each round r (1-based) proceeds as: build a plan from statistics known at
// the end of round r-1, execute it as one batch, then run an elimination
// pass on the updated statistics.  Plans repeat every scheduled pair
// q_r = floor(q^r) times, q = T^(1/B).
//
//   c2b       candidate/defeat plan, elimination when some phat(i,j)
//             exceeds 1/2 + gamma_radius.
//   c2b-kl    same plan, elimination when i_score(j) - min_i i_score(i)
//             exceeds ln(T) + f(K).
//   allpairs  compares every active pair each round, gamma elimination.
//
// The plan logic: arm j is "defeated" by i when phat(i,j) from the previous
// round exceeds 1/2 + c_radius.  The candidate is the arm defeating the
// most others (lowest index on ties).  Arms the candidate defeats are only
// compared against the candidate; every other arm is compared against all
// active arms.  Duplicate unordered pairs collapse into a single entry, so
// a pair is compared at most q_r times per round.
//
// Elimination decisions for a round are made against a frozen snapshot of
// the active set and applied together; a pass that would eliminate every
// active arm spares the current candidate so the run can continue (only
// reachable without a Condorcet winner).  Defeat sets for round r use
// statistics strictly through round r-1, while eliminations use round-r
// statistics.  If the budget dies mid-plan the executed prefix still counts,
// but no elimination pass runs after a truncated round.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "duelbatch/env.hpp"
#include "duelbatch/errors.hpp"
#include "duelbatch/prefmat.hpp"
#include "duelbatch/stats.hpp"

namespace duelbatch {

enum class Algorithm { C2B, C2BKL, AllPairs };

inline Algorithm parse_algorithm(const std::string& s) {
    if (s == "c2b") return Algorithm::C2B;
    if (s == "c2b-kl") return Algorithm::C2BKL;
    if (s == "allpairs") return Algorithm::AllPairs;
    throw ParamError("unknown algorithm: " + s);
}

inline const char* to_string(Algorithm a) {
    switch (a) {
        case Algorithm::C2B: return "c2b";
        case Algorithm::C2BKL: return "c2b-kl";
        default: return "allpairs";
    }
}

// f(K) = 0.3 K^1.01, the default slack in the KL elimination threshold.
inline double f_default(Arm k) {
    if (k < 1) throw DomainError("f_default: K >= 1");
    return 0.3 * std::pow(static_cast<double>(k), 1.01);
}

struct DefeatRecord {
    std::vector<std::vector<Arm>> defeated;  // indexed by arm id; empty for inactive arms
    Arm candidate = 0;
    bool champion = false;                   // candidate defeats every other active arm
};

struct EliminationEvent {
    unsigned round = 0;
    Arm arm = 0;
    const char* reason = "";  // "gamma" or "kl"
};

struct PolicyState {
    std::vector<Arm> active;  // ascending arm ids
    PairStats stats;
    RoundContext ctx;
    std::vector<EliminationEvent> eliminated_log;
    DefeatRecord last_defeat;  // filled by the plan builders each round

    PolicyState(Arm k, std::uint64_t t_budget, unsigned b_rounds)
        : stats(k), ctx(RoundContext::make(t_budget, b_rounds, 1)) {
        active.resize(k);
        for (Arm a = 0; a < k; ++a) active[a] = a;
    }
};

// Defeat sets for round ctx.r, from statistics through round ctx.r - 1.
inline DefeatRecord compute_defeats(const PairStats& stats, const std::vector<Arm>& active,
                                    const RoundContext& ctx) {
    const Arm k = stats.size();
    const std::uint64_t q_prev = round_reps(ctx.t_budget, ctx.b_rounds, ctx.r - 1);
    DefeatRecord rec;
    rec.defeated.assign(k, {});
    std::size_t best = 0;
    bool first = true;
    for (Arm i : active) {
        auto& d = rec.defeated[i];
        for (Arm j : active) {
            if (j == i) continue;
            const std::uint64_t n_ij = stats.n(i, j);
            if (n_ij == 0) continue;  // phat = 1/2 can never clear the radius
            if (stats.phat(i, j) > 0.5 + c_radius(n_ij, k, q_prev)) d.push_back(j);
        }
        if (first || d.size() > best) {
            best = d.size();
            rec.candidate = i;  // ties keep the lowest index: active is ascending
            first = false;
        }
    }
    rec.champion = !active.empty() && best == active.size() - 1;
    return rec;
}

namespace detail {

inline BatchPlan finalize_plan(std::vector<std::pair<Arm, Arm>> pairs, const RoundContext& ctx) {
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    BatchPlan plan;
    plan.round = ctx.r;
    plan.entries.reserve(pairs.size());
    for (auto [i, j] : pairs) plan.entries.push_back(PlanEntry{i, j, ctx.q_r});
    return plan;
}

}  // namespace detail

inline BatchPlan c2b_plan(PolicyState& st) {
    st.last_defeat = compute_defeats(st.stats, st.active, st.ctx);
    const auto& beaten_by_candidate = st.last_defeat.defeated[st.last_defeat.candidate];
    auto candidate_defeats = [&](Arm a) {
        return std::find(beaten_by_candidate.begin(), beaten_by_candidate.end(), a) !=
               beaten_by_candidate.end();
    };
    std::vector<std::pair<Arm, Arm>> pairs;
    for (Arm i : st.active) {
        if (i == st.last_defeat.candidate) continue;
        if (candidate_defeats(i)) {
            pairs.emplace_back(std::min(i, st.last_defeat.candidate),
                               std::max(i, st.last_defeat.candidate));
        } else {
            for (Arm j : st.active)
                if (j != i) pairs.emplace_back(std::min(i, j), std::max(i, j));
        }
    }
    return detail::finalize_plan(std::move(pairs), st.ctx);
}

inline BatchPlan allpairs_plan(PolicyState& st) {
    st.last_defeat = compute_defeats(st.stats, st.active, st.ctx);  // for uniform round logs
    std::vector<std::pair<Arm, Arm>> pairs;
    for (std::size_t a = 0; a < st.active.size(); ++a)
        for (std::size_t b = a + 1; b < st.active.size(); ++b)
            pairs.emplace_back(st.active[a], st.active[b]);
    return detail::finalize_plan(std::move(pairs), st.ctx);
}

namespace detail {

inline std::vector<Arm> apply_eliminations(PolicyState& st, std::vector<Arm> victims,
                                           const char* reason) {
    if (!victims.empty() && victims.size() == st.active.size()) {
        // A full wipe-out (possible only in non-Condorcet instances) would
        // leave nothing to play; spare the current candidate.
        victims.erase(std::remove(victims.begin(), victims.end(), st.last_defeat.candidate),
                      victims.end());
    }
    for (Arm a : victims) {
        st.eliminated_log.push_back(EliminationEvent{st.ctx.r, a, reason});
        st.active.erase(std::remove(st.active.begin(), st.active.end(), a), st.active.end());
    }
    return victims;
}

}  // namespace detail

// Gamma rule: j goes when some active i has phat(i,j) > 1/2 + gamma_radius.
inline std::vector<Arm> c2b_eliminate(PolicyState& st) {
    const Arm k = st.stats.size();
    std::vector<Arm> victims;
    for (Arm j : st.active) {
        for (Arm i : st.active) {
            if (i == j) continue;
            const std::uint64_t n_ij = st.stats.n(i, j);
            if (n_ij == 0) continue;
            if (st.stats.phat(i, j) >
                0.5 + gamma_radius(n_ij, k, st.ctx.b_rounds, st.ctx.t_budget)) {
                victims.push_back(j);
                break;
            }
        }
    }
    return detail::apply_eliminations(st, std::move(victims), "gamma");
}

// The all-pairs baseline eliminates exactly like c2b.
inline std::vector<Arm> allpairs_eliminate(PolicyState& st) { return c2b_eliminate(st); }

// KL rule: j goes when i_score(j) - min_i i_score(i) > ln(T) + f(K).
// Scores are computed over the pre-elimination active set, so at least one
// minimizer always survives.
inline std::vector<Arm> c2bkl_eliminate(PolicyState& st, double f_of_k) {
    const double threshold =
        std::log(static_cast<double>(st.ctx.t_budget)) + f_of_k;
    const double star = i_star(st.stats, st.active);
    std::vector<Arm> victims;
    for (Arm j : st.active)
        if (i_score(st.stats, j, st.active) - star > threshold) victims.push_back(j);
    return detail::apply_eliminations(st, std::move(victims), "kl");
}

// ---------------------------------------------------------------------------
// Full run.

struct RunOptions {
    std::optional<double> f_override;  // replaces f_default(K) for c2b-kl
    std::size_t grid_points = 512;
    std::vector<std::uint64_t> extra_checkpoints;
};

struct RoundRecord {
    unsigned r = 0;
    std::uint64_t q_r = 0;
    std::vector<Arm> active_before;
    Arm candidate = 0;
    bool champion = false;
    std::vector<PlanEntry> plan;
    std::uint64_t executed = 0;  // comparisons actually played this round
    bool truncated = false;
    std::vector<Arm> eliminated;
};

struct RunResult {
    std::vector<RoundRecord> rounds;
    std::vector<EliminationEvent> eliminations;
    std::vector<Arm> final_active;
    Arm declared_winner = 0;
    bool winner_confirmed = false;  // sole survivor, or champion in the last round
    std::optional<Arm> filler_arm;
    std::uint64_t filler_steps = 0;
    std::uint64_t total_comparisons = 0;

    std::vector<std::uint64_t> grid;
    std::vector<double> grid_regret;
    std::vector<std::pair<std::uint64_t, double>> boundaries;
    std::vector<std::uint64_t> per_arm_comparisons;
    double final_regret = 0.0;
    double identity_residual = 0.0;
};

inline RunResult run_policy(Algorithm algo, const PreferenceMatrix& m, std::uint64_t t_budget,
                            unsigned b_rounds, std::uint64_t seed, const RunOptions& opt = {}) {
    if (b_rounds < 1) throw ConfigError("run_policy: B >= 1 required");
    if (t_budget < 1) throw ConfigError("run_policy: T >= 1 required");
    const Arm k = m.size();
    const GapProfile profile = condorcet_analysis(m);
    const double f_of_k = opt.f_override ? *opt.f_override : f_default(k);

    BudgetState budget(t_budget);
    RegretLedger ledger(profile.gaps, checkpoint_grid(t_budget, opt.grid_points,
                                                      opt.extra_checkpoints));
    PolicyState st(k, t_budget, b_rounds);

    RunResult res;
    unsigned r = 1;
    while (budget.remaining() > 0) {
        if (st.active.size() == 1) {
            res.filler_arm = st.active.front();
            res.filler_steps = play_filler(st.active.front(), budget, ledger);
            ledger.mark_boundary();
            break;
        }
        st.ctx = RoundContext::make(t_budget, b_rounds, r);

        BatchPlan plan = (algo == Algorithm::AllPairs) ? allpairs_plan(st) : c2b_plan(st);
        std::uint64_t scheduled = 0;
        for (const auto& e : plan.entries) scheduled += e.count;

        RoundRecord rec;
        rec.r = r;
        rec.q_r = st.ctx.q_r;
        rec.active_before = st.active;
        rec.candidate = st.last_defeat.candidate;
        rec.champion = st.last_defeat.champion;
        rec.plan = plan.entries;

        const auto outcomes = execute_batch(plan, m, budget, ledger, seed);
        for (const auto& o : outcomes) {
            rec.executed += o.total;
            if (o.total > 0 && o.i != o.j) st.stats.record(o.i, o.j, o.wins_i, o.total);
        }
        ledger.mark_boundary();
        rec.truncated = rec.executed < scheduled;

        if (!rec.truncated) {
            rec.eliminated = (algo == Algorithm::C2BKL) ? c2bkl_eliminate(st, f_of_k)
                                                        : c2b_eliminate(st);
        }
        res.rounds.push_back(std::move(rec));
        ++r;
    }

    res.eliminations = st.eliminated_log;
    res.final_active = st.active;
    if (st.active.size() == 1) {
        res.declared_winner = st.active.front();
        res.winner_confirmed = true;
    } else {
        // The arm the policy would put forward next, given everything seen.
        st.ctx = RoundContext::make(t_budget, b_rounds, r);
        const DefeatRecord final_rec = compute_defeats(st.stats, st.active, st.ctx);
        res.declared_winner = final_rec.candidate;
        res.winner_confirmed = final_rec.champion;
    }
    res.total_comparisons = budget.used();
    res.grid = ledger.grid();
    res.grid_regret = ledger.grid_regret();
    res.boundaries = ledger.boundaries();
    res.per_arm_comparisons = ledger.per_arm_comparisons();
    res.final_regret = ledger.cumulative();
    res.identity_residual = ledger.identity_residual();
    return res;
}

}  // namespace duelbatch
