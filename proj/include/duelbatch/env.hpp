#pragma once

// Seeded stochastic duel environment.  A batch plan is a deduplicated list
// of unordered arm pairs, each compared `count` times; outcomes of a batch
// are conceptually simultaneous, so the environment only reveals them when
// the whole batch has been executed.
//
// Budget semantics: every single comparison is one time step; the run
// consumes exactly T steps overall.  If a plan would overshoot the budget
// it is truncated, entry by entry, in canonical order (pairs sorted by
// (min,max) index), which keeps truncation deterministic for a given seed.
//
// Regret per step with participants (i,j) is (gap_i + gap_j)/2, where gaps
// are taken against the Condorcet winner; without a winner all gaps are 0.

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

#include "duelbatch/errors.hpp"
#include "duelbatch/prefmat.hpp"
#include "duelbatch/rng.hpp"

namespace duelbatch {

struct PlanEntry {
    Arm i = 0, j = 0;          // canonical: i <= j (i == j only for filler-style self play)
    std::uint64_t count = 0;   // repetitions requested for this pair
};

struct BatchPlan {
    unsigned round = 0;
    std::vector<PlanEntry> entries;
};

struct DuelOutcome {
    Arm i = 0, j = 0;
    std::uint64_t wins_i = 0;  // comparisons won by the first (lower-index) arm
    std::uint64_t total = 0;   // comparisons actually performed (after truncation)
};

class BudgetState {
public:
    explicit BudgetState(std::uint64_t total) : total_(total), remaining_(total) {}

    std::uint64_t total() const noexcept { return total_; }
    std::uint64_t remaining() const noexcept { return remaining_; }
    std::uint64_t used() const noexcept { return total_ - remaining_; }

    void consume_one() noexcept { --remaining_; }

private:
    std::uint64_t total_;
    std::uint64_t remaining_;
};

// Logarithmically spaced checkpoint times in [1, T]: `points` values plus
// any extras, deduplicated and sorted.  T itself is always included.
inline std::vector<std::uint64_t> checkpoint_grid(std::uint64_t t_budget, std::size_t points,
                                                  std::vector<std::uint64_t> extras = {}) {
    std::vector<std::uint64_t> grid = std::move(extras);
    if (points > 0 && t_budget >= 1) {
        if (points == 1 || t_budget == 1) {
            grid.push_back(t_budget);
        } else {
            const double lt = std::log(static_cast<double>(t_budget));
            for (std::size_t k = 0; k < points; ++k) {
                const double x = std::exp(lt * static_cast<double>(k) /
                                          static_cast<double>(points - 1));
                grid.push_back(static_cast<std::uint64_t>(std::llround(x)));
            }
        }
    }
    for (auto& v : grid) v = std::clamp<std::uint64_t>(v, 1, t_budget);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

// Per-comparison regret trace.  Cumulative regret is also recoverable from
// the per-arm participation tallies as (1/2) sum_j T_j gap_j; the ledger
// keeps both so the identity can be cross-checked.  A self duel counts the
// arm in both slots.
class RegretLedger {
public:
    RegretLedger(std::vector<double> gaps, std::vector<std::uint64_t> grid)
        : gaps_(std::move(gaps)),
          grid_(std::move(grid)),
          grid_regret_(grid_.size(), 0.0),
          per_arm_(gaps_.size(), 0) {}

    void record(Arm i, Arm j) {
        ++t_;
        cumulative_ += 0.5 * (gaps_[i] + gaps_[j]);
        per_arm_[i] += 1;
        per_arm_[j] += 1;
        if (next_ < grid_.size() && grid_[next_] == t_) {
            grid_regret_[next_] = cumulative_;
            ++next_;
        }
    }

    void mark_boundary() {
        if (boundaries_.empty() || boundaries_.back().first != t_)
            boundaries_.emplace_back(t_, cumulative_);
    }

    std::uint64_t t() const noexcept { return t_; }
    double cumulative() const noexcept { return cumulative_; }

    const std::vector<std::uint64_t>& grid() const noexcept { return grid_; }
    // Valid up to the last grid time <= t().
    const std::vector<double>& grid_regret() const noexcept { return grid_regret_; }
    const std::vector<std::pair<std::uint64_t, double>>& boundaries() const noexcept {
        return boundaries_;
    }
    const std::vector<std::uint64_t>& per_arm_comparisons() const noexcept { return per_arm_; }

    // |cumulative - (1/2) sum_j T_j gap_j|, the regret identity residual.
    double identity_residual() const {
        double alt = 0.0;
        for (std::size_t j = 0; j < gaps_.size(); ++j)
            alt += 0.5 * static_cast<double>(per_arm_[j]) * gaps_[j];
        return std::fabs(alt - cumulative_);
    }

private:
    std::vector<double> gaps_;
    std::vector<std::uint64_t> grid_;
    std::vector<double> grid_regret_;
    std::vector<std::pair<std::uint64_t, double>> boundaries_;
    std::vector<std::uint64_t> per_arm_;
    std::uint64_t t_ = 0;
    double cumulative_ = 0.0;
    std::size_t next_ = 0;
};

// One Bernoulli duel outcome: does the lower-index arm win draw `k` of pair
// (i,j) in `round`?  Counter-based, so the answer is independent of any
// other pair's activity.
inline bool duel_lower_wins(std::uint64_t trial_seed, unsigned round, Arm i, Arm j,
                            std::uint64_t k, double p_ij) {
    const std::uint64_t pair_word = (static_cast<std::uint64_t>(i) << 32) | j;
    const std::uint64_t h = rng::hash4(trial_seed ^ rng::kDuelTag, round, pair_word, k);
    return rng::u01(h) < p_ij;
}

// Executes a batch plan until it completes or the budget runs out.  Entries
// run in canonical order; outcomes report the comparisons actually played
// (so a truncated entry reports a smaller total, possibly zero).
inline std::vector<DuelOutcome> execute_batch(const BatchPlan& plan, const PreferenceMatrix& m,
                                              BudgetState& budget, RegretLedger& ledger,
                                              std::uint64_t trial_seed) {
    std::vector<const PlanEntry*> order;
    order.reserve(plan.entries.size());
    for (const auto& e : plan.entries) order.push_back(&e);
    auto canon = [](const PlanEntry* e) {
        return std::pair(std::min(e->i, e->j), std::max(e->i, e->j));
    };
    std::stable_sort(order.begin(), order.end(),
                     [&](const PlanEntry* a, const PlanEntry* b) { return canon(a) < canon(b); });

    std::vector<DuelOutcome> outcomes;
    outcomes.reserve(order.size());
    for (const PlanEntry* e : order) {
        const Arm i = std::min(e->i, e->j), j = std::max(e->i, e->j);
        const std::uint64_t todo = std::min<std::uint64_t>(e->count, budget.remaining());
        std::uint64_t wins_i = 0;
        if (i == j) {
            for (std::uint64_t k = 0; k < todo; ++k) {
                ledger.record(i, j);
                budget.consume_one();
            }
            wins_i = todo;  // self play has no meaningful winner
        } else {
            const double p = m.at(i, j);
            for (std::uint64_t k = 0; k < todo; ++k) {
                wins_i += duel_lower_wins(trial_seed, plan.round, i, j, k, p) ? 1 : 0;
                ledger.record(i, j);
                budget.consume_one();
            }
        }
        outcomes.push_back(DuelOutcome{i, j, wins_i, todo});
    }
    return outcomes;
}

// Self-play for the last remaining arm; consumes the whole remaining budget.
inline std::uint64_t play_filler(Arm arm, BudgetState& budget, RegretLedger& ledger) {
    const std::uint64_t steps = budget.remaining();
    for (std::uint64_t k = 0; k < steps; ++k) {
        ledger.record(arm, arm);
        budget.consume_one();
    }
    return steps;
}

}  // namespace duelbatch
