#include <catch2/catch.hpp>

#include <cstdint>
#include <vector>

#include "duelbatch/env.hpp"
#include "duelbatch/prefmat.hpp"

using namespace duelbatch;

namespace {

PreferenceMatrix from_rows(std::vector<std::vector<double>> rows) {
    std::vector<double> flat;
    for (auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
    return PreferenceMatrix(static_cast<Arm>(rows.size()), std::move(flat));
}

}  // namespace

TEST_CASE("checkpoint grid") {
    const auto g = checkpoint_grid(100000, 512);
    REQUIRE(!g.empty());
    CHECK(g.front() >= 1);
    CHECK(g.back() == 100000);
    for (std::size_t k = 1; k < g.size(); ++k) CHECK(g[k] > g[k - 1]);

    // extras are merged and deduplicated
    const auto h = checkpoint_grid(1000, 8, {500, 500, 1});
    CHECK(std::count(h.begin(), h.end(), 500) == 1);
    CHECK(h.front() == 1);
    CHECK(h.back() == 1000);

    // tiny budgets collapse to the feasible integers
    const auto tiny = checkpoint_grid(3, 512);
    CHECK(tiny == std::vector<std::uint64_t>{1, 2, 3});
}

TEST_CASE("deterministic duels against a sure winner") {
    const auto m = from_rows({{0.5, 1.0}, {0.0, 0.5}});
    const auto profile = condorcet_analysis(m);
    BudgetState budget(100);
    RegretLedger ledger(profile.gaps, checkpoint_grid(100, 16));
    BatchPlan plan{1, {PlanEntry{0, 1, 4}}};
    const auto out = execute_batch(plan, m, budget, ledger, 7);
    REQUIRE(out.size() == 1);
    CHECK(out[0].wins_i == 4);
    CHECK(out[0].total == 4);
    CHECK(budget.remaining() == 96);
    // gap of arm 1 is 0.5: each duel costs (0 + 0.5)/2
    CHECK(ledger.cumulative() == Approx(4 * 0.25));
}

TEST_CASE("self-play of the winner accrues nothing") {
    const auto m = from_rows({{0.5, 0.7}, {0.3, 0.5}});
    const auto profile = condorcet_analysis(m);
    BudgetState budget(10);
    RegretLedger ledger(profile.gaps, checkpoint_grid(10, 4));
    BatchPlan plan{1, {PlanEntry{0, 0, 5}}};
    const auto out = execute_batch(plan, m, budget, ledger, 7);
    CHECK(out[0].total == 5);
    CHECK(ledger.cumulative() == 0.0);
    CHECK(ledger.t() == 5);
}

TEST_CASE("budget exhaustion truncates deterministically") {
    const auto m = from_rows({{0.5, 0.7}, {0.3, 0.5}});
    const auto profile = condorcet_analysis(m);
    BudgetState budget(3);
    RegretLedger ledger(profile.gaps, checkpoint_grid(3, 4));
    BatchPlan plan{1, {PlanEntry{0, 1, 10}}};
    const auto out = execute_batch(plan, m, budget, ledger, 7);
    CHECK(out[0].total == 3);
    CHECK(budget.remaining() == 0);
}

TEST_CASE("plan entry order does not change outcomes") {
    const auto m = generate_synthetic(SyntheticKind::UniformGap, 4, 0.2, 5);
    const auto profile = condorcet_analysis(m);
    const std::vector<PlanEntry> entries{{0, 1, 7}, {1, 2, 7}, {0, 3, 7}, {2, 3, 7}};

    auto run_with = [&](std::vector<PlanEntry> es) {
        BudgetState budget(1000);
        RegretLedger ledger(profile.gaps, checkpoint_grid(1000, 8));
        BatchPlan plan{3, std::move(es)};
        return execute_batch(plan, m, budget, ledger, 99);
    };
    const auto a = run_with(entries);
    auto rev = entries;
    std::reverse(rev.begin(), rev.end());
    const auto b = run_with(rev);
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(a[k].i == b[k].i);
        CHECK(a[k].j == b[k].j);
        CHECK(a[k].wins_i == b[k].wins_i);
    }
}

TEST_CASE("reversed pair entries still execute in canonical order") {
    // Truncation order reveals execution order: with budget 5 the first
    // canonical pair gets its full 4 draws, the second only 1.
    const auto m = generate_synthetic(SyntheticKind::UniformGap, 3, 0.2, 1);
    const auto profile = condorcet_analysis(m);
    BudgetState budget(5);
    RegretLedger ledger(profile.gaps, checkpoint_grid(5, 4));
    BatchPlan plan{1, {PlanEntry{2, 0, 4}, PlanEntry{1, 0, 4}}};
    const auto out = execute_batch(plan, m, budget, ledger, 3);
    REQUIRE(out.size() == 2);
    CHECK(out[0].i == 0);
    CHECK(out[0].j == 1);
    CHECK(out[0].total == 4);
    CHECK(out[1].i == 0);
    CHECK(out[1].j == 2);
    CHECK(out[1].total == 1);
}

TEST_CASE("identical seeds reproduce ledgers bit for bit") {
    const auto m = generate_synthetic(SyntheticKind::UniformGap, 5, 0.3, 11);
    const auto profile = condorcet_analysis(m);
    auto run_once = [&] {
        BudgetState budget(500);
        RegretLedger ledger(profile.gaps, checkpoint_grid(500, 64));
        BatchPlan plan{2, {PlanEntry{0, 1, 100}, PlanEntry{1, 2, 100}, PlanEntry{3, 4, 100}}};
        execute_batch(plan, m, budget, ledger, 321);
        return ledger;
    };
    const auto l1 = run_once();
    const auto l2 = run_once();
    CHECK(l1.cumulative() == l2.cumulative());
    CHECK(l1.grid_regret() == l2.grid_regret());
    CHECK(l1.per_arm_comparisons() == l2.per_arm_comparisons());
}

TEST_CASE("regret identity holds against per-arm tallies") {
    const auto m = generate_synthetic(SyntheticKind::LinearOrder, 6, 0.4, 3);
    const auto profile = condorcet_analysis(m);
    BudgetState budget(2000);
    RegretLedger ledger(profile.gaps, checkpoint_grid(2000, 32));
    std::vector<PlanEntry> es;
    for (Arm i = 0; i < 6; ++i)
        for (Arm j = i + 1; j < 6; ++j) es.push_back(PlanEntry{i, j, 50});
    BatchPlan plan{1, std::move(es)};
    execute_batch(plan, m, budget, ledger, 17);
    play_filler(0, budget, ledger);
    CHECK(ledger.t() == 2000);
    CHECK(ledger.identity_residual() <=
          1e-9 * std::max(1.0, ledger.cumulative()));
}

TEST_CASE("filler consumes the remaining budget at the arm's own gap") {
    const auto m = from_rows({{0.5, 0.7}, {0.3, 0.5}});
    const auto profile = condorcet_analysis(m);

    SECTION("winner filler is free") {
        BudgetState budget(100);
        RegretLedger ledger(profile.gaps, checkpoint_grid(100, 8));
        CHECK(play_filler(0, budget, ledger) == 100);
        CHECK(budget.remaining() == 0);
        CHECK(ledger.cumulative() == 0.0);
    }
    SECTION("suboptimal filler pays its gap per step") {
        BudgetState budget(10);
        RegretLedger ledger(profile.gaps, checkpoint_grid(10, 4));
        CHECK(play_filler(1, budget, ledger) == 10);
        CHECK(ledger.cumulative() == Approx(2.0));  // 10 * (0.2 + 0.2)/2
    }
    SECTION("empty budget is a no-op") {
        BudgetState budget(0);
        RegretLedger ledger(profile.gaps, checkpoint_grid(1, 4));
        CHECK(play_filler(1, budget, ledger) == 0);
        CHECK(ledger.t() == 0);
    }
}

TEST_CASE("boundary marks deduplicate") {
    RegretLedger ledger({0.0, 0.2}, checkpoint_grid(10, 4));
    ledger.record(0, 1);
    ledger.mark_boundary();
    ledger.mark_boundary();
    REQUIRE(ledger.boundaries().size() == 1);
    CHECK(ledger.boundaries()[0].first == 1);
}

TEST_CASE("empirical win rates concentrate around the truth") {
    // p = 0.7 over 1e5 draws: at least 95 of 100 seeds inside +-0.005.
    const double p = 0.7;
    const std::uint64_t draws = 100000;
    int inside = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        std::uint64_t wins = 0;
        for (std::uint64_t k = 0; k < draws; ++k)
            wins += duel_lower_wins(seed, 1, 0, 1, k, p) ? 1 : 0;
        const double rate = static_cast<double>(wins) / static_cast<double>(draws);
        if (rate >= 0.695 && rate <= 0.705) ++inside;
    }
    CHECK(inside >= 95);
}
