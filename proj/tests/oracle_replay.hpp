#pragma once

// Test-only reference implementation: a direct, self-contained replay of the
// batched duel policies, written against raw win-count tables rather than
// the library's plan/eliminate code paths.  It shares only the outcome
// stream primitive (duel_lower_wins) and the q_r = floor(q^r) helper, so a
// library run and a replay see identical randomness and must agree on every
// round: active set, candidate, champion flag, plan, eliminations.
//
// Conventions mirrored here (the library documents the same ones): plans
// deduplicate unordered pairs and execute in (min,max)-sorted order; budget
// truncation is per draw; elimination decisions use a frozen snapshot of
// the active set; a pass that would eliminate everyone spares the round's
// candidate; a truncated round runs no elimination pass.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

#include "duelbatch/env.hpp"
#include "duelbatch/prefmat.hpp"
#include "duelbatch/stats.hpp"

namespace oracle {

using duelbatch::Arm;

struct PlanItem {
    Arm i, j;
    std::uint64_t count;
};

struct Round {
    std::vector<Arm> active;
    Arm candidate = 0;
    bool champion = false;
    std::vector<PlanItem> plan;
    std::vector<Arm> eliminated;
    bool truncated = false;
};

struct Result {
    std::vector<Round> rounds;
    std::vector<Arm> final_active;
    std::uint64_t comparisons = 0;  // including filler
};

inline Result replay(bool kl_rule, const duelbatch::PreferenceMatrix& m, std::uint64_t t_total,
                     unsigned b_rounds, std::uint64_t seed, double f_of_k) {
    const Arm k = m.size();
    std::vector<std::vector<std::uint64_t>> w(k, std::vector<std::uint64_t>(k, 0));
    auto n_of = [&](Arm a, Arm b) { return w[a][b] + w[b][a]; };
    auto phat = [&](Arm a, Arm b) -> double {
        const std::uint64_t n = n_of(a, b);
        return n == 0 ? 0.5 : static_cast<double>(w[a][b]) / static_cast<double>(n);
    };
    auto kl_div = [](double p, double q) {
        double acc = 0.0;
        if (p > 0.0) acc += p * std::log(p / q);
        if (p < 1.0) acc += (1.0 - p) * std::log((1.0 - p) / (1.0 - q));
        return std::max(acc, 0.0);
    };

    std::vector<Arm> active(k);
    std::iota(active.begin(), active.end(), 0);

    Result res;
    std::uint64_t used = 0;
    unsigned r = 1;
    while (used < t_total) {
        if (active.size() == 1) {
            used = t_total;  // play (i,i) for the remaining trials
            break;
        }
        const std::uint64_t q_r = duelbatch::round_reps(t_total, b_rounds, r);
        const std::uint64_t q_prev = duelbatch::round_reps(t_total, b_rounds, r - 1);

        // defeated sets from statistics at the end of round r-1
        std::vector<std::vector<Arm>> defeated(k);
        for (Arm i : active) {
            for (Arm j : active) {
                if (i == j) continue;
                const std::uint64_t n = n_of(i, j);
                if (n == 0) continue;
                const double c = std::sqrt(
                    2.0 *
                    std::log(2.0 * static_cast<double>(k) * k * static_cast<double>(q_prev)) /
                    static_cast<double>(n));
                if (phat(i, j) > 0.5 + c) defeated[i].push_back(j);
            }
        }
        Arm cand = active.front();
        for (Arm i : active)
            if (defeated[i].size() > defeated[cand].size()) cand = i;
        const bool champ = defeated[cand].size() == active.size() - 1;

        // comparisons: defeated arms only face the candidate; everyone else
        // faces the whole active set
        std::vector<std::pair<Arm, Arm>> pairs;
        for (Arm i : active) {
            if (i == cand) continue;
            const auto& dc = defeated[cand];
            if (std::find(dc.begin(), dc.end(), i) != dc.end()) {
                pairs.emplace_back(std::min(i, cand), std::max(i, cand));
            } else {
                for (Arm j : active)
                    if (j != i) pairs.emplace_back(std::min(i, j), std::max(i, j));
            }
        }
        std::sort(pairs.begin(), pairs.end());
        pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());

        Round rec;
        rec.active = active;
        rec.candidate = cand;
        rec.champion = champ;
        std::uint64_t scheduled = 0;
        for (auto [i, j] : pairs) {
            rec.plan.push_back(PlanItem{i, j, q_r});
            scheduled += q_r;
        }

        std::uint64_t executed = 0;
        for (auto [i, j] : pairs) {
            const std::uint64_t todo = std::min<std::uint64_t>(q_r, t_total - used);
            std::uint64_t wins_i = 0;
            for (std::uint64_t d = 0; d < todo; ++d)
                wins_i += duelbatch::duel_lower_wins(seed, r, i, j, d, m.at(i, j)) ? 1 : 0;
            w[i][j] += wins_i;
            w[j][i] += todo - wins_i;
            used += todo;
            executed += todo;
        }
        rec.truncated = executed < scheduled;

        if (!rec.truncated) {
            std::vector<Arm> victims;
            if (kl_rule) {
                auto iscore = [&](Arm j) {
                    double acc = 0.0;
                    for (Arm i : active) {
                        if (i == j || n_of(i, j) == 0) continue;
                        const double p = phat(i, j);
                        if (p >= 0.5) acc += kl_div(p, 0.5) * static_cast<double>(n_of(i, j));
                    }
                    return acc;
                };
                double star = iscore(active.front());
                for (Arm j : active) star = std::min(star, iscore(j));
                const double threshold = std::log(static_cast<double>(t_total)) + f_of_k;
                for (Arm j : active)
                    if (iscore(j) - star > threshold) victims.push_back(j);
            } else {
                for (Arm j : active) {
                    for (Arm i : active) {
                        if (i == j) continue;
                        const std::uint64_t n = n_of(i, j);
                        if (n == 0) continue;
                        const double g =
                            std::sqrt(std::log(static_cast<double>(k) * k *
                                               static_cast<double>(b_rounds) *
                                               static_cast<double>(t_total)) /
                                      (2.0 * static_cast<double>(n)));
                        if (phat(i, j) > 0.5 + g) {
                            victims.push_back(j);
                            break;
                        }
                    }
                }
            }
            if (!victims.empty() && victims.size() == active.size())
                victims.erase(std::remove(victims.begin(), victims.end(), cand), victims.end());
            for (Arm a : victims)
                active.erase(std::remove(active.begin(), active.end(), a), active.end());
            rec.eliminated = victims;
        }
        res.rounds.push_back(std::move(rec));
        ++r;
    }
    res.final_active = active;
    res.comparisons = t_total;
    return res;
}

}  // namespace oracle
