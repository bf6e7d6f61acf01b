#pragma once

// Running pairwise comparison counts and the confidence/score formulas
// built on them.  All logarithms are natural.
//
//   phat(i,j)        = wins(i over j) / n(i,j)            (1/2 before any data)
//   c_radius(n)      = sqrt( 2 ln(2 K^2 q_r) / n )
//   gamma_radius(n)  = sqrt( ln(K^2 B T) / (2 n) )
//   kl_bernoulli     = p ln(p/q) + (1-p) ln((1-p)/(1-q))
//   i_score(j)       = sum over opponents i with phat(i,j) >= 1/2 of
//                      n(i,j) * kl_bernoulli(phat(i,j), 1/2)
//
// The round's per-pair repetition count is q_r = floor(q^r) with q = T^(1/B).

#include <cassert>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "duelbatch/errors.hpp"
#include "duelbatch/prefmat.hpp"

namespace duelbatch {

// floor(q^r) for q = T^(1/B), evaluated in long double with a relative nudge
// so that mathematically exact integer powers (e.g. T = 2^B, r = B) do not
// land one below the true value.
inline std::uint64_t round_reps(std::uint64_t t_budget, unsigned b_rounds, unsigned r) {
    if (b_rounds == 0) throw DomainError("round_reps: B must be >= 1");
    if (t_budget == 0) throw DomainError("round_reps: T must be >= 1");
    const long double x = std::exp(std::log(static_cast<long double>(t_budget)) *
                                   static_cast<long double>(r) / static_cast<long double>(b_rounds));
    return static_cast<std::uint64_t>(std::floor(x * (1.0L + 1e-12L)));
}

struct RoundContext {
    unsigned r = 1;          // 1-based round index
    double q = 1.0;          // batch growth base T^(1/B)
    std::uint64_t q_r = 1;   // floor(q^r), per-pair repetitions this round
    unsigned b_rounds = 1;
    std::uint64_t t_budget = 1;

    static RoundContext make(std::uint64_t t_budget, unsigned b_rounds, unsigned r) {
        RoundContext c;
        c.r = r;
        c.b_rounds = b_rounds;
        c.t_budget = t_budget;
        c.q = std::pow(static_cast<double>(t_budget), 1.0 / static_cast<double>(b_rounds));
        c.q_r = round_reps(t_budget, b_rounds, r);
        return c;
    }
};

// Directed win counts per ordered pair; n(i,j) is derived, so the symmetry
// n(i,j) = n(j,i) = wins(i,j) + wins(j,i) holds by construction.
class PairStats {
public:
    explicit PairStats(Arm k) : k_(k), w_(static_cast<std::size_t>(k) * k, 0) {}

    Arm size() const noexcept { return k_; }

    void record(Arm i, Arm j, std::uint64_t wins_i, std::uint64_t total) {
        if (i == j) throw DomainError("PairStats::record: self-pairs carry no information");
        if (wins_i > total) throw DomainError("PairStats::record: wins exceed total");
        assert(i < k_ && j < k_);
        w_[idx(i, j)] += wins_i;
        w_[idx(j, i)] += total - wins_i;
    }

    std::uint64_t wins(Arm i, Arm j) const noexcept { return w_[idx(i, j)]; }

    std::uint64_t n(Arm i, Arm j) const noexcept { return w_[idx(i, j)] + w_[idx(j, i)]; }

    double phat(Arm i, Arm j) const noexcept {
        const std::uint64_t total = n(i, j);
        if (total == 0) return 0.5;
        return static_cast<double>(wins(i, j)) / static_cast<double>(total);
    }

private:
    std::size_t idx(Arm i, Arm j) const noexcept { return static_cast<std::size_t>(i) * k_ + j; }

    Arm k_;
    std::vector<std::uint64_t> w_;
};

inline double c_radius(std::uint64_t n_ij, Arm k, std::uint64_t q_r) {
    if (n_ij == 0) throw DomainError("c_radius: undefined for n = 0");
    if (k < 2 || q_r < 1) throw DomainError("c_radius: need K >= 2 and q_r >= 1");
    const double arg = 2.0 * static_cast<double>(k) * k * static_cast<double>(q_r);
    return std::sqrt(2.0 * std::log(arg) / static_cast<double>(n_ij));
}

inline double gamma_radius(std::uint64_t n_ij, Arm k, unsigned b_rounds, std::uint64_t t_budget) {
    if (n_ij == 0) throw DomainError("gamma_radius: undefined for n = 0");
    const double arg = static_cast<double>(k) * k * static_cast<double>(b_rounds) *
                       static_cast<double>(t_budget);
    return std::sqrt(std::log(arg) / (2.0 * static_cast<double>(n_ij)));
}

// KL divergence between Bernoulli(p) and Bernoulli(q), with 0 ln 0 = 0.
inline double kl_bernoulli(double p, double q) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("kl_bernoulli: p outside [0,1]");
    if (!(q > 0.0 && q < 1.0)) throw DomainError("kl_bernoulli: q must lie in (0,1)");
    double acc = 0.0;
    if (p > 0.0) acc += p * std::log(p / q);
    if (p < 1.0) acc += (1.0 - p) * std::log((1.0 - p) / (1.0 - q));
    return std::max(acc, 0.0);
}

// Evidence that j is not the winner: KL-weighted wins of active opponents
// over j.  Unseen pairs contribute 0 (phat = 1/2 has zero divergence).
inline double i_score(const PairStats& stats, Arm j, std::span<const Arm> active) {
    double acc = 0.0;
    for (Arm i : active) {
        if (i == j) continue;
        const std::uint64_t n_ij = stats.n(i, j);
        if (n_ij == 0) continue;
        const double p = stats.phat(i, j);
        if (p >= 0.5) acc += kl_bernoulli(p, 0.5) * static_cast<double>(n_ij);
    }
    return acc;
}

inline double i_star(const PairStats& stats, std::span<const Arm> active) {
    if (active.empty()) throw EmptySetError("i_star: empty active set");
    double best = std::numeric_limits<double>::infinity();
    for (Arm j : active) best = std::min(best, i_score(stats, j, active));
    return best;
}

}  // namespace duelbatch
