#pragma once

// Computable quantities from the regret analysis, for overlay plots and
// threshold sanity checks.  Natural logarithms throughout.
//
//   c_delta(q, d)   = ceil( (1/2) log_q(1/d) )
//   a_constant      = (32 / dmin^2) ln(2 K^2)
//   r_delta         = max( c_delta + 1, smallest r with q^r >= 2 A ln A )
//
// regret_bound_expected evaluates the three-term expected-regret expression
// with every hidden constant set to 1; it is a shape-only overlay, never a
// pass/fail threshold.

#include <cmath>
#include <cstdint>
#include <span>

#include "duelbatch/errors.hpp"
#include "duelbatch/prefmat.hpp"

namespace duelbatch {

namespace detail {

// ceil with a relative backoff so values that are mathematically integers
// (e.g. log_2 4) are not pushed up by floating-point noise.
inline long ceil_tol(double x) {
    return static_cast<long>(std::ceil(x - 1e-9 * std::max(1.0, std::fabs(x))));
}

}  // namespace detail

struct BoundInputs {
    Arm k = 2;
    std::uint64_t t_budget = 2;
    unsigned b_rounds = 1;
    double delta_min = 0.5;
    double delta = 0.5;
};

inline void validate(const BoundInputs& in) {
    if (in.k < 2) throw DomainError("bounds: K >= 2 required");
    if (in.t_budget < 2) throw DomainError("bounds: T >= 2 required");
    const double log2t = std::log2(static_cast<double>(in.t_budget));
    if (in.b_rounds < 1 || static_cast<double>(in.b_rounds) > log2t + 1e-9)
        throw DomainError("bounds: need 1 <= B <= log2(T)");
    if (!(in.delta_min > 0.0 && in.delta_min <= 0.5))
        throw DomainError("bounds: need 0 < delta_min <= 1/2");
    if (!(in.delta > 0.0 && in.delta < 1.0)) throw DomainError("bounds: need 0 < delta < 1");
}

inline long c_delta(double q, double delta) {
    if (!(q > 1.0)) throw DomainError("c_delta: q > 1 required");
    if (!(delta > 0.0 && delta < 1.0)) throw DomainError("c_delta: 0 < delta < 1 required");
    const long v = detail::ceil_tol(0.5 * std::log(1.0 / delta) / std::log(q));
    return std::max(v, 0L);
}

inline double a_constant(Arm k, double delta_min) {
    if (k < 2) throw DomainError("a_constant: K >= 2 required");
    if (!(delta_min > 0.0)) throw DomainError("a_constant: delta_min > 0 required");
    return 32.0 / (delta_min * delta_min) * std::log(2.0 * static_cast<double>(k) * k);
}

// Smallest integer r >= c_delta(q,delta) + 1 with q^r >= 2 A ln A.
inline long r_delta(double q, double delta, Arm k, double delta_min) {
    const long floor_r = c_delta(q, delta) + 1;
    const double a = a_constant(k, delta_min);
    const double target = 2.0 * a * std::log(a);
    long r = floor_r;
    if (target > 1.0) r = std::max(floor_r, detail::ceil_tol(std::log(target) / std::log(q)));
    return r;
}

// Expected-regret expression with unit constants (shape only):
//   T^{1/B} K^2 ln(K)/dmin^2 * ln(ln(K)/dmin)  +  T^{2/B} K^2
//   + sum over gaps g > 0 of T^{1/B} ln(K T)/g
inline double regret_bound_expected(const BoundInputs& in, std::span<const double> gaps) {
    validate(in);
    const double t = static_cast<double>(in.t_budget);
    const double k = static_cast<double>(in.k);
    const double t1b = std::pow(t, 1.0 / static_cast<double>(in.b_rounds));
    const double t2b = std::pow(t, 2.0 / static_cast<double>(in.b_rounds));
    const double lead = t1b * k * k * std::log(k) / (in.delta_min * in.delta_min) *
                        std::log(std::log(k) / in.delta_min);
    const double mid = t2b * k * k;
    double tail = 0.0;
    for (double g : gaps)
        if (g > 0.0) tail += t1b * std::log(k * t) / g;
    return lead + mid + tail;
}

}  // namespace duelbatch
