#pragma once

// Ground-truth duel probabilities.  A PreferenceMatrix holds p(i,j), the
// probability that arm i wins a single noisy comparison against arm j.
// Rows and columns are complementary: p(i,j) + p(j,i) = 1, p(i,i) = 1/2.
//
// condorcet_analysis finds the arm (if any) that beats every other arm
// with probability strictly above 1/2, and derives the per-arm gaps
// gap(j) = p(winner,j) - 1/2 used for regret accounting.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "duelbatch/errors.hpp"
#include "duelbatch/rng.hpp"

namespace duelbatch {

using Arm = std::uint32_t;

// Absolute slack allowed when validating complementarity and the diagonal.
inline constexpr double kProbTolerance = 1e-12;

class PreferenceMatrix {
public:
    // Validates on construction; instances are immutable afterwards.
    PreferenceMatrix(Arm k, std::vector<double> probs) : k_(k), p_(std::move(probs)) {
        if (k_ < 1) throw ParamError("PreferenceMatrix: need at least one arm");
        if (p_.size() != static_cast<std::size_t>(k_) * k_)
            throw ParamError("PreferenceMatrix: matrix must be KxK");
        check_invariants();
    }

    Arm size() const noexcept { return k_; }

    double at(Arm i, Arm j) const noexcept { return p_[static_cast<std::size_t>(i) * k_ + j]; }

    const std::vector<double>& data() const noexcept { return p_; }

private:
    void check_invariants() const {
        for (Arm i = 0; i < k_; ++i) {
            for (Arm j = 0; j < k_; ++j) {
                const double v = at(i, j);
                if (!(v >= 0.0 && v <= 1.0)) {
                    throw RangeError("p(" + std::to_string(i) + "," + std::to_string(j) +
                                     ") = " + std::to_string(v) + " outside [0,1]");
                }
            }
        }
        for (Arm i = 0; i < k_; ++i) {
            if (std::fabs(at(i, i) - 0.5) > kProbTolerance)
                throw DiagonalError("p(" + std::to_string(i) + "," + std::to_string(i) + ") != 1/2");
        }
        for (Arm i = 0; i < k_; ++i) {
            for (Arm j = i + 1; j < k_; ++j) {
                if (std::fabs(at(i, j) + at(j, i) - 1.0) > kProbTolerance) {
                    throw AsymmetryError("p(" + std::to_string(i) + "," + std::to_string(j) +
                                         ") + p(" + std::to_string(j) + "," + std::to_string(i) +
                                         ") != 1");
                }
            }
        }
    }

    Arm k_;
    std::vector<double> p_;
};

// Re-checks the construction invariants; throws on violation.
inline void validate(const PreferenceMatrix& m) {
    PreferenceMatrix copy(m.size(), m.data());
    (void)copy;
}

struct GapProfile {
    std::optional<Arm> winner;        // absent when no arm dominates all others
    std::vector<double> gaps;         // p(winner,j) - 1/2; all zero without a winner
    std::optional<double> delta_min;  // smallest strictly positive gap
};

inline GapProfile condorcet_analysis(const PreferenceMatrix& m) {
    const Arm k = m.size();
    GapProfile out;
    out.gaps.assign(k, 0.0);
    for (Arm i = 0; i < k; ++i) {
        bool dominates = true;
        for (Arm j = 0; j < k; ++j) {
            if (j != i && !(m.at(i, j) > 0.5)) {
                dominates = false;
                break;
            }
        }
        if (dominates) {
            out.winner = i;
            break;  // at most one arm can beat all others
        }
    }
    if (out.winner) {
        const Arm w = *out.winner;
        double dmin = 1.0;
        bool any = false;
        for (Arm j = 0; j < k; ++j) {
            out.gaps[j] = m.at(w, j) - 0.5;
            if (out.gaps[j] > 0.0) {
                dmin = std::min(dmin, out.gaps[j]);
                any = true;
            }
        }
        out.gaps[w] = 0.0;
        if (any) out.delta_min = dmin;
    }
    return out;
}

// ---------------------------------------------------------------------------
// CSV format: K lines of K comma-separated probabilities, row i = p(i,.).
// '#'-prefixed lines are comments; values are written with 12 significant
// digits so save/load round-trips at that precision.

inline PreferenceMatrix load_csv(std::istream& in, const std::string& name = "<stream>") {
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::vector<double> row;
        std::size_t pos = 0, col = 0;
        while (pos <= line.size()) {
            std::size_t comma = line.find(',', pos);
            if (comma == std::string::npos) comma = line.size();
            ++col;
            const char* first = line.data() + pos;
            const char* last = line.data() + comma;
            while (first < last && (*first == ' ' || *first == '\t')) ++first;
            while (last > first && (last[-1] == ' ' || last[-1] == '\t')) --last;
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(first, last, v);
            if (ec != std::errc() || ptr != last) {
                throw ParseError(name + ":" + std::to_string(lineno) + ": column " +
                                 std::to_string(col) + ": cannot parse probability");
            }
            row.push_back(v);
            pos = comma + 1;
            if (comma == line.size()) break;
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError(name + ": no data rows");
    const std::size_t k = rows.size();
    std::vector<double> flat;
    flat.reserve(k * k);
    for (std::size_t r = 0; r < k; ++r) {
        if (rows[r].size() != k) {
            throw ParseError(name + ": row " + std::to_string(r + 1) + " has " +
                             std::to_string(rows[r].size()) + " columns, expected " +
                             std::to_string(k));
        }
        flat.insert(flat.end(), rows[r].begin(), rows[r].end());
    }
    return PreferenceMatrix(static_cast<Arm>(k), std::move(flat));
}

inline PreferenceMatrix load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open matrix file: " + path);
    return load_csv(in, path);
}

inline void save_csv(const PreferenceMatrix& m, std::ostream& out) {
    char buf[64];
    for (Arm i = 0; i < m.size(); ++i) {
        for (Arm j = 0; j < m.size(); ++j) {
            std::snprintf(buf, sizeof buf, "%.12g", m.at(i, j));
            if (j) out << ',';
            out << buf;
        }
        out << '\n';
    }
}

inline void save_csv(const PreferenceMatrix& m, const std::string& path) {
    std::ofstream out(path, std::ios::binary);  // LF endings everywhere
    if (!out) throw IoError("cannot write matrix file: " + path);
    save_csv(m, out);
}

// ---------------------------------------------------------------------------
// Synthetic instances.

enum class SyntheticKind { UniformGap, LinearOrder };

inline SyntheticKind parse_synthetic_kind(const std::string& s) {
    if (s == "uniform-gap") return SyntheticKind::UniformGap;
    if (s == "linear-order") return SyntheticKind::LinearOrder;
    throw ParamError("unknown synthetic kind: " + s);
}

inline const char* to_string(SyntheticKind k) {
    return k == SyntheticKind::UniformGap ? "uniform-gap" : "linear-order";
}

// uniform-gap: arm 0 beats everyone with probability 1/2 + eps; remaining
// pairs are seeded-uniform in [1/2 - eps/2, 1/2 + eps/2], so arm 0 is the
// unique dominant arm and every gap against it equals eps.
//
// linear-order: p(i,j) = 1/2 + eps*(j-i)/(K-1), clipped to [0.01, 0.99];
// lower indices beat higher ones with probability growing in the distance.
inline PreferenceMatrix generate_synthetic(SyntheticKind kind, Arm k, double eps,
                                           std::uint64_t seed) {
    if (k < 2) throw ParamError("generate_synthetic: need K >= 2");
    if (!(eps > 0.0 && eps <= 0.5)) throw ParamError("generate_synthetic: need 0 < eps <= 1/2");
    std::vector<double> p(static_cast<std::size_t>(k) * k, 0.5);
    auto set = [&](Arm i, Arm j, double v) {
        p[static_cast<std::size_t>(i) * k + j] = v;
        p[static_cast<std::size_t>(j) * k + i] = 1.0 - v;
    };
    if (kind == SyntheticKind::UniformGap) {
        for (Arm j = 1; j < k; ++j) set(0, j, 0.5 + eps);
        for (Arm i = 1; i < k; ++i) {
            for (Arm j = i + 1; j < k; ++j) {
                const double u = rng::u01(rng::hash4(seed ^ rng::kMatrixTag, i, j, 0));
                set(i, j, 0.5 - eps / 2.0 + eps * u);
            }
        }
    } else {
        const double floor_p = 0.01;
        for (Arm i = 0; i < k; ++i) {
            for (Arm j = i + 1; j < k; ++j) {
                double v = 0.5 + eps * (static_cast<double>(j) - static_cast<double>(i)) /
                                     static_cast<double>(k - 1);
                v = std::clamp(v, floor_p, 1.0 - floor_p);
                set(i, j, v);  // i < j: the lower index is the stronger arm
            }
        }
    }
    return PreferenceMatrix(k, std::move(p));
}

}  // namespace duelbatch
