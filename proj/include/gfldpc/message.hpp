#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "gf.hpp"
#include "rng.hpp"
#include "stats.hpp"

namespace gfldpc {

// q-dimensional probability vector; component i belongs to field element i
struct ProbVec {
    std::vector<double> v;

    ProbVec() = default;
    explicit ProbVec(std::size_t q, double fill = 0.0) : v(q, fill) {}
    ProbVec(std::initializer_list<double> init) : v(init) {}

    std::size_t q() const { return v.size(); }
    double& operator[](std::size_t i) { return v[i]; }
    double operator[](std::size_t i) const { return v[i]; }
};

// (q-1)-dimensional LLR vector w_1..w_{q-1}; w_0 == 0 implicitly.
// Stored at offsets 0..q-2, component i of the message is v[i-1].
struct LlrVec {
    std::vector<double> v;

    LlrVec() = default;
    explicit LlrVec(std::size_t q, double fill = 0.0) : v(q - 1, fill) {}
    LlrVec(std::initializer_list<double> init) : v(init) {}

    std::size_t q() const { return v.size() + 1; }
    // component by field index, i in [0, q)
    double at(std::size_t i) const { return i == 0 ? 0.0 : v[i - 1]; }
};

inline constexpr double kProbFloor = 1e-300;
inline constexpr double kOrbitTol = 1e-12;

inline void normalize(ProbVec& x) {
    double s = 0.0;
    for (double c : x.v) s += c;
    if (s <= 0.0) throw std::domain_error("message: cannot normalize zero vector");
    for (double& c : x.v) c /= s;
}

inline LlrVec llr_of(const ProbVec& x) {
    const double x0 = std::max(x.v[0], kProbFloor);
    LlrVec w(x.q());
    for (std::size_t i = 1; i < x.q(); ++i) {
        w.v[i - 1] = x.v[i] <= 0.0 ? std::numeric_limits<double>::infinity()
                                   : std::log(x0 / x.v[i]);
    }
    return w;
}

inline ProbVec prob_of(const LlrVec& w) {
    const std::size_t q = w.q();
    // shift by the smallest LLR before exponentiation: the largest exponent
    // becomes zero, so no overflow for |w| up to ~700 and beyond
    double wmin = 0.0;
    for (double c : w.v) wmin = std::min(wmin, c);
    ProbVec x(q);
    double s = 0.0;
    x.v[0] = std::exp(wmin);  // e^{-(0 - wmin)}
    s += x.v[0];
    for (std::size_t i = 1; i < q; ++i) {
        const double e = std::isinf(w.v[i - 1]) ? 0.0 : std::exp(-(w.v[i - 1] - wmin));
        x.v[i] = e;
        s += e;
    }
    for (double& c : x.v) c /= s;
    return x;
}

// (x^{+g})_i = x_{i+g}, index addition over GF(q)
inline ProbVec shift_prob(const FieldSpec& fs, const ProbVec& x, int g) {
    ProbVec y(x.q());
    for (int i = 0; i < fs.q(); ++i) y.v[static_cast<std::size_t>(i)] = x.v[static_cast<std::size_t>(fs.add(i, g))];
    return y;
}

// w_i^{+g} = w_{i+g} - w_g
inline LlrVec shift_llr(const FieldSpec& fs, const LlrVec& w, int g) {
    LlrVec y(w.q());
    const double wg = w.at(static_cast<std::size_t>(g));
    for (int i = 1; i < fs.q(); ++i)
        y.v[static_cast<std::size_t>(i - 1)] = w.at(static_cast<std::size_t>(fs.add(i, g))) - wg;
    return y;
}

// (x^{xg})_i = x_{i*g}, g != 0
inline ProbVec scale_prob(const FieldSpec& fs, const ProbVec& x, int g) {
    if (g == 0) throw std::domain_error("message: scale by zero element");
    ProbVec y(x.q());
    for (int i = 0; i < fs.q(); ++i) y.v[static_cast<std::size_t>(i)] = x.v[static_cast<std::size_t>(fs.mul(i, g))];
    return y;
}

inline LlrVec scale_llr(const FieldSpec& fs, const LlrVec& w, int g) {
    if (g == 0) throw std::domain_error("message: scale by zero element");
    LlrVec y(w.q());
    for (int i = 1; i < fs.q(); ++i) y.v[static_cast<std::size_t>(i - 1)] = w.at(static_cast<std::size_t>(fs.mul(i, g)));
    return y;
}

inline bool approx_equal(const ProbVec& a, const ProbVec& b, double tol = kOrbitTol) {
    if (a.q() != b.q()) return false;
    for (std::size_t i = 0; i < a.q(); ++i)
        if (std::fabs(a.v[i] - b.v[i]) > tol) return false;
    return true;
}

// orbit x* = {x^{+g} : g in GF(q)}, deduplicated componentwise
inline std::vector<ProbVec> orbit(const FieldSpec& fs, const ProbVec& x, double tol = kOrbitTol) {
    std::vector<ProbVec> out;
    for (int g = 0; g < fs.q(); ++g) {
        ProbVec y = shift_prob(fs, x, g);
        bool seen = false;
        for (const ProbVec& z : out)
            if (approx_equal(y, z, tol)) {
                seen = true;
                break;
            }
        if (!seen) out.push_back(std::move(y));
    }
    return out;
}

// n(x) = #{g : x^{+g} = x}
inline int multiplicity(const FieldSpec& fs, const ProbVec& x, double tol = kOrbitTol) {
    int n = 0;
    for (int g = 0; g < fs.q(); ++g)
        if (approx_equal(shift_prob(fs, x, g), x, tol)) ++n;
    return n;
}

// probability of a wrong decision given the all-zero symbol: 0 when x_0 is
// the strict maximum, (k-1)/k for a k-way tie including index 0, 1 otherwise
inline double pe_of(const ProbVec& x) {
    double mx = x.v[0];
    for (double c : x.v) mx = std::max(mx, c);
    int ties = 0;
    for (double c : x.v)
        if (c == mx) ++ties;
    if (x.v[0] != mx) return 1.0;
    return static_cast<double>(ties - 1) / static_cast<double>(ties);
}

inline MeanStderr pe_mean(const std::vector<ProbVec>& samples) {
    if (samples.empty()) throw std::domain_error("pe_mean: empty sample set");
    std::vector<double> vals;
    vals.reserve(samples.size());
    for (const ProbVec& x : samples) vals.push_back(pe_of(x));
    return mean_stderr(vals);
}

// f(x) = (1/(q-1)) sum_{i != j} sqrt(x_i x_j) = ((sum sqrt x_i)^2 - sum x_i)/(q-1)
inline double f_of(const ProbVec& x) {
    double srt = 0.0, s = 0.0;
    for (double c : x.v) {
        srt += std::sqrt(std::max(c, 0.0));
        s += c;
    }
    return (srt * srt - s) / static_cast<double>(x.q() - 1);
}

inline ProbVec random_permute(const FieldSpec& fs, const ProbVec& x, Rng& rng) {
    const int g = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(fs.q() - 1)));
    return scale_prob(fs, x, g);
}

inline LlrVec random_permute(const FieldSpec& fs, const LlrVec& w, Rng& rng) {
    const int g = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(fs.q() - 1)));
    return scale_llr(fs, w, g);
}

struct DEstimate {
    double value = 0.0;    // mean of f over the samples, valid for symmetric laws
    double stderr_ = 0.0;
    double raw = 0.0;      // direct estimator E sqrt(X~_1 / X~_0)
    double raw_stderr = 0.0;
};

inline DEstimate d_estimate(const FieldSpec& fs, const std::vector<ProbVec>& samples, Rng& rng) {
    if (samples.empty()) throw std::domain_error("d_estimate: empty sample set");
    std::vector<double> fvals, rvals;
    fvals.reserve(samples.size());
    rvals.reserve(samples.size());
    for (const ProbVec& x : samples) {
        fvals.push_back(f_of(x));
        const int g = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(fs.q() - 1)));
        // (x^{xg})_1 = x_g, (x^{xg})_0 = x_0
        const double x0 = std::max(x.v[0], kProbFloor);
        rvals.push_back(std::sqrt(x.v[static_cast<std::size_t>(g)] / x0));
    }
    const MeanStderr fm = mean_stderr(fvals);
    const MeanStderr rm = mean_stderr(rvals);
    return {fm.mean, fm.stderr_, rm.mean, rm.stderr_};
}

// Maximum violation of the symmetry identity Pr[X = x | X in x*] = x_0 n(x)
// over the atoms of an exact finite distribution.
inline double check_symmetry(const FieldSpec& fs, const std::vector<std::pair<ProbVec, double>>& dist,
                             double tol = kOrbitTol) {
    double worst = 0.0;
    for (const auto& [x, px] : dist) {
        double orbit_mass = 0.0;
        for (const auto& [z, pz] : dist) {
            bool in_orbit = false;
            for (int g = 0; g < fs.q() && !in_orbit; ++g)
                if (approx_equal(shift_prob(fs, x, g), z, tol)) in_orbit = true;
            if (in_orbit) orbit_mass += pz;
        }
        const double expected = x.v[0] * static_cast<double>(multiplicity(fs, x, tol)) * orbit_mass;
        worst = std::max(worst, std::fabs(px - expected));
    }
    return worst;
}

}  // namespace gfldpc
