#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include "gf.hpp"
#include "message.hpp"
#include "rng.hpp"

namespace gfldpc {

enum class MappingKind { quantization, nonuniform, pam, explicit_points, explicit_symbols };

// delta: GF(q) -> signal set. For AWGN use the mapping carries real signal
// points; for a DMC it carries channel-input symbol indices.
struct Mapping {
    MappingKind kind = MappingKind::explicit_points;
    std::vector<double> points;   // per field element, AWGN signals
    std::vector<int> symbols;     // per field element, DMC input indices
    int alphabet_size = 0;        // DMC input alphabet size (symbol mappings)

    int q() const { return static_cast<int>(points.empty() ? symbols.size() : points.size()); }
    bool is_signal() const { return !points.empty(); }
};

struct ChannelModel {
    enum class Kind { awgn, dmc } kind = Kind::awgn;
    double sigma_z = 1.0;
    std::vector<std::vector<double>> transition;  // rows: input symbol, cols: output

    static ChannelModel awgn(double sigma) {
        if (!(sigma > 0.0)) throw std::domain_error("channel: sigma_z must be positive");
        ChannelModel c;
        c.kind = Kind::awgn;
        c.sigma_z = sigma;
        return c;
    }

    static ChannelModel dmc(std::vector<std::vector<double>> rows) {
        if (rows.empty()) throw std::domain_error("channel: empty transition matrix");
        const std::size_t cols = rows[0].size();
        for (const auto& r : rows) {
            if (r.size() != cols || cols == 0) throw std::domain_error("channel: ragged transition matrix");
            double s = 0.0;
            for (double p : r) {
                if (p < 0.0) throw std::domain_error("channel: negative transition probability");
                s += p;
            }
            if (std::fabs(s - 1.0) > 1e-12) throw std::domain_error("channel: transition row does not sum to 1");
        }
        ChannelModel c;
        c.kind = Kind::dmc;
        c.transition = std::move(rows);
        return c;
    }

    int num_inputs() const { return static_cast<int>(transition.size()); }
    int num_outputs() const { return transition.empty() ? 0 : static_cast<int>(transition[0].size()); }
};

// mean signal energy (1/q) sum delta(i)^2
inline double mapping_energy(const Mapping& map) {
    double e = 0.0;
    for (double x : map.points) e += x * x;
    return e / static_cast<double>(map.points.size());
}

// counts as (symbol, N_a) pairs with sum N_a = q; field indices are assigned
// block-wise ascending, the first N_a0 elements to the first symbol and so on
inline Mapping quantization_mapping(int q, const std::vector<std::pair<int, int>>& targets) {
    int total = 0;
    int max_sym = -1;
    for (const auto& [sym, cnt] : targets) {
        if (cnt < 1) throw std::domain_error("mapping: quantization counts must be >= 1");
        if (sym < 0) throw std::domain_error("mapping: negative symbol");
        total += cnt;
        max_sym = std::max(max_sym, sym);
    }
    if (total != q) throw std::domain_error("mapping: quantization counts must sum to q");
    Mapping m;
    m.kind = MappingKind::quantization;
    m.symbols.reserve(static_cast<std::size_t>(q));
    for (const auto& [sym, cnt] : targets)
        for (int k = 0; k < cnt; ++k) m.symbols.push_back(sym);
    m.alphabet_size = max_sym + 1;
    return m;
}

namespace detail {

// inverse standard-normal CDF: rational initial guess plus Newton refinement
// against erfc, good to ~1e-15 over (0, 1)
inline double inverse_normal_cdf(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("inverse_normal_cdf: p outside (0,1)");
    // Beasley-Springer starting point (valid over the whole half-range)
    const double pp = p < 0.5 ? p : 1.0 - p;
    const double t = std::sqrt(-2.0 * std::log(pp));
    double x = t - (2.515517 + 0.802853 * t + 0.010328 * t * t) /
                       (1.0 + 1.432788 * t + 0.189269 * t * t + 0.001308 * t * t * t);
    if (p < 0.5) x = -x;
    for (int it = 0; it < 4; ++it) {
        const double cdf = 0.5 * std::erfc(-x * 0.7071067811865475244);
        const double pdf = 0.3989422804014326779 * std::exp(-0.5 * x * x);
        x -= (cdf - p) / pdf;
    }
    return x;
}

struct GaussLegendre {
    std::vector<double> node;    // on [-1, 1]
    std::vector<double> weight;
};

// nodes and weights by Newton iteration on the Legendre polynomial
inline const GaussLegendre& gauss_legendre_20() {
    static const GaussLegendre gl = [] {
        const int n = 20;
        GaussLegendre g;
        g.node.resize(n);
        g.weight.resize(n);
        for (int i = 0; i < n; ++i) {
            double x = std::cos(3.14159265358979323846 * (i + 0.75) / (n + 0.5));
            double dp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = x;
                for (int k = 2; k <= n; ++k) {
                    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (x * p1 - p0) / (x * x - 1.0);
                const double dx = p1 / dp;
                x -= dx;
                if (std::fabs(dx) < 1e-15) break;
            }
            g.node[static_cast<std::size_t>(i)] = x;
            g.weight[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        return g;
    }();
    return gl;
}

}  // namespace detail

// one-to-one constellation at the q+1-quantiles of N(0,1), scaled to unit
// average energy; strictly increasing and symmetric about zero
inline Mapping nonuniform_constellation(int q) {
    if (q < 2) throw std::domain_error("mapping: q must be >= 2");
    Mapping m;
    m.kind = MappingKind::nonuniform;
    m.points.resize(static_cast<std::size_t>(q));
    for (int i = 0; i < q; ++i)
        m.points[static_cast<std::size_t>(i)] =
            detail::inverse_normal_cdf(static_cast<double>(i + 1) / static_cast<double>(q + 1));
    const double scale = std::sqrt(mapping_energy(m));
    for (double& x : m.points) x /= scale;
    return m;
}

// uniformly spaced, zero mean, unit average energy
inline Mapping pam_constellation(int q) {
    if (q < 2) throw std::domain_error("mapping: q must be >= 2");
    Mapping m;
    m.kind = MappingKind::pam;
    m.points.resize(static_cast<std::size_t>(q));
    for (int i = 0; i < q; ++i) m.points[static_cast<std::size_t>(i)] = 2.0 * i - (q - 1);
    const double scale = std::sqrt(mapping_energy(m));
    for (double& x : m.points) x /= scale;
    return m;
}

inline Mapping explicit_mapping(std::vector<double> points) {
    if (points.size() < 2) throw std::domain_error("mapping: need at least two points");
    Mapping m;
    m.kind = MappingKind::explicit_points;
    m.points = std::move(points);
    return m;
}

// average pairwise Bhattacharyya overlap of the mapped conditionals
inline double delta_param(const ChannelModel& chan, const Mapping& map) {
    const int q = map.q();
    double s = 0.0;
    if (chan.kind == ChannelModel::Kind::awgn) {
        const double inv = 1.0 / (2.0 * chan.sigma_z * chan.sigma_z);
        for (int i = 0; i < q; ++i)
            for (int j = 0; j < q; ++j) {
                if (i == j) continue;
                const double h = 0.5 * (map.points[static_cast<std::size_t>(i)] - map.points[static_cast<std::size_t>(j)]);
                s += std::exp(-h * h * inv);
            }
    } else {
        for (int i = 0; i < q; ++i)
            for (int j = 0; j < q; ++j) {
                if (i == j) continue;
                const auto& ri = chan.transition[static_cast<std::size_t>(map.symbols[static_cast<std::size_t>(i)])];
                const auto& rj = chan.transition[static_cast<std::size_t>(map.symbols[static_cast<std::size_t>(j)])];
                for (std::size_t y = 0; y < ri.size(); ++y) s += std::sqrt(ri[y] * rj[y]);
            }
    }
    return s / (static_cast<double>(q) * static_cast<double>(q - 1));
}

namespace detail {

// integrand of the AWGN equiprobable mutual information at output y, in bits
inline double capacity_integrand(const std::vector<double>& pts, double sigma, double y) {
    const std::size_t q = pts.size();
    thread_local std::vector<double> lt;
    lt.resize(q);
    double mx = -1e300;
    for (std::size_t u = 0; u < q; ++u) {
        const double d = y - pts[u];
        lt[u] = -d * d / (2.0 * sigma * sigma);
        mx = std::max(mx, lt[u]);
    }
    double denom = 0.0;
    for (std::size_t u = 0; u < q; ++u) denom += std::exp(lt[u] - mx);
    const double log_pbar_rel = std::log(denom / static_cast<double>(q));  // log(pbar) - mx - log norm
    const double norm = 1.0 / (sigma * 2.5066282746310005024);
    double h = 0.0;
    for (std::size_t u = 0; u < q; ++u) {
        const double rel = lt[u] - mx;
        const double pu = std::exp(lt[u]) * norm;
        if (pu > 0.0) h += pu * (rel - log_pbar_rel);
    }
    return h / (static_cast<double>(q) * 0.6931471805599453094);
}

inline double capacity_pass(const std::vector<double>& pts, double sigma, double panel_width) {
    // merged +-8 sigma intervals around signal points
    std::vector<double> sorted = pts;
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::pair<double, double>> intervals;
    for (double x : sorted) {
        const double a = x - 8.0 * sigma, b = x + 8.0 * sigma;
        if (!intervals.empty() && a <= intervals.back().second)
            intervals.back().second = std::max(intervals.back().second, b);
        else
            intervals.emplace_back(a, b);
    }
    const GaussLegendre& gl = gauss_legendre_20();
    double total = 0.0;
    for (const auto& [a, b] : intervals) {
        const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / panel_width)));
        const double w = (b - a) / panels;
        for (int k = 0; k < panels; ++k) {
            const double lo = a + k * w;
            const double mid = lo + 0.5 * w;
            for (std::size_t n = 0; n < gl.node.size(); ++n)
                total += 0.5 * w * gl.weight[n] * capacity_integrand(pts, sigma, mid + 0.5 * w * gl.node[n]);
        }
    }
    return total;
}

}  // namespace detail

// I(U; Y') with U uniform over GF(q), in bits per channel use
inline double equiprobable_capacity(const ChannelModel& chan, const Mapping& map) {
    const int q = map.q();
    if (chan.kind == ChannelModel::Kind::dmc) {
        const int ny = chan.num_outputs();
        std::vector<double> pbar(static_cast<std::size_t>(ny), 0.0);
        for (int u = 0; u < q; ++u) {
            const auto& row = chan.transition[static_cast<std::size_t>(map.symbols[static_cast<std::size_t>(u)])];
            for (int y = 0; y < ny; ++y) pbar[static_cast<std::size_t>(y)] += row[static_cast<std::size_t>(y)] / q;
        }
        double c = 0.0;
        for (int u = 0; u < q; ++u) {
            const auto& row = chan.transition[static_cast<std::size_t>(map.symbols[static_cast<std::size_t>(u)])];
            for (int y = 0; y < ny; ++y) {
                const double p = row[static_cast<std::size_t>(y)];
                if (p > 0.0) c += (p / q) * std::log2(p / pbar[static_cast<std::size_t>(y)]);
            }
        }
        return c;
    }
    const double sigma = chan.sigma_z;
    double width = sigma;
    double prev = detail::capacity_pass(map.points, sigma, width);
    for (int it = 0; it < 6; ++it) {
        width *= 0.5;
        const double cur = detail::capacity_pass(map.points, sigma, width);
        if (std::fabs(cur - prev) < 1e-4) return cur;
        prev = cur;
    }
    throw std::runtime_error("equiprobable_capacity: quadrature did not converge");
}

inline double sigma_for_snr_db(const Mapping& map, double snr_db) {
    return std::sqrt(mapping_energy(map) * std::pow(10.0, -snr_db / 10.0));
}

inline double snr_db_for_sigma(const Mapping& map, double sigma) {
    return 10.0 * std::log10(mapping_energy(map) / (sigma * sigma));
}

// SNR (dB) at which the equiprobable capacity reaches target_bits
inline double snr_for_capacity(const Mapping& map, double target_bits) {
    const int q = map.q();
    if (!(target_bits > 0.0) || target_bits >= std::log2(static_cast<double>(q)))
        throw std::domain_error("snr_for_capacity: target outside (0, log2 q)");
    auto cap = [&](double snr) {
        return equiprobable_capacity(ChannelModel::awgn(sigma_for_snr_db(map, snr)), map);
    };
    double lo = -20.0, hi = 30.0;
    while (cap(hi) < target_bits) {
        hi += 10.0;
        if (hi > 100.0) throw std::domain_error("snr_for_capacity: target unreachable");
    }
    while (hi - lo > 0.005) {
        const double mid = 0.5 * (lo + hi);
        (cap(mid) < target_bits ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// unconstrained AWGN limit at a given spectral efficiency per real dimension
inline double unconstrained_limit(double bits_per_dim) {
    if (!(bits_per_dim > 0.0)) throw std::domain_error("unconstrained_limit: bits must be positive");
    return 10.0 * std::log10(std::pow(2.0, 2.0 * bits_per_dim) - 1.0);
}

struct DegeneracyReport {
    bool mapping_degenerate = false;
    int common_divisor = 1;           // n > 1 dividing all preimage counts
    bool channel_degenerate = false;
    int input_a = -1, input_b = -1;   // witnesses with identical conditionals
};

inline DegeneracyReport check_nondegenerate(const Mapping& map, const ChannelModel& chan) {
    DegeneracyReport rep;
    // preimage counts per distinct signal/symbol
    std::vector<std::pair<double, int>> groups;  // (key, count); key is point or symbol
    const int q = map.q();
    for (int i = 0; i < q; ++i) {
        const double key = map.is_signal() ? map.points[static_cast<std::size_t>(i)]
                                           : static_cast<double>(map.symbols[static_cast<std::size_t>(i)]);
        bool found = false;
        for (auto& [k, c] : groups)
            if (k == key) {
                ++c;
                found = true;
                break;
            }
        if (!found) groups.emplace_back(key, 1);
    }
    int g = 0;
    for (const auto& [k, c] : groups) g = std::gcd(g, c);
    if (g > 1) {
        rep.mapping_degenerate = true;
        rep.common_divisor = g;
    }
    if (chan.kind == ChannelModel::Kind::dmc) {
        const int ni = chan.num_inputs();
        for (int a = 0; a < ni && !rep.channel_degenerate; ++a)
            for (int b = a + 1; b < ni && !rep.channel_degenerate; ++b) {
                bool same = true;
                for (int y = 0; y < chan.num_outputs(); ++y)
                    if (std::fabs(chan.transition[static_cast<std::size_t>(a)][static_cast<std::size_t>(y)] -
                                  chan.transition[static_cast<std::size_t>(b)][static_cast<std::size_t>(y)]) > 1e-12) {
                        same = false;
                        break;
                    }
                if (same) {
                    rep.channel_degenerate = true;
                    rep.input_a = a;
                    rep.input_b = b;
                }
            }
    } else {
        for (int a = 0; a < q && !rep.channel_degenerate; ++a)
            for (int b = a + 1; b < q && !rep.channel_degenerate; ++b)
                if (map.points[static_cast<std::size_t>(a)] == map.points[static_cast<std::size_t>(b)]) {
                    rep.channel_degenerate = true;
                    rep.input_a = a;
                    rep.input_b = b;
                }
    }
    return rep;
}

// APP vector of a single observation: r_k proportional to Pr[y | delta(k+v)]
inline ProbVec app_message(const FieldSpec& fs, const Mapping& map, const ChannelModel& chan, double y, int v) {
    const int q = fs.q();
    ProbVec r(static_cast<std::size_t>(q));
    if (chan.kind == ChannelModel::Kind::awgn) {
        const double inv = 1.0 / (2.0 * chan.sigma_z * chan.sigma_z);
        double mx = -1e300;
        for (int k = 0; k < q; ++k) {
            const double d = y - map.points[static_cast<std::size_t>(fs.add(k, v))];
            r.v[static_cast<std::size_t>(k)] = -d * d * inv;
            mx = std::max(mx, r.v[static_cast<std::size_t>(k)]);
        }
        for (double& c : r.v) c = std::exp(c - mx);
    } else {
        const int yi = static_cast<int>(y);
        if (yi < 0 || yi >= chan.num_outputs()) throw std::domain_error("app_message: DMC output out of range");
        double s = 0.0;
        for (int k = 0; k < q; ++k) {
            const double lk =
                chan.transition[static_cast<std::size_t>(map.symbols[static_cast<std::size_t>(fs.add(k, v))])]
                               [static_cast<std::size_t>(yi)];
            r.v[static_cast<std::size_t>(k)] = lk;
            s += lk;
        }
        if (s <= 0.0) throw std::domain_error("app_message: observation has zero likelihood for every symbol");
    }
    normalize(r);
    return r;
}

// LLR form r'_k = log(Pr[y | delta(v)] / Pr[y | delta(k+v)])
inline LlrVec app_llr(const FieldSpec& fs, const Mapping& map, const ChannelModel& chan, double y, int v) {
    const int q = fs.q();
    LlrVec w(static_cast<std::size_t>(q));
    if (chan.kind == ChannelModel::Kind::awgn) {
        const double inv = 1.0 / (2.0 * chan.sigma_z * chan.sigma_z);
        const double d0 = y - map.points[static_cast<std::size_t>(v)];
        for (int k = 1; k < q; ++k) {
            const double dk = y - map.points[static_cast<std::size_t>(fs.add(k, v))];
            w.v[static_cast<std::size_t>(k - 1)] = (dk * dk - d0 * d0) * inv;
        }
        return w;
    }
    return llr_of(app_message(fs, map, chan, y, v));
}

inline double sample_channel_output(const ChannelModel& chan, const Mapping& map, int u, Rng& rng) {
    if (chan.kind == ChannelModel::Kind::awgn)
        return map.points[static_cast<std::size_t>(u)] + chan.sigma_z * rng.next_gauss();
    const auto& row = chan.transition[static_cast<std::size_t>(map.symbols[static_cast<std::size_t>(u)])];
    double r = rng.next_double();
    for (std::size_t y = 0; y < row.size(); ++y) {
        r -= row[y];
        if (r < 0.0) return static_cast<double>(y);
    }
    return static_cast<double>(row.size() - 1);
}

// one use of the cyclic-symmetric equivalent channel: draw a coset symbol,
// transmit delta(x+v), observe, and return the APP vector
inline ProbVec equivalent_channel_sample(const FieldSpec& fs, const Mapping& map, const ChannelModel& chan, int x,
                                         Rng& rng) {
    const int v = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(fs.q())));
    const double y = sample_channel_output(chan, map, fs.add(x, v), rng);
    return app_message(fs, map, chan, y, v);
}

// exact output distribution of the equivalent channel for input x on a DMC,
// merging observations that induce the same APP vector
inline std::vector<std::pair<ProbVec, double>> equivalent_channel_distribution(const FieldSpec& fs, const Mapping& map,
                                                                               const ChannelModel& chan, int x,
                                                                               double tol = kOrbitTol) {
    if (chan.kind != ChannelModel::Kind::dmc)
        throw std::domain_error("equivalent_channel_distribution: exact enumeration needs a DMC");
    const int q = fs.q();
    std::vector<std::pair<ProbVec, double>> atoms;
    for (int v = 0; v < q; ++v) {
        const int u = fs.add(x, v);
        const auto& row = chan.transition[static_cast<std::size_t>(map.symbols[static_cast<std::size_t>(u)])];
        for (int y = 0; y < static_cast<int>(row.size()); ++y) {
            const double pr = row[static_cast<std::size_t>(y)] / q;
            if (pr == 0.0) continue;
            ProbVec msg = app_message(fs, map, chan, static_cast<double>(y), v);
            bool merged = false;
            for (auto& [m, p] : atoms)
                if (approx_equal(m, msg, tol)) {
                    p += pr;
                    merged = true;
                    break;
                }
            if (!merged) atoms.emplace_back(std::move(msg), pr);
        }
    }
    return atoms;
}

}  // namespace gfldpc
