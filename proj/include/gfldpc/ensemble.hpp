#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include "gf.hpp"
#include "modulation.hpp"
#include "rng.hpp"

namespace gfldpc {

// edge-perspective degree distributions; index = degree, entries below 2 zero
struct DegreeDist {
    std::vector<double> lambda;  // lambda[i] = fraction of edges with left degree i
    std::vector<double> rho;     // rho[j] = fraction of edges with right degree j

    DegreeDist() = default;

    // pairs (degree, fraction); fractions are renormalized when their sum is
    // within 1e-3 of one (published tables are rounded), rejected otherwise
    DegreeDist(const std::vector<std::pair<int, double>>& left, const std::vector<std::pair<int, double>>& right) {
        lambda = build(left, "lambda");
        rho = build(right, "rho");
    }

    static DegreeDist regular(int left_degree, int right_degree) {
        return DegreeDist({{left_degree, 1.0}}, {{right_degree, 1.0}});
    }

    double lambda_prime_at_0() const { return lambda.size() > 2 ? lambda[2] : 0.0; }

    double rho_prime_at_1() const {
        double s = 0.0;
        for (std::size_t j = 2; j < rho.size(); ++j) s += (static_cast<double>(j) - 1.0) * rho[j];
        return s;
    }

    double lambda_inv_moment() const { return inv_moment(lambda); }
    double rho_inv_moment() const { return inv_moment(rho); }

    int max_left_degree() const { return static_cast<int>(lambda.size()) - 1; }
    int max_right_degree() const { return static_cast<int>(rho.size()) - 1; }

  private:
    static std::vector<double> build(const std::vector<std::pair<int, double>>& pairs, const char* which) {
        if (pairs.empty()) throw std::domain_error(std::string("degree_dist: empty ") + which);
        int maxdeg = 0;
        double sum = 0.0;
        for (const auto& [d, f] : pairs) {
            if (d < 2) throw std::domain_error(std::string("degree_dist: ") + which + " degree below 2");
            if (f < -1e-12) throw std::domain_error(std::string("degree_dist: negative ") + which + " fraction");
            maxdeg = std::max(maxdeg, d);
            sum += f;
        }
        if (std::fabs(sum - 1.0) > 1e-3)
            throw std::domain_error(std::string("degree_dist: ") + which + " fractions do not sum to 1");
        std::vector<double> out(static_cast<std::size_t>(maxdeg) + 1, 0.0);
        for (const auto& [d, f] : pairs) out[static_cast<std::size_t>(d)] += std::max(f, 0.0) / sum;
        return out;
    }

    static double inv_moment(const std::vector<double>& fr) {
        double s = 0.0;
        for (std::size_t d = 2; d < fr.size(); ++d) s += fr[d] / static_cast<double>(d);
        return s;
    }
};

// lower bound on the code rate in q-ary symbols per channel use
inline double design_rate(const DegreeDist& dd) {
    return 1.0 - dd.rho_inv_moment() / dd.lambda_inv_moment();
}

struct TannerGraph {
    int q = 2;
    int num_vars = 0;
    int num_checks = 0;

    struct Edge {
        int var;
        int check;
        int label;
    };
    std::vector<Edge> edges;

    // CSR adjacency, filled by finalize()
    std::vector<int> var_offset, var_edges;
    std::vector<int> check_offset, check_edges;

    int num_edges() const { return static_cast<int>(edges.size()); }

    void finalize() {
        var_offset.assign(static_cast<std::size_t>(num_vars) + 1, 0);
        check_offset.assign(static_cast<std::size_t>(num_checks) + 1, 0);
        for (const Edge& e : edges) {
            ++var_offset[static_cast<std::size_t>(e.var) + 1];
            ++check_offset[static_cast<std::size_t>(e.check) + 1];
        }
        for (std::size_t i = 1; i < var_offset.size(); ++i) var_offset[i] += var_offset[i - 1];
        for (std::size_t i = 1; i < check_offset.size(); ++i) check_offset[i] += check_offset[i - 1];
        var_edges.resize(edges.size());
        check_edges.resize(edges.size());
        std::vector<int> vfill(var_offset.begin(), var_offset.end() - 1);
        std::vector<int> cfill(check_offset.begin(), check_offset.end() - 1);
        for (int e = 0; e < num_edges(); ++e) {
            var_edges[static_cast<std::size_t>(vfill[static_cast<std::size_t>(edges[static_cast<std::size_t>(e)].var)]++)] = e;
            check_edges[static_cast<std::size_t>(cfill[static_cast<std::size_t>(edges[static_cast<std::size_t>(e)].check)]++)] = e;
        }
    }

    int var_degree(int v) const { return var_offset[static_cast<std::size_t>(v) + 1] - var_offset[static_cast<std::size_t>(v)]; }
    int check_degree(int c) const {
        return check_offset[static_cast<std::size_t>(c) + 1] - check_offset[static_cast<std::size_t>(c)];
    }
};

namespace detail {

// node counts per degree whose sockets total exactly E; floor targets plus
// largest-remainder additions, topped up by a coin-change over the degrees
inline bool integerize_side(const std::vector<double>& fracs, long long E, std::vector<long long>& counts) {
    const int maxdeg = static_cast<int>(fracs.size()) - 1;
    counts.assign(fracs.size(), 0);
    long long sockets = 0;
    std::vector<std::pair<double, int>> rems;
    for (int d = 2; d <= maxdeg; ++d) {
        if (fracs[static_cast<std::size_t>(d)] <= 0.0) continue;
        const double t = static_cast<double>(E) * fracs[static_cast<std::size_t>(d)] / d;
        const long long n = static_cast<long long>(std::floor(t + 1e-9));
        counts[static_cast<std::size_t>(d)] = n;
        sockets += n * d;
        rems.emplace_back(-(t - static_cast<double>(n)), d);  // sort ascending = remainder descending
    }
    if (sockets > E) return false;
    std::sort(rems.begin(), rems.end());
    long long deficit = E - sockets;
    // reachability of the deficit as a sum of degrees
    std::vector<int> reach(static_cast<std::size_t>(deficit) + 1, -1);
    reach[0] = 0;
    for (long long s = 1; s <= deficit; ++s)
        for (const auto& [r, d] : rems)
            if (s >= d && reach[static_cast<std::size_t>(s - d)] >= 0) {
                reach[static_cast<std::size_t>(s)] = d;
                break;
            }
    if (reach[static_cast<std::size_t>(deficit)] < 0 && deficit != 0) return false;
    // prefer large-remainder degrees first, fall back to the DP path
    for (const auto& [r, d] : rems) {
        if (deficit >= d && reach[static_cast<std::size_t>(deficit - d)] >= 0) {
            counts[static_cast<std::size_t>(d)] += 1;
            deficit -= d;
        }
    }
    while (deficit > 0) {
        const int d = reach[static_cast<std::size_t>(deficit)];
        counts[static_cast<std::size_t>(d)] += 1;
        deficit -= d;
    }
    return true;
}

}  // namespace detail

// uniform socket-permutation graph realizing dd with ~E edges. E is adjusted
// upward minimally when the requested count cannot be integerized on both
// sides at once (regular pairs need E divisible by both degrees).
inline TannerGraph sample_graph(const DegreeDist& dd, long long E, Rng& rng) {
    std::vector<long long> left_counts, right_counts;
    const long long scan_limit =
        E + 10LL * dd.max_left_degree() * dd.max_right_degree() + 100;
    long long Estar = E;
    for (;; ++Estar) {
        if (Estar > scan_limit) throw std::domain_error("sample_graph: cannot integerize socket counts");
        if (detail::integerize_side(dd.lambda, Estar, left_counts) &&
            detail::integerize_side(dd.rho, Estar, right_counts))
            break;
    }

    TannerGraph g;
    std::vector<int> left_socket_owner, right_socket_owner;
    left_socket_owner.reserve(static_cast<std::size_t>(Estar));
    right_socket_owner.reserve(static_cast<std::size_t>(Estar));
    int node = 0;
    for (int d = 2; d < static_cast<int>(left_counts.size()); ++d)
        for (long long k = 0; k < left_counts[static_cast<std::size_t>(d)]; ++k, ++node)
            for (int s = 0; s < d; ++s) left_socket_owner.push_back(node);
    g.num_vars = node;
    node = 0;
    for (int d = 2; d < static_cast<int>(right_counts.size()); ++d)
        for (long long k = 0; k < right_counts[static_cast<std::size_t>(d)]; ++k, ++node)
            for (int s = 0; s < d; ++s) right_socket_owner.push_back(node);
    g.num_checks = node;

    // uniform permutation of right sockets (Fisher-Yates)
    std::vector<int> perm(right_socket_owner.size());
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t i = perm.size(); i > 1; --i)
        std::swap(perm[i - 1], perm[static_cast<std::size_t>(rng.next_below(i))]);

    g.edges.resize(static_cast<std::size_t>(Estar));
    for (long long e = 0; e < Estar; ++e)
        g.edges[static_cast<std::size_t>(e)] = {left_socket_owner[static_cast<std::size_t>(e)],
                                                right_socket_owner[static_cast<std::size_t>(perm[static_cast<std::size_t>(e)])],
                                                1};
    g.finalize();
    return g;
}

// i.i.d. labels uniform on GF(q) \ {0}
inline TannerGraph sample_labels(TannerGraph g, const FieldSpec& fs, Rng& rng) {
    g.q = fs.q();
    for (auto& e : g.edges) e.label = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(fs.q() - 1)));
    return g;
}

// i.i.d. coset components uniform on GF(q)
inline std::vector<int> sample_coset(int n, const FieldSpec& fs, Rng& rng) {
    std::vector<int> v(static_cast<std::size_t>(n));
    for (int& c : v) c = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(fs.q())));
    return v;
}

struct CosetCode {
    TannerGraph graph;
    std::vector<int> coset;
    Mapping mapping;
};

inline CosetCode sample_coset_code(const FieldSpec& fs, const DegreeDist& dd, long long E, const Mapping& mapping,
                                   Rng& rng) {
    CosetCode code;
    code.graph = sample_labels(sample_graph(dd, E, rng), fs, rng);
    code.coset = sample_coset(code.graph.num_vars, fs, rng);
    code.mapping = mapping;
    return code;
}

// per-check value sum_i g_{i,j} c_i over GF(q)
inline std::vector<int> syndrome(const FieldSpec& fs, const TannerGraph& g, const std::vector<int>& word) {
    if (static_cast<int>(word.size()) != g.num_vars) throw std::domain_error("syndrome: word length mismatch");
    std::vector<int> s(static_cast<std::size_t>(g.num_checks), 0);
    for (const auto& e : g.edges)
        s[static_cast<std::size_t>(e.check)] =
            fs.add(s[static_cast<std::size_t>(e.check)], fs.mul(e.label, word[static_cast<std::size_t>(e.var)]));
    return s;
}

inline bool syndrome_is_zero(const FieldSpec& fs, const TannerGraph& g, const std::vector<int>& word) {
    const std::vector<int> s = syndrome(fs, g, word);
    return std::all_of(s.begin(), s.end(), [](int x) { return x == 0; });
}

// Test-scale systematic encoder via Gaussian elimination of the parity-check
// matrix over GF(q), pivoting on the first nonzero column.
class GfEncoder {
  public:
    GfEncoder(const FieldSpec& fs, const TannerGraph& g) : fs_(fs), n_(g.num_vars) {
        if (g.num_vars > 10000) throw std::domain_error("encoder: block length above test-scale limit");
        const int m = g.num_checks;
        std::vector<std::vector<std::uint16_t>> h(static_cast<std::size_t>(m),
                                                  std::vector<std::uint16_t>(static_cast<std::size_t>(n_), 0));
        for (const auto& e : g.edges) {
            auto& cell = h[static_cast<std::size_t>(e.check)][static_cast<std::size_t>(e.var)];
            cell = static_cast<std::uint16_t>(fs.add(cell, e.label));  // multi-edges accumulate
        }
        // reduced row echelon form
        int r = 0;
        for (int c = 0; c < n_ && r < m; ++c) {
            int pr = -1;
            for (int i = r; i < m; ++i)
                if (h[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)] != 0) {
                    pr = i;
                    break;
                }
            if (pr < 0) continue;
            std::swap(h[static_cast<std::size_t>(pr)], h[static_cast<std::size_t>(r)]);
            const int pivinv = fs.inv(h[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]);
            for (int j = c; j < n_; ++j)
                h[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)] = static_cast<std::uint16_t>(
                    fs.mul(h[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)], pivinv));
            for (int i = 0; i < m; ++i) {
                if (i == r) continue;
                const int f = h[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)];
                if (f == 0) continue;
                for (int j = c; j < n_; ++j)
                    h[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = static_cast<std::uint16_t>(
                        fs.sub(h[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)],
                               fs.mul(f, h[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)])));
            }
            pivot_cols_.push_back(c);
            ++r;
        }
        if (r == 0) throw std::domain_error("encoder: parity-check matrix has rank 0");
        rank_ = r;
        std::vector<bool> is_pivot(static_cast<std::size_t>(n_), false);
        for (int c : pivot_cols_) is_pivot[static_cast<std::size_t>(c)] = true;
        for (int c = 0; c < n_; ++c)
            if (!is_pivot[static_cast<std::size_t>(c)]) free_cols_.push_back(c);
        rows_.assign(h.begin(), h.begin() + rank_);
    }

    int message_length() const { return n_ - rank_; }
    int rank() const { return rank_; }
    const std::vector<int>& free_columns() const { return free_cols_; }

    // message symbols occupy the free columns; pivot columns are solved
    std::vector<int> encode(const std::vector<int>& message) const {
        if (static_cast<int>(message.size()) != message_length())
            throw std::domain_error("encoder: message length mismatch");
        std::vector<int> cw(static_cast<std::size_t>(n_), 0);
        for (std::size_t k = 0; k < free_cols_.size(); ++k)
            cw[static_cast<std::size_t>(free_cols_[k])] = message[k];
        for (int r = 0; r < rank_; ++r) {
            int acc = 0;
            for (int f : free_cols_) {
                const int hf = rows_[static_cast<std::size_t>(r)][static_cast<std::size_t>(f)];
                if (hf != 0) acc = fs_.add(acc, fs_.mul(hf, cw[static_cast<std::size_t>(f)]));
            }
            cw[static_cast<std::size_t>(pivot_cols_[static_cast<std::size_t>(r)])] = fs_.neg(acc);
        }
        return cw;
    }

  private:
    FieldSpec fs_;  // owned: encode() runs long after construction
    int n_;
    int rank_ = 0;
    std::vector<int> pivot_cols_, free_cols_;
    std::vector<std::vector<std::uint16_t>> rows_;
};

inline std::vector<int> encode_small(const FieldSpec& fs, const TannerGraph& g, const std::vector<int>& message) {
    return GfEncoder(fs, g).encode(message);
}

}  // namespace gfldpc
