#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstring>
#include <stdexcept>
#include <vector>

#include "ensemble.hpp"
#include "gf.hpp"
#include "message.hpp"
#include "modulation.hpp"
#include "rng.hpp"

namespace gfldpc {

// ---------------------------------------------------------------------------
// multidimensional DFT over the base-p digit lattice of GF(p^m)
// ---------------------------------------------------------------------------

// p = 2: all twiddles are +-1, so the transform is a real Walsh-Hadamard
// pass; no complex arithmetic anywhere on this path
inline void wht_inplace(int m, double* x) {
    const int q = 1 << m;
    for (int len = 1; len < q; len <<= 1)
        for (int i = 0; i < q; i += len << 1)
            for (int j = i; j < i + len; ++j) {
                const double a = x[j];
                const double b = x[j + len];
                x[j] = a + b;
                x[j + len] = a - b;
            }
}

inline void wht_inverse_inplace(int m, double* x) {
    const int q = 1 << m;
    wht_inplace(m, x);
    const double inv = 1.0 / q;
    for (int i = 0; i < q; ++i) x[i] *= inv;
}

inline void mdft_inplace(int p, int m, std::complex<double>* x, bool inverse) {
    int q = 1;
    for (int i = 0; i < m; ++i) q *= p;
    std::complex<double> tw[7];
    const double sgn = inverse ? -1.0 : 1.0;
    for (int t = 0; t < p; ++t)
        tw[t] = std::polar(1.0, sgn * 6.283185307179586476925286766559 * t / p);
    std::complex<double> tmp[7];
    for (int dim = 0, stride = 1; dim < m; ++dim, stride *= p) {
        for (int start = 0; start < q; ++start) {
            if ((start / stride) % p != 0) continue;
            for (int k = 0; k < p; ++k) {
                std::complex<double> acc = 0.0;
                for (int a = 0; a < p; ++a) acc += x[start + a * stride] * tw[a * k % p];
                tmp[k] = acc;
            }
            for (int k = 0; k < p; ++k) x[start + k * stride] = tmp[k];
        }
    }
    if (inverse) {
        const double invq = 1.0 / q;
        for (int i = 0; i < q; ++i) x[i] *= invq;
    }
}

inline std::vector<std::complex<double>> mdft(int p, int m, std::vector<std::complex<double>> x) {
    int q = 1;
    for (int i = 0; i < m; ++i) q *= p;
    if (static_cast<int>(x.size()) != q) throw std::domain_error("mdft: length must be p^m");
    mdft_inplace(p, m, x.data(), false);
    return x;
}

inline std::vector<std::complex<double>> midft(int p, int m, std::vector<std::complex<double>> x) {
    int q = 1;
    for (int i = 0; i < m; ++i) q *= p;
    if (static_cast<int>(x.size()) != q) throw std::domain_error("midft: length must be p^m");
    mdft_inplace(p, m, x.data(), true);
    return x;
}

inline std::vector<double> mdft(int m, std::vector<double> x) {
    if (static_cast<int>(x.size()) != (1 << m)) throw std::domain_error("mdft: length must be 2^m");
    wht_inplace(m, x.data());
    return x;
}

inline std::vector<double> midft(int m, std::vector<double> x) {
    if (static_cast<int>(x.size()) != (1 << m)) throw std::domain_error("midft: length must be 2^m");
    wht_inverse_inplace(m, x.data());
    return x;
}

// true when the check-node transform for this field runs on real arithmetic
inline bool dft_is_real(const FieldSpec& fs) { return fs.p() == 2; }

// ---------------------------------------------------------------------------
// elementary message updates
// ---------------------------------------------------------------------------

// c_k = sum_a a_a b_{k-a} with GF(q) index subtraction
inline ProbVec gf_convolve(const FieldSpec& fs, const ProbVec& a, const ProbVec& b) {
    const int q = fs.q();
    ProbVec c(static_cast<std::size_t>(q), 0.0);
    for (int k = 0; k < q; ++k) {
        double s = 0.0;
        for (int i = 0; i < q; ++i) s += a.v[static_cast<std::size_t>(i)] * b.v[static_cast<std::size_t>(fs.sub(k, i))];
        c.v[static_cast<std::size_t>(k)] = s;
    }
    return c;
}

enum class CheckMethod { dft, naive };

namespace detail {

inline void floor_and_normalize(double* x, int q, long* degenerate_counter) {
    double s = 0.0;
    for (int i = 0; i < q; ++i) {
        if (x[i] < 0.0) x[i] = 0.0;  // transform round-off
        s += x[i];
    }
    if (s <= 0.0) {
        for (int i = 0; i < q; ++i) x[i] = 1.0 / q;
        if (degenerate_counter) ++*degenerate_counter;
        return;
    }
    const double inv = 1.0 / s;
    for (int i = 0; i < q; ++i) {
        x[i] *= inv;
        if (x[i] < kProbFloor && x[i] > 0.0) x[i] = kProbFloor;
    }
}

template <typename Scalar>
struct CheckBuffers {
    std::vector<Scalar> transformed;  // deg x q
    std::vector<Scalar> prefix;       // (deg + 1) x q
    std::vector<Scalar> suffix;       // (deg + 1) x q
    std::vector<Scalar> prod;         // q
};

}  // namespace detail

// scratch space reused across check-node updates
struct CheckWorkspace {
    detail::CheckBuffers<double> real;
    detail::CheckBuffers<std::complex<double>> cplx;
    std::vector<double> conv_a, conv_b, scaled;
};

// Leftbound messages for every edge of one check node. msgs_in/msgs_out are
// deg x q row-major; labels has one entry per edge. Each output e is
// [conv of (r_n)^{x inv(g_n)}, n != e]^{x neg(g_e)}, renormalized.
inline void check_node_update_all(const FieldSpec& fs, const double* msgs_in, const int* labels, int deg,
                                  double* msgs_out, CheckMethod method, CheckWorkspace& ws,
                                  long* degenerate_counter = nullptr) {
    const int q = fs.q();
    if (deg < 2) throw std::domain_error("check_node_update_all: degree must be >= 2");
    for (int n = 0; n < deg; ++n)
        if (labels[n] == 0) throw std::domain_error("check_node_update_all: zero label");

    if (method == CheckMethod::naive) {
        ws.scaled.resize(static_cast<std::size_t>(deg) * q);
        for (int n = 0; n < deg; ++n) {
            const int h = fs.inv(labels[n]);
            for (int i = 0; i < q; ++i) ws.scaled[static_cast<std::size_t>(n) * q + i] = msgs_in[n * q + fs.mul(i, h)];
        }
        ws.conv_a.resize(static_cast<std::size_t>(q));
        ws.conv_b.resize(static_cast<std::size_t>(q));
        for (int e = 0; e < deg; ++e) {
            double* acc = ws.conv_a.data();
            double* nxt = ws.conv_b.data();
            bool first = true;
            for (int n = 0; n < deg; ++n) {
                if (n == e) continue;
                const double* rn = &ws.scaled[static_cast<std::size_t>(n) * q];
                if (first) {
                    std::memcpy(acc, rn, sizeof(double) * static_cast<std::size_t>(q));
                    first = false;
                    continue;
                }
                for (int k = 0; k < q; ++k) {
                    double s = 0.0;
                    for (int i = 0; i < q; ++i) s += acc[i] * rn[fs.sub(k, i)];
                    nxt[k] = s;
                }
                std::swap(acc, nxt);
            }
            const int out_scale = fs.neg(labels[e]);
            for (int i = 0; i < q; ++i) msgs_out[e * q + i] = acc[fs.mul(i, out_scale)];
            detail::floor_and_normalize(&msgs_out[e * q], q, degenerate_counter);
        }
        return;
    }

    auto run = [&](auto& buf, auto transform_fwd, auto transform_inv, auto to_real) {
        using Scalar = typename std::decay_t<decltype(buf.transformed)>::value_type;
        auto& tr = buf.transformed;
        auto& prefix = buf.prefix;
        auto& suffix = buf.suffix;
        tr.resize(static_cast<std::size_t>(deg) * q);
        for (int n = 0; n < deg; ++n) {
            const int h = fs.inv(labels[n]);
            Scalar* row = &tr[static_cast<std::size_t>(n) * q];
            for (int i = 0; i < q; ++i) row[i] = msgs_in[n * q + fs.mul(i, h)];
            transform_fwd(row);
        }
        prefix.assign(static_cast<std::size_t>(deg + 1) * q, Scalar(1.0));
        suffix.assign(static_cast<std::size_t>(deg + 1) * q, Scalar(1.0));
        for (int n = 0; n < deg; ++n)
            for (int i = 0; i < q; ++i)
                prefix[static_cast<std::size_t>(n + 1) * q + i] =
                    prefix[static_cast<std::size_t>(n) * q + i] * tr[static_cast<std::size_t>(n) * q + i];
        for (int n = deg - 1; n >= 0; --n)
            for (int i = 0; i < q; ++i)
                suffix[static_cast<std::size_t>(n) * q + i] =
                    suffix[static_cast<std::size_t>(n + 1) * q + i] * tr[static_cast<std::size_t>(n) * q + i];
        auto& prod = buf.prod;
        prod.resize(static_cast<std::size_t>(q));
        for (int e = 0; e < deg; ++e) {
            for (int i = 0; i < q; ++i)
                prod[static_cast<std::size_t>(i)] = prefix[static_cast<std::size_t>(e) * q + i] *
                                                    suffix[static_cast<std::size_t>(e + 1) * q + i];
            transform_inv(prod.data());
            const int out_scale = fs.neg(labels[e]);
            for (int i = 0; i < q; ++i) msgs_out[e * q + i] = to_real(prod[static_cast<std::size_t>(fs.mul(i, out_scale))]);
            detail::floor_and_normalize(&msgs_out[e * q], q, degenerate_counter);
        }
    };

    if (fs.p() == 2) {
        run(ws.real, [&](double* row) { wht_inplace(fs.m(), row); },
            [&](double* row) { wht_inverse_inplace(fs.m(), row); }, [](double x) { return x; });
    } else {
        run(ws.cplx, [&](std::complex<double>* row) { mdft_inplace(fs.p(), fs.m(), row, false); },
            [&](std::complex<double>* row) { mdft_inplace(fs.p(), fs.m(), row, true); },
            [](const std::complex<double>& x) { return x.real(); });
    }
}

// single leftbound message from pointers to the incoming messages; the fast
// path accumulates the componentwise product in the transform domain
inline void check_update_single(const FieldSpec& fs, const double* const* incoming, const int* labels, int count,
                                int out_label, double* out, CheckMethod method, CheckWorkspace& ws,
                                long* degenerate_counter = nullptr) {
    const int q = fs.q();
    if (count < 1) throw std::domain_error("check_update: need at least one incoming message");
    if (out_label == 0) throw std::domain_error("check_update: zero label");
    for (int n = 0; n < count; ++n)
        if (labels[n] == 0) throw std::domain_error("check_update: zero label");
    const int out_scale = fs.neg(out_label);

    if (method == CheckMethod::naive) {
        ws.conv_a.resize(static_cast<std::size_t>(q));
        ws.conv_b.resize(static_cast<std::size_t>(q));
        ws.scaled.resize(static_cast<std::size_t>(q));
        double* acc = ws.conv_a.data();
        double* nxt = ws.conv_b.data();
        for (int n = 0; n < count; ++n) {
            const int h = fs.inv(labels[n]);
            double* barred = n == 0 ? acc : ws.scaled.data();
            for (int i = 0; i < q; ++i) barred[i] = incoming[n][fs.mul(i, h)];
            if (n == 0) continue;
            for (int k = 0; k < q; ++k) {
                double s = 0.0;
                for (int i = 0; i < q; ++i) s += acc[i] * barred[fs.sub(k, i)];
                nxt[k] = s;
            }
            std::swap(acc, nxt);
        }
        for (int i = 0; i < q; ++i) out[i] = acc[fs.mul(i, out_scale)];
        detail::floor_and_normalize(out, q, degenerate_counter);
        return;
    }

    auto run = [&](auto& buf, auto transform_fwd, auto transform_inv, auto to_real) {
        using Scalar = typename std::decay_t<decltype(buf.transformed)>::value_type;
        auto& acc = buf.prefix;
        auto& row = buf.prod;
        acc.assign(static_cast<std::size_t>(q), Scalar(1.0));
        row.resize(static_cast<std::size_t>(q));
        for (int n = 0; n < count; ++n) {
            const int h = fs.inv(labels[n]);
            for (int i = 0; i < q; ++i) row[static_cast<std::size_t>(i)] = incoming[n][fs.mul(i, h)];
            transform_fwd(row.data());
            for (int i = 0; i < q; ++i) acc[static_cast<std::size_t>(i)] *= row[static_cast<std::size_t>(i)];
        }
        transform_inv(acc.data());
        for (int i = 0; i < q; ++i) out[i] = to_real(acc[static_cast<std::size_t>(fs.mul(i, out_scale))]);
        detail::floor_and_normalize(out, q, degenerate_counter);
    };

    if (fs.p() == 2) {
        run(ws.real, [&](double* r) { wht_inplace(fs.m(), r); }, [&](double* r) { wht_inverse_inplace(fs.m(), r); },
            [](double x) { return x; });
    } else {
        run(ws.cplx, [&](std::complex<double>* r) { mdft_inplace(fs.p(), fs.m(), r, false); },
            [&](std::complex<double>* r) { mdft_inplace(fs.p(), fs.m(), r, true); },
            [](const std::complex<double>& x) { return x.real(); });
    }
}

// single leftbound message: d_j - 1 incoming messages plus the outgoing label
inline ProbVec check_update(const FieldSpec& fs, const std::vector<ProbVec>& incoming, const std::vector<int>& labels,
                            int out_label, CheckMethod method = CheckMethod::dft) {
    if (incoming.size() != labels.size()) throw std::domain_error("check_update: labels/messages mismatch");
    std::vector<const double*> ptrs;
    ptrs.reserve(incoming.size());
    for (const ProbVec& x : incoming) ptrs.push_back(x.v.data());
    ProbVec l(static_cast<std::size_t>(fs.q()));
    CheckWorkspace ws;
    check_update_single(fs, ptrs.data(), labels.data(), static_cast<int>(incoming.size()), out_label, l.v.data(),
                        method, ws);
    return l;
}

// componentwise product of the initial message and incoming leftbound
// messages, renormalized; degenerate products are floored
inline ProbVec var_update(const ProbVec& r0, const std::vector<ProbVec>& incoming, long* degenerate_counter = nullptr) {
    const int q = static_cast<int>(r0.q());
    ProbVec r = r0;
    for (const ProbVec& l : incoming) {
        double mx = 0.0;
        for (int i = 0; i < q; ++i) {
            r.v[static_cast<std::size_t>(i)] *= l.v[static_cast<std::size_t>(i)];
            mx = std::max(mx, r.v[static_cast<std::size_t>(i)]);
        }
        if (mx > 0.0 && mx < 1e-100)
            for (double& c : r.v) c *= 1e100;  // scale factor cancels at normalization
    }
    detail::floor_and_normalize(r.v.data(), q, degenerate_counter);
    return r;
}

// LLR variant: componentwise sum
inline LlrVec var_update_llr(const LlrVec& r0, const std::vector<LlrVec>& incoming) {
    LlrVec r = r0;
    for (const LlrVec& l : incoming)
        for (std::size_t i = 0; i < r.v.size(); ++i) r.v[i] += l.v[i];
    return r;
}

// argmax decision; exact ties resolved uniformly at random
inline int decide(const ProbVec& x, Rng& rng) {
    double mx = x.v[0];
    for (double c : x.v) mx = std::max(mx, c);
    int ties = 0;
    for (double c : x.v)
        if (c == mx) ++ties;
    if (ties == 1) {
        for (std::size_t i = 0; i < x.q(); ++i)
            if (x.v[i] == mx) return static_cast<int>(i);
    }
    int pick = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(ties)));
    for (std::size_t i = 0; i < x.q(); ++i)
        if (x.v[i] == mx && pick-- == 0) return static_cast<int>(i);
    return 0;
}

inline ProbVec initial_message(const FieldSpec& fs, const Mapping& map, const ChannelModel& chan, double y, int v) {
    return app_message(fs, map, chan, y, v);
}

inline LlrVec initial_llr(const FieldSpec& fs, const Mapping& map, const ChannelModel& chan, double y, int v) {
    return app_llr(fs, map, chan, y, v);
}

// ---------------------------------------------------------------------------
// belief propagation
// ---------------------------------------------------------------------------

enum class MessageDomain { probability, llr };

struct BpOptions {
    int max_iters = 50;
    bool early_stop = false;  // default off so analysis runs a fixed schedule
    MessageDomain domain = MessageDomain::probability;
    CheckMethod method = CheckMethod::dft;
};

struct DecodeResult {
    std::vector<int> decisions;
    int iterations = 0;
    std::vector<int> errors_per_iter;  // vs reference word, entry 0 = channel-only decisions
    bool syndrome_zero = false;
    long degenerate_products = 0;
};

// Flooding-schedule decoder. The reference word (when nonempty) is only used
// for per-iteration error accounting and never influences decoding.
inline DecodeResult run_bp(const FieldSpec& fs, const CosetCode& code, const std::vector<double>& observations,
                           const ChannelModel& chan, const BpOptions& opt, const std::vector<int>& reference,
                           Rng& rng) {
    const TannerGraph& g = code.graph;
    const int q = fs.q();
    const int n = g.num_vars;
    const int E = g.num_edges();
    if (static_cast<int>(observations.size()) != n) throw std::domain_error("run_bp: observation length mismatch");
    if (static_cast<int>(code.coset.size()) != n) throw std::domain_error("run_bp: coset length mismatch");
    if (!reference.empty() && static_cast<int>(reference.size()) != n)
        throw std::domain_error("run_bp: reference length mismatch");
    const bool llr_domain = opt.domain == MessageDomain::llr;

    DecodeResult res;
    std::vector<double> r0(static_cast<std::size_t>(n) * q);
    for (int i = 0; i < n; ++i) {
        const ProbVec m = app_message(fs, code.mapping, chan, observations[static_cast<std::size_t>(i)],
                                      code.coset[static_cast<std::size_t>(i)]);
        std::copy(m.v.begin(), m.v.end(), r0.begin() + static_cast<std::size_t>(i) * q);
    }
    std::vector<double> r0_llr;
    if (llr_domain) {
        r0_llr.resize(static_cast<std::size_t>(n) * q, 0.0);
        for (int i = 0; i < n; ++i) {
            ProbVec m(static_cast<std::size_t>(q));
            std::copy(r0.begin() + static_cast<std::size_t>(i) * q, r0.begin() + static_cast<std::size_t>(i + 1) * q,
                      m.v.begin());
            const LlrVec w = llr_of(m);
            for (int k = 1; k < q; ++k) r0_llr[static_cast<std::size_t>(i) * q + k] = w.v[static_cast<std::size_t>(k - 1)];
        }
    }

    // rightbound/leftbound per directed edge; in the LLR domain slot k holds
    // w_k with w_0 = 0, same stride
    std::vector<double> rightbound(static_cast<std::size_t>(E) * q);
    std::vector<double> leftbound(static_cast<std::size_t>(E) * q);
    std::vector<double> app(static_cast<std::size_t>(q));
    res.decisions.assign(static_cast<std::size_t>(n), 0);

    auto compute_decisions = [&]() {
        for (int i = 0; i < n; ++i) {
            const int lo = g.var_offset[static_cast<std::size_t>(i)];
            const int hi = g.var_offset[static_cast<std::size_t>(i) + 1];
            if (llr_domain) {
                for (int k = 0; k < q; ++k) app[static_cast<std::size_t>(k)] = r0_llr[static_cast<std::size_t>(i) * q + k];
                for (int t = lo; t < hi; ++t) {
                    const double* l = &leftbound[static_cast<std::size_t>(g.var_edges[static_cast<std::size_t>(t)]) * q];
                    for (int k = 0; k < q; ++k) app[static_cast<std::size_t>(k)] += l[k];
                }
                double best = app[0];
                for (int k = 0; k < q; ++k) best = std::min(best, app[static_cast<std::size_t>(k)]);
                int ties = 0;
                for (int k = 0; k < q; ++k)
                    if (app[static_cast<std::size_t>(k)] == best) ++ties;
                int pick = ties == 1 ? 0 : static_cast<int>(rng.next_below(static_cast<std::uint64_t>(ties)));
                for (int k = 0; k < q; ++k)
                    if (app[static_cast<std::size_t>(k)] == best && pick-- == 0) {
                        res.decisions[static_cast<std::size_t>(i)] = k;
                        break;
                    }
            } else {
                for (int k = 0; k < q; ++k) app[static_cast<std::size_t>(k)] = r0[static_cast<std::size_t>(i) * q + k];
                for (int t = lo; t < hi; ++t) {
                    const double* l = &leftbound[static_cast<std::size_t>(g.var_edges[static_cast<std::size_t>(t)]) * q];
                    double mx = 0.0;
                    for (int k = 0; k < q; ++k) {
                        app[static_cast<std::size_t>(k)] *= l[k];
                        mx = std::max(mx, app[static_cast<std::size_t>(k)]);
                    }
                    if (mx > 0.0 && mx < 1e-100)
                        for (int k = 0; k < q; ++k) app[static_cast<std::size_t>(k)] *= 1e100;
                }
                double best = 0.0;
                for (int k = 0; k < q; ++k) best = std::max(best, app[static_cast<std::size_t>(k)]);
                int ties = 0;
                for (int k = 0; k < q; ++k)
                    if (app[static_cast<std::size_t>(k)] == best) ++ties;
                int pick = ties == 1 ? 0 : static_cast<int>(rng.next_below(static_cast<std::uint64_t>(ties)));
                for (int k = 0; k < q; ++k)
                    if (app[static_cast<std::size_t>(k)] == best && pick-- == 0) {
                        res.decisions[static_cast<std::size_t>(i)] = k;
                        break;
                    }
            }
        }
    };

    auto record_errors = [&]() {
        if (reference.empty()) return;
        int errs = 0;
        for (int i = 0; i < n; ++i)
            if (res.decisions[static_cast<std::size_t>(i)] != reference[static_cast<std::size_t>(i)]) ++errs;
        res.errors_per_iter.push_back(errs);
    };

    // iteration zero: rightbound = initial messages; leftbound holds the
    // update identity so APP decisions come from r0 alone
    std::fill(leftbound.begin(), leftbound.end(), llr_domain ? 0.0 : 1.0 / q);
    for (int e = 0; e < E; ++e) {
        const int i = g.edges[static_cast<std::size_t>(e)].var;
        const double* src = llr_domain ? &r0_llr[static_cast<std::size_t>(i) * q] : &r0[static_cast<std::size_t>(i) * q];
        std::copy(src, src + q, rightbound.begin() + static_cast<std::size_t>(e) * q);
    }
    compute_decisions();
    record_errors();
    res.syndrome_zero = syndrome_is_zero(fs, g, res.decisions);
    if (opt.early_stop && res.syndrome_zero) return res;

    CheckWorkspace ws;
    std::vector<double> gather, scatter;
    std::vector<int> labels;
    std::vector<double> prefix, suffix;

    for (int iter = 1; iter <= opt.max_iters; ++iter) {
        // leftbound phase
        for (int c = 0; c < g.num_checks; ++c) {
            const int lo = g.check_offset[static_cast<std::size_t>(c)];
            const int deg = g.check_offset[static_cast<std::size_t>(c) + 1] - lo;
            gather.resize(static_cast<std::size_t>(deg) * q);
            scatter.resize(static_cast<std::size_t>(deg) * q);
            labels.resize(static_cast<std::size_t>(deg));
            for (int t = 0; t < deg; ++t) {
                const int e = g.check_edges[static_cast<std::size_t>(lo + t)];
                labels[static_cast<std::size_t>(t)] = g.edges[static_cast<std::size_t>(e)].label;
                const double* src = &rightbound[static_cast<std::size_t>(e) * q];
                double* dst = &gather[static_cast<std::size_t>(t) * q];
                if (llr_domain) {
                    // convert LLR to plain likelihood for the convolution step
                    double wmin = 0.0;
                    for (int k = 0; k < q; ++k) wmin = std::min(wmin, src[k]);
                    double s = 0.0;
                    for (int k = 0; k < q; ++k) {
                        const double e2 = std::isinf(src[k]) ? 0.0 : std::exp(-(src[k] - wmin));
                        dst[k] = e2;
                        s += e2;
                    }
                    for (int k = 0; k < q; ++k) dst[k] /= s;
                } else {
                    std::copy(src, src + q, dst);
                }
            }
            check_node_update_all(fs, gather.data(), labels.data(), deg, scatter.data(), opt.method, ws,
                                  &res.degenerate_products);
            for (int t = 0; t < deg; ++t) {
                const int e = g.check_edges[static_cast<std::size_t>(lo + t)];
                const double* src = &scatter[static_cast<std::size_t>(t) * q];
                double* dst = &leftbound[static_cast<std::size_t>(e) * q];
                if (llr_domain) {
                    const double x0 = std::max(src[0], kProbFloor);
                    dst[0] = 0.0;
                    for (int k = 1; k < q; ++k)
                        dst[k] = src[k] <= 0.0 ? std::numeric_limits<double>::infinity() : std::log(x0 / src[k]);
                } else {
                    std::copy(src, src + q, dst);
                }
            }
        }

        // rightbound phase: prefix/suffix over incoming leftbound messages
        for (int i = 0; i < n; ++i) {
            const int lo = g.var_offset[static_cast<std::size_t>(i)];
            const int deg = g.var_offset[static_cast<std::size_t>(i) + 1] - lo;
            prefix.resize(static_cast<std::size_t>(deg + 1) * q);
            suffix.resize(static_cast<std::size_t>(deg + 1) * q);
            const double ident = llr_domain ? 0.0 : 1.0;
            for (int k = 0; k < q; ++k) {
                prefix[static_cast<std::size_t>(k)] = ident;
                suffix[static_cast<std::size_t>(deg) * q + k] = ident;
            }
            for (int t = 0; t < deg; ++t) {
                const int e = g.var_edges[static_cast<std::size_t>(lo + t)];
                const double* l = &leftbound[static_cast<std::size_t>(e) * q];
                double* dst = &prefix[static_cast<std::size_t>(t + 1) * q];
                const double* src = &prefix[static_cast<std::size_t>(t) * q];
                if (llr_domain) {
                    for (int k = 0; k < q; ++k) dst[k] = src[k] + l[k];
                } else {
                    double mx = 0.0;
                    for (int k = 0; k < q; ++k) {
                        dst[k] = src[k] * l[k];
                        mx = std::max(mx, dst[k]);
                    }
                    if (mx > 0.0)
                        for (int k = 0; k < q; ++k) dst[k] /= mx;
                }
            }
            for (int t = deg - 1; t >= 0; --t) {
                const int e = g.var_edges[static_cast<std::size_t>(lo + t)];
                const double* l = &leftbound[static_cast<std::size_t>(e) * q];
                double* dst = &suffix[static_cast<std::size_t>(t) * q];
                const double* src = &suffix[static_cast<std::size_t>(t + 1) * q];
                if (llr_domain) {
                    for (int k = 0; k < q; ++k) dst[k] = src[k] + l[k];
                } else {
                    double mx = 0.0;
                    for (int k = 0; k < q; ++k) {
                        dst[k] = src[k] * l[k];
                        mx = std::max(mx, dst[k]);
                    }
                    if (mx > 0.0)
                        for (int k = 0; k < q; ++k) dst[k] /= mx;
                }
            }
            const double* base = llr_domain ? &r0_llr[static_cast<std::size_t>(i) * q] : &r0[static_cast<std::size_t>(i) * q];
            for (int t = 0; t < deg; ++t) {
                const int e = g.var_edges[static_cast<std::size_t>(lo + t)];
                double* dst = &rightbound[static_cast<std::size_t>(e) * q];
                const double* pre = &prefix[static_cast<std::size_t>(t) * q];
                const double* suf = &suffix[static_cast<std::size_t>(t + 1) * q];
                if (llr_domain) {
                    for (int k = 0; k < q; ++k) dst[k] = base[k] + pre[k] + suf[k];
                } else {
                    for (int k = 0; k < q; ++k) dst[k] = base[k] * pre[k] * suf[k];
                    detail::floor_and_normalize(dst, q, &res.degenerate_products);
                }
            }
        }

        res.iterations = iter;
        compute_decisions();
        record_errors();
        res.syndrome_zero = syndrome_is_zero(fs, g, res.decisions);
        if (opt.early_stop && res.syndrome_zero) break;
    }
    return res;
}

}  // namespace gfldpc
