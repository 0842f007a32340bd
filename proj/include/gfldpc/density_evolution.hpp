#pragma once

#include <cmath>
#include <cstdint>
#include <thread>
#include <vector>

#include "decoder.hpp"
#include "ensemble.hpp"
#include "gf.hpp"
#include "message.hpp"
#include "modulation.hpp"
#include "rng.hpp"
#include "stats.hpp"

namespace gfldpc {

struct DeTraceRow {
    int iteration = 0;
    double pe = 0.0, pe_stderr = 0.0;
    double d = 0.0, d_stderr = 0.0;
    double mi = 0.0, mi_stderr = 0.0;
};

struct DeTrace {
    std::vector<DeTraceRow> rows;
    std::uint64_t seed = 0;
    int n_samples = 0;
};

struct DeParams {
    int n_samples = 100000;
    int iterations = 50;
    int batches = 20;
    int workers = 1;
    CheckMethod method = CheckMethod::dft;
};

// margin = lambda'(0) rho'(1) Delta; below one the fixed point at zero error
// is stable, above one the error probability stays bounded away from zero
inline double stability_margin(const DegreeDist& dd, double delta) {
    if (!(delta > 0.0) || delta > 1.0) throw std::domain_error("stability_margin: Delta outside (0, 1]");
    return dd.lambda_prime_at_0() * dd.rho_prime_at_1() * delta;
}

// Monte-Carlo density evolution: a population of i.i.d. rightbound-message
// samples under the tree assumption. Every iteration resamples incoming
// messages, labels and degrees afresh; the transmitted word is all-zero with
// a random coset folded into the initial messages.
class DensityEvolver {
  public:
    DensityEvolver(const FieldSpec& fs, const DegreeDist& dd, const Mapping& mapping, const ChannelModel& channel,
                   const DeParams& params, std::uint64_t seed)
        : fs_(fs), dd_(dd), mapping_(mapping), channel_(channel), params_(params), seed_(seed) {
        if (params.n_samples < 2) throw std::domain_error("density evolution: need at least two samples");
        const std::size_t sz = static_cast<std::size_t>(params.n_samples) * static_cast<std::size_t>(fs.q());
        rightbound_.resize(sz);
        leftbound_.resize(sz);
        build_cdf(dd.lambda, lambda_cdf_);
        build_cdf(dd.rho, rho_cdf_);
        parallel_over_samples(0, 0, [&](int s, Rng& rng, CheckWorkspace&) { draw_initial(rng, sample_ptr(rightbound_, s)); });
    }

    int iteration() const { return iter_; }

    // one leftbound + rightbound pass over the population
    void step() {
        ++iter_;
        parallel_over_samples(iter_, 1, [&](int s, Rng& rng, CheckWorkspace& ws) {
            const int dj = draw_degree(rho_cdf_, rng);
            const double* srcs[64];
            int labels[64];
            for (int n = 0; n + 1 < dj; ++n) {
                srcs[n] = sample_ptr_const(rightbound_, static_cast<int>(rng.next_below(static_cast<std::uint64_t>(params_.n_samples))));
                labels[n] = draw_label(rng);
            }
            check_update_single(fs_, srcs, labels, dj - 1, draw_label(rng), sample_ptr(leftbound_, s),
                                params_.method, ws);
        });
        parallel_over_samples(iter_, 2, [&](int s, Rng& rng, CheckWorkspace&) {
            const int di = draw_degree(lambda_cdf_, rng);
            const int q = fs_.q();
            double* out = sample_ptr(scratch_, s);
            draw_initial(rng, out);
            for (int n = 0; n + 1 < di; ++n) {
                const double* l = sample_ptr_const(leftbound_, static_cast<int>(rng.next_below(static_cast<std::uint64_t>(params_.n_samples))));
                double mx = 0.0;
                for (int k = 0; k < q; ++k) {
                    out[k] *= l[k];
                    mx = std::max(mx, out[k]);
                }
                if (mx > 0.0 && mx < 1e-100)
                    for (int k = 0; k < q; ++k) out[k] *= 1e100;
            }
            detail::floor_and_normalize(out, q, nullptr);
        });
        std::swap(rightbound_, scratch_);
    }

    DeTraceRow stats() const {
        const int n = params_.n_samples;
        const int q = fs_.q();
        std::vector<double> pes, fs_vals, mis;
        pes.reserve(static_cast<std::size_t>(n));
        fs_vals.reserve(static_cast<std::size_t>(n));
        mis.reserve(static_cast<std::size_t>(n));
        ProbVec x(static_cast<std::size_t>(q));
        const double logq = std::log(static_cast<double>(q));
        for (int s = 0; s < n; ++s) {
            const double* src = sample_ptr_const(rightbound_, s);
            std::copy(src, src + q, x.v.begin());
            pes.push_back(pe_of(x));
            fs_vals.push_back(f_of(x));
            // information functional of a normalized probability message: 1 + log_q x_0
            mis.push_back(1.0 + std::log(std::max(src[0], kProbFloor)) / logq);
        }
        const MeanStderr pe = batch_means(pes, static_cast<std::size_t>(params_.batches));
        const MeanStderr d = batch_means(fs_vals, static_cast<std::size_t>(params_.batches));
        const MeanStderr mi = batch_means(mis, static_cast<std::size_t>(params_.batches));
        DeTraceRow row;
        row.iteration = iter_;
        row.pe = pe.mean;
        row.pe_stderr = pe.stderr_;
        row.d = d.mean;
        row.d_stderr = d.stderr_;
        row.mi = std::min(1.0, std::max(0.0, mi.mean));
        row.mi_stderr = mi.stderr_;
        return row;
    }

    ProbVec rightbound_sample(int s) const { return extract(rightbound_, s); }
    ProbVec leftbound_sample(int s) const { return extract(leftbound_, s); }
    int n_samples() const { return params_.n_samples; }

  private:
    void build_cdf(const std::vector<double>& fr, std::vector<std::pair<double, int>>& cdf) {
        cdf.clear();
        double acc = 0.0;
        for (std::size_t d = 2; d < fr.size(); ++d) {
            if (fr[d] <= 0.0) continue;
            acc += fr[d];
            cdf.emplace_back(acc, static_cast<int>(d));
        }
        if (cdf.empty()) throw std::domain_error("density evolution: empty degree distribution");
        cdf.back().first = 1.0;
        if (cdf.back().second >= 64) throw std::domain_error("density evolution: degree above supported limit");
    }

    static int draw_degree(const std::vector<std::pair<double, int>>& cdf, Rng& rng) {
        const double u = rng.next_double();
        for (const auto& [c, d] : cdf)
            if (u < c) return d;
        return cdf.back().second;
    }

    int draw_label(Rng& rng) const { return 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(fs_.q() - 1))); }

    void draw_initial(Rng& rng, double* out) const {
        const int q = fs_.q();
        const int v = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(q)));
        const double y = sample_channel_output(channel_, mapping_, v, rng);  // all-zero codeword: u = 0 + v
        const ProbVec r = app_message(fs_, mapping_, channel_, y, v);
        std::copy(r.v.begin(), r.v.end(), out);
    }

    double* sample_ptr(std::vector<double>& buf, int s) const {
        return buf.data() + static_cast<std::size_t>(s) * static_cast<std::size_t>(fs_.q());
    }
    const double* sample_ptr_const(const std::vector<double>& buf, int s) const {
        return buf.data() + static_cast<std::size_t>(s) * static_cast<std::size_t>(fs_.q());
    }

    ProbVec extract(const std::vector<double>& buf, int s) const {
        ProbVec x(static_cast<std::size_t>(fs_.q()));
        const double* src = sample_ptr_const(buf, s);
        std::copy(src, src + fs_.q(), x.v.begin());
        return x;
    }

    // deterministic partition: sample s belongs to chunk s*workers/n and the
    // chunk stream is derived from (seed, iteration, phase, chunk)
    template <typename Fn>
    void parallel_over_samples(int iteration, int phase, Fn&& fn) {
        if (scratch_.size() != rightbound_.size()) scratch_.resize(rightbound_.size());
        const int n = params_.n_samples;
        const int workers = std::max(1, params_.workers);
        auto run_chunk = [&](int c) {
            const int lo = static_cast<int>(static_cast<long long>(n) * c / workers);
            const int hi = static_cast<int>(static_cast<long long>(n) * (c + 1) / workers);
            Rng rng = substream(seed_, (static_cast<std::uint64_t>(iteration) * 4 + static_cast<std::uint64_t>(phase)) * 65536 +
                                           static_cast<std::uint64_t>(c));
            CheckWorkspace ws;
            for (int s = lo; s < hi; ++s) fn(s, rng, ws);
        };
        if (workers == 1) {
            run_chunk(0);
            return;
        }
        std::vector<std::thread> threads;
        threads.reserve(static_cast<std::size_t>(workers));
        for (int c = 0; c < workers; ++c) threads.emplace_back(run_chunk, c);
        for (auto& t : threads) t.join();
    }

    // owned copies: the evolver outlives the constructor call and callers
    // routinely pass temporaries
    FieldSpec fs_;
    DegreeDist dd_;
    Mapping mapping_;
    ChannelModel channel_;
    DeParams params_;
    std::uint64_t seed_;
    int iter_ = 0;
    std::vector<double> rightbound_, leftbound_, scratch_;
    std::vector<std::pair<double, int>> lambda_cdf_, rho_cdf_;
};

inline DeTrace mc_density_evolution(const FieldSpec& fs, const DegreeDist& dd, const Mapping& mapping,
                                    const ChannelModel& channel, const DeParams& params, std::uint64_t seed) {
    DensityEvolver de(fs, dd, mapping, channel, params, seed);
    DeTrace trace;
    trace.seed = seed;
    trace.n_samples = params.n_samples;
    trace.rows.push_back(de.stats());
    for (int t = 1; t <= params.iterations; ++t) {
        de.step();
        trace.rows.push_back(de.stats());
    }
    return trace;
}

}  // namespace gfldpc
