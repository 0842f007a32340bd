#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "decoder.hpp"
#include "ensemble.hpp"
#include "gf.hpp"
#include "message.hpp"
#include "modulation.hpp"
#include "rng.hpp"
#include "simplex.hpp"
#include "stats.hpp"

namespace gfldpc {

// ---------------------------------------------------------------------------
// symmetric permutation-invariant Gaussian LLR law: mean sigma^2/2 on every
// component, covariance sigma^2 on the diagonal and sigma^2/2 off it
// ---------------------------------------------------------------------------

struct GaussianSpec {
    double sigma = 1.0;
};

// one draw: w_i = sigma^2/2 + (sigma/sqrt(2)) (z_i + z_0) realizes the
// covariance sigma^2/2 (I + 11^T) with a single shared component
inline void sample_gauss_sym_into(int q, double sigma, Rng& rng, double* w) {
    const double mean = 0.5 * sigma * sigma;
    const double s = sigma * 0.7071067811865475244;
    const double z0 = rng.next_gauss();
    for (int i = 0; i + 1 < q; ++i) w[i] = mean + s * (rng.next_gauss() + z0);
}

inline std::vector<double> sample_gauss_sym(int q, double sigma, int n, Rng& rng) {
    if (!(sigma > 0.0)) throw std::domain_error("sample_gauss_sym: sigma must be positive");
    std::vector<double> out(static_cast<std::size_t>(n) * static_cast<std::size_t>(q - 1));
    for (int s = 0; s < n; ++s) sample_gauss_sym_into(q, sigma, rng, &out[static_cast<std::size_t>(s) * (q - 1)]);
    return out;
}

// mutual-information functional of LLR samples (flat n x (q-1)), clipped
inline MeanStderr mi_estimate(const double* llr, int n, int q) {
    if (n < 1) throw std::domain_error("mi_estimate: empty sample set");
    std::vector<double> vals;
    vals.reserve(static_cast<std::size_t>(n));
    const double logq = std::log(static_cast<double>(q));
    for (int s = 0; s < n; ++s) {
        const double* w = llr + static_cast<std::size_t>(s) * (q - 1);
        double mx = 0.0;  // max of (0, -w_i)
        for (int i = 0; i + 1 < q; ++i)
            if (!std::isinf(w[i])) mx = std::max(mx, -w[i]);
        double t = std::exp(-mx);
        for (int i = 0; i + 1 < q; ++i)
            if (!std::isinf(w[i])) t += std::exp(-w[i] - mx);
        vals.push_back(1.0 - (mx + std::log(t)) / logq);
    }
    MeanStderr ms = mean_stderr(vals);
    ms.mean = std::min(1.0, std::max(0.0, ms.mean));
    return ms;
}

inline MeanStderr mi_estimate(const std::vector<double>& llr, int q) {
    return mi_estimate(llr.data(), static_cast<int>(llr.size()) / (q - 1), q);
}

// ---------------------------------------------------------------------------
// monotone fits of J-style transfer functions
// ---------------------------------------------------------------------------

namespace detail {

// least squares via Householder QR on the normalized Vandermonde basis
inline std::vector<double> polyfit(const std::vector<double>& xs, const std::vector<double>& ys, int degree,
                                   double xscale) {
    const int n = static_cast<int>(xs.size());
    const int k = degree + 1;
    std::vector<std::vector<double>> a(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(k)));
    std::vector<double> b = ys;
    for (int i = 0; i < n; ++i) {
        double t = 1.0;
        const double u = xs[static_cast<std::size_t>(i)] / xscale;
        for (int j = 0; j < k; ++j) {
            a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = t;
            t *= u;
        }
    }
    for (int j = 0; j < k; ++j) {
        double norm = 0.0;
        for (int i = j; i < n; ++i) norm += a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] * a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        norm = std::sqrt(norm);
        if (norm == 0.0) throw std::runtime_error("polyfit: rank-deficient basis");
        const double alpha = a[static_cast<std::size_t>(j)][static_cast<std::size_t>(j)] > 0 ? -norm : norm;
        std::vector<double> v(static_cast<std::size_t>(n), 0.0);
        v[static_cast<std::size_t>(j)] = a[static_cast<std::size_t>(j)][static_cast<std::size_t>(j)] - alpha;
        for (int i = j + 1; i < n; ++i) v[static_cast<std::size_t>(i)] = a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        double vtv = 0.0;
        for (int i = j; i < n; ++i) vtv += v[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(i)];
        if (vtv == 0.0) continue;
        for (int jj = j; jj < k; ++jj) {
            double dot = 0.0;
            for (int i = j; i < n; ++i) dot += v[static_cast<std::size_t>(i)] * a[static_cast<std::size_t>(i)][static_cast<std::size_t>(jj)];
            const double f = 2.0 * dot / vtv;
            for (int i = j; i < n; ++i) a[static_cast<std::size_t>(i)][static_cast<std::size_t>(jj)] -= f * v[static_cast<std::size_t>(i)];
        }
        double dotb = 0.0;
        for (int i = j; i < n; ++i) dotb += v[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(i)];
        const double fb = 2.0 * dotb / vtv;
        for (int i = j; i < n; ++i) b[static_cast<std::size_t>(i)] -= fb * v[static_cast<std::size_t>(i)];
    }
    std::vector<double> coeff(static_cast<std::size_t>(k));
    for (int j = k - 1; j >= 0; --j) {
        double s = b[static_cast<std::size_t>(j)];
        for (int jj = j + 1; jj < k; ++jj) s -= a[static_cast<std::size_t>(j)][static_cast<std::size_t>(jj)] * coeff[static_cast<std::size_t>(jj)];
        coeff[static_cast<std::size_t>(j)] = s / a[static_cast<std::size_t>(j)][static_cast<std::size_t>(j)];
    }
    return coeff;
}

inline double polyeval(const std::vector<double>& coeff, double x, double xscale) {
    const double u = x / xscale;
    double v = 0.0;
    for (std::size_t j = coeff.size(); j-- > 0;) v = v * u + coeff[j];
    return v;
}

// pool-adjacent-violators: nondecreasing projection
inline void isotonic(std::vector<double>& y) {
    const std::size_t n = y.size();
    std::vector<double> level(n), weight(n);
    std::vector<std::size_t> count(n);
    std::size_t blocks = 0;
    for (std::size_t i = 0; i < n; ++i) {
        level[blocks] = y[i];
        weight[blocks] = 1.0;
        count[blocks] = 1;
        ++blocks;
        while (blocks > 1 && level[blocks - 2] > level[blocks - 1]) {
            const double w = weight[blocks - 2] + weight[blocks - 1];
            level[blocks - 2] = (level[blocks - 2] * weight[blocks - 2] + level[blocks - 1] * weight[blocks - 1]) / w;
            weight[blocks - 2] = w;
            count[blocks - 2] += count[blocks - 1];
            --blocks;
        }
    }
    std::size_t pos = 0;
    for (std::size_t b = 0; b < blocks; ++b)
        for (std::size_t k = 0; k < count[b]; ++k) y[pos++] = level[b];
}

}  // namespace detail

// Polynomial fit with isotonic post-correction, strictly increasing on
// [0, hi]. Above hi the curve continues with the Gaussian-tail asymptote
// 1 - (1 - y(hi)) exp(-(x^2 - hi^2)/8), so saturated queries stay monotone
// and invertible. The inverse bisects the same table, which makes
// inverse(eval(x)) = x by construction.
class MonotoneFit {
  public:
    MonotoneFit() = default;

    MonotoneFit(const std::vector<double>& xs, const std::vector<double>& ys, int degree, double anchor_y,
                double max_residual = 0.05)
        : hi_(xs.back()), anchor_(anchor_y) {
        coeff_ = detail::polyfit(xs, ys, degree, hi_);
        double resid = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i)
            resid = std::max(resid, std::fabs(detail::polyeval(coeff_, xs[i], hi_) - ys[i]));
        if (resid > max_residual) throw std::runtime_error("monotone fit: residual exceeds tolerance");
        residual_ = resid;

        const int npts = 2001;
        grid_x_.resize(npts);
        grid_y_.resize(npts);
        for (int i = 0; i < npts; ++i) {
            const double x = hi_ * i / (npts - 1);
            grid_x_[static_cast<std::size_t>(i)] = x;
            grid_y_[static_cast<std::size_t>(i)] = detail::polyeval(coeff_, x, hi_);
        }
        grid_y_[0] = anchor_y;
        detail::isotonic(grid_y_);
        for (int i = 0; i < npts; ++i) {
            double& y = grid_y_[static_cast<std::size_t>(i)];
            y = std::min(std::max(y, anchor_y), 1.0 - 1e-7);
            y += 1e-12 * i;  // strictify flat isotonic blocks, stays below 1
        }
    }

    double operator()(double x) const {
        if (x <= 0.0) return anchor_;
        if (x >= hi_) {
            const double yh = grid_y_.back();
            return 1.0 - (1.0 - yh) * std::exp(-(x * x - hi_ * hi_) / 8.0);
        }
        const double t = x / hi_ * (static_cast<double>(grid_x_.size()) - 1.0);
        const std::size_t k = std::min(grid_x_.size() - 2, static_cast<std::size_t>(t));
        const double f = t - static_cast<double>(k);
        return grid_y_[k] * (1.0 - f) + grid_y_[k + 1] * f;
    }

    double inverse(double y) const {
        // an anchored fit (J_R) has no preimage below the channel information
        if (anchor_ > 0.0 && y < anchor_ - 1e-12)
            throw std::domain_error("monotone fit: inverse query below the anchor value");
        if (y <= anchor_) return 0.0;
        const double yh = grid_y_.back();
        if (y > yh) {
            const double r = (1.0 - y) / (1.0 - yh);
            if (r <= 1e-12) return 6.0 * hi_;  // cap far in the saturated tail
            return std::sqrt(hi_ * hi_ - 8.0 * std::log(r));
        }
        double lo = 0.0, hi = hi_;
        for (int it = 0; it < 80; ++it) {
            const double mid = 0.5 * (lo + hi);
            ((*this)(mid) < y ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    }

    double domain_hi() const { return hi_; }
    double value_hi() const { return grid_y_.back(); }
    double anchor() const { return anchor_; }
    double fit_residual() const { return residual_; }
    const std::vector<double>& coefficients() const { return coeff_; }

  private:
    std::vector<double> coeff_;
    std::vector<double> grid_x_, grid_y_;
    double hi_ = 6.5;
    double anchor_ = 0.0;
    double residual_ = 0.0;
};

struct JParams {
    int grid_points = 200;
    int samples = 200000;
    double sigma_lo = 0.01;
    double sigma_hi = 6.5;
    int poly_degree = 9;
};

inline std::vector<double> log_spaced(double lo, double hi, int n) {
    std::vector<double> xs(static_cast<std::size_t>(n));
    const double llo = std::log(lo), lhi = std::log(hi);
    for (int i = 0; i < n; ++i) xs[static_cast<std::size_t>(i)] = std::exp(llo + (lhi - llo) * i / (n - 1));
    return xs;
}

// J(sigma): information functional of the single-parameter Gaussian law,
// tabulated on a log grid and fitted monotonically; one fit per field order
inline MonotoneFit fit_J(const FieldSpec& fs, const JParams& params, std::uint64_t seed) {
    const int q = fs.q();
    const std::vector<double> grid = log_spaced(params.sigma_lo, params.sigma_hi, params.grid_points);
    std::vector<double> ys(grid.size());
    const double logq = std::log(static_cast<double>(q));
    std::vector<double> w(static_cast<std::size_t>(q - 1));
    for (std::size_t k = 0; k < grid.size(); ++k) {
        Rng rng = substream(seed, 1000 + k);
        const double sigma = grid[k];
        double acc = 0.0;
        for (int s = 0; s < params.samples; ++s) {
            sample_gauss_sym_into(q, sigma, rng, w.data());
            double t = 1.0;
            for (int i = 0; i + 1 < q; ++i) t += std::exp(-w[static_cast<std::size_t>(i)]);
            acc += 1.0 - std::log(t) / logq;
        }
        ys[k] = std::min(1.0, std::max(0.0, acc / params.samples));
    }
    return MonotoneFit(grid, ys, params.poly_degree, 0.0);
}

// AWGN initial-message model: r'_i = alpha(v)_i + beta(v)_i z with a uniform
// random coset symbol v
class InitialModel {
  public:
    InitialModel(const FieldSpec& fs, const Mapping& map, double sigma_z) : fs_(fs), sigma_z_(sigma_z) {
        if (!map.is_signal()) throw std::domain_error("initial model: AWGN needs a signal mapping");
        const int q = fs.q();
        alpha_.resize(static_cast<std::size_t>(q) * (q - 1));
        beta_.resize(static_cast<std::size_t>(q) * (q - 1));
        for (int v = 0; v < q; ++v)
            for (int i = 1; i < q; ++i) {
                const double diff = map.points[static_cast<std::size_t>(v)] - map.points[static_cast<std::size_t>(fs.add(v, i))];
                alpha_[static_cast<std::size_t>(v) * (q - 1) + i - 1] = diff * diff / (2.0 * sigma_z * sigma_z);
                beta_[static_cast<std::size_t>(v) * (q - 1) + i - 1] = diff / (sigma_z * sigma_z);
            }
    }

    void sample_into(Rng& rng, double* w) const {
        const int q = fs_.q();
        const int v = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(q)));
        const double z = sigma_z_ * rng.next_gauss();  // channel noise, not unit variance
        const double* a = &alpha_[static_cast<std::size_t>(v) * (q - 1)];
        const double* b = &beta_[static_cast<std::size_t>(v) * (q - 1)];
        for (int i = 0; i + 1 < q; ++i) w[i] = a[i] + b[i] * z;
    }

    double sigma_z() const { return sigma_z_; }
    const FieldSpec& field() const { return fs_; }

  private:
    FieldSpec fs_;  // owned: the model outlives the constructor call
    double sigma_z_;
    std::vector<double> alpha_, beta_;
};

inline std::vector<double> sample_initial(const InitialModel& model, int n, Rng& rng) {
    const int q = model.field().q();
    std::vector<double> out(static_cast<std::size_t>(n) * (q - 1));
    for (int s = 0; s < n; ++s) model.sample_into(rng, &out[static_cast<std::size_t>(s) * (q - 1)]);
    return out;
}

// J_R(sigma; sigma_z, delta): information of initial-plus-Gaussian rightbound
// messages. Anchored at sigma = 0 by the equiprobable capacity, so its
// inverse is defined on [I0, J_R(sigma_hi)].
inline MonotoneFit fit_JR(const InitialModel& model, double i0, const JParams& params, std::uint64_t seed) {
    const int q = model.field().q();
    const std::vector<double> grid = log_spaced(params.sigma_lo, params.sigma_hi, params.grid_points);
    std::vector<double> ys(grid.size());
    const double logq = std::log(static_cast<double>(q));
    std::vector<double> w(static_cast<std::size_t>(q - 1)), g(static_cast<std::size_t>(q - 1));
    for (std::size_t k = 0; k < grid.size(); ++k) {
        Rng rng = substream(seed, 5000 + k);
        const double sigma = grid[k];
        double acc = 0.0;
        for (int s = 0; s < params.samples; ++s) {
            model.sample_into(rng, w.data());
            sample_gauss_sym_into(q, sigma, rng, g.data());
            double mx = 0.0;
            for (int i = 0; i + 1 < q; ++i) {
                w[static_cast<std::size_t>(i)] += g[static_cast<std::size_t>(i)];
                mx = std::max(mx, -w[static_cast<std::size_t>(i)]);
            }
            double t = std::exp(-mx);
            for (int i = 0; i + 1 < q; ++i) t += std::exp(-w[static_cast<std::size_t>(i)] - mx);
            acc += 1.0 - (mx + std::log(t)) / logq;
        }
        ys[k] = std::min(1.0, std::max(0.0, acc / params.samples));
    }
    return MonotoneFit(grid, ys, params.poly_degree, i0);
}

// ---------------------------------------------------------------------------
// EXIT chart: VND/CND curves, tunnel check and LP design
// ---------------------------------------------------------------------------

enum class ExitMethod { gaussian = 1, rightbound_model = 2 };

struct ExitParams {
    JParams j{};
    JParams jr{};
    int cnd_grid_points = 40;
    int cnd_samples = 20000;
    double design_grid_step = 0.001;
    double tunnel_grid_step = 0.002;
};

// piecewise-constant design margin epsilon(I)
struct EpsProfile {
    // (upper bound, value): eps(I) = value of the first interval with I < bound
    std::vector<std::pair<double, double>> steps{{1.0, 0.0}};
    double min_margin = 1e-6;

    double operator()(double i) const {
        for (const auto& [ub, v] : steps)
            if (i < ub) return v;
        return 0.0;
    }

    // margins used for the published designs: 5e-3 below 0.5, 4e-3 on
    // [0.5, 0.6), zero above
    static EpsProfile reference() {
        EpsProfile p;
        p.steps = {{0.5, 5e-3}, {0.6, 4e-3}, {1.0, 0.0}};
        return p;
    }
};

struct TunnelReport {
    bool open = false;
    double min_gap = 0.0;
    double argmin = 0.0;
};

struct DesignResult {
    bool feasible = false;
    std::vector<std::pair<int, double>> fractions;  // (degree, weight), weights ~1e-9 dropped
    double inv_moment = 0.0;                        // sum of weight/degree
    double most_violated = -1.0;                    // grid point on infeasibility
};

class ExitChart {
  public:
    ExitChart(const FieldSpec& fs, const Mapping& map, double sigma_z, ExitMethod method, const ExitParams& params,
              std::uint64_t seed, const MonotoneFit* shared_j = nullptr)
        : fs_(fs), map_(map), sigma_z_(sigma_z), method_(method), params_(params), seed_(seed),
          model_(fs, map, sigma_z) {
        i0_ = equiprobable_capacity(ChannelModel::awgn(sigma_z), map) / std::log2(static_cast<double>(fs.q()));
        // J depends only on the field order, so charts at different noise
        // levels can share one fit
        j_ = shared_j ? *shared_j : fit_J(fs, params.j, substream_id(1));
        if (method == ExitMethod::rightbound_model) jr_ = fit_JR(model_, i0_, params.jr, substream_id(2));
    }

    const FieldSpec& field() const { return fs_; }
    double i0() const { return i0_; }
    double sigma_z() const { return sigma_z_; }
    ExitMethod method() const { return method_; }
    const MonotoneFit& j_fit() const { return j_; }
    const MonotoneFit& jr_fit() const { return jr_; }

    // variable-node transfer for one left degree
    double vnd(double ia, int degree) const {
        if (degree < 1) throw std::domain_error("vnd: degree must be >= 1");
        if (ia < -1e-12 || ia > 1.0 + 1e-12) throw std::domain_error("vnd: information argument outside [0, 1]");
        const double s = j_.inverse(std::min(1.0, std::max(0.0, ia)));
        const double incoming = (degree - 1.0) * s * s;
        if (method_ == ExitMethod::gaussian) {
            const double s0 = j_.inverse(i0_);
            return j_(std::sqrt(incoming + s0 * s0));
        }
        return jr_(std::sqrt(incoming));
    }

    // check-node transfer for one right degree; the sampled-model curve only
    // exists from the channel information upward
    double cnd(double ia, int degree) {
        if (degree < 2) throw std::domain_error("cnd: degree must be >= 2");
        if (ia < -1e-12 || ia > 1.0 + 1e-12) throw std::domain_error("cnd: information argument outside [0, 1]");
        if (method_ == ExitMethod::rightbound_model && ia < i0_ - 1e-9)
            throw std::domain_error("cnd: information argument below the channel information");
        ia = std::min(1.0, std::max(0.0, ia));
        if (method_ == ExitMethod::gaussian)
            return 1.0 - j_(std::sqrt(degree - 1.0) * j_.inverse(1.0 - ia));
        const auto& table = cnd_table(degree);
        if (ia <= table.front().first) return table.front().second;
        for (std::size_t k = 1; k < table.size(); ++k)
            if (ia <= table[k].first) {
                const double f = (ia - table[k - 1].first) / (table[k].first - table[k - 1].first);
                return table[k - 1].second * (1.0 - f) + table[k].second * f;
            }
        return table.back().second;
    }

    double vnd_mixed(double ia, const DegreeDist& dd) const {
        double s = 0.0;
        for (std::size_t i = 2; i < dd.lambda.size(); ++i)
            if (dd.lambda[i] > 0.0) s += dd.lambda[i] * vnd(ia, static_cast<int>(i));
        return s;
    }

    double cnd_mixed(double ia, const DegreeDist& dd) {
        double s = 0.0;
        for (std::size_t j = 2; j < dd.rho.size(); ++j)
            if (dd.rho[j] > 0.0) s += dd.rho[j] * cnd(ia, static_cast<int>(j));
        return s;
    }

    // inverse of the mixed CND curve in the chart's common axis
    double cnd_inv_mixed(double ie, const DegreeDist& dd) {
        const double lowest = method_ == ExitMethod::gaussian ? 0.0 : i0_;
        if (ie <= cnd_mixed(lowest, dd)) return lowest;
        if (ie >= 1.0) return 1.0;
        double lo = lowest, hi = 1.0;
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            (cnd_mixed(mid, dd) < ie ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    }

    double vnd_inv_mixed(double ie, const DegreeDist& dd) const {
        if (ie <= vnd_mixed(0.0, dd)) return 0.0;
        if (ie >= 1.0) return 1.0;
        double lo = 0.0, hi = 1.0;
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            (vnd_mixed(mid, dd) < ie ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    }

    // convergence tunnel: VND strictly above the reversed-axes CND over the
    // whole grid; the returned gap is the smallest vertical clearance
    TunnelReport tunnel_open(const DegreeDist& dd, double step = 0.0) {
        if (step <= 0.0) step = params_.tunnel_grid_step;
        const double lo = method_ == ExitMethod::gaussian ? 0.0 : i0_;
        TunnelReport rep;
        rep.min_gap = 1e300;
        for (double i = lo + step; i < 1.0 - 0.5 * step; i += step) {
            const double gap = vnd_mixed(i, dd) - cnd_inv_mixed(i, dd);
            if (gap < rep.min_gap) {
                rep.min_gap = gap;
                rep.argmin = i;
            }
        }
        rep.open = rep.min_gap > 0.0;
        return rep;
    }

    // maximize sum lambda_i / i with the tunnel constraint against a fixed rho
    DesignResult design_lambda(const DegreeDist& rho_fixed, int max_degree, const EpsProfile& eps) {
        std::vector<int> degrees;
        for (int d = 2; d <= max_degree; ++d) degrees.push_back(d);
        const double lo = method_ == ExitMethod::gaussian ? 0.0 : i0_;
        const double step = params_.design_grid_step;

        std::vector<double> grid;
        for (double i = lo + step; i < 1.0 - 0.5 * step; i += step) grid.push_back(i);

        std::vector<Constraint> rows;
        std::vector<double> row_grid;
        rows.push_back({std::vector<double>(degrees.size(), 1.0), Relation::eq, 1.0});
        row_grid.push_back(-1.0);
        DesignResult res;
        for (double i : grid) {
            const double rhs = cnd_inv_mixed(i, rho_fixed) + eps(i) + eps.min_margin;
            std::vector<double> coeffs(degrees.size());
            double worst = 0.0, best = 0.0;
            for (std::size_t k = 0; k < degrees.size(); ++k) {
                coeffs[k] = vnd(i, degrees[k]);
                if (k == 0) worst = best = coeffs[k];
                worst = std::min(worst, coeffs[k]);
                best = std::max(best, coeffs[k]);
            }
            if (worst >= rhs) continue;  // every mixture satisfies this point
            if (best < rhs) {
                res.feasible = false;
                res.most_violated = i;
                return res;
            }
            rows.push_back({std::move(coeffs), Relation::ge, rhs});
            row_grid.push_back(i);
        }

        std::vector<double> obj(degrees.size());
        for (std::size_t k = 0; k < degrees.size(); ++k) obj[k] = 1.0 / degrees[k];
        const SimplexResult lp = simplex_solve(obj, rows, Sense::maximize);
        return package(lp, degrees, row_grid);
    }

    // minimize sum rho_j / j with the mirrored constraint against a fixed lambda
    DesignResult design_rho(const DegreeDist& lambda_fixed, int max_degree, const EpsProfile& eps) {
        std::vector<int> degrees;
        for (int d = 2; d <= max_degree; ++d) degrees.push_back(d);
        const double lo = method_ == ExitMethod::gaussian ? 0.0 : i0_;
        const double step = params_.design_grid_step;

        std::vector<double> grid;
        for (double i = lo + step; i < 1.0 - 0.5 * step; i += step) grid.push_back(i);

        std::vector<Constraint> rows;
        std::vector<double> row_grid;
        rows.push_back({std::vector<double>(degrees.size(), 1.0), Relation::eq, 1.0});
        row_grid.push_back(-1.0);
        DesignResult res;
        for (double i : grid) {
            const double rhs = vnd_inv_mixed(i, lambda_fixed) + eps(i) + eps.min_margin;
            std::vector<double> coeffs(degrees.size());
            double worst = 0.0, best = 0.0;
            for (std::size_t k = 0; k < degrees.size(); ++k) {
                coeffs[k] = cnd(i, degrees[k]);
                if (k == 0) worst = best = coeffs[k];
                worst = std::min(worst, coeffs[k]);
                best = std::max(best, coeffs[k]);
            }
            if (worst >= rhs) continue;
            if (best < rhs) {
                res.feasible = false;
                res.most_violated = i;
                return res;
            }
            rows.push_back({std::move(coeffs), Relation::ge, rhs});
            row_grid.push_back(i);
        }

        std::vector<double> obj(degrees.size());
        for (std::size_t k = 0; k < degrees.size(); ++k) obj[k] = 1.0 / degrees[k];
        const SimplexResult lp = simplex_solve(obj, rows, Sense::minimize);
        return package(lp, degrees, row_grid);
    }

  private:
    std::uint64_t substream_id(std::uint64_t k) const { return seed_ * 1000003ULL + k; }

    DesignResult package(const SimplexResult& lp, const std::vector<int>& degrees,
                         const std::vector<double>& row_grid) const {
        DesignResult res;
        if (lp.status != SimplexResult::Status::optimal) {
            res.feasible = false;
            if (lp.most_violated_row >= 0 && lp.most_violated_row < static_cast<int>(row_grid.size()))
                res.most_violated = row_grid[static_cast<std::size_t>(lp.most_violated_row)];
            return res;
        }
        res.feasible = true;
        res.inv_moment = 0.0;
        for (std::size_t k = 0; k < degrees.size(); ++k) {
            const double w = lp.x[k];
            if (w > 1e-9) {
                res.fractions.emplace_back(degrees[k], w);
                res.inv_moment += w / degrees[k];
            }
        }
        return res;
    }

    // empirical CND table for one degree: rightbound laws at sigma-grid
    // points, each point estimated from barred leftbound samples produced by
    // convolving degree-1 randomly relabeled rightbound draws
    const std::vector<std::pair<double, double>>& cnd_table(int degree) {
        auto it = cnd_cache_.find(degree);
        if (it != cnd_cache_.end()) return it->second;
        if (method_ != ExitMethod::rightbound_model)
            throw std::logic_error("cnd_table: only the rightbound-model method tabulates CND");

        const int q = fs_.q();
        const int qm1 = q - 1;
        const double logq = std::log(static_cast<double>(q));
        std::vector<std::pair<double, double>> table;
        std::vector<double> sigmas = log_spaced(params_.jr.sigma_lo, params_.jr.sigma_hi, params_.cnd_grid_points);
        sigmas.insert(sigmas.begin(), 0.0);

        std::vector<double> w(static_cast<std::size_t>(qm1));
        std::vector<double> g(static_cast<std::size_t>(qm1));
        std::vector<double> prob(static_cast<std::size_t>(q));
        std::vector<double> acc_t(static_cast<std::size_t>(q));

        for (std::size_t si = 0; si < sigmas.size(); ++si) {
            const double sigma = sigmas[si];
            const double ia = sigma == 0.0 ? i0_ : jr_(sigma);
            Rng rng = substream(seed_, 7000 + static_cast<std::uint64_t>(degree) * 101 + si);
            double acc = 0.0;
            for (int s = 0; s < params_.cnd_samples; ++s) {
                std::fill(acc_t.begin(), acc_t.end(), 1.0);
                for (int n = 0; n + 1 < degree; ++n) {
                    model_.sample_into(rng, w.data());
                    if (sigma > 0.0) {
                        sample_gauss_sym_into(q, sigma, rng, g.data());
                        for (int i = 0; i < qm1; ++i) w[static_cast<std::size_t>(i)] += g[static_cast<std::size_t>(i)];
                    }
                    // convert to a probability vector and scale by a random
                    // inverse label before the transform-domain product
                    double wmin = 0.0;
                    for (int i = 0; i < qm1; ++i) wmin = std::min(wmin, w[static_cast<std::size_t>(i)]);
                    double sum = std::exp(wmin);
                    prob[0] = sum;
                    for (int i = 0; i < qm1; ++i) {
                        const double e = std::exp(-(w[static_cast<std::size_t>(i)] - wmin));
                        prob[static_cast<std::size_t>(i + 1)] = e;
                        sum += e;
                    }
                    const int label = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(q - 1)));
                    const int h = fs_.inv(label);
                    std::vector<double>& row = g_scratch_;
                    row.resize(static_cast<std::size_t>(q));
                    for (int i = 0; i < q; ++i) row[static_cast<std::size_t>(i)] = prob[static_cast<std::size_t>(fs_.mul(i, h))] / sum;
                    if (fs_.p() == 2) {
                        wht_inplace(fs_.m(), row.data());
                        for (int i = 0; i < q; ++i) acc_t[static_cast<std::size_t>(i)] *= row[static_cast<std::size_t>(i)];
                    } else {
                        cplx_scratch_.assign(row.begin(), row.end());
                        mdft_inplace(fs_.p(), fs_.m(), cplx_scratch_.data(), false);
                        if (static_cast<int>(cplx_acc_.size()) != q) cplx_acc_.assign(static_cast<std::size_t>(q), 1.0);
                        if (n == 0) std::fill(cplx_acc_.begin(), cplx_acc_.end(), std::complex<double>(1.0));
                        for (int i = 0; i < q; ++i) cplx_acc_[static_cast<std::size_t>(i)] *= cplx_scratch_[static_cast<std::size_t>(i)];
                    }
                }
                // leftbound zero-component: IDFT at index 0 is the mean of the
                // transform-domain product; inputs are normalized so the total
                // mass is exactly the component-0 product (= 1)
                double l0;
                if (fs_.p() == 2) {
                    double s0 = 0.0;
                    for (int i = 0; i < q; ++i) s0 += acc_t[static_cast<std::size_t>(i)];
                    l0 = s0 / q;
                } else {
                    std::complex<double> s0 = 0.0;
                    for (int i = 0; i < q; ++i) s0 += cplx_acc_[static_cast<std::size_t>(i)];
                    l0 = s0.real() / q;
                }
                acc += 1.0 + std::log(std::max(l0, kProbFloor)) / logq;
            }
            table.emplace_back(ia, std::min(1.0, std::max(0.0, acc / params_.cnd_samples)));
        }
        table.emplace_back(1.0, 1.0);  // perfect rightbound knowledge resolves the check exactly
        std::vector<double> ys(table.size());
        for (std::size_t k = 0; k < table.size(); ++k) ys[k] = table[k].second;
        detail::isotonic(ys);
        for (std::size_t k = 0; k < table.size(); ++k) table[k].second = ys[k];
        return cnd_cache_.emplace(degree, std::move(table)).first->second;
    }

    FieldSpec fs_;  // owned copy
    Mapping map_;
    double sigma_z_;
    ExitMethod method_;
    ExitParams params_;
    std::uint64_t seed_;
    InitialModel model_;
    double i0_ = 0.0;
    MonotoneFit j_, jr_;
    std::map<int, std::vector<std::pair<double, double>>> cnd_cache_;
    std::vector<double> g_scratch_;
    std::vector<std::complex<double>> cplx_scratch_, cplx_acc_;
};

}  // namespace gfldpc
