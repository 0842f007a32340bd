#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "gfldpc/density_evolution.hpp"
#include "gfldpc/exit_chart.hpp"
#include "test_util.hpp"

using namespace gfldpc;

namespace {

ExitParams design_params(int j_samples, int cnd_samples) {
    ExitParams p;
    p.j.grid_points = 100;
    p.j.samples = j_samples;
    p.jr = p.j;
    p.cnd_grid_points = 24;
    p.cnd_samples = cnd_samples;
    p.design_grid_step = 0.002;
    return p;
}

}  // namespace

TEST_CASE("a single admissible degree gets full weight", "[design]") {
    const FieldSpec f4 = FieldSpec::make(4);
    const Mapping map = pam_constellation(4);
    // 12 dB leaves a wide margin for the rate-2/3 degree-2 ensemble and
    // keeps the stability product lambda'(0) rho'(1) Delta below one
    ExitChart chart(f4, map, sigma_for_snr_db(map, 12.0), ExitMethod::gaussian, design_params(20000, 0), 37);
    const double delta = delta_param(ChannelModel::awgn(sigma_for_snr_db(map, 12.0)), map);
    REQUIRE(stability_margin(DegreeDist({{2, 1.0}}, {{6, 1.0}}), delta) < 1.0);
    const DesignResult r = chart.design_lambda(DegreeDist({{2, 1.0}}, {{6, 1.0}}), 2, EpsProfile::reference());
    REQUIRE(r.feasible);
    REQUIRE(r.fractions.size() == 1);
    CHECK(r.fractions[0].first == 2);
    CHECK(r.fractions[0].second == Catch::Approx(1.0));
}

TEST_CASE("tightening the margin profile shrinks the objective", "[design]") {
    const FieldSpec f4 = FieldSpec::make(4);
    const Mapping map = pam_constellation(4);
    ExitChart chart(f4, map, sigma_for_snr_db(map, 10.0), ExitMethod::gaussian, design_params(20000, 0), 41);
    const DegreeDist rho({{2, 1.0}}, {{6, 1.0}});

    // the margin must vanish toward I = 1 (the curves meet at (1,1)), so the
    // levels scale the reference profile rather than applying a uniform shift
    double prev = 1e9;
    for (double scale : {0.0, 1.0, 3.0}) {
        EpsProfile prof = EpsProfile::reference();
        for (auto& [ub, v] : prof.steps) v *= scale;
        const DesignResult r = chart.design_lambda(rho, 12, prof);
        REQUIRE(r.feasible);
        CHECK(r.inv_moment <= prev + 1e-9);
        prev = r.inv_moment;
    }
}

TEST_CASE("infeasible designs report the blocking grid point", "[design]") {
    const FieldSpec f4 = FieldSpec::make(4);
    const Mapping map = pam_constellation(4);
    // 2 dB is far below the limit for the rates degrees {2, 3} can reach
    // (all-degree-3 already means rate 1/2 = 1 bit/use vs ~0.69 bits capacity)
    ExitChart chart(f4, map, sigma_for_snr_db(map, 2.0), ExitMethod::gaussian, design_params(20000, 0), 43);
    const DesignResult r = chart.design_lambda(DegreeDist({{2, 1.0}}, {{6, 1.0}}), 3, EpsProfile::reference());
    CHECK_FALSE(r.feasible);
    CHECK(r.most_violated >= 0.0);
}

TEST_CASE("decoder clears an EXIT-predicted threshold with margin", "[design]") {
    const FieldSpec f8 = FieldSpec::make(8);
    const Mapping map = nonuniform_constellation(8);
    const DegreeDist dd = DegreeDist::regular(3, 6);

    // threshold: lowest SNR on a 0.1 dB grid with an open tunnel
    ExitParams p;
    p.j.grid_points = 100;
    p.j.samples = 30000;
    p.jr = p.j;
    p.tunnel_grid_step = 0.004;
    const MonotoneFit j8 = fit_J(f8, p.j, 53);
    double threshold = 0.0;
    for (double snr = 6.0; snr <= 14.0; snr += 0.1) {
        ExitChart chart(f8, map, sigma_for_snr_db(map, snr), ExitMethod::gaussian, p, 53, &j8);
        if (chart.tunnel_open(dd).open) {
            threshold = snr;
            break;
        }
    }
    REQUIRE(threshold > 0.0);

    // 1.5 dB above the predicted threshold a moderate block decodes cleanly
    const ChannelModel chan = ChannelModel::awgn(sigma_for_snr_db(map, threshold + 1.5));
    BpOptions opt;
    opt.max_iters = 80;
    opt.early_stop = true;
    for (int trial = 0; trial < 20; ++trial) {
        Rng rng = substream(59, static_cast<std::uint64_t>(trial));
        CosetCode code = sample_coset_code(f8, dd, 6000, map, rng);
        std::vector<double> obs(static_cast<std::size_t>(code.graph.num_vars));
        for (int i = 0; i < code.graph.num_vars; ++i)
            obs[static_cast<std::size_t>(i)] =
                sample_channel_output(chan, map, code.coset[static_cast<std::size_t>(i)], rng);
        const std::vector<int> zero(static_cast<std::size_t>(code.graph.num_vars), 0);
        const DecodeResult res = run_bp(f8, code, obs, chan, opt, zero, rng);
        REQUIRE(res.errors_per_iter.back() == 0);
    }
}

TEST_CASE("left-distribution design reaches the published rate regime", "[design]") {
    const FieldSpec f64 = FieldSpec::make(64);
    const Mapping map = nonuniform_constellation(64);
    ExitChart chart(f64, map, sigma_for_snr_db(map, 25.06), ExitMethod::rightbound_model, design_params(30000, 30000),
                    47);
    const DegreeDist rho8({{2, 1.0}}, {{8, 1.0}});
    const DesignResult r = chart.design_lambda(rho8, 30, EpsProfile::reference());
    REQUIRE(r.feasible);

    const DegreeDist designed(r.fractions, {{8, 1.0}});
    const double rate = design_rate(designed);
    CHECK(rate >= 0.63);
    CHECK(chart.tunnel_open(designed).open);
}
