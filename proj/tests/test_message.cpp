#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <limits>

#include "gfldpc/message.hpp"
#include "gfldpc/modulation.hpp"
#include "gfldpc/stats.hpp"
#include "test_util.hpp"

using namespace gfldpc;
using testutil::random_probvec;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("LLR and probability representations round-trip", "[message]") {
    const FieldSpec f3 = FieldSpec::make(3);

    ProbVec uni{1.0 / 3, 1.0 / 3, 1.0 / 3};
    for (double w : llr_of(uni).v) CHECK(w == Catch::Approx(0.0).margin(1e-15));

    const LlrVec w = llr_of(ProbVec{0.5, 0.25, 0.25});
    CHECK(w.v[0] == Catch::Approx(std::log(2.0)).margin(1e-14));
    CHECK(w.v[1] == Catch::Approx(std::log(2.0)).margin(1e-14));
    const ProbVec back = prob_of(w);
    CHECK(back.v[0] == Catch::Approx(0.5).margin(1e-14));
    CHECK(back.v[1] == Catch::Approx(0.25).margin(1e-14));

    const ProbVec from_zero = prob_of(LlrVec{0.0, 0.0});
    for (double c : from_zero.v) CHECK(c == Catch::Approx(1.0 / 3).margin(1e-15));

    const ProbVec certain = prob_of(LlrVec{kInf, kInf});
    CHECK(certain.v[0] == 1.0);
    CHECK(certain.v[1] == 0.0);
    CHECK(certain.v[2] == 0.0);

    Rng rng(11);
    for (int q : {2, 3, 4, 8}) {
        const FieldSpec fs = FieldSpec::make(q);
        (void)fs;
        for (int t = 0; t < 200; ++t) {
            const ProbVec x = random_probvec(q, rng);
            const ProbVec y = prob_of(llr_of(x));
            for (int i = 0; i < q; ++i)
                CHECK(y.v[static_cast<std::size_t>(i)] == Catch::Approx(x.v[static_cast<std::size_t>(i)]).margin(1e-12));
        }
    }
    // large LLR magnitudes must not overflow
    const ProbVec stressed = prob_of(LlrVec{-700.0, 650.0});
    CHECK(stressed.v[1] == Catch::Approx(1.0).margin(1e-200));

    // a vanished zero-component routes through the probability floor
    const LlrVec degen = llr_of(ProbVec{0.0, 1.0});
    CHECK(std::isfinite(degen.v[0]));
    CHECK(degen.v[0] < -600.0);
}

TEST_CASE("shift permutes by field addition and is reversible", "[message]") {
    const FieldSpec f3 = FieldSpec::make(3);
    const ProbVec x{0.5, 0.3, 0.2};
    const ProbVec s1 = shift_prob(f3, x, 1);
    CHECK(s1.v[0] == Catch::Approx(0.3));
    CHECK(s1.v[1] == Catch::Approx(0.2));
    CHECK(s1.v[2] == Catch::Approx(0.5));
    CHECK(approx_equal(shift_prob(f3, x, 0), x));

    Rng rng(5);
    for (int q : {2, 3, 4, 8, 9}) {
        const FieldSpec fs = FieldSpec::make(q);
        for (int t = 0; t < 50; ++t) {
            const ProbVec y = random_probvec(q, rng);
            for (int g = 0; g < q; ++g)
                CHECK(approx_equal(shift_prob(fs, shift_prob(fs, y, g), fs.neg(g)), y, 1e-15));
        }
    }
}

TEST_CASE("LLR shift matches the difference form", "[message]") {
    Rng rng(17);
    for (int q : {3, 4, 8}) {
        const FieldSpec fs = FieldSpec::make(q);
        for (int t = 0; t < 50; ++t) {
            const ProbVec x = random_probvec(q, rng);
            for (int g = 0; g < q; ++g) {
                const LlrVec direct = shift_llr(fs, llr_of(x), g);
                const LlrVec via_prob = llr_of(shift_prob(fs, x, g));
                for (std::size_t i = 0; i < direct.v.size(); ++i)
                    CHECK(direct.v[i] == Catch::Approx(via_prob.v[i]).margin(1e-10));
            }
        }
    }
}

TEST_CASE("scale permutes by field multiplication", "[message]") {
    const FieldSpec f3 = FieldSpec::make(3);
    const ProbVec x{0.5, 0.3, 0.2};
    CHECK(approx_equal(scale_prob(f3, x, 1), x));
    const ProbVec s2 = scale_prob(f3, x, 2);
    CHECK(s2.v[0] == Catch::Approx(0.5));
    CHECK(s2.v[1] == Catch::Approx(0.2));
    CHECK(s2.v[2] == Catch::Approx(0.3));
    CHECK_THROWS_AS(scale_prob(f3, x, 0), std::domain_error);

    Rng rng(7);
    for (int q : {2, 3, 4, 8, 9}) {
        const FieldSpec fs = FieldSpec::make(q);
        for (int t = 0; t < 50; ++t) {
            const ProbVec y = random_probvec(q, rng);
            for (int g = 1; g < q; ++g)
                CHECK(approx_equal(scale_prob(fs, scale_prob(fs, y, g), fs.inv(g)), y, 1e-15));
        }
    }
}

TEST_CASE("operator identities for shift and scale", "[message]") {
    Rng rng(23);
    for (int q : {2, 3, 4, 8, 9}) {
        const FieldSpec fs = FieldSpec::make(q);
        for (int t = 0; t < 30; ++t) {
            const ProbVec x = random_probvec(q, rng);
            for (int g = 1; g < q; ++g)
                for (int i = 0; i < q; ++i) {
                    // (x^{+i})^{xg} = (x^{xg})^{+(i g^-1)}
                    CHECK(approx_equal(scale_prob(fs, shift_prob(fs, x, i), g),
                                       shift_prob(fs, scale_prob(fs, x, g), fs.mul(i, fs.inv(g))), 1e-15));
                    // (x^{xg})^{+i} = (x^{+(g i)})^{xg}
                    CHECK(approx_equal(shift_prob(fs, scale_prob(fs, x, g), i),
                                       scale_prob(fs, shift_prob(fs, x, fs.mul(g, i)), g), 1e-15));
                    CHECK(multiplicity(fs, scale_prob(fs, x, g)) == multiplicity(fs, x));
                    CHECK(multiplicity(fs, shift_prob(fs, x, i)) == multiplicity(fs, x));
                }
        }
    }
}

TEST_CASE("orbit identities as set equalities", "[message]") {
    Rng rng(29);
    auto same_orbit_set = [](const FieldSpec& fs, std::vector<ProbVec> a, std::vector<ProbVec> b) {
        (void)fs;
        if (a.size() != b.size()) return false;
        for (const ProbVec& x : a) {
            bool found = false;
            for (const ProbVec& y : b)
                if (approx_equal(x, y, 1e-12)) {
                    found = true;
                    break;
                }
            if (!found) return false;
        }
        return true;
    };
    for (int q : {3, 4, 8}) {
        const FieldSpec fs = FieldSpec::make(q);
        for (int t = 0; t < 20; ++t) {
            const ProbVec x = random_probvec(q, rng);
            for (int i = 0; i < q; ++i) CHECK(same_orbit_set(fs, orbit(fs, shift_prob(fs, x, i)), orbit(fs, x)));
            for (int g = 1; g < q; ++g) {
                std::vector<ProbVec> scaled_orbit;
                for (const ProbVec& y : orbit(fs, x)) scaled_orbit.push_back(scale_prob(fs, y, g));
                CHECK(same_orbit_set(fs, orbit(fs, scale_prob(fs, x, g)), scaled_orbit));
            }
        }
    }
}

TEST_CASE("orbit multiplicity matches hand values", "[message]") {
    const FieldSpec f3 = FieldSpec::make(3);
    CHECK(multiplicity(f3, ProbVec{1.0, 0.0, 0.0}) == 1);
    CHECK(multiplicity(f3, ProbVec{1.0 / 3, 1.0 / 3, 1.0 / 3}) == 3);
    Rng rng(31);
    for (int q : {2, 3, 4, 8}) {
        const FieldSpec fs = FieldSpec::make(q);
        for (int t = 0; t < 20; ++t) {
            const ProbVec x = random_probvec(q, rng);
            const int n = multiplicity(fs, x);
            CHECK(n >= 1);
            CHECK(q % n == 0);
            CHECK(static_cast<int>(orbit(fs, x).size()) * n == q);
        }
    }
}

TEST_CASE("decision error probability resolves ties analytically", "[message]") {
    CHECK(pe_of(ProbVec{0.5, 0.25, 0.25, 0.0}) == 0.0);
    CHECK(pe_of(ProbVec{0.25, 0.5, 0.25, 0.0}) == 1.0);
    CHECK(pe_of(ProbVec{0.3, 0.3, 0.3, 0.1}) == Catch::Approx(2.0 / 3));

    std::vector<ProbVec> mixed{ProbVec{0.5, 0.25, 0.25, 0.0}, ProbVec{0.25, 0.5, 0.25, 0.0},
                               ProbVec{0.3, 0.3, 0.3, 0.1}};
    CHECK(pe_mean(mixed).mean == Catch::Approx((0.0 + 1.0 + 2.0 / 3) / 3));

    std::vector<ProbVec> onehot(5, ProbVec{1.0, 0.0, 0.0, 0.0});
    CHECK(pe_mean(onehot).mean == 0.0);
    std::vector<ProbVec> unis(5, ProbVec{0.25, 0.25, 0.25, 0.25});
    CHECK(pe_mean(unis).mean == Catch::Approx(3.0 / 4));
    CHECK_THROWS_AS(pe_mean({}), std::domain_error);
}

TEST_CASE("pairwise Bhattacharyya functional f", "[message]") {
    CHECK(f_of(ProbVec{1.0, 0.0, 0.0}) == Catch::Approx(0.0).margin(1e-15));
    CHECK(f_of(ProbVec{0.25, 0.25, 0.25, 0.25}) == Catch::Approx(1.0).margin(1e-12));
    CHECK(f_of(ProbVec{0.9, 0.1}) == Catch::Approx(0.6).margin(1e-12));
}

TEST_CASE("f bounds hold on random vectors", "[message]") {
    Rng rng(37);
    for (int q : {2, 4, 8}) {
        for (int t = 0; t < 100000 / 3; ++t) {
            const ProbVec x = random_probvec(q, rng);
            const double f = f_of(x);
            REQUIRE(f >= -1e-12);
            REQUIRE(f <= 1.0 + 1e-12);
            double mx = 0.0;
            for (double c : x.v) mx = std::max(mx, c);
            const double eps = 1.0 - mx;
            REQUIRE(f <= q * std::sqrt(eps) + 1e-9);
            REQUIRE(f >= std::sqrt(eps) / ((q - 1) * std::sqrt(static_cast<double>(q) * (q - 1))) - 1e-9);
        }
    }
}

TEST_CASE("random permutation keeps the error probability and mixes marginals", "[message]") {
    const FieldSpec f2 = FieldSpec::make(2);
    Rng rng(41);
    const ProbVec x2{0.7, 0.3};
    for (int t = 0; t < 10; ++t) CHECK(approx_equal(random_permute(f2, x2, rng), x2));

    const FieldSpec f4 = FieldSpec::make(4);
    for (int t = 0; t < 1000; ++t) {
        const ProbVec x = random_probvec(4, rng);
        CHECK(pe_of(random_permute(f4, x, rng)) == pe_of(x));
    }

    // after random permutation the nonzero components are exchangeable
    const int n = 100000;
    std::vector<std::vector<double>> comp(3);
    for (int t = 0; t < n; ++t) {
        ProbVec x = random_probvec(4, rng);
        x.v[1] *= 4.0;  // deliberately asymmetric before permutation
        normalize(x);
        const ProbVec y = random_permute(f4, x, rng);
        for (int k = 1; k < 4; ++k) comp[static_cast<std::size_t>(k - 1)].push_back(y.v[static_cast<std::size_t>(k)]);
    }
    for (int a = 0; a < 3; ++a)
        for (int b = a + 1; b < 3; ++b)
            CHECK(ks_distance(comp[static_cast<std::size_t>(a)], comp[static_cast<std::size_t>(b)]) < 0.015);
}

TEST_CASE("D estimators agree on symmetric samples", "[message]") {
    const FieldSpec f4 = FieldSpec::make(4);
    const ChannelModel chan = testutil::small_dmc();
    const Mapping map = testutil::small_dmc_mapping();
    Rng rng(43);

    std::vector<ProbVec> unis(100, ProbVec{0.25, 0.25, 0.25, 0.25});
    Rng r2(1);
    const DEstimate du = d_estimate(f4, unis, r2);
    CHECK(du.value == Catch::Approx(1.0).margin(1e-12));
    std::vector<ProbVec> hot(100, ProbVec{1.0, 0.0, 0.0, 0.0});
    CHECK(d_estimate(f4, hot, r2).value == Catch::Approx(0.0).margin(1e-12));

    std::vector<ProbVec> sym;
    sym.reserve(10000);
    for (int t = 0; t < 10000; ++t) sym.push_back(equivalent_channel_sample(f4, map, chan, 0, rng));
    const DEstimate d = d_estimate(f4, sym, rng);
    const double tol = 3.0 * std::sqrt(d.stderr_ * d.stderr_ + d.raw_stderr * d.raw_stderr);
    CHECK(std::fabs(d.value - d.raw) <= tol);
}

TEST_CASE("symmetry check on exact distributions", "[message]") {
    const FieldSpec f4 = FieldSpec::make(4);

    // single atom at the uniform vector: its orbit is itself
    std::vector<std::pair<ProbVec, double>> point{{ProbVec{0.25, 0.25, 0.25, 0.25}, 1.0}};
    CHECK(check_symmetry(f4, point) <= 1e-12);

    // exact initial-message distribution of the quantized DMC under random coset
    const auto atoms = equivalent_channel_distribution(f4, testutil::small_dmc_mapping(), testutil::small_dmc(), 0);
    double total = 0.0;
    for (const auto& [m, p] : atoms) total += p;
    CHECK(total == Catch::Approx(1.0).margin(1e-12));
    CHECK(check_symmetry(f4, atoms) <= 1e-12);

    // a point mass on a non-uniform vector violates the identity
    std::vector<std::pair<ProbVec, double>> bad{{ProbVec{0.7, 0.1, 0.1, 0.1}, 1.0}};
    CHECK(check_symmetry(f4, bad) > 1e-6);
}

TEST_CASE("binary-sense symmetry of marginals on symmetric permutation-invariant samples", "[message]") {
    const FieldSpec f4 = FieldSpec::make(4);
    const ChannelModel chan = testutil::small_dmc();
    const Mapping map = testutil::small_dmc_mapping();
    Rng rng(47);
    const int n = 20000;
    std::vector<std::vector<double>> ew(3);
    for (int t = 0; t < n; ++t) {
        const ProbVec barred = random_permute(f4, equivalent_channel_sample(f4, map, chan, 0, rng), rng);
        const LlrVec w = llr_of(barred);
        for (int k = 0; k < 3; ++k)
            ew[static_cast<std::size_t>(k)].push_back(std::isinf(w.v[static_cast<std::size_t>(k)])
                                                          ? 0.0
                                                          : std::exp(-w.v[static_cast<std::size_t>(k)]));
    }
    for (int k = 0; k < 3; ++k) {
        const MeanStderr ms = mean_stderr(ew[static_cast<std::size_t>(k)]);
        CHECK(std::fabs(ms.mean - 1.0) <= 3.0 * ms.stderr_);
    }
}
