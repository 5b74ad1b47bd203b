#include <doctest.h>

#include <cmath>
#include <numbers>

#include "steinpairs/bounds.hpp"
#include "steinpairs/family.hpp"
#include "steinpairs/pairs.hpp"

using namespace steinpairs;

namespace {

GramData identity_gram(int k, double n) {
    GramData g;
    g.gram = n * Eigen::MatrixXd::Identity(k, k);
    g.scale = n;
    return g;
}

}  // namespace

TEST_SUITE_BEGIN("bounds");

TEST_CASE("bound_discrete") {
    CHECK(bound_discrete(1.0, 0.0, 0.0, 0.1, 0.5, 0.7).value == doctest::Approx(0.0));
    CHECK(bound_discrete(1.0, 1.0, 0.0, 0.1, 0.3, 0.7).value == doctest::Approx(0.3));
    CHECK_THROWS_AS(bound_discrete(0.0, 1, 1, 0.1, 0, 0), std::invalid_argument);
    CHECK_THROWS_AS(bound_discrete(1.0, 1, 1, 0.0, 0, 0), std::invalid_argument);

    SUBCASE("substituting the iid-sum proof quantities reproduces bound_basic") {
        const long n = 30, k = 3;
        const double m1 = 0.8, m2 = 1.7;
        for (const VectorLaw& law : {rademacher_law(static_cast<int>(k)),
                                     gaussian_law(static_cast<int>(k))}) {
            const double e_norm =
                std::sqrt(law.fourth_moment - static_cast<double>(k)) / (2.0 * std::sqrt(n));
            const double lambda = 1.0 / static_cast<double>(n);
            const double third = lambda * 8.0 * law.third_moment / std::sqrt(n);
            const double via_discrete =
                bound_discrete(1.0, m1, m2, lambda, e_norm, third).value;
            const double via_basic =
                bound_basic(n, k, m1, m2, law.fourth_moment, law.third_moment).value;
            CHECK(via_discrete == doctest::Approx(via_basic).epsilon(1e-12));
        }
    }
}

TEST_CASE("bound_cont") {
    CHECK(bound_cont(1.0, 0.0).value == doctest::Approx(0.0));
    CHECK(bound_cont(2.0, 0.6).value == doctest::Approx(0.5 * bound_cont(1.0, 0.6).value));
    CHECK_THROWS_AS(bound_cont(-1.0, 0.5), std::invalid_argument);
}

TEST_CASE("bound_complex") {
    CHECK(bound_complex(0.0, 0.0).value == doctest::Approx(0.0));
    CHECK(bound_complex(0.1, 0.2).value == doctest::Approx(0.3));
    CHECK_THROWS_AS(bound_complex(-0.1, 0.2), std::invalid_argument);
}

TEST_CASE("bound_basic closed forms") {
    const long n = 20, k = 2;
    const double root_2pi = std::sqrt(2.0 * std::numbers::pi);

    SUBCASE("rademacher coordinates: |Y|^2 = k exactly") {
        const VectorLaw law = rademacher_law(static_cast<int>(k));
        const double dk = static_cast<double>(k);
        CHECK(law.fourth_moment == doctest::Approx(dk * dk));
        CHECK(law.third_moment == doctest::Approx(std::pow(dk, 1.5)));
        const double hand = (1.0 / (2.0 * std::sqrt(n))) * std::sqrt(dk * dk - dk) +
                            (root_2pi / (3.0 * std::sqrt(n))) * std::pow(dk, 1.5);
        CHECK(bound_basic(n, k, 1.0, 1.0, law.fourth_moment, law.third_moment).value ==
              doctest::Approx(hand).epsilon(1e-14));
    }

    SUBCASE("gaussian coordinates: chi-square moments") {
        const VectorLaw law = gaussian_law(static_cast<int>(k));
        const double dk = static_cast<double>(k);
        CHECK(law.fourth_moment == doctest::Approx(dk * dk + 2 * dk));
        const double third =
            std::pow(2.0, 1.5) * std::tgamma((dk + 3.0) / 2.0) / std::tgamma(dk / 2.0);
        CHECK(law.third_moment == doctest::Approx(third).epsilon(1e-14));
    }

    CHECK(bound_basic(n, k, 0.0, 0.0, 10.0, 3.0).value == doctest::Approx(0.0));
    CHECK_THROWS_AS(bound_basic(n, k, 1.0, 1.0, 1.5, 3.0), std::invalid_argument);
}

TEST_CASE("bound_ksphere") {
    CHECK(bound_ksphere(2, 101, 4.0).value == doctest::Approx(0.08));
    const long k = 3, n = 40;
    CHECK(bound_ksphere(k, n, 0.0).value == doctest::Approx(2.0 * k / (n - 1)));
    CHECK(bound_ksphere(k, n, 1.0).value > bound_ksphere(k, n, 0.5).value);
    CHECK(bound_ksphere(k + 1, n, 1.0).value > bound_ksphere(k, n, 1.0).value);
    CHECK(bound_ksphere(k, 2 * n, 1.0).value < bound_ksphere(k, n, 1.0).value);
    CHECK_THROWS_AS(bound_ksphere(2, 1, 1.0), std::invalid_argument);
}

TEST_CASE("bound_mix") {
    const long k = 2, n = 50;
    const BoundReport identity = bound_mix(k, n, identity_gram(2, 50.0));
    CHECK(identity.value == doctest::Approx(std::sqrt(2.0) * k / (n - 1)).epsilon(1e-14));
    // with C = I this and the continuous bound coincide
    CHECK(identity.value ==
          doctest::Approx(bound_cont(1.0, std::sqrt(2.0) * k / (n - 1)).value).epsilon(1e-14));

    SUBCASE("nested diagonal family stays under sqrt(2) k^{3/2} / (n-1)") {
        const int nn = 10;
        const auto fam = diagonal_block_family({2, 5, 10}, nn);
        const BoundReport r = bound_mix(3, nn, fam.gram);
        CHECK(r.value <= std::sqrt(2.0) * std::pow(3.0, 1.5) / (nn - 1) + 1e-12);
    }

    SUBCASE("k = 1") {
        const BoundReport r = bound_mix(1, 30, identity_gram(1, 30.0));
        CHECK(r.value == doctest::Approx(std::sqrt(2.0) / 29.0));
    }

    SUBCASE("invalid grams") {
        GramData bad = identity_gram(2, 50.0);
        bad.gram(0, 0) = 49.0;
        CHECK_THROWS_AS(bound_mix(2, 50, bad), std::invalid_argument);
        GramData not_psd = identity_gram(2, 50.0);
        not_psd.gram(0, 1) = not_psd.gram(1, 0) = 80.0;
        CHECK_THROWS_AS(bound_mix(2, 50, not_psd), std::invalid_argument);
    }
}

TEST_CASE("bound_uthm") {
    CHECK(bound_uthm(2, 20).value == doctest::Approx(0.3));
    CHECK(bound_uthm(2, 40).value == doctest::Approx(0.15));
    CHECK_THROWS_AS(bound_uthm(2, 3), std::invalid_argument);
    CHECK(bound_uthm(2, 20).note.find("sqrt(2)") != std::string::npos);
}

TEST_CASE("proof-level surrogates stay within the application bounds") {
    SUBCASE("spherical: plugged F-norm bound is below k(sqrt(a)+2)/(n-1)") {
        for (long n : {10L, 40L, 200L})
            for (long k : {1L, 2L, 5L})
                for (double a : {0.0, 1.0, 4.0}) {
                    const double f_plug = ((std::sqrt(a) + 1.0) * std::sqrt(static_cast<double>(k)) +
                                           static_cast<double>(k)) /
                                          static_cast<double>(n - 1);
                    CHECK(bound_cont(1.0, f_plug).value <= bound_ksphere(k, n, a).value + 1e-12);
                }
    }
    SUBCASE("unitary: gamma and lambda norm bounds stay below 3k/n for n >= 4") {
        for (long n : {4L, 6L, 10L, 20L, 50L}) {
            const double dn = static_cast<double>(n);
            for (long k : {1L, 2L, 4L}) {
                const double gamma_cap = static_cast<double>(k) /
                                         ((dn - 1) * (dn + 1)) * std::sqrt(5.0 + 2.0 / (dn - 1));
                const double lambda_cap =
                    static_cast<double>(k) / (dn - 1) *
                    std::sqrt(2.0 + 2.0 * (dn * dn + 5.0) / ((dn - 1) * (dn + 1) * (dn + 1)));
                CHECK(bound_complex(gamma_cap, lambda_cap).value <=
                      bound_uthm(k, n).value + 1e-12);
            }
        }
    }
    SUBCASE("mix with unit diagonal dominates the orthonormal case") {
        GramData g = identity_gram(2, 50.0);
        g.gram(0, 1) = g.gram(1, 0) = 20.0;
        CHECK(bound_mix(2, 50, g).value >= bound_mix(2, 50, identity_gram(2, 50.0)).value);
    }
}

TEST_CASE("reports are nonnegative, monotone and serialize losslessly") {
    RngStream rng(41);
    for (int rep = 0; rep < 10; ++rep) {
        const double e1 = std::abs(rng.normal());
        const double e2 = e1 + std::abs(rng.normal());
        const double t = std::abs(rng.normal());
        CHECK(bound_discrete(1.0, 1.0, 1.0, 0.05, e1, t).value >= 0.0);
        CHECK(bound_discrete(1.0, 1.0, 1.0, 0.05, e2, t).value >=
              bound_discrete(1.0, 1.0, 1.0, 0.05, e1, t).value);
        CHECK(bound_complex(e1, t).value <= bound_complex(e2, t).value);
    }

    const BoundReport r = bound_discrete(1.3, 0.9, 1.7, 0.05, 0.123456789012345, 0.7,
                                         {{"e_norm", "monte-carlo"}});
    const std::string text = bound_report_to_json(r);
    const BoundReport back = bound_report_from_json(text);
    CHECK(back.theorem == r.theorem);
    CHECK(back.value == r.value);  // bit-exact round trip
    CHECK(back.formula_text == r.formula_text);
    REQUIRE(back.inputs.count("e_norm"));
    CHECK(back.inputs.at("e_norm").value == r.inputs.at("e_norm").value);
    CHECK(back.inputs.at("e_norm").provenance == "monte-carlo");
    CHECK(bound_report_to_json(back) == text);
    for (const auto& [name, input] : back.inputs) CHECK_FALSE(input.provenance.empty());
}

TEST_SUITE_END();
