#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "smoothcert/certify.hpp"
#include "smoothcert/normal.hpp"
#include "smoothcert/tv.hpp"
#include "smoothcert/witness.hpp"

using namespace smoothcert;

TEST_CASE("Gaussian witness construction matches the halfspace masses") {
    const auto dist = NoiseDistribution::isotropic_gaussian(1.0, 3);
    const DenseVector v({2.0, 0.0, 0.0});
    const auto witness = build_witness(dist, v, 0.5);
    REQUIRE(witness.has_value());
    CHECK(witness->set_mass == doctest::Approx(normal_cdf(1.0)).epsilon(1e-12));
    CHECK(witness->shifted_set_mass == doctest::Approx(normal_cdf(-1.0)).epsilon(1e-12));
    CHECK(witness->alpha == doctest::Approx(1.0 - normal_cdf(-1.0) / 2.0));
    CHECK(witness->beta == doctest::Approx(0.5 - normal_cdf(-1.0) / 2.0));
    CHECK(witness->alpha - witness->beta == doctest::Approx(0.5));
    CHECK(witness->alpha >= 0.5);
    CHECK(witness->alpha <= 1.0);
    CHECK(witness->beta >= 0.0);
    CHECK(witness->beta <= 0.5);
    // The achieving set reproduces the exact TV.
    CHECK(witness->origin_gap() ==
          doctest::Approx(tv_gaussian_shift(1.0, 2.0).tv.value).epsilon(1e-12));
    // Membership: the halfspace contains the origin side.
    CHECK(witness->in_set(DenseVector::zeros(3)));
    CHECK_FALSE(witness->in_set(DenseVector({3.0, 0.0, 0.0})));
}

TEST_CASE("witness refusals follow the TV boundary") {
    const auto dist = NoiseDistribution::isotropic_gaussian(1.0, 2);

    SUBCASE("zero shift has zero TV, so any gap level refuses") {
        CHECK_FALSE(build_witness(dist, DenseVector::zeros(2), 0.0).has_value());
    }

    SUBCASE("delta at or above the exact TV refuses") {
        const DenseVector v({1.0, 1.0});
        const double tv = tv_gaussian_shift(1.0, v.l2_norm()).tv.value;
        CHECK_FALSE(build_witness(dist, v, tv).has_value());
        CHECK_FALSE(build_witness(dist, v, std::min(1.0, tv + 0.01)).has_value());
        CHECK(build_witness(dist, v, tv - 0.01).has_value());
    }

    SUBCASE("product noise is rejected outright") {
        const auto product =
            NoiseDistribution::iid_product(OneDimLaw::gaussian(1.0), 2);
        CHECK_THROWS_AS(build_witness(product, DenseVector({1.0, 0.0}), 0.1),
                        std::invalid_argument);
    }
}

TEST_CASE("box witness lives on the uncovered slab") {
    const auto dist = NoiseDistribution::uniform_box(1.0, 1);
    const DenseVector v({0.5});
    const auto witness = build_witness(dist, v, 0.2);
    REQUIRE(witness.has_value());
    // D(S) - D'(S) = 0.25 > 0.2 with S disjoint from the shifted support.
    CHECK(witness->set_mass == doctest::Approx(0.25));
    CHECK(witness->shifted_set_mass == doctest::Approx(0.0));
    CHECK(witness->origin_gap() == doctest::Approx(0.25));
    CHECK(witness->alpha == doctest::Approx(1.0));
    CHECK(witness->beta == doctest::Approx(0.5));
    // S = [-1, -0.5): inside the box, outside its shifted copy.
    CHECK(witness->in_set(DenseVector({-0.75})));
    CHECK_FALSE(witness->in_set(DenseVector({0.0})));
    CHECK_FALSE(witness->in_set(DenseVector({-1.5})));
    // At the exact boundary delta = 0.25 the witness must refuse.
    CHECK_FALSE(build_witness(dist, v, 0.25).has_value());
}

TEST_CASE("witness verification on the canonical Gaussian example") {
    const auto dist = NoiseDistribution::isotropic_gaussian(1.0, 3);
    const DenseVector v({2.0, 0.0, 0.0});
    const auto witness = build_witness(dist, v, 0.5);
    REQUIRE(witness.has_value());
    Rng rng(60);
    const auto verdict = verify_witness(*witness, dist, 1000000, 0.999, rng);
    CHECK(verdict.passed);
    CHECK(verdict.origin_matches);
    CHECK(verdict.gap_exceeds_delta);    // gap ~ 0.6827 > 0.5
    CHECK(verdict.shift_ci_covers_half);
    CHECK(verdict.non_robust);
    // G_1(0) = 1/2 + (D(S) - D'(S))/2 = 0.84134; the estimate lands within
    // 0.003 at n = 1e6.
    CHECK(verdict.origin_score_expected == doctest::Approx(0.8413447).epsilon(1e-6));
    CHECK(std::abs(verdict.origin_score_estimate - 0.8413447) <= 0.003);
    CHECK(verdict.origin_class == 1);
    CHECK(verdict.shift_class == 0);
}

TEST_CASE("score mixture identity under both laws") {
    // P(f = 1) = 1/2 + (P(S) - D'(S))/2 for any sampling law P; check P = D
    // and P = D' (sampling D' as D + v).
    const auto dist = NoiseDistribution::isotropic_gaussian(0.7, 2);
    const DenseVector v({0.9, -0.4});
    const auto witness = build_witness(dist, v, 0.1);
    REQUIRE(witness.has_value());
    const auto f = witness->classifier();
    Rng rng(61);
    const std::size_t n = 300000;
    std::size_t ones_d = 0, ones_dprime = 0;
    DenseVector point = DenseVector::zeros(2);
    for (std::size_t i = 0; i < n; ++i) {
        auto entries = point.mutable_entries();
        dist.sample_into(rng, entries);
        ones_d += f.evaluate(point, rng) == 1 ? 1 : 0;
        entries[0] += v[0];
        entries[1] += v[1];
        ones_dprime += f.evaluate(point, rng) == 1 ? 1 : 0;
    }
    const double se = 0.5 / std::sqrt(static_cast<double>(n));
    const double under_d = static_cast<double>(ones_d) / n;
    const double under_dprime = static_cast<double>(ones_dprime) / n;
    CHECK(std::abs(under_d - witness->origin_score()) <= 4.0 * se);
    CHECK(std::abs(under_dprime - 0.5) <= 4.0 * se);
}

TEST_CASE("witness gap stays below twice the TV, so no certificate applies") {
    // The witness's origin gap equals the exact TV, hence the certified
    // precondition gap > 2 tv always fails on the witness itself.
    const auto dist = NoiseDistribution::isotropic_gaussian(1.0, 2);
    const DenseVector v({1.5, 0.5});
    const auto witness = build_witness(dist, v, 0.3);
    REQUIRE(witness.has_value());
    Rng rng(62);
    const auto check = gap_vs_tv_robustness_check(dist, witness->classifier(),
                                                  DenseVector::zeros(2), v, 20000, rng);
    CHECK_FALSE(check.precondition);
    CHECK_FALSE(check.violation);
}

TEST_CASE("witness soundness across random Gaussian configurations") {
    Rng rng(63);
    for (int trial = 0; trial < 5; ++trial) {
        const std::size_t d = 1 + (rng.next_u64() % 4);
        const double sigma = rng.next_in(0.4, 2.0);
        std::vector<double> vv(d);
        for (auto& e : vv) e = rng.next_gaussian() * sigma;
        const DenseVector v(vv);
        const auto dist = NoiseDistribution::isotropic_gaussian(sigma, d);
        const double tv = tv_gaussian_shift(sigma, v.l2_norm()).tv.value;
        if (tv < 0.06) continue;
        const double delta = rng.next_in(0.02, tv - 0.03);
        const auto witness = build_witness(dist, v, delta);
        REQUIRE(witness.has_value());
        const auto verdict = verify_witness(*witness, dist, 100000, 0.999, rng);
        CHECK(verdict.passed);
    }
}
