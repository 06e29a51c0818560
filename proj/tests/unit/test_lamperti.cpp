#include "psde/error.hpp"
#include "psde/lamperti.hpp"
#include "psde/rng.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace psde;

TEST(Transform, UnitDiffusionIsShift) {
    const auto model = make_model(coefficient::sinusoidal(0, 1, 1), coefficient::constant(1.0));
    const auto tr = build_transform(model, 0.3, {-2, 2});
    for (double y : {-1.5, 0.0, 0.3, 1.7}) {
        EXPECT_NEAR(tr.g(y), y - 0.3, 1e-12);
        EXPECT_NEAR(tr.g_inv(y - 0.3), y, 1e-12);
        EXPECT_NEAR(tr.b_tilde(y - 0.3), std::sin(y), 1e-12);
    }
}

TEST(Transform, ConstantDiffusionTwo) {
    const auto model = make_model(coefficient::sinusoidal(0, 1, 1), coefficient::constant(2.0));
    const auto tr = build_transform(model, 0.0, {-3, 3});
    for (double y : {-2.0, -0.5, 1.0, 2.5}) {
        EXPECT_NEAR(tr.g(y), y / 2, 1e-12);
        EXPECT_NEAR(tr.b_tilde(y / 2), std::sin(y) / 2, 1e-12);
    }
}

TEST(Transform, ReciprocalSinusoidClosedForm) {
    const double x = 0.4;
    const auto model = make_model(coefficient::constant(0.0), coefficient::reciprocal_sinusoid(0.5));
    const auto tr = build_transform(model, x, {-5, 5});
    for (double y = -5.0; y <= 5.0; y += 0.173) {
        const double exact = (y - x) - 0.5 * (std::cos(y) - std::cos(x));
        ASSERT_NEAR(tr.g(y), exact, 1e-8) << "y = " << y;
        ASSERT_NEAR(tr.g_inv(tr.g(y)), y, 1e-10) << "y = " << y;
    }
    // b = 0: b~ = -sigma'/2 at G^-1(z).
    for (double y : {-2.0, 0.4, 3.0}) {
        const double sp = model.sigma_prime(y);
        EXPECT_NEAR(tr.b_tilde(tr.g(y)), -0.5 * sp, 1e-9);
    }
}

TEST(Transform, MonotoneAndSlopeBounded) {
    const auto model = make_model(coefficient::constant(0.0), coefficient::sinusoidal(2.0, 1.0, 1.0));
    const auto tr = build_transform(model, 0.0, {-4, 4});
    double prev = tr.g(-4.0);
    for (double y = -4.0 + 0.01; y <= 4.0; y += 0.01) {
        const double g = tr.g(y);
        ASSERT_GT(g, prev);
        ASSERT_LE(g - prev, 0.01 / model.sigma_inf + 1e-12);
        prev = g;
    }
    EXPECT_EQ(tr.g(0.0), 0.0);
    // Outside the table the extension still matches quadrature of 1 / sigma.
    EXPECT_GT(tr.g(6.0), tr.g(4.0));
}

TEST(Transform, RejectsNonPositiveSigma) {
    const auto model = make_model(coefficient::constant(0.0), coefficient::sinusoidal(0.0, 1.0, 1.0));
    try {
        build_transform(model, 0.5, {0.1, 4.0});
        FAIL() << "expected SigmaNotPositive";
    } catch (const NumericalError& e) {
        EXPECT_EQ(e.code(), ErrorCode::SigmaNotPositive);
    }
    EXPECT_THROW(build_transform(model, 0.5, {1.0, 1.0}), NumericalError);
}

TEST(Transform, ReducedModelHasUnitDiffusion) {
    const auto model = make_model(coefficient::sinusoidal(0.1, 0.5, 1.0), coefficient::sinusoidal(2.0, 1.0, 1.0));
    const auto tr = build_transform(model, 0.0, {-3, 3});
    const auto r = tr.reduced_model();
    EXPECT_EQ(r.sigma(0.7), 1.0);
    EXPECT_EQ(r.sigma_prime(0.7), 0.0);
    for (double z : {-0.5, 0.0, 0.8}) {
        const double h = 1e-5;
        EXPECT_NEAR(r.b_prime(z), (tr.b_tilde(z + h) - tr.b_tilde(z - h)) / (2 * h), 1e-5);
    }
    EXPECT_GT(r.b_prime_sup, 0.0);
}

TEST(Reduction, UnitDiffusionIsExact) {
    const auto model = make_model(coefficient::sinusoidal(0.1, 0.5, 1.0), coefficient::constant(1.0));
    SimConfig cfg;
    cfg.n_steps = 100;
    cfg.x = 0.2;
    cfg.seed = 11;
    const auto rep = pathwise_reduction_check(model, make_params(0.3, -0.2), cfg, 2, 2);
    for (const auto& l : rep.levels) EXPECT_LT(l.sup_discrepancy, 1e-10);
    EXPECT_TRUE(rep.commutation_exact());
}

TEST(Reduction, DiscrepancyShrinksUnderRefinement) {
    const auto model = make_model(coefficient::constant(0.0), coefficient::sinusoidal(2.0, 1.0, 1.0));
    const auto params = make_params(0.2, -0.1);
    double coarse = 0.0;
    double fine = 0.0;
    for (std::uint64_t s = 0; s < 20; ++s) {
        SimConfig cfg;
        cfg.n_steps = 1000;
        cfg.x = 0.3;
        cfg.seed = stream_seed(21, s);
        const auto rep = pathwise_reduction_check(model, params, cfg, 1, 2);
        ASSERT_EQ(rep.levels.size(), 2u);
        EXPECT_DOUBLE_EQ(rep.levels[0].dt, 1e-3);
        EXPECT_DOUBLE_EQ(rep.levels[1].dt, 5e-4);
        EXPECT_TRUE(rep.commutation_exact());
        coarse += rep.levels[0].sup_discrepancy;
        fine += rep.levels[1].sup_discrepancy;
    }
    EXPECT_LT(fine, coarse);
}

TEST(Reduction, NegativeDiffusionIsNegated) {
    const auto model = make_model(coefficient::constant(0.0), coefficient::sinusoidal(-2.0, 1.0, 1.0));
    SimConfig cfg;
    cfg.n_steps = 200;
    cfg.seed = 3;
    const auto rep = pathwise_reduction_check(model, make_params(0.2, 0.1), cfg, 1, 2);
    EXPECT_TRUE(rep.sigma_negated);
    for (const auto& l : rep.levels) EXPECT_LT(l.sup_discrepancy, 0.5);
}

TEST(Reduction, StartingConstant) {
    const auto model = make_model(coefficient::constant(0.0), coefficient::constant(2.0));
    SimConfig cfg;
    cfg.n_steps = 10;
    cfg.x = 1.0;
    const auto params = make_params(0.4, 0.2);
    const auto rep = pathwise_reduction_check(model, params, cfg, 1, 2);
    // G(y) = (y - 1) / 2 anchored at x = 1, X_0 = 2.5.
    EXPECT_NEAR(rep.y_start, 0.4 * (2.5 - 1.0) / 2.0, 1e-12);
}
