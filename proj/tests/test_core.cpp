#include <gtest/gtest.h>

#include <random>

#include "shocklab/core.hpp"

using namespace shocklab;

TEST(Flux, IntegerPowers) {
    ShockParams p2 = make_shock_params(2.0, 2.0, 1.0);
    EXPECT_EQ(flux(p2, 3.0), 9.0);
    ShockParams p3 = make_shock_params(3.0, 2.0, 1.0);
    EXPECT_EQ(flux(p3, 2.0), 8.0);
}

TEST(Flux, NonIntegerPositivityGuard) {
    ShockParams p = make_shock_params(2.5, 2.0, 1.0);
    EXPECT_THROW(flux(p, -1.0), NonPositiveBase);
    EXPECT_THROW(flux(p, 0.0), NonPositiveBase);
    EXPECT_NEAR(flux(p, 4.0), 32.0, 1e-12);  // 4^2.5 = 32
}

TEST(Flux, DerivativesMatchFiniteDifferences) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> du(0.5, 6.0);
    for (double pexp : {2.0, 2.5, 3.0, 3.7, 4.0}) {
        ShockParams prm = make_shock_params(pexp, 9.0, 0.25, ParamPolicy::WarnOutOfRange);
        for (int k = 0; k < 50; ++k) {
            double u = du(rng);
            double h = 1e-5 * u;
            double fd1 = (flux(prm, u + h) - flux(prm, u - h)) / (2 * h);
            double fd2 = (flux(prm, u + h) - 2 * flux(prm, u) + flux(prm, u - h)) / (h * h);
            EXPECT_NEAR(flux_prime(prm, u), fd1, 1e-6 * std::abs(fd1) + 1e-9);
            EXPECT_NEAR(flux_second(prm, u), fd2, 1e-4 * std::abs(fd2) + 1e-5);
        }
    }
}

TEST(ShockSpeed, SpecValues) {
    EXPECT_DOUBLE_EQ(shock_speed(2.0, 2.0, 1.0), 3.0);  // (1-4)/(1-2)
    EXPECT_DOUBLE_EQ(shock_speed(3.0, 2.0, 1.0), 7.0);  // (1-8)/(1-2)
    EXPECT_DOUBLE_EQ(shock_speed(2.0, 1.0, -1.0), 0.0); // odd symmetry of u^2 flux
}

TEST(ShockSpeed, DegenerateStatesRejected) {
    EXPECT_THROW(shock_speed(3.0, 1.0, 1.0), DegenerateStates);
}

TEST(ShockSpeed, SymmetricInStates) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> d(0.1, 10.0);
    for (double p : {2.0, 2.5, 3.0, 4.0}) {
        for (int k = 0; k < 100; ++k) {
            double a = d(rng), b = d(rng);
            if (a == b) continue;
            EXPECT_EQ(shock_speed(p, a, b), shock_speed(p, b, a));
        }
    }
}

TEST(ShockSpeed, BurgersSumIdentityExact) {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> d(-5.0, 10.0);
    for (int k = 0; k < 200; ++k) {
        double um = d(rng), up = d(rng);
        if (um == up) continue;
        EXPECT_EQ(shock_speed(2.0, um, up), um + up);
    }
}

TEST(Flux, StrictConvexityOnAdmissibleBand) {
    // second divided differences over random admissible triples are positive
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> d(0.05, 10.0);
    for (double p : {2.0, 2.5, 3.0, 3.5, 4.0}) {
        ShockParams prm = make_shock_params(p, 9.0, 0.01);
        for (int k = 0; k < 200; ++k) {
            double x[3] = {d(rng), d(rng), d(rng)};
            std::sort(x, x + 3);
            if (x[1] - x[0] < 1e-6 || x[2] - x[1] < 1e-6) continue;
            double dd01 = (flux(prm, x[1]) - flux(prm, x[0])) / (x[1] - x[0]);
            double dd12 = (flux(prm, x[2]) - flux(prm, x[1])) / (x[2] - x[1]);
            EXPECT_GT((dd12 - dd01) / (x[2] - x[0]), 0.0);
        }
    }
}

TEST(Params, InvariantsEnforced) {
    EXPECT_THROW(make_shock_params(3.0, 1.0, 2.0), ConfigError);   // u+ >= u-
    EXPECT_THROW(make_shock_params(3.0, 2.0, -1.0), ConfigError);  // positivity for p != 2
    EXPECT_THROW(make_shock_params(5.0, 2.0, 1.0), ConfigError);   // p outside [2,4], strict
    EXPECT_NO_THROW(make_shock_params(2.0, 1.0, -1.0));            // p = 2 allows u+ <= 0

    ShockParams warned = make_shock_params(5.0, 2.0, 1.0, ParamPolicy::WarnOutOfRange);
    EXPECT_TRUE(warned.hypothesis_warning);
    ShockParams fine = make_shock_params(3.0, 2.0, 1.0, ParamPolicy::WarnOutOfRange);
    EXPECT_FALSE(fine.hypothesis_warning);
}

TEST(Params, SpeedMatchesRankineHugoniot) {
    for (double p : {2.0, 2.5, 3.0, 4.0}) {
        ShockParams prm = make_shock_params(p, 7.5, 0.75);
        double rh = (flux(prm, prm.u_plus) - flux(prm, prm.u_minus)) / (prm.u_plus - prm.u_minus);
        EXPECT_NEAR(prm.s, rh, 1e-12 * std::abs(rh));
    }
}

TEST(Grid, EndpointsExactAndSpacing) {
    Grid g = make_grid(100.0, 4001);
    EXPECT_EQ(g.xi(0), -100.0);
    EXPECT_EQ(g.xi(4000), 100.0);
    EXPECT_NEAR(g.dx, 0.05, 1e-15);
    EXPECT_NEAR(g.xi(1) - g.xi(0), g.dx, 1e-12);

    Grid gs = make_grid_spacing(10.0, 0.1);
    EXPECT_EQ(gs.n, 201);
    EXPECT_THROW(make_grid(1.0, 2), ConfigError);
    EXPECT_THROW(make_grid(-1.0, 10), ConfigError);
}

TEST(Numerics, KahanTrapezoidMatchesAnalytic) {
    // integral of x^2 over [0,1]
    int n = 1001;
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) {
        double x = i / double(n - 1);
        v[i] = x * x;
    }
    EXPECT_NEAR(trapezoid(v, 1.0 / (n - 1)), 1.0 / 3.0, 1e-6);
}
