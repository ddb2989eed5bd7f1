#pragma once
// Weight a(U) for the weighted relative-entropy functional, its analytic
// U-derivatives, and the contraction coefficient g(U) together with its
// polynomial numerator m(U).
//
// a(U) is the difference of the two flux divided differences
//     a(U) = (f(U) - f(u-))/(U - u-) - (f(U) - f(u+))/(U - u+),
// strictly positive on [u+, u-], with removable singularities at the
// endpoints (a(u+) = s - f'(u+), a(u-) = f'(u-) - s). Near the endpoints the
// divided differences and their derivatives switch to Taylor series so no
// catastrophic cancellation occurs.
//
// g(U) has two algebraically equal representations: the direct form assembled
// from a, a', a'' and h, and the ratio form -span * m(U) / ((U-u-)^2 (u+-U)^2).
// Both are provided; they serve as each other's consistency oracle. Near the
// endpoints only the closed endpoint formulas are trusted (the ratio form is
// 0/0 there) and the returned value blends into them linearly.

#include "shocklab/core.hpp"
#include "shocklab/profile.hpp"

namespace shocklab {

namespace detail {

// Divided difference D(U, y) = (f(U) - f(y)) / (U - y) and its first two
// U-derivatives; f_U, f1_U are f(U), f'(U) supplied by the caller.
struct DividedDiff {
    double value, dU, dUU;
};

inline DividedDiff divided_diff(const ShockParams& prm, double U, double y, double f1_U,
                                double f2_U) {
    double p = prm.p;
    double d = U - y;
    DividedDiff out;

    if (nearly_integer(p) && p >= 2.0 && p < 64.0) {
        // exact polynomial identities: D = sum_j U^j y^(P-1-j), 0 <= j < P
        long P = static_cast<long>(p);
        double D = 0.0, DU = 0.0, DUU = 0.0;
        double Upow = 1.0;  // U^j
        for (long j = 0; j < P; ++j) {
            double ypow = pow_int(y, P - 1 - j);
            D += Upow * ypow;
            if (j >= 1) DU += static_cast<double>(j) * pow_int(U, j - 1) * ypow;
            if (j >= 2) DUU += static_cast<double>(j * (j - 1)) * pow_int(U, j - 2) * ypow;
            Upow *= U;
        }
        return {D, DU, DUU};
    }

    // non-integer exponent: y > 0 by the admissibility invariants
    double w = d / y;
    if (std::abs(w) < 1e-3) {
        // Taylor series around y, terms through f^(6)
        double c2 = p * (p - 1.0), c3 = c2 * (p - 2.0), c4 = c3 * (p - 3.0);
        double c5 = c4 * (p - 4.0), c6 = c5 * (p - 5.0);
        double yk = upow(y, p - 6.0);
        double f6 = c6 * yk;
        yk *= y;
        double f5 = c5 * yk;
        yk *= y;
        double f4 = c4 * yk;
        yk *= y;
        double f3 = c3 * yk;
        yk *= y;
        double f2 = c2 * yk;
        yk *= y;
        double f1 = p * yk;
        out.value =
            f1 + d * (f2 / 2 + d * (f3 / 6 + d * (f4 / 24 + d * (f5 / 120 + d * f6 / 720))));
        out.dU = f2 / 2 + d * (f3 / 3 + d * (f4 / 8 + d * (f5 / 30 + d * f6 / 144)));
        out.dUU = f3 / 3 + d * (f4 / 4 + d * (f5 / 10 + d * f6 / 36));
        return out;
    }

    // quotient path; D itself carries full relative accuracy into the
    // derivative quotients
    out.value = flux_divdiff(prm, U, y);
    out.dU = (f1_U - out.value) / d;
    out.dUU = (f2_U - 2.0 * out.dU) / d;
    return out;
}

struct WeightEval {
    double a, a1, a2;  // a(U), a'(U), a''(U)
};

inline WeightEval weight_eval(const ShockParams& prm, double U) {
    double f1_U = flux_prime(prm, U);
    double f2_U = flux_second(prm, U);
    auto dm = divided_diff(prm, U, prm.u_minus, f1_U, f2_U);
    auto dp = divided_diff(prm, U, prm.u_plus, f1_U, f2_U);
    return {dm.value - dp.value, dm.dU - dp.dU, dm.dUU - dp.dUU};
}

inline double clamp_to_band(const ShockParams& prm, double U) {
    double lo = prm.u_plus, hi = prm.u_minus;
    if (U < lo - kWeightBandTol || U > hi + kWeightBandTol) throw OutOfBand(U, lo, hi);
    return std::min(hi, std::max(lo, U));
}

}  // namespace detail

// a(U) on [u+, u-]; endpoints evaluate to the exact limits.
inline double weight_a(const ShockParams& prm, double U) {
    U = detail::clamp_to_band(prm, U);
    return detail::weight_eval(prm, U).a;
}

// a(U) via the equivalent product identity a = span * h / ((U-u+)(U-u-));
// one h evaluation instead of two divided differences, for hot loops. The
// caller supplies h(U); endpoint neighborhoods fall back to the series form.
inline double weight_a_fast(const ShockParams& prm, double U, double h) {
    double dp = U - prm.u_plus;
    double dm = prm.u_minus - U;
    if (dp < kSeriesSwitchRel * prm.span() || dm < kSeriesSwitchRel * prm.span())
        return detail::weight_eval(prm, std::min(prm.u_minus, std::max(prm.u_plus, U))).a;
    return -prm.span() * h / (dp * dm);
}

struct WeightDerivs {
    double first, second;
};

inline WeightDerivs weight_a_derivs(const ShockParams& prm, double U) {
    U = detail::clamp_to_band(prm, U);
    auto w = detail::weight_eval(prm, U);
    return {w.a1, w.a2};
}

// m(U) = (U-u-)(u+-U)(h h'' - h'^2) + 3 h^2 + h h' (u+ + u- - 2U);
// nonnegative on the band, vanishing at both endpoints.
inline double m_of_U(const ShockParams& prm, double U) {
    double h = h_of_U(prm, U);
    double h1 = h_prime(prm, U);
    double h2 = h_second(prm, U);
    return (U - prm.u_minus) * (prm.u_plus - U) * (h * h2 - h1 * h1) + 3.0 * h * h +
           h * h1 * (prm.u_plus + prm.u_minus - 2.0 * U);
}

// endpoint values of g from the closed formulas
inline double g_at_u_plus(const ShockParams& prm) {
    double a = prm.s - flux_prime(prm, prm.u_plus);
    return 2.0 * a * (flux_second(prm, prm.u_plus) / 4.0 + a / (prm.u_plus - prm.u_minus));
}
inline double g_at_u_minus(const ShockParams& prm) {
    double a = flux_prime(prm, prm.u_minus) - prm.s;
    return 2.0 * a * (flux_second(prm, prm.u_minus) / 4.0 + a / (prm.u_plus - prm.u_minus));
}

// direct representation: 2 a^2/(u+ - u-) + a f''(U)/2 + (a''/2 - a'^2/a) h(U)
inline double g_direct(const ShockParams& prm, double U) {
    auto w = detail::weight_eval(prm, U);
    double h = h_of_U(prm, U);
    return 2.0 * w.a * w.a / (prm.u_plus - prm.u_minus) + w.a * flux_second(prm, U) / 2.0 +
           (w.a2 / 2.0 - w.a1 * w.a1 / w.a) * h;
}

// ratio representation: -(u- - u+) m(U) / ((U-u-)^2 (u+-U)^2), interior only
inline double g_via_m(const ShockParams& prm, double U) {
    double dm = U - prm.u_minus;
    double dp = prm.u_plus - U;
    return -prm.span() * m_of_U(prm, U) / (dm * dm * dp * dp);
}

struct GPair {
    double direct, via_m;
};

inline GPair g_of_U_both(const ShockParams& prm, double U) {
    return {g_direct(prm, U), g_via_m(prm, U)};
}

// g(U) with the endpoint formulas blended in linearly over the band
// kEndpointBlendRel * span next to each endpoint.
inline double g_of_U(const ShockParams& prm, double U) {
    U = detail::clamp_to_band(prm, U);
    double band = kEndpointBlendRel * prm.span();
    double dp = U - prm.u_plus;
    double dm = prm.u_minus - U;
    if (dp < band) {
        double t = dp / band;
        return (1.0 - t) * g_at_u_plus(prm) + t * g_direct(prm, U);
    }
    if (dm < band) {
        double t = dm / band;
        return (1.0 - t) * g_at_u_minus(prm) + t * g_direct(prm, U);
    }
    return g_direct(prm, U);
}

}  // namespace shocklab
