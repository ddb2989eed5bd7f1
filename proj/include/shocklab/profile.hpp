#pragma once
// Viscous shock profile U(xi): the unique (up to translation) monotone
// solution of U' = h(U) with U(-inf) = u_minus, U(+inf) = u_plus, normalized
// so that U(0) = (u_plus + u_minus) / 2.
//
// Construction integrates the separable ODE  d(xi) = dU / h(U)  by adaptive
// quadrature in the logit variable v = log((U - u_plus)/(u_minus - U)), which
// removes the simple zeros of h at the endpoints from the integrand and makes
// the node spacing nearly uniform in xi. The table stops at state-distance
// delta_tail from each endpoint; beyond it the profile is continued by the
// two-term tail expansion
//     U = u_pm + c1 E + c2 E^2,   E = exp(lambda_pm (xi - xi_edge)),
// which matches the edge value exactly and the slope to O(delta^3).
//
// Evaluation between nodes uses monotone cubic Hermite interpolation with the
// exact node slopes h(U_k). The derivative is always returned as h(U(xi)),
// never by differencing the interpolant.

#include <cstddef>
#include <utility>
#include <vector>

#include "shocklab/core.hpp"

namespace shocklab {

// Right side of the profile ODE, anchored at u_plus:
//   h(U) = -s (U - u_plus) + f(U) - f(u_plus),
// equal (via Rankine-Hugoniot) to the same expression anchored at u_minus,
// and negative strictly between the states. Evaluated in the factored form
// (U - u_plus) (D(U, u_plus) - s) so the relative accuracy survives near the
// endpoint roots even when f itself is large.
inline double h_of_U(const ShockParams& prm, double U) {
    return (U - prm.u_plus) * (flux_divdiff(prm, U, prm.u_plus) - prm.s);
}

// Analytic U-derivatives of h; h' changes sign across the profile, h'' > 0.
inline double h_prime(const ShockParams& prm, double U) { return flux_prime(prm, U) - prm.s; }
inline double h_second(const ShockParams& prm, double U) { return flux_second(prm, U); }
inline double h_third(const ShockParams& prm, double U) { return flux_third(prm, U); }

struct ShockProfile {
    ShockParams params;
    std::vector<double> table_xi;  // strictly increasing
    std::vector<double> table_U;   // strictly decreasing
    double lambda_minus = 0.0;     // h'(u_minus) > 0, left tail rate
    double lambda_plus = 0.0;      // h'(u_plus)  < 0, right tail rate
    double delta_tail = 0.0;       // state distance at which tails take over
    double residual = 0.0;         // worst relative ODE residual of the table

    // tail coefficients: U = u_pm + c1 E + c2 E^2
    double tail_c1_left = 0.0, tail_c2_left = 0.0;
    double tail_c1_right = 0.0, tail_c2_right = 0.0;

    // per-interval Hermite coefficients, U(xi) = u0 + d (u1 + d (u2 + d u3))
    struct Coef {
        double u0, u1, u2, u3;
    };
    std::vector<Coef> coef;

    double xi_left() const { return table_xi.front(); }
    double xi_right() const { return table_xi.back(); }
};

namespace detail {

// sigma(v) = 1 / (1 + e^-v), evaluated without overflow
inline double logistic(double v) {
    if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
    double e = std::exp(v);
    return e / (1.0 + e);
}

// d(xi)/dv = (dU/dv) / h(U) = (U - u_plus)(u_minus - U) / (span * h(U));
// smooth on the whole table range including the endpoints' neighborhoods.
inline double xi_slope_v(const ShockParams& prm, double v) {
    double span = prm.span();
    double sig = logistic(v);
    double U = prm.u_plus + span * sig;
    double dUdv = span * sig * (1.0 - sig);
    return dUdv / h_of_U(prm, U);
}

// 7-point Gauss-Legendre on [a, b]
inline double gauss7(const ShockParams& prm, double a, double b) {
    static const double x[7] = {-0.9491079123427585, -0.7415311855993945, -0.4058451513773972,
                                0.0,
                                0.4058451513773972,  0.7415311855993945,  0.9491079123427585};
    static const double w[7] = {0.1294849661688697, 0.2797053914892766, 0.3818300505051189,
                                0.4179591836734694,
                                0.3818300505051189, 0.2797053914892766, 0.1294849661688697};
    double c = 0.5 * (a + b);
    double hw = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < 7; ++i) s += w[i] * xi_slope_v(prm, c + hw * x[i]);
    return s * hw;
}

inline double integrate_xi_slope(const ShockParams& prm, double a, double b, double tol, int depth) {
    double whole = gauss7(prm, a, b);
    double mid = 0.5 * (a + b);
    double split = gauss7(prm, a, mid) + gauss7(prm, mid, b);
    if (std::abs(split - whole) <= tol || std::abs(b - a) < 1e-14) return split;
    if (depth <= 0) throw QuadratureFailure("profile quadrature did not converge on [" +
                                            std::to_string(a) + ", " + std::to_string(b) + "]");
    return integrate_xi_slope(prm, a, mid, 0.5 * tol, depth - 1) +
           integrate_xi_slope(prm, mid, b, 0.5 * tol, depth - 1);
}

// c1 solving c1 + a2 c1^2 = w_edge, branch continuous in a2 -> 0
inline double tail_c1(double a2, double w_edge) {
    double disc = 1.0 + 4.0 * a2 * w_edge;
    if (disc <= 0.0) return w_edge;  // degenerate; fall back to pure exponential
    return 2.0 * w_edge / (1.0 + std::sqrt(disc));
}

}  // namespace detail

// Non-uniform three-point centered difference at interior node k, used by the
// table's ODE residual self-check.
inline double table_centered_difference(const ShockProfile& prof, std::size_t k) {
    double hm = prof.table_xi[k] - prof.table_xi[k - 1];
    double hp = prof.table_xi[k + 1] - prof.table_xi[k];
    double dm = (prof.table_U[k] - prof.table_U[k - 1]) / hm;
    double dp = (prof.table_U[k + 1] - prof.table_U[k]) / hp;
    return (hp * dm + hm * dp) / (hm + hp);
}

// Worst relative deviation between the table's centered differences and h(U).
inline double table_ode_residual(const ShockProfile& prof) {
    double worst = 0.0;
    for (std::size_t k = 1; k + 1 < prof.table_U.size(); ++k) {
        double hU = h_of_U(prof.params, prof.table_U[k]);
        double fd = table_centered_difference(prof, k);
        worst = std::max(worst, std::abs(fd - hU) / std::abs(hU));
    }
    return worst;
}

// Build the profile table. M is the minimum table size; the builder refines
// beyond it as needed so that the interior centered-difference residual
// agrees with h(U) to relative 1e-6.
inline ShockProfile build_profile(const ShockParams& prm, int M = 4096,
                                  double delta_tail = -1.0) {
    double span = prm.span();
    if (delta_tail < 0.0) delta_tail = 1e-3 * span;
    if (M < 64) throw ConfigError("profile table size must be at least 64");
    if (!(delta_tail > 0.0 && delta_tail < 0.25 * span))
        throw ConfigError("delta_tail must lie in (0, (u_minus - u_plus)/4)");

    const double kResidualTol = 1e-6;
    const double kTargetDv = 1.6e-3;  // keeps the 3-point residual below tol

    double vmax = std::log((span - delta_tail) / delta_tail);

    ShockProfile prof;
    prof.params = prm;
    prof.delta_tail = delta_tail;
    prof.lambda_minus = h_prime(prm, prm.u_minus);
    prof.lambda_plus = h_prime(prm, prm.u_plus);
    if (!(prof.lambda_minus > 0.0 && prof.lambda_plus < 0.0))
        throw ConfigError("degenerate (sonic) endpoint: h'(u_pm) has the wrong sign");

    long half = std::max<long>((M - 1) / 2 + 1, static_cast<long>(std::ceil(vmax / kTargetDv)));
    for (int attempt = 0;; ++attempt) {
        long n = 2 * half + 1;
        prof.table_xi.assign(n, 0.0);
        prof.table_U.assign(n, 0.0);
        double dv = vmax / static_cast<double>(half);

        // states, descending in U (v descending from +vmax)
        for (long k = 0; k < n; ++k) {
            double v = (half - k) * dv;
            prof.table_U[k] = prm.u_plus + span * detail::logistic(v);
        }
        prof.table_U[half] = prm.u_plus + 0.5 * span;  // midpoint anchor

        // xi by quadrature outward from the anchor
        prof.table_xi[half] = 0.0;
        for (long k = half + 1; k < n; ++k) {
            double a = (half - (k - 1)) * dv;
            double b = (half - k) * dv;
            prof.table_xi[k] =
                prof.table_xi[k - 1] + detail::integrate_xi_slope(prm, a, b, 1e-14, 24);
        }
        for (long k = half - 1; k >= 0; --k) {
            double a = (half - (k + 1)) * dv;
            double b = (half - k) * dv;
            prof.table_xi[k] =
                prof.table_xi[k + 1] - detail::integrate_xi_slope(prm, b, a, 1e-14, 24);
        }

        prof.residual = table_ode_residual(prof);
        if (prof.residual <= kResidualTol) break;
        if (attempt >= 3)
            throw QuadratureFailure("profile table residual " + std::to_string(prof.residual) +
                                    " did not reach 1e-6; delta_tail too small or degenerate params");
        half *= 2;
    }

    // Hermite coefficients with exact ODE slopes; Fritsch-Carlson clamp keeps
    // the interpolant monotone (a no-op for resolved tables).
    std::size_t n = prof.table_U.size();
    std::vector<double> slope(n);
    for (std::size_t k = 0; k < n; ++k) slope[k] = h_of_U(prm, prof.table_U[k]);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        double d = (prof.table_U[k + 1] - prof.table_U[k]) / (prof.table_xi[k + 1] - prof.table_xi[k]);
        if (slope[k] / d > 3.0) slope[k] = 3.0 * d;
        if (slope[k + 1] / d > 3.0) slope[k + 1] = 3.0 * d;
    }
    prof.coef.resize(n - 1);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        double hk = prof.table_xi[k + 1] - prof.table_xi[k];
        double d = (prof.table_U[k + 1] - prof.table_U[k]) / hk;
        prof.coef[k].u0 = prof.table_U[k];
        prof.coef[k].u1 = slope[k];
        prof.coef[k].u2 = (3.0 * d - 2.0 * slope[k] - slope[k + 1]) / hk;
        prof.coef[k].u3 = (slope[k] + slope[k + 1] - 2.0 * d) / (hk * hk);
    }

    // tails
    double a2l = h_second(prm, prm.u_minus) / (2.0 * prof.lambda_minus);
    double wl = prof.table_U.front() - prm.u_minus;  // negative
    prof.tail_c1_left = detail::tail_c1(a2l, wl);
    prof.tail_c2_left = a2l * prof.tail_c1_left * prof.tail_c1_left;

    double a2r = h_second(prm, prm.u_plus) / (2.0 * prof.lambda_plus);
    double wr = prof.table_U.back() - prm.u_plus;  // positive
    prof.tail_c1_right = detail::tail_c1(a2r, wr);
    prof.tail_c2_right = a2r * prof.tail_c1_right * prof.tail_c1_right;

    return prof;
}

inline double eval_U(const ShockProfile& prof, double xi) {
    if (xi < prof.xi_left()) {
        double E = std::exp(prof.lambda_minus * (xi - prof.xi_left()));
        return prof.params.u_minus + E * (prof.tail_c1_left + prof.tail_c2_left * E);
    }
    if (xi > prof.xi_right()) {
        double E = std::exp(prof.lambda_plus * (xi - prof.xi_right()));
        return prof.params.u_plus + E * (prof.tail_c1_right + prof.tail_c2_right * E);
    }
    auto it = std::upper_bound(prof.table_xi.begin(), prof.table_xi.end(), xi);
    std::size_t k = static_cast<std::size_t>(std::max<std::ptrdiff_t>(
        0, std::min<std::ptrdiff_t>(it - prof.table_xi.begin() - 1,
                                    static_cast<std::ptrdiff_t>(prof.coef.size()) - 1)));
    double d = xi - prof.table_xi[k];
    const auto& c = prof.coef[k];
    return c.u0 + d * (c.u1 + d * (c.u2 + d * c.u3));
}

// dU/dxi via the ODE, exact for the profile the interpolant represents.
inline double eval_Uxi(const ShockProfile& prof, double xi) {
    return h_of_U(prof.params, eval_U(prof, xi));
}

// Stateful walker for sorted query sequences; O(1) amortized per query.
class ProfileSampler {
public:
    explicit ProfileSampler(const ShockProfile& prof) : prof_(prof) {}

    void reset() { k_ = 0; }

    // queries must be non-decreasing between resets
    double value(double xi) {
        if (xi < prof_.xi_left()) {
            double E = std::exp(prof_.lambda_minus * (xi - prof_.xi_left()));
            return prof_.params.u_minus + E * (prof_.tail_c1_left + prof_.tail_c2_left * E);
        }
        if (xi > prof_.xi_right()) {
            double E = std::exp(prof_.lambda_plus * (xi - prof_.xi_right()));
            return prof_.params.u_plus + E * (prof_.tail_c1_right + prof_.tail_c2_right * E);
        }
        const auto& txi = prof_.table_xi;
        while (k_ + 2 < txi.size() && xi > txi[k_ + 1]) ++k_;
        double d = xi - txi[k_];
        const auto& c = prof_.coef[k_];
        return c.u0 + d * (c.u1 + d * (c.u2 + d * c.u3));
    }

private:
    const ShockProfile& prof_;
    std::size_t k_ = 0;
};

// U(xi_i - shift) for every grid point, in one table walk.
inline void sample_shifted(const ShockProfile& prof, const Grid& grid, double shift,
                           double* U_out) {
    ProfileSampler sampler(prof);
    for (int i = 0; i < grid.n; ++i) U_out[i] = sampler.value(grid.xi(i) - shift);
}

}  // namespace shocklab
