#pragma once
// Scalar diagnostics along a run: norms of the perturbation phi = u - U(.-X),
// the weighted energy E_a = int a(U(.-X)) phi^2, dissipation terms, their
// cumulative time integrals, the profile self-distance R(tau) and the shift
// bound built from it, and the algebraic decay-rate fit.
//
// All quadratures are composite trapezoid (Kahan-compensated); fields are
// smooth here, so the quadrature error matches the solver's spatial order.

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "shocklab/core.hpp"
#include "shocklab/profile.hpp"
#include "shocklab/weight.hpp"

namespace shocklab {

struct DiagnosticsRow {
    double t = 0.0;
    double X = 0.0;
    double Xdot = 0.0;
    double E_a = 0.0;
    double L1 = 0.0, L2 = 0.0, Linf = 0.0, H1semi = 0.0;
    double D1 = 0.0;  // int phi_xi^2
    double D2 = 0.0;  // int phi^2 |U_xi(.-X)|
    double int_D1 = 0.0, int_D2 = 0.0, int_Xdot2 = 0.0;
    double mono_violation = 0.0;  // max(0, delta E_a) / E_a(0)
};

struct RunMeta {
    long steps = 0;
    double E_a0 = 0.0;
    double max_step_increment_rel = 0.0;  // worst per-step positive E_a increment / E_a(0)
    double sum_step_increments_rel = 0.0;
    double sum_step_increments_abs = 0.0;
    double max_principle_excess = 0.0;  // worst excursion beyond the admissible band
    bool max_principle_warning = false;
    double farfield_worst = 0.0;  // worst boundary-neighbor deviation from u_pm
    bool farfield_warning = false;
    bool h1_smallness_warning = false;  // initial perturbation not small in H^1
    double budget_C0 = 0.0;  // fitted constant of the dissipation budget
};

struct Trajectory {
    std::vector<DiagnosticsRow> rows;
    SolutionState final_state;
    RunMeta meta;
};

struct Norms {
    double L1, L2, Linf, H1semi;
};

namespace detail {

// phi_xi by centered differences, second-order one-sided at the ends
inline void derivative_field(const std::vector<double>& phi, double dx, std::vector<double>& out) {
    std::size_t n = phi.size();
    out.resize(n);
    if (n < 3) {
        for (auto& v : out) v = 0.0;
        return;
    }
    out[0] = (-3.0 * phi[0] + 4.0 * phi[1] - phi[2]) / (2.0 * dx);
    for (std::size_t i = 1; i + 1 < n; ++i) out[i] = (phi[i + 1] - phi[i - 1]) / (2.0 * dx);
    out[n - 1] = (3.0 * phi[n - 1] - 4.0 * phi[n - 2] + phi[n - 3]) / (2.0 * dx);
}

inline double trapz_weight(std::size_t i, std::size_t n) { return (i == 0 || i + 1 == n) ? 0.5 : 1.0; }

}  // namespace detail

// phi(xi) = u(xi) - U(xi - X) on the grid
inline std::vector<double> perturbation_field(const std::vector<double>& u, double X,
                                              const ShockProfile& prof, const Grid& grid) {
    std::vector<double> phi(u.size());
    ProfileSampler sampler(prof);
    for (int i = 0; i < grid.n; ++i) phi[i] = u[i] - sampler.value(grid.xi(i) - X);
    return phi;
}

inline Norms norms(const std::vector<double>& u, double X, const ShockProfile& prof,
                   const Grid& grid) {
    std::vector<double> phi = perturbation_field(u, X, prof, grid);
    std::vector<double> dphi;
    detail::derivative_field(phi, grid.dx, dphi);
    KahanSum l1, l2, h1;
    double linf = 0.0;
    std::size_t n = phi.size();
    for (std::size_t i = 0; i < n; ++i) {
        double w = detail::trapz_weight(i, n);
        l1.add(w * std::abs(phi[i]));
        l2.add(w * phi[i] * phi[i]);
        h1.add(w * dphi[i] * dphi[i]);
        linf = std::max(linf, std::abs(phi[i]));
    }
    return {l1.value() * grid.dx, std::sqrt(l2.value() * grid.dx), linf,
            std::sqrt(h1.value() * grid.dx)};
}

// E_a = int a(U(xi - X)) phi^2 dxi
inline double weighted_energy(const std::vector<double>& u, double X, const ShockProfile& prof,
                              const ShockParams& prm, const Grid& grid) {
    ProfileSampler sampler(prof);
    KahanSum s;
    std::size_t n = u.size();
    for (std::size_t i = 0; i < n; ++i) {
        double Us = sampler.value(grid.xi(static_cast<int>(i)) - X);
        double phi = u[i] - Us;
        s.add(detail::trapz_weight(i, n) * weight_a(prm, Us) * phi * phi);
    }
    return s.value() * grid.dx;
}

// R(tau) = int |U(xi - tau) - U(xi)|^2 dxi over a domain covering both tails.
// The quadrature step is dyadic so that the usual tau values land on grid
// lines and the evenness of R survives discretization to near roundoff.
inline constexpr double kRTauStep = 1.0 / 512.0;

inline double R_of_tau(const ShockProfile& prof, double tau) {
    double rate = std::min(prof.lambda_minus, -prof.lambda_plus);
    double reach = std::max(-prof.xi_left(), prof.xi_right()) + std::abs(tau) + 45.0 / rate;
    double h = kRTauStep;
    long m = static_cast<long>(std::ceil(reach / h));
    ProfileSampler a(prof), b(prof);
    KahanSum s;
    for (long j = -m; j <= m; ++j) {
        double xi = j * h;
        double d = a.value(xi - tau) - b.value(xi);
        double w = (j == -m || j == m) ? 0.5 : 1.0;
        s.add(w * d * d);
    }
    return s.value() * h;
}

// || U(. - tau) - U(.) ||_L1; equals |tau| (u- - u+) exactly in the continuum.
inline double shifted_L1_distance(const ShockProfile& prof, double tau) {
    double rate = std::min(prof.lambda_minus, -prof.lambda_plus);
    double reach = std::max(-prof.xi_left(), prof.xi_right()) + std::abs(tau) + 45.0 / rate;
    double h = kRTauStep;
    long m = static_cast<long>(std::ceil(reach / h));
    ProfileSampler a(prof), b(prof);
    KahanSum s;
    for (long j = -m; j <= m; ++j) {
        double xi = j * h;
        double d = a.value(xi - tau) - b.value(xi);
        double w = (j == -m || j == m) ? 0.5 : 1.0;
        s.add(w * std::abs(d));
    }
    return s.value() * h;
}

// beta' = 2 int int_x^{x+1} U'(y) U'(x) dy dx by honest double quadrature
// (outer trapezoid, inner 16-point composite Gauss-Legendre per unit window).
inline double beta_prime_double_quadrature(const ShockProfile& prof) {
    static const double gx[8] = {0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
                                 0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
                                 0.9445750230732326, 0.9894009349916499};
    static const double gw[8] = {0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
                                 0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
                                 0.0622535239386479, 0.0271524594117541};
    double rate = std::min(prof.lambda_minus, -prof.lambda_plus);
    double reach = std::max(-prof.xi_left(), prof.xi_right()) + 1.0 + 45.0 / rate;
    double h = 1.0 / 64.0;
    long m = static_cast<long>(std::ceil(reach / h));
    KahanSum outer;
    for (long j = -m; j <= m; ++j) {
        double x = j * h;
        double inner = 0.0;
        // int_x^{x+1} U'(y) dy, 16-point Gauss-Legendre
        for (int q = 0; q < 8; ++q) {
            inner += gw[q] * (eval_Uxi(prof, x + 0.5 + 0.5 * gx[q]) +
                              eval_Uxi(prof, x + 0.5 - 0.5 * gx[q]));
        }
        inner *= 0.5;
        double w = (j == -m || j == m) ? 0.5 : 1.0;
        outer.add(w * inner * eval_Uxi(prof, x));
    }
    return 2.0 * outer.value() * h;
}

struct ShiftBoundRow {
    double t, tau, R_tau, bound, lhs;
    bool ok;
};

struct ShiftBoundReport {
    double beta_prime = 0.0;
    double fubini_max_rel_err = 0.0;
    bool bound_ok_all = false;
    std::vector<ShiftBoundRow> rows;
};

// Verifies, snapshot by snapshot, |X(t) - x0| <= R(X(t)-x0)/beta' + 1 and the
// L1 shift identity ||U(.-tau) - U(.)||_L1 = |tau| (u- - u+).
inline ShiftBoundReport shift_bound_check(const Trajectory& traj, const ShockProfile& prof) {
    if (traj.rows.empty()) throw ConfigError("shift_bound_check needs a nonempty trajectory");
    ShiftBoundReport rep;
    rep.beta_prime = beta_prime_double_quadrature(prof);
    rep.bound_ok_all = true;
    double span = prof.params.span();
    for (const auto& row : traj.rows) {
        double tau = row.X - traj.final_state.x0;
        ShiftBoundRow r;
        r.t = row.t;
        r.tau = tau;
        r.R_tau = R_of_tau(prof, tau);
        r.lhs = std::abs(tau);
        r.bound = r.R_tau / rep.beta_prime + 1.0;
        r.ok = r.lhs <= r.bound;
        if (!r.ok) rep.bound_ok_all = false;
        double l1 = shifted_L1_distance(prof, tau);
        double expect = std::abs(tau) * span;
        double err = expect > 0.0 ? std::abs(l1 - expect) / expect : std::abs(l1);
        rep.fubini_max_rel_err = std::max(rep.fubini_max_rel_err, err);
        rep.rows.push_back(r);
    }
    return rep;
}

struct DecayFit {
    double C_star = 0.0;       // smallest constant closing the algebraic decay bound
    double worst_margin = 0.0; // max relative overshoot of ||phi|| above the bound
    double sup_t14_L2 = 0.0;   // sup over t >= 1 of t^{1/4} ||phi(t)||
    bool feasible = false;
};

// Fit of ||phi(t)|| <= C ||phi_0|| / (1 + C t^{1/4} ||phi_0||) over snapshots
// with t >= 1. The fitted constant is empirical, not a theorem constant.
inline DecayFit decay_fit(const Trajectory& traj) {
    if (traj.rows.empty()) throw InsufficientSpan("empty trajectory");
    double T = traj.rows.back().t;
    if (T < 50.0) throw InsufficientSpan("decay fit needs the run to span [1, T] with T >= 50");
    double phi0 = traj.rows.front().L2;

    DecayFit fit;
    fit.feasible = true;
    double c_needed = 0.0;
    for (const auto& row : traj.rows) {
        if (row.t < 1.0) continue;
        double t14 = std::pow(row.t, 0.25);
        fit.sup_t14_L2 = std::max(fit.sup_t14_L2, t14 * row.L2);
        if (phi0 == 0.0) continue;  // zero perturbation: any constant works
        double slack = 1.0 - t14 * row.L2;
        if (slack <= 0.0) {
            fit.feasible = false;
            continue;
        }
        c_needed = std::max(c_needed, row.L2 / (phi0 * slack));
    }

    if (!fit.feasible) {
        // no finite constant closes the bound; report margins against the
        // limiting envelope t^{-1/4}
        fit.C_star = std::numeric_limits<double>::infinity();
        double worst = -std::numeric_limits<double>::infinity();
        for (const auto& row : traj.rows) {
            if (row.t < 1.0) continue;
            double bound = std::pow(row.t, -0.25);
            worst = std::max(worst, (row.L2 - bound) / bound);
        }
        fit.worst_margin = worst;
        return fit;
    }

    fit.C_star = c_needed * (1.0 + 1e-12);
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& row : traj.rows) {
        if (row.t < 1.0) continue;
        double bound = phi0 == 0.0
                           ? 0.0
                           : fit.C_star * phi0 / (1.0 + fit.C_star * std::pow(row.t, 0.25) * phi0);
        double margin = bound > 0.0 ? (row.L2 - bound) / bound : row.L2;
        worst = std::max(worst, margin);
    }
    fit.worst_margin = std::isfinite(worst) ? worst : 0.0;
    return fit;
}

}  // namespace shocklab
