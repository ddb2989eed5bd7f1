#pragma once
// Explicit finite-volume evolution of the moving-frame equation
//     u_t - s u_xi + f(u)_xi = u_xixi
// on [-L, L] with far-field Dirichlet values, coupled to the nonlocal shift
//     X'(t) = -4/(u- - u+)^2 * int a(U(.-X)) U_xi(.-X) phi dxi,
// integrated as one system by classical four-stage Runge-Kutta. The shift
// rate is re-evaluated per stage with the stage's own (u, X).
//
// Space discretization: conservative central flux with the physical viscous
// flux -(u_{i+1}-u_i)/dx plus a local Lax-Friedrichs stabilizer whose speed
// is reduced by the dissipation the viscous flux already provides,
//     alpha_eff = max(0, max|f'(u)-s| - 2/dx),
// so the stabilizer is inactive on Peclet-resolved grids (keeping the steady
// profile residual at O(dx^2)) and takes over exactly where the central
// scheme would stop being monotone.
//
// Time step: dt = cfl_safety * min(dx^2/2, dx / max|f'(u)-s|), recomputed
// every step. Runs are deterministic given the configuration.

#include <cmath>
#include <cstdint>
#include <vector>

#include "shocklab/core.hpp"
#include "shocklab/functionals.hpp"
#include "shocklab/profile.hpp"
#include "shocklab/weight.hpp"

namespace shocklab {

enum class PerturbationKind { Gaussian, Bump, CustomTable, None };

struct Perturbation {
    PerturbationKind kind = PerturbationKind::Gaussian;
    double amplitude = 0.1;
    double center = 0.0;
    double width = 5.0;
    std::vector<double> table_xi, table_v;  // CustomTable: linear interp, 0 outside

    double operator()(double xi) const {
        switch (kind) {
            case PerturbationKind::None:
                return 0.0;
            case PerturbationKind::Gaussian: {
                double r = (xi - center) / width;
                return amplitude * std::exp(-r * r);
            }
            case PerturbationKind::Bump: {
                double r = (xi - center) / width;
                if (std::abs(r) >= 1.0) return 0.0;
                return amplitude * std::exp(1.0 - 1.0 / (1.0 - r * r));
            }
            case PerturbationKind::CustomTable: {
                if (table_xi.size() < 2 || xi <= table_xi.front() || xi >= table_xi.back())
                    return 0.0;
                auto it = std::upper_bound(table_xi.begin(), table_xi.end(), xi);
                std::size_t k = static_cast<std::size_t>(it - table_xi.begin()) - 1;
                double t = (xi - table_xi[k]) / (table_xi[k + 1] - table_xi[k]);
                return (1.0 - t) * table_v[k] + t * table_v[k + 1];
            }
        }
        return 0.0;
    }
};

struct SolverConfig {
    ShockParams params;
    Grid grid;
    double cfl_safety = 0.4;
    double t_end = 200.0;
    double output_every = 0.5;
    Perturbation perturbation;
    double x0 = 0.0;
    bool monitor_every_step = true;  // per-step E_a contraction accounting
};

// Owns the work buffers; one instance per run (not thread-safe across runs).
class ShockSolver {
public:
    ShockSolver(const ShockParams& prm, const Grid& grid, const ShockProfile& prof)
        : prm_(prm), grid_(grid), prof_(prof) {
        int n = grid.n;
        fU_.resize(n);
        speed_.resize(n);
        flux_if_.resize(n - 1);
        k1_.resize(n);
        k2_.resize(n);
        k3_.resize(n);
        k4_.resize(n);
        utmp_.resize(n);
        Us_.resize(n);
    }

    const ShockParams& params() const { return prm_; }
    const Grid& grid() const { return grid_; }
    const ShockProfile& profile() const { return prof_; }

    // max |f'(u) - s| over the field
    double max_wave_speed(const std::vector<double>& u) const {
        double m = 0.0;
        for (double ui : u) m = std::max(m, std::abs(flux_prime(prm_, ui) - prm_.s));
        return m;
    }

    double cfl_dt(const std::vector<double>& u, double cfl_safety) const {
        double adv = max_wave_speed(u);
        double dx = grid_.dx;
        double lim = 0.5 * dx * dx;
        if (adv > 0.0) lim = std::min(lim, dx / adv);
        return cfl_safety * lim;
    }

    // du/dt at interior points; boundary cells are pinned (rhs = 0).
    void rhs(const std::vector<double>& u, std::vector<double>& out) {
        int n = grid_.n;
        double dx = grid_.dx;
        double s = prm_.s;
        for (int i = 0; i < n; ++i) {
            fU_[i] = flux(prm_, u[i]);
            speed_[i] = std::abs(flux_prime(prm_, u[i]) - s);
        }
        double visc_credit = 2.0 / dx;
        for (int i = 0; i + 1 < n; ++i) {
            double du = u[i + 1] - u[i];
            double alpha = std::max(0.0, std::max(speed_[i], speed_[i + 1]) - visc_credit);
            flux_if_[i] = 0.5 * (fU_[i] + fU_[i + 1]) - 0.5 * s * (u[i] + u[i + 1]) - du / dx -
                          0.5 * alpha * du;
        }
        out[0] = 0.0;
        out[n - 1] = 0.0;
        for (int i = 1; i + 1 < n; ++i) out[i] = -(flux_if_[i] - flux_if_[i - 1]) / dx;
    }

    // X'(t) for the given state: -4/span^2 * int a(U(.-X)) U_xi(.-X) phi dxi
    double shift_rate(const std::vector<double>& u, double X) {
        int n = grid_.n;
        sample_shifted(prof_, grid_, X, Us_.data());
        KahanSum s;
        for (int i = 0; i < n; ++i) {
            double Usi = Us_[i];
            double h = h_of_U(prm_, Usi);
            double aUxi = weight_a_fast(prm_, Usi, h) * h;  // a(U) U_xi, negative
            double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
            s.add(w * aUxi * (u[i] - Usi));
        }
        double span = prm_.span();
        return -4.0 / (span * span) * s.value() * grid_.dx;
    }

    // E_a and D2 in one sampled pass
    void energy_terms(const std::vector<double>& u, double X, double& E_a, double& D2) {
        int n = grid_.n;
        sample_shifted(prof_, grid_, X, Us_.data());
        KahanSum se, sd;
        for (int i = 0; i < n; ++i) {
            double Usi = Us_[i];
            double h = h_of_U(prm_, Usi);
            double a = weight_a_fast(prm_, Usi, h);
            double phi = u[i] - Usi;
            double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
            se.add(w * a * phi * phi);
            sd.add(w * phi * phi * std::abs(h));
        }
        E_a = se.value() * grid_.dx;
        D2 = sd.value() * grid_.dx;
    }

    double energy(const std::vector<double>& u, double X) {
        double E, D2;
        energy_terms(u, X, E, D2);
        return E;
    }

    // one classical RK4 step of the coupled (u, X) system
    void rk4_step(SolutionState& st, double dt) {
        int n = grid_.n;
        const std::vector<double>& u = st.u;

        rhs(u, k1_);
        double r1 = shift_rate(u, st.X);

        for (int i = 0; i < n; ++i) utmp_[i] = u[i] + 0.5 * dt * k1_[i];
        rhs(utmp_, k2_);
        double r2 = shift_rate(utmp_, st.X + 0.5 * dt * r1);

        for (int i = 0; i < n; ++i) utmp_[i] = u[i] + 0.5 * dt * k2_[i];
        rhs(utmp_, k3_);
        double r3 = shift_rate(utmp_, st.X + 0.5 * dt * r2);

        for (int i = 0; i < n; ++i) utmp_[i] = u[i] + dt * k3_[i];
        rhs(utmp_, k4_);
        double r4 = shift_rate(utmp_, st.X + dt * r3);

        double c = dt / 6.0;
        for (int i = 0; i < n; ++i)
            st.u[i] += c * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
        st.X += c * (r1 + 2.0 * r2 + 2.0 * r3 + r4);
        st.t += dt;
    }

private:
    ShockParams prm_;
    Grid grid_;
    const ShockProfile& prof_;
    std::vector<double> fU_, speed_, flux_if_, k1_, k2_, k3_, k4_, utmp_, Us_;
};

// --- free-function forms of the individual operations ---

inline Field semidiscrete_rhs(const SolutionState& st, const ShockProfile& prof,
                              const ShockParams& prm, const Grid& grid) {
    ShockSolver solver(prm, grid, prof);
    Field out(grid.n);
    solver.rhs(st.u, out);
    if (!all_finite(out)) throw NonFinite(st.t);
    return out;
}

inline double shift_rate(const SolutionState& st, const ShockProfile& prof,
                         const ShockParams& prm, const Grid& grid) {
    ShockSolver solver(prm, grid, prof);
    return solver.shift_rate(st.u, st.X);
}

inline SolutionState step(const SolutionState& st, double dt, const ShockProfile& prof,
                          const ShockParams& prm, const Grid& grid) {
    ShockSolver solver(prm, grid, prof);
    SolutionState out = st;
    solver.rk4_step(out, dt);
    if (!all_finite(out.u) || !std::isfinite(out.X)) throw NonFinite(out.t);
    return out;
}

namespace detail {

inline DiagnosticsRow make_row(ShockSolver& solver, const SolutionState& st,
                               const DiagnosticsRow* prev, double E_a0) {
    DiagnosticsRow row;
    row.t = st.t;
    row.X = st.X;
    row.Xdot = solver.shift_rate(st.u, st.X);
    solver.energy_terms(st.u, st.X, row.E_a, row.D2);
    Norms nm = norms(st.u, st.X, solver.profile(), solver.grid());
    row.L1 = nm.L1;
    row.L2 = nm.L2;
    row.Linf = nm.Linf;
    row.H1semi = nm.H1semi;
    row.D1 = nm.H1semi * nm.H1semi;
    if (prev) {
        double dt = row.t - prev->t;
        row.int_D1 = prev->int_D1 + 0.5 * dt * (prev->D1 + row.D1);
        row.int_D2 = prev->int_D2 + 0.5 * dt * (prev->D2 + row.D2);
        row.int_Xdot2 = prev->int_Xdot2 + 0.5 * dt * (prev->Xdot * prev->Xdot + row.Xdot * row.Xdot);
        row.mono_violation = E_a0 > 0.0 ? std::max(0.0, row.E_a - prev->E_a) / E_a0 : 0.0;
    }
    return row;
}

}  // namespace detail

// Full run: initial data U(. - x0) + perturbation, stepping to t_end with a
// snapshot row every output_every time units (plus t = 0 and t = t_end).
inline Trajectory run(const SolverConfig& cfg, const ShockProfile& prof) {
    const ShockParams& prm = cfg.params;
    const Grid& grid = cfg.grid;
    if (!(cfg.cfl_safety > 0.0 && cfg.cfl_safety <= 1.0))
        throw ConfigError("cfl_safety must lie in (0, 1]");
    if (cfg.t_end < 0.0) throw ConfigError("t_end must be nonnegative");

    ShockSolver solver(prm, grid, prof);

    SolutionState st;
    st.t = 0.0;
    st.x0 = cfg.x0;
    st.X = cfg.x0;
    st.u.resize(grid.n);
    {
        ProfileSampler sampler(prof);
        for (int i = 0; i < grid.n; ++i)
            st.u[i] = sampler.value(grid.xi(i) - cfg.x0) + cfg.perturbation(grid.xi(i));
    }
    st.u[0] = prm.u_minus;
    st.u[grid.n - 1] = prm.u_plus;

    Trajectory traj;
    traj.meta.E_a0 = solver.energy(st.u, st.X);

    {
        Norms nm0 = norms(st.u, st.X, prof, grid);
        double h1 = std::sqrt(nm0.L2 * nm0.L2 + nm0.H1semi * nm0.H1semi);
        traj.meta.h1_smallness_warning = h1 > 0.5 * prm.span();
    }

    // admissible band from the initial data (maximum principle)
    double u0_min = *std::min_element(st.u.begin(), st.u.end());
    double u0_max = *std::max_element(st.u.begin(), st.u.end());
    double band_lo = std::min(prm.u_plus, u0_min) - kMaxPrincipleEps;
    double band_hi = std::max(prm.u_minus, u0_max) + kMaxPrincipleEps;

    traj.rows.push_back(detail::make_row(solver, st, nullptr, traj.meta.E_a0));

    double E_prev = traj.rows.front().E_a;
    long k_out = 1;
    auto next_output = [&]() {
        if (cfg.output_every <= 0.0) return cfg.t_end;
        return std::min(k_out * cfg.output_every, cfg.t_end);
    };
    double t_next = next_output();
    const double t_eps = 1e-12 * (1.0 + cfg.t_end);

    while (st.t < cfg.t_end - t_eps) {
        double dt = std::min(solver.cfl_dt(st.u, cfg.cfl_safety), t_next - st.t);
        try {
            solver.rk4_step(st, dt);
        } catch (NonPositiveBase& e) {
            e.t = st.t;  // attach the failing time
            throw;
        }
        ++traj.meta.steps;

        double mn = st.u[0], mx = st.u[0];
        for (double v : st.u) {
            mn = std::min(mn, v);
            mx = std::max(mx, v);
        }
        if (!std::isfinite(mn) || !std::isfinite(mx) || !std::isfinite(st.X))
            throw NonFinite(st.t);
        double excess = std::max(0.0, std::max(band_lo - mn, mx - band_hi));
        traj.meta.max_principle_excess = std::max(traj.meta.max_principle_excess, excess);

        double ff = std::max(std::abs(st.u[1] - prm.u_minus),
                             std::abs(st.u[grid.n - 2] - prm.u_plus));
        traj.meta.farfield_worst = std::max(traj.meta.farfield_worst, ff);

        if (cfg.monitor_every_step) {
            double E = solver.energy(st.u, st.X);
            double inc = E - E_prev;
            if (inc > 0.0) {
                traj.meta.sum_step_increments_abs += inc;
                if (traj.meta.E_a0 > 0.0)
                    traj.meta.max_step_increment_rel =
                        std::max(traj.meta.max_step_increment_rel, inc / traj.meta.E_a0);
            }
            E_prev = E;
        }

        if (st.t >= t_next - t_eps) {
            st.t = t_next;
            traj.rows.push_back(detail::make_row(solver, st, &traj.rows.back(), traj.meta.E_a0));
            if (t_next >= cfg.t_end - t_eps) break;
            ++k_out;
            t_next = next_output();
        }
    }

    traj.meta.max_principle_warning = traj.meta.max_principle_excess > kMaxPrincipleWarn;
    traj.meta.farfield_warning = traj.meta.farfield_worst > 1e-8;
    if (traj.meta.E_a0 > 0.0)
        traj.meta.sum_step_increments_rel = traj.meta.sum_step_increments_abs / traj.meta.E_a0;

    // dissipation-budget constant: max_t [ ||phi||_H1^2 + int(D1+D2) + int Xdot^2 ] / ||phi_0||_H1^2
    double h1sq0 = traj.rows.front().L2 * traj.rows.front().L2 + traj.rows.front().D1;
    if (h1sq0 > 0.0) {
        double worst = 0.0;
        for (const auto& r : traj.rows) {
            double lhs = r.L2 * r.L2 + r.D1 + r.int_D1 + r.int_D2 + r.int_Xdot2;
            worst = std::max(worst, lhs / h1sq0);
        }
        traj.meta.budget_C0 = worst;
    }

    traj.final_state = st;
    return traj;
}

}  // namespace shocklab
