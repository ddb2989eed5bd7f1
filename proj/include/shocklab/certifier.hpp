#pragma once
// Numerical certification that the contraction coefficient g(U) is bounded
// away from zero: beta(p, u+, u-) = -max g over [u+, u-], obtained from a
// dense state scan with two refinements, together with every inequality the
// sign argument rests on:
//   * m(U) >= 0 on the band, zero only at the endpoints,
//   * h + (u- - U) h' < 0                       on the interior,
//   * h + (u+ - U) h' < -(h''/4)(u+ - U)^2      on the interior,
//   * I1 = [h+(u- -U)h'][h+(u+ -U)h'] > (h'')^2 (u+ -U)^2 (u- -U)^2 / 8,
//   * m(U) > 2 [h + h'' (U-u-)(u+ -U)/4]^2,
//   * H'(z) < 0 for z in (1, u-/u+) when u+ > 0,
// plus the cross-check that the two representations of g agree.
//
// Sweep entries are independent; they may run in parallel (capped by the
// SHOCKLAB_THREADS environment variable) with deterministic output order.

#include <cstdlib>
#include <optional>
#include <random>
#include <thread>
#include <utility>
#include <vector>

#include "shocklab/core.hpp"
#include "shocklab/weight.hpp"

namespace shocklab {

// H(z) from the interior sign argument, z = U/u+ >= 1 (requires u+ > 0):
//   H(z) = ((p-1)(p-4)/4) z^p + ((3p-p^2)/2) z^(p-1) + (p(p-1)/4) z^(p-2) - 1
inline double H_of_z(const ShockParams& prm, double z) {
    double p = prm.p;
    return 0.25 * (p - 1.0) * (p - 4.0) * upow(z, p) + 0.5 * (3.0 * p - p * p) * upow(z, p - 1.0) +
           0.25 * p * (p - 1.0) * upow(z, p - 2.0) - 1.0;
}

// H'(z) = (p(p-1)/4) z^(p-3) [ (p-4) z^2 + 2(3-p) z + (p-2) ]
inline double H_prime_of_z(const ShockParams& prm, double z) {
    double p = prm.p;
    double bracket = (p - 4.0) * z * z + 2.0 * (3.0 - p) * z + (p - 2.0);
    return 0.25 * p * (p - 1.0) * upow(z, p - 3.0) * bracket;
}

struct CertificateReport {
    ShockParams params;
    double beta = 0.0;      // -g_max; positive on success
    double g_max = 0.0;     // maximum of g over the finest state grid
    double g_argmax = 0.0;  // state achieving it
    double m_min = 0.0;     // minimum of m over the interior grid
    double H_prime_max = std::numeric_limits<double>::quiet_NaN();  // NaN when u+ <= 0
    double g_at_endpoint_plus = 0.0;
    double g_at_endpoint_minus = 0.0;
    double a_min = 0.0, a_max = 0.0;  // weight bounds c <= a <= C from the scan
    double dual_max_rel_dev = 0.0;    // worst relative disagreement of the two g forms
    // interior inequality margins (all must be strictly negative / positive as noted)
    double margin_h_left = 0.0;   // max of h + (u- - U) h'            (< 0)
    double margin_h_right = 0.0;  // max of h + (u+ -U) h' + h''(u+ -U)^2/4 (< 0)
    double margin_I1 = 0.0;       // min of I1 - (h'')^2 (u+ -U)^2 (u- -U)^2 / 8 (> 0)
    double margin_m = 0.0;        // min of m - 2 [h + h''(U-u-)(u+ -U)/4]^2    (> 0)
    bool inequalities_ok = false;
    bool dual_ok = false;
    bool converged = false;
    bool pass = false;
    long grid_N = 0;
    std::vector<std::pair<long, double>> refinement;  // (N, g_max) per level
};

namespace detail {

struct ScanResult {
    double g_max, g_argmax;
    double m_min;
    double a_min, a_max;
    double dual_max_rel_dev;
    double margin_h_left, margin_h_right, margin_I1, margin_m;
    double H_prime_max;
};

inline ScanResult scan_band(const ShockParams& prm, long N) {
    double up = prm.u_plus, um = prm.u_minus;
    double span = prm.span();
    double interior = 1e-3 * span;
    ScanResult r;
    r.g_max = -std::numeric_limits<double>::infinity();
    r.g_argmax = up;
    r.m_min = std::numeric_limits<double>::infinity();
    r.a_min = std::numeric_limits<double>::infinity();
    r.a_max = -std::numeric_limits<double>::infinity();
    r.dual_max_rel_dev = 0.0;
    r.margin_h_left = -std::numeric_limits<double>::infinity();
    r.margin_h_right = -std::numeric_limits<double>::infinity();
    r.margin_I1 = std::numeric_limits<double>::infinity();
    r.margin_m = std::numeric_limits<double>::infinity();
    r.H_prime_max = -std::numeric_limits<double>::infinity();

    bool scan_H = up > 0.0;
    double z_hi = scan_H ? um / up : 0.0;

    for (long i = 0; i < N; ++i) {
        double th = static_cast<double>(i) / static_cast<double>(N - 1);
        double U = (1.0 - th) * up + th * um;

        double g = g_of_U(prm, U);
        if (g > r.g_max) {
            r.g_max = g;
            r.g_argmax = U;
        }
        double a = weight_a(prm, U);
        r.a_min = std::min(r.a_min, a);
        r.a_max = std::max(r.a_max, a);

        double dp = U - up, dm = um - U;
        if (dp > interior && dm > interior) {
            double h = h_of_U(prm, U);
            double h1 = h_prime(prm, U);
            double h2 = h_second(prm, U);
            double m = (U - um) * (up - U) * (h * h2 - h1 * h1) + 3.0 * h * h +
                       h * h1 * (up + um - 2.0 * U);
            r.m_min = std::min(r.m_min, m);

            double left = h + dm * h1;
            double right = h + (up - U) * h1 + 0.25 * h2 * dp * dp;
            double i1 = (h + dm * h1) * (h + (up - U) * h1);
            double i1_bound = 0.125 * h2 * h2 * dp * dp * dm * dm;
            double msq = h + 0.25 * h2 * (U - um) * (up - U);
            r.margin_h_left = std::max(r.margin_h_left, left);
            r.margin_h_right = std::max(r.margin_h_right, right);
            r.margin_I1 = std::min(r.margin_I1, i1 - i1_bound);
            r.margin_m = std::min(r.margin_m, m - 2.0 * msq * msq);

            double gm = -span * m / (dm * dm * dp * dp);
            double dev = std::abs(g - gm) / std::max(std::abs(g), std::abs(gm));
            r.dual_max_rel_dev = std::max(r.dual_max_rel_dev, dev);
        }

        if (scan_H && i > 0) {
            double z = (1.0 - th) * 1.0 + th * z_hi;
            r.H_prime_max = std::max(r.H_prime_max, H_prime_of_z(prm, z));
        }
    }
    return r;
}

inline unsigned sweep_thread_cap() {
    if (const char* env = std::getenv("SHOCKLAB_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

}  // namespace detail

inline CertificateReport certify(const ShockParams& prm, long N) {
    if (N < 1000) throw ConfigError("certification grid needs N >= 1000");

    CertificateReport rep;
    rep.params = prm;
    rep.grid_N = N;
    rep.g_at_endpoint_plus = g_at_u_plus(prm);
    rep.g_at_endpoint_minus = g_at_u_minus(prm);

    detail::ScanResult last{};
    double prev_g_max = 0.0;
    for (int level = 0; level < 3; ++level) {
        long Nk = N << (2 * level);  // N, 4N, 16N
        last = detail::scan_band(prm, Nk);
        rep.refinement.emplace_back(Nk, last.g_max);
        if (level == 2)
            rep.converged =
                std::abs(last.g_max - prev_g_max) < 1e-8 * std::abs(last.g_max);
        prev_g_max = last.g_max;
    }

    rep.g_max = last.g_max;
    rep.g_argmax = last.g_argmax;
    rep.m_min = last.m_min;
    rep.a_min = last.a_min;
    rep.a_max = last.a_max;
    rep.dual_max_rel_dev = last.dual_max_rel_dev;
    rep.margin_h_left = last.margin_h_left;
    rep.margin_h_right = last.margin_h_right;
    rep.margin_I1 = last.margin_I1;
    rep.margin_m = last.margin_m;
    rep.H_prime_max =
        prm.u_plus > 0.0 ? last.H_prime_max : std::numeric_limits<double>::quiet_NaN();
    rep.beta = -rep.g_max;

    if (rep.g_max >= 0.0) throw CertificationFailed(rep.g_argmax, rep.g_max);

    bool in_hypotheses = prm.p >= 2.0 && prm.p <= 4.0;
    bool H_ok = prm.u_plus > 0.0 ? rep.H_prime_max < 0.0 : true;
    rep.inequalities_ok = rep.margin_h_left < 0.0 && rep.margin_h_right < 0.0 &&
                          rep.margin_I1 > 0.0 && rep.margin_m > 0.0;
    rep.dual_ok = rep.dual_max_rel_dev <= 1e-9;
    rep.pass = rep.g_max < 0.0 && rep.m_min >= -1e-12 && (!in_hypotheses || H_ok) &&
               (!in_hypotheses || rep.inequalities_ok) && rep.dual_ok && rep.converged;
    return rep;
}

struct SweepFailure {
    ShockParams params;
    double witness_U = 0.0;
    double g_at_witness = 0.0;
    std::string message;
};

struct SweepEntry {
    std::optional<CertificateReport> report;
    std::optional<SweepFailure> failure;
};

struct SweepResult {
    std::vector<SweepEntry> entries;
    bool all_pass = false;
};

// Cartesian certify over p_list x state_pairs, sorted by (p, shock strength).
inline SweepResult sweep(const std::vector<double>& p_list,
                         const std::vector<std::pair<double, double>>& state_pairs, long N) {
    if (p_list.empty()) throw ConfigError("sweep needs a nonempty p_list");
    if (state_pairs.empty()) throw ConfigError("sweep needs at least one state pair");

    struct Job {
        double p, u_plus, u_minus;
    };
    std::vector<Job> jobs;
    for (double p : p_list)
        for (auto& [up, um] : state_pairs) jobs.push_back({p, up, um});
    std::sort(jobs.begin(), jobs.end(), [](const Job& a, const Job& b) {
        if (a.p != b.p) return a.p < b.p;
        return (a.u_minus - a.u_plus) < (b.u_minus - b.u_plus);
    });

    SweepResult result;
    result.entries.resize(jobs.size());

    auto work = [&](std::size_t i) {
        SweepEntry& e = result.entries[i];
        try {
            ShockParams prm = make_shock_params(jobs[i].p, jobs[i].u_minus, jobs[i].u_plus,
                                                ParamPolicy::WarnOutOfRange);
            try {
                e.report = certify(prm, N);
            } catch (const CertificationFailed& cf) {
                e.failure = SweepFailure{prm, cf.witness_U, cf.g_at_witness, cf.what()};
            }
        } catch (const Error& err) {
            ShockParams bad{jobs[i].p, jobs[i].u_minus, jobs[i].u_plus, 0.0, true};
            e.failure = SweepFailure{bad, std::numeric_limits<double>::quiet_NaN(),
                                     std::numeric_limits<double>::quiet_NaN(), err.what()};
        }
    };

    unsigned threads = std::min<unsigned>(detail::sweep_thread_cap(),
                                          static_cast<unsigned>(jobs.size()));
    if (threads <= 1) {
        for (std::size_t i = 0; i < jobs.size(); ++i) work(i);
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back([&, t] {
                for (std::size_t i = t; i < jobs.size(); i += threads) work(i);
            });
        for (auto& th : pool) th.join();
    }

    result.all_pass = true;
    for (const auto& e : result.entries)
        if (!e.report || !e.report->pass) result.all_pass = false;
    return result;
}

// Seeded random admissible pairs 0 < u+ < u- <= hi with a minimum strength.
inline std::vector<std::pair<double, double>> random_state_pairs(int count, std::uint64_t seed,
                                                                 double hi = 10.0,
                                                                 double min_span = 0.1) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(0.0, hi);
    std::vector<std::pair<double, double>> pairs;
    while (static_cast<int>(pairs.size()) < count) {
        double a = dist(rng), b = dist(rng);
        double up = std::min(a, b), um = std::max(a, b);
        if (up <= 1e-3 * hi || um - up < min_span) continue;
        pairs.emplace_back(up, um);
    }
    return pairs;
}

}  // namespace shocklab
