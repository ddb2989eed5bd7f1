#pragma once
// Numerical verification of the weighted Poincare-type inequality
//     int_0^1 | f - int_0^1 f |^2 dy  <=  (1/2) int_0^1 y (1-y) |f'|^2 dy
// on batteries of test functions. Piecewise-linear inputs carry their exact
// slopes, so the only numerical error left is in the composite-trapezoid
// integrals themselves; smooth inputs are tabulated and differenced.

#include <cstdint>
#include <functional>
#include <random>
#include <sstream>
#include <vector>

#include "shocklab/core.hpp"

namespace shocklab {

struct PiecewiseLinear {
    std::vector<double> y;  // strictly increasing knots, y.front()=0, y.back()=1
    std::vector<double> f;

    double value(double yy) const {
        if (yy <= y.front()) return f.front();
        if (yy >= y.back()) return f.back();
        auto it = std::upper_bound(y.begin(), y.end(), yy);
        std::size_t k = static_cast<std::size_t>(it - y.begin()) - 1;
        double t = (yy - y[k]) / (y[k + 1] - y[k]);
        return (1.0 - t) * f[k] + t * f[k + 1];
    }
};

struct PoincareGap {
    double lhs, rhs, gap;  // gap = rhs - lhs >= 0 by the inequality
};

inline constexpr long kPoincareDefaultN = 1 << 17;

// Exact-slope path for piecewise-linear inputs. The quadrature grid refines
// each knot interval uniformly so no trapezoid panel straddles a kink.
inline PoincareGap poincare_gap(const PiecewiseLinear& pl, long n = kPoincareDefaultN) {
    if (n < 64) throw ConfigError("poincare quadrature needs n >= 64");
    if (pl.y.size() < 2 || pl.y.size() != pl.f.size())
        throw ConfigError("piecewise-linear input needs matching knot arrays");

    std::size_t segs = pl.y.size() - 1;
    // mean of f: exact per segment (trapezoid is exact for linear pieces)
    KahanSum mean_s;
    for (std::size_t k = 0; k < segs; ++k)
        mean_s.add(0.5 * (pl.f[k] + pl.f[k + 1]) * (pl.y[k + 1] - pl.y[k]));
    double mean = mean_s.value();

    KahanSum lhs_s, rhs_s;
    for (std::size_t k = 0; k < segs; ++k) {
        double ya = pl.y[k], yb = pl.y[k + 1];
        double len = yb - ya;
        long m = std::max<long>(1, static_cast<long>(std::ceil(len * static_cast<double>(n))));
        double h = len / static_cast<double>(m);
        double slope = (pl.f[k + 1] - pl.f[k]) / len;
        double s2 = slope * slope;
        for (long j = 0; j <= m; ++j) {
            double yy = ya + j * h;
            double w = (j == 0 || j == m) ? 0.5 : 1.0;
            double d = pl.f[k] + slope * (yy - ya) - mean;
            lhs_s.add(w * h * d * d);
            rhs_s.add(w * h * yy * (1.0 - yy) * s2);
        }
    }
    double lhs = lhs_s.value();
    double rhs = 0.5 * rhs_s.value();
    return {lhs, rhs, rhs - lhs};
}

// Smooth-input path: tabulate on n+1 uniform points, centered differences for
// the slope (second-order one-sided at the ends).
inline PoincareGap poincare_gap(const std::function<double(double)>& f,
                                long n = kPoincareDefaultN) {
    if (n < 64) throw ConfigError("poincare quadrature needs n >= 64");
    double h = 1.0 / static_cast<double>(n);
    std::vector<double> v(n + 1);
    for (long j = 0; j <= n; ++j) v[j] = f(j * h);

    KahanSum mean_s;
    for (long j = 0; j <= n; ++j) mean_s.add(((j == 0 || j == n) ? 0.5 : 1.0) * v[j]);
    double mean = mean_s.value() * h;

    KahanSum lhs_s, rhs_s;
    for (long j = 0; j <= n; ++j) {
        double w = (j == 0 || j == n) ? 0.5 : 1.0;
        double d = v[j] - mean;
        lhs_s.add(w * d * d);
        double fp;
        if (j == 0)
            fp = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
        else if (j == n)
            fp = (3.0 * v[n] - 4.0 * v[n - 1] + v[n - 2]) / (2.0 * h);
        else
            fp = (v[j + 1] - v[j - 1]) / (2.0 * h);
        double y = j * h;
        rhs_s.add(w * y * (1.0 - y) * fp * fp);
    }
    double lhs = lhs_s.value() * h;
    double rhs = 0.5 * rhs_s.value() * h;
    return {lhs, rhs, rhs - lhs};
}

struct BatteryReport {
    long count = 0;
    double min_gap = 0.0;
    long near_equality_count = 0;           // gap < 1e-3 * rhs
    std::vector<long> near_equality_cases;  // indices into the battery
    std::vector<long> failures;             // gap < -1e-9 (none expected)
};

inline std::string serialize_witness(const PiecewiseLinear& pl) {
    std::ostringstream os;
    os.precision(17);
    os << "{\"y\":[";
    for (std::size_t i = 0; i < pl.y.size(); ++i) os << (i ? "," : "") << pl.y[i];
    os << "],\"f\":[";
    for (std::size_t i = 0; i < pl.f.size(); ++i) os << (i ? "," : "") << pl.f[i];
    os << "]}";
    return os.str();
}

// Seeded battery of random piecewise-linear functions (8..64 uniform knots,
// values in [-1,1]); `extra` cases are checked first with the same reporting.
inline BatteryReport poincare_battery(long count, std::uint64_t seed,
                                      const std::vector<PiecewiseLinear>& extra = {},
                                      long n = kPoincareDefaultN) {
    if (count < 1) throw ConfigError("battery needs count >= 1");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> knot_dist(8, 64);
    std::uniform_real_distribution<double> val_dist(-1.0, 1.0);

    BatteryReport rep;
    rep.min_gap = std::numeric_limits<double>::infinity();
    long index = 0;

    auto check = [&](const PiecewiseLinear& pl) {
        PoincareGap g = poincare_gap(pl, n);
        rep.min_gap = std::min(rep.min_gap, g.gap);
        if (g.gap < 1e-3 * g.rhs) {
            ++rep.near_equality_count;
            rep.near_equality_cases.push_back(index);
        }
        if (g.gap < -1e-9) {
            rep.failures.push_back(index);
            throw BatteryFailure("poincare inequality violated numerically: gap = " +
                                     std::to_string(g.gap),
                                 serialize_witness(pl));
        }
        ++index;
        ++rep.count;
    };

    for (const auto& pl : extra) check(pl);
    for (long c = 0; c < count; ++c) {
        int K = knot_dist(rng);
        PiecewiseLinear pl;
        pl.y.resize(K);
        pl.f.resize(K);
        for (int k = 0; k < K; ++k) {
            pl.y[k] = static_cast<double>(k) / static_cast<double>(K - 1);
            pl.f[k] = val_dist(rng);
        }
        check(pl);
    }
    return rep;
}

}  // namespace shocklab
