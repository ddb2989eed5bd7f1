#pragma once
// Problem identity, grids, fields and the shared numeric conventions for the
// viscous conservation law  u_t + (u^p)_x = u_xx  on the real line.
//
// Everything here is immutable after construction and safe to share across
// threads; the operations are pure.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace shocklab {

inline constexpr const char* kToolName = "shocklab";
inline constexpr const char* kToolVersion = "0.1.0";

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Real-power flux evaluated at a non-positive state: the positivity guard
// tripped, i.e. the solution left the admissible band.
class NonPositiveBase : public Error {
public:
    explicit NonPositiveBase(double u, double p, double t = std::numeric_limits<double>::quiet_NaN())
        : Error("flux base u=" + std::to_string(u) + " is not positive for non-integer p=" +
                std::to_string(p) + (std::isnan(t) ? std::string{} : " at t=" + std::to_string(t))),
          u(u), p(p), t(t) {}
    double u;
    double p;
    double t;  // solver time when tripped during a run, NaN otherwise
};

class DegenerateStates : public Error {
public:
    DegenerateStates() : Error("shock states coincide: u_plus == u_minus") {}
};

class OutOfBand : public Error {
public:
    explicit OutOfBand(double U, double lo, double hi)
        : Error("state U=" + std::to_string(U) + " outside [" + std::to_string(lo) + ", " +
                std::to_string(hi) + "]") {}
};

class QuadratureFailure : public Error {
public:
    using Error::Error;
};

class CertificationFailed : public Error {
public:
    CertificationFailed(double witness_U, double g_at_witness)
        : Error("certification failed: g(" + std::to_string(witness_U) +
                ") = " + std::to_string(g_at_witness) + " >= 0"),
          witness_U(witness_U), g_at_witness(g_at_witness) {}
    double witness_U;
    double g_at_witness;
};

class NonFinite : public Error {
public:
    explicit NonFinite(double t)
        : Error("non-finite field value at t=" + std::to_string(t)), t(t) {}
    double t;
};

class InsufficientSpan : public Error {
public:
    using Error::Error;
};

class BatteryFailure : public Error {
public:
    BatteryFailure(const std::string& msg, std::string witness)
        : Error(msg), witness_json(std::move(witness)) {}
    std::string witness_json;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

// ---------------------------------------------------------------------------
// Numeric conventions
// ---------------------------------------------------------------------------

// All reals are 64-bit; tolerances are named constants, never implicit.
inline constexpr double kMaxPrincipleEps = 1e-8;    // admissible-band padding
inline constexpr double kMaxPrincipleWarn = 1e-6;   // warning threshold
inline constexpr double kWeightBandTol = 1e-12;     // weight_a domain slack
inline constexpr double kEndpointBlendRel = 1e-4;   // g(U) endpoint blend width, relative to span
inline constexpr double kSeriesSwitchRel = 1e-4;    // divided-difference series fallback, relative

inline bool nearly_integer(double p) { return p == std::floor(p); }
inline bool nearly_half_integer(double p) { return (2.0 * p) == std::floor(2.0 * p); }

inline double pow_int(double u, long n) {
    // n >= 0 by construction of the callers
    double r = 1.0;
    double b = u;
    for (long k = n; k > 0; k >>= 1) {
        if (k & 1) r *= b;
        if (k > 1) b *= b;
    }
    return r;
}

// u^q with fast paths for integer and half-integer exponents. The caller is
// responsible for the positivity guard on non-integer exponents.
inline double upow(double u, double q) {
    if (q == 0.0) return 1.0;
    if (nearly_integer(q) && std::abs(q) < 64.0) {
        double r = pow_int(u, static_cast<long>(std::abs(q)));
        return q > 0.0 ? r : 1.0 / r;
    }
    if (nearly_half_integer(q) && q > 0.0 && q < 64.0)
        return pow_int(u, static_cast<long>(std::floor(q))) * std::sqrt(u);
    return std::exp(q * std::log(u));
}

// Compensated accumulator used by every quadrature in the project so that
// results are deterministic and accurate independently of length.
class KahanSum {
public:
    void add(double x) {
        double y = x - c_;
        double t = s_ + y;
        c_ = (t - s_) - y;
        s_ = t;
    }
    double value() const { return s_; }

private:
    double s_ = 0.0;
    double c_ = 0.0;
};

// Composite trapezoid on a uniform grid with spacing dx.
inline double trapezoid(const std::vector<double>& v, double dx) {
    if (v.size() < 2) return 0.0;
    KahanSum s;
    s.add(0.5 * v.front());
    for (std::size_t i = 1; i + 1 < v.size(); ++i) s.add(v[i]);
    s.add(0.5 * v.back());
    return s.value() * dx;
}

inline bool all_finite(const std::vector<double>& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Shock parameters
// ---------------------------------------------------------------------------

// Whether out-of-theorem exponents (p outside [2,4]) are rejected or merely
// flagged. Certification sweeps probe the failure regime, simulations do not.
enum class ParamPolicy { Strict, WarnOutOfRange };

struct ShockParams {
    double p;        // flux exponent, f(u) = u^p
    double u_minus;  // left far-field state
    double u_plus;   // right far-field state
    double s;        // shock speed (Rankine-Hugoniot)
    bool hypothesis_warning = false;  // p outside [2,4], admitted under WarnOutOfRange

    double span() const { return u_minus - u_plus; }
};

inline double flux_raw(double p, double u) {
    if (!nearly_integer(p) && u <= 0.0) throw NonPositiveBase(u, p);
    return upow(u, p);
}

// f(u) = u^p
inline double flux(const ShockParams& prm, double u) { return flux_raw(prm.p, u); }

// Derivatives of the flux; same positivity guard as flux itself.
inline double flux_prime(const ShockParams& prm, double u) {
    if (!nearly_integer(prm.p) && u <= 0.0) throw NonPositiveBase(u, prm.p);
    return prm.p * upow(u, prm.p - 1.0);
}
inline double flux_second(const ShockParams& prm, double u) {
    if (!nearly_integer(prm.p) && u <= 0.0) throw NonPositiveBase(u, prm.p);
    return prm.p * (prm.p - 1.0) * upow(u, prm.p - 2.0);
}
inline double flux_third(const ShockParams& prm, double u) {
    if (!nearly_integer(prm.p) && u <= 0.0) throw NonPositiveBase(u, prm.p);
    double c = prm.p * (prm.p - 1.0) * (prm.p - 2.0);
    return c == 0.0 ? 0.0 : c * upow(u, prm.p - 3.0);
}
inline double flux_fourth(const ShockParams& prm, double u) {
    if (!nearly_integer(prm.p) && u <= 0.0) throw NonPositiveBase(u, prm.p);
    double c = prm.p * (prm.p - 1.0) * (prm.p - 2.0) * (prm.p - 3.0);
    return c == 0.0 ? 0.0 : c * upow(u, prm.p - 4.0);
}

// Divided difference (f(U) - f(y)) / (U - y) at full relative accuracy:
// a same-sign polynomial sum for integer p, an expm1/log1p form otherwise.
// The naive quotient would carry absolute roundoff eps*|f|, which is fatal
// wherever the difference itself is small against f.
inline double flux_divdiff(const ShockParams& prm, double U, double y) {
    double p = prm.p;
    if (U == y) return flux_prime(prm, U);
    if (nearly_integer(p) && p >= 1.0 && p < 64.0) {
        long P = static_cast<long>(p);
        double D = 0.0;
        double Upow = 1.0;
        for (long j = 0; j < P; ++j) {
            D += Upow * pow_int(y, P - 1 - j);
            Upow *= U;
        }
        return D;
    }
    double w = (U - y) / y;
    if (std::abs(w) <= 0.5 && y > 0.0)
        return upow(y, p - 1.0) * std::expm1(p * std::log1p(w)) / w;
    return (flux(prm, U) - flux(prm, y)) / (U - y);
}

// Rankine-Hugoniot speed (f(u+) - f(u-)) / (u+ - u-). For p = 2 this reduces
// algebraically to u_minus + u_plus, which we return directly so the identity
// is exact in floating point.
inline double shock_speed(double p, double u_minus, double u_plus) {
    if (u_plus == u_minus) throw DegenerateStates{};
    if (p == 2.0) return u_minus + u_plus;
    return (flux_raw(p, u_plus) - flux_raw(p, u_minus)) / (u_plus - u_minus);
}

inline ShockParams make_shock_params(double p, double u_minus, double u_plus,
                                     ParamPolicy policy = ParamPolicy::Strict) {
    if (!(std::isfinite(p) && std::isfinite(u_minus) && std::isfinite(u_plus)))
        throw ConfigError("shock parameters must be finite");
    if (!(u_plus < u_minus))
        throw ConfigError("entropy condition requires u_plus < u_minus");
    if (p != 2.0 && !(u_plus > 0.0))
        throw ConfigError("positivity hypothesis requires 0 < u_plus when p != 2");
    bool warn = false;
    if (p < 2.0 || p > 4.0) {
        if (policy == ParamPolicy::Strict)
            throw ConfigError("exponent p=" + std::to_string(p) + " outside [2,4]");
        warn = true;
    }
    ShockParams prm{p, u_minus, u_plus, shock_speed(p, u_minus, u_plus), warn};
    return prm;
}

// ---------------------------------------------------------------------------
// Grid and fields
// ---------------------------------------------------------------------------

struct Grid {
    double half_length;  // domain is [-L, L]
    int n;               // point count
    double dx;           // 2L / (n-1)

    double xi(int i) const {
        if (i == 0) return -half_length;
        if (i == n - 1) return half_length;
        return -half_length + i * dx;
    }
};

inline Grid make_grid(double half_length, int n) {
    if (!(half_length > 0.0)) throw ConfigError("grid half-length must be positive");
    if (n < 3) throw ConfigError("grid needs at least 3 points");
    return Grid{half_length, n, 2.0 * half_length / (n - 1)};
}

inline Grid make_grid_spacing(double half_length, double dx) {
    if (!(dx > 0.0)) throw ConfigError("grid spacing must be positive");
    int n = static_cast<int>(std::lround(2.0 * half_length / dx)) + 1;
    return make_grid(half_length, n);
}

using Field = std::vector<double>;

// Solution in the frame xi = x - s t, together with the profile shift.
struct SolutionState {
    double t = 0.0;
    Field u;
    double X = 0.0;   // current shift; X(0) = x0
    double x0 = 0.0;  // initial shift location
};

}  // namespace shocklab
