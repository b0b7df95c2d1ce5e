#pragma once

#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "cfmid/density_evolution.hpp"
#include "cfmid/params.hpp"

namespace cfmid {

/// Principal branch of the Lambert W function (W e^W = x, W >= -1), defined
/// for x >= -1/e. Halley iteration from a branch-appropriate initial guess;
/// a square-root series supplies the guess near the branch point. Arguments
/// within 1e-12 below -1/e are clamped to the branch point.
inline double lambert_w0(double x) {
    constexpr double inv_e = 0.36787944117144232160;
    if (!(x >= -inv_e - 1e-12)) throw std::domain_error("lambert_w0 argument below -1/e");
    if (x <= -inv_e) return -1.0;
    if (x == 0.0) return 0.0;

    double w;
    if (x < -0.25) {
        // series around the branch point in p = sqrt(2(1 + e x))
        const double p = std::sqrt(2.0 * (1.0 + std::exp(1.0) * x));
        w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
    } else if (x < std::exp(1.0)) {
        w = x / std::exp(1.0);  // crude but inside the basin
    } else {
        const double lx = std::log(x);
        w = lx - std::log(lx);
    }
    for (int i = 0; i < 64; ++i) {
        const double ew = std::exp(w);
        const double f = w * ew - x;
        const double denom = ew * (w + 1.0) - (w + 2.0) * f / (2.0 * w + 2.0);
        const double step = f / denom;
        w -= step;
        if (std::abs(step) <= 1e-16 * (1.0 + std::abs(w))) break;
    }
    const double residual = std::abs(w * std::exp(w) - x);
    if (!(residual <= 1e-12 * std::max(1.0, std::abs(x))))
        throw std::runtime_error("lambert_w0 failed to converge");
    return w;
}

/// Closed-form critical point of the approximate recursion for a given
/// big_lambda_t: the tangency of f^ with the bisector,
///   z*        = eps^ * e^{W(-1 / (L_T eps^))}
///   L_R*      = -ln(z*/eps^) * e^{L_T z*}
/// Exists only when L_T * eps^ >= e. Tangency residuals are recomputed and
/// stored so callers can see how tight the solution is.
struct ThresholdResult {
    double big_lambda_t = 0.0;
    double epsilon_delta_hat = 0.0;
    bool exists = false;
    double big_lambda_r_crit = std::numeric_limits<double>::quiet_NaN();
    double z_crit = std::numeric_limits<double>::quiet_NaN();
    double lambda_r_crit = std::numeric_limits<double>::quiet_NaN();  // set when gamma given
    double tangency_residual_value = std::numeric_limits<double>::quiet_NaN();
    double tangency_residual_slope = std::numeric_limits<double>::quiet_NaN();
};

inline ThresholdResult critical_lambda_r(double big_lambda_t,
                                         std::optional<double> gamma = std::nullopt) {
    if (!(big_lambda_t > 0.0)) throw std::invalid_argument("big_lambda_t must be > 0");
    ThresholdResult r;
    r.big_lambda_t = big_lambda_t;
    r.epsilon_delta_hat = detail::epsilon_delta_of(big_lambda_t);

    const double arg = -1.0 / (big_lambda_t * r.epsilon_delta_hat);
    if (arg < -std::exp(-1.0) - 1e-12) {
        r.exists = false;
        return r;
    }
    r.exists = true;
    const double w = lambert_w0(arg);
    r.z_crit = r.epsilon_delta_hat * std::exp(w);
    r.big_lambda_r_crit = -w * std::exp(big_lambda_t * r.z_crit);

    const DEModel m = make_approximate_model(big_lambda_t, r.big_lambda_r_crit);
    const double f = de_step(r.z_crit, m);
    const double slope = f * r.big_lambda_r_crit * big_lambda_t * std::exp(-big_lambda_t * r.z_crit);
    r.tangency_residual_value = std::abs(f - r.z_crit);
    r.tangency_residual_slope = std::abs(slope - 1.0);
    if (!(r.tangency_residual_value <= 1e-9) || !(r.tangency_residual_slope <= 1e-9))
        throw std::runtime_error("tangency residual above 1e-9: critical point lost precision");

    if (gamma) {
        if (!(*gamma > 0.0)) throw std::invalid_argument("gamma must be > 0");
        r.lambda_r_crit = r.big_lambda_r_crit / (std::numbers::pi * *gamma * *gamma);
    }
    return r;
}

/// Root of L_T * eps^(L_T) = e: below it no tangency (hence no finite
/// critical AP density) exists. Bisection to 1e-9.
inline double existence_boundary() {
    auto g = [](double lt) { return lt * detail::epsilon_delta_of(lt) - std::exp(1.0); };
    double lo = 3.0, hi = 3.5;
    for (int i = 0; i < 200 && hi - lo > 1e-9; ++i) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

/// Inverse threshold: the largest big_lambda_t whose critical AP mean degree
/// stays at or below the given big_lambda_r. Empty when big_lambda_r is
/// below the infimum of L_R* (which is e, attained at the existence
/// boundary). Relies on monotonicity of L_R* in L_T, which is spot-checked
/// on the bracket before bisecting.
inline std::optional<double> critical_lambda_t(double big_lambda_r) {
    if (!(big_lambda_r > 0.0)) throw std::invalid_argument("big_lambda_r must be > 0");
    const double lt_min = existence_boundary() + 1e-9;
    auto lr_of = [](double lt) { return critical_lambda_r(lt).big_lambda_r_crit; };
    if (lr_of(lt_min) > big_lambda_r) return std::nullopt;

    double lo = lt_min, hi = lt_min;
    double step = 1.0;
    while (lr_of(hi) <= big_lambda_r) {
        lo = hi;
        hi += step;
        step *= 2.0;
        if (hi > 700.0) throw std::runtime_error("critical_lambda_t bracket ran away");
    }
    double probe = lr_of(lo);
    for (double t = 0.25; t < 1.0; t += 0.25) {
        const double v = lr_of(lo + t * (hi - lo));
        if (v < probe) throw std::runtime_error("critical L_R not monotone on bracket");
        probe = v;
    }
    while (hi - lo > 1e-8 * hi) {
        const double mid = 0.5 * (lo + hi);
        (lr_of(mid) <= big_lambda_r ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

struct RegionPoint {
    double gamma = 0.0;
    double lambda_t = 0.0;
    double big_lambda_t = 0.0;
    bool exists = false;
    double big_lambda_r_crit = std::numeric_limits<double>::quiet_NaN();
    double lambda_r_crit = std::numeric_limits<double>::quiet_NaN();
    double z_crit = std::numeric_limits<double>::quiet_NaN();
    double epsilon_delta_hat = std::numeric_limits<double>::quiet_NaN();
};

/// Identifiability-region curve lambda_R*(lambda_T) for one radius. Grid
/// points below the existence boundary are emitted with exists=false.
inline std::vector<RegionPoint> region_curve(double gamma, const std::vector<double>& lambda_t_grid) {
    if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be > 0");
    const double disc_area = std::numbers::pi * gamma * gamma;
    std::vector<RegionPoint> out;
    out.reserve(lambda_t_grid.size());
    for (double lt : lambda_t_grid) {
        if (!(lt > 0.0)) throw std::invalid_argument("lambda_t grid values must be > 0");
        RegionPoint pt;
        pt.gamma = gamma;
        pt.lambda_t = lt;
        pt.big_lambda_t = lt * disc_area;
        const ThresholdResult r = critical_lambda_r(pt.big_lambda_t, gamma);
        pt.exists = r.exists;
        pt.epsilon_delta_hat = r.epsilon_delta_hat;
        if (r.exists) {
            pt.big_lambda_r_crit = r.big_lambda_r_crit;
            pt.lambda_r_crit = r.lambda_r_crit;
            pt.z_crit = r.z_crit;
        }
        out.push_back(pt);
    }
    return out;
}

inline void write_region_csv(const std::vector<RegionPoint>& points, std::ostream& os) {
    os << "gamma,lambda_t,Lambda_t,exists,Lambda_r_crit,lambda_r_crit,z_crit,epsilon_delta_hat\n";
    char buf[256];
    for (const auto& p : points) {
        std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%d,%.12g,%.12g,%.12g,%.12g\n", p.gamma,
                      p.lambda_t, p.big_lambda_t, p.exists ? 1 : 0, p.big_lambda_r_crit,
                      p.lambda_r_crit, p.z_crit, p.epsilon_delta_hat);
        os << buf;
    }
}

/// Pilot dimensioning: smallest T_p such that an equal split of the total
/// UE intensity puts every group strictly inside the identifiable region at
/// the given AP intensity. No finite T_p works when lambda_r is below the
/// existence infimum.
struct PilotPlan {
    bool exists = false;
    int t_p = 0;
    double lambda_t_star = std::numeric_limits<double>::quiet_NaN();  // per-group critical intensity
};

inline PilotPlan min_pilots(double lambda_t_total, double lambda_r, double gamma) {
    if (!(lambda_t_total > 0.0) || !(lambda_r > 0.0) || !(gamma > 0.0))
        throw std::invalid_argument("min_pilots requires positive inputs");
    const double disc_area = std::numbers::pi * gamma * gamma;
    const std::optional<double> lt_crit = critical_lambda_t(lambda_r * disc_area);
    if (!lt_crit) return {};
    PilotPlan plan;
    plan.exists = true;
    plan.lambda_t_star = *lt_crit / disc_area;
    plan.t_p = static_cast<int>(std::floor(lambda_t_total / plan.lambda_t_star)) + 1;
    return plan;
}

}  // namespace cfmid
