#pragma once

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cfmid/params.hpp"

namespace cfmid {

enum class DEVariant { exact, approximate };
enum class DEVerdict { identifiable, unidentifiable, undetermined };

inline constexpr double kDefaultDETol = 1e-12;
inline constexpr long kDefaultDEMaxIter = 100000;
inline constexpr double kZeroThresholdExact = 1e-9;
inline constexpr double kZeroThresholdApproximate = 1e-3;

/// Degree-distribution model driving the peeling recursion.
///
/// exact: degree-0/1 UE nodes are removed up front, the AP side is thinned
/// to mean degree big_lambda_t_tilde and epsilon_delta = 1 - A_1.
///
/// approximate: only degree-0 nodes are removed; valid in the
/// big_lambda_r >> 1 regime. Its recursion does not fix z = 0, so the
/// "converged to zero" threshold is coarser (see zero_threshold).
struct DEModel {
    DEVariant variant = DEVariant::exact;
    double big_lambda_t = 0.0;
    double big_lambda_r = 0.0;
    double big_lambda_t_tilde = 0.0;  // equals big_lambda_t for the approximate variant
    double epsilon_delta = 0.0;
    double zero_threshold = kZeroThresholdExact;
};

namespace detail {

// 1 - lambda / (e^lambda - 1), the surviving-AP fraction after the first
// iteration; -> 0 as lambda -> 0.
inline double epsilon_delta_of(double lambda) {
    if (lambda == 0.0) return 0.0;
    return 1.0 - lambda / std::expm1(lambda);
}

}  // namespace detail

inline DEModel make_exact_model(double big_lambda_t, double big_lambda_r) {
    if (!(big_lambda_r > 0.0)) throw std::invalid_argument("big_lambda_r must be > 0");
    if (big_lambda_t < 0.0) throw std::invalid_argument("big_lambda_t must be >= 0");
    DEModel m;
    m.variant = DEVariant::exact;
    m.big_lambda_t = big_lambda_t;
    m.big_lambda_r = big_lambda_r;
    m.big_lambda_t_tilde = big_lambda_t * (1.0 - big_lambda_r * std::exp(-big_lambda_r));
    m.epsilon_delta = detail::epsilon_delta_of(m.big_lambda_t_tilde);
    m.zero_threshold = kZeroThresholdExact;
    return m;
}

inline DEModel make_approximate_model(double big_lambda_t, double big_lambda_r) {
    if (!(big_lambda_r > 0.0)) throw std::invalid_argument("big_lambda_r must be > 0");
    if (big_lambda_t < 0.0) throw std::invalid_argument("big_lambda_t must be >= 0");
    DEModel m;
    m.variant = DEVariant::approximate;
    m.big_lambda_t = big_lambda_t;
    m.big_lambda_r = big_lambda_r;
    m.big_lambda_t_tilde = big_lambda_t;
    m.epsilon_delta = detail::epsilon_delta_of(big_lambda_t);
    m.zero_threshold = kZeroThresholdApproximate;
    return m;
}

inline DEModel make_de_model(const NetworkParams& params, int group_index, DEVariant variant) {
    const DensityParams d = derive_density_params(params, group_index);
    return variant == DEVariant::exact ? make_exact_model(d.big_lambda_t, d.big_lambda_r)
                                       : make_approximate_model(d.big_lambda_t, d.big_lambda_r);
}

namespace detail {

inline void require_unit_interval(double x, const char* what) {
    if (!(x >= -1e-12 && x <= 1.0 + 1e-12)) throw std::domain_error(std::string(what) + " outside [0,1]");
}

}  // namespace detail

/// UE-side edge-perspective degree generating function evaluated at x.
/// exact:       (e^{-L_R(1-x)} - e^{-L_R}) / (1 - e^{-L_R})
/// approximate: e^{-L_R(1-x)}
inline double beta_edge(double x, const DEModel& m) {
    detail::require_unit_interval(x, "beta_edge argument");
    const double lr = m.big_lambda_r;
    if (m.variant == DEVariant::approximate) return std::exp(-lr * (1.0 - x));
    return std::exp(-lr * (1.0 - x)) * std::expm1(-lr * x) / std::expm1(-lr);
}

/// AP-side edge-perspective degree generating function: e^{-L~(1-x)} with
/// the thinned mean for the exact variant, the raw mean for the approximate.
inline double alpha_edge(double x, const DEModel& m) {
    detail::require_unit_interval(x, "alpha_edge argument");
    return std::exp(-m.big_lambda_t_tilde * (1.0 - x));
}

/// One step of the recursion: f(z) = epsilon_delta * beta(1 - alpha(1 - z)).
/// For the approximate variant this collapses to the closed form
/// eps^ * e^{-L_R e^{-L_T z}} (which is nonzero at z = 0).
inline double de_step(double z, const DEModel& m) {
    if (!(z >= -1e-15 && z <= m.epsilon_delta + 1e-12))
        throw std::domain_error("de_step argument outside [0, epsilon_delta]");
    if (m.variant == DEVariant::approximate)
        return m.epsilon_delta * std::exp(-m.big_lambda_r * std::exp(-m.big_lambda_t * z));
    // 1 - alpha(1-z) = -expm1(-L~ z), computed directly so z = 0 maps to 0 exactly
    const double y = -std::expm1(-m.big_lambda_t_tilde * z);
    return m.epsilon_delta * beta_edge(y, m);
}

struct DensityEvolutionTrace {
    std::vector<double> iterates;  // z^(1), z^(2), ...
    double converged_value = 0.0;
    DEVerdict verdict = DEVerdict::undetermined;
    long iterations_used = 0;
};

struct FixedPointEstimate {
    double value = 0.0;
    bool converged = false;
    long iterations = 0;
};

/// Runs z <- f(z) from z^(1) = epsilon_delta without storing the trace.
inline FixedPointEstimate fixed_point(const DEModel& m, double tol = kDefaultDETol,
                                      long max_iter = kDefaultDEMaxIter) {
    if (!(tol > 0.0)) throw std::invalid_argument("tol must be > 0");
    double z = m.epsilon_delta;
    for (long it = 1; it <= max_iter; ++it) {
        const double next = de_step(z, m);
        if (std::abs(next - z) < tol) return {next, true, it};
        z = next;
    }
    return {z, false, max_iter};
}

/// Full recursion with trace. The sequence starts at epsilon_delta and is
/// non-increasing; the verdict compares the limit against the variant's
/// zero threshold, and a run that is still moving at max_iter is reported
/// as undetermined rather than guessed.
inline DensityEvolutionTrace iterate(const DEModel& m, double tol = kDefaultDETol,
                                     long max_iter = kDefaultDEMaxIter) {
    if (!(tol > 0.0)) throw std::invalid_argument("tol must be > 0");
    DensityEvolutionTrace trace;
    double z = m.epsilon_delta;
    trace.iterates.push_back(z);
    if (z < m.zero_threshold) {
        trace.converged_value = z;
        trace.verdict = DEVerdict::identifiable;
        return trace;
    }
    for (long it = 1; it <= max_iter; ++it) {
        const double next = de_step(z, m);
        if (next > z + 1e-14)
            throw std::logic_error("density-evolution trace is not non-increasing");
        trace.iterates.push_back(next);
        trace.iterations_used = it;
        if (std::abs(next - z) < tol) {
            trace.converged_value = next;
            trace.verdict =
                next < m.zero_threshold ? DEVerdict::identifiable : DEVerdict::unidentifiable;
            return trace;
        }
        z = next;
    }
    trace.converged_value = z;
    trace.verdict = DEVerdict::undetermined;
    return trace;
}

namespace detail {

// Golden-section minimisation of z - f(z) on [a, b].
inline double min_margin_on(const DEModel& m, double a, double b) {
    constexpr double inv_phi = 0.61803398874989484820;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    auto margin = [&](double z) { return z - de_step(z, m); };
    double f1 = margin(x1), f2 = margin(x2);
    for (int i = 0; i < 160 && b - a > 1e-15; ++i) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = margin(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = margin(x2);
        }
    }
    return std::min(f1, f2);
}

}  // namespace detail

/// Iteration-free classification used to cross-check iterate().
///
/// exact variant: identifiable iff z - f(z) > 0 on a grid over
/// (0, epsilon_delta], with a golden-section refinement around the
/// smallest margin when it falls under 10 grid spacings (tangency guard).
///
/// approximate variant: f(0) > 0 makes the grid criterion meaningless, so
/// the documented convention applies: identifiable iff the iteration limit
/// falls below the variant's zero threshold.
inline DEVerdict classify(const DEModel& m, long grid_points = 10000) {
    if (grid_points < 1000) throw std::invalid_argument("grid_points must be >= 1000");
    if (m.variant == DEVariant::approximate) {
        const FixedPointEstimate fp = fixed_point(m);
        return (fp.converged && fp.value < m.zero_threshold) ? DEVerdict::identifiable
                                                             : DEVerdict::unidentifiable;
    }
    const double eps = m.epsilon_delta;
    if (eps <= 0.0) return DEVerdict::identifiable;
    const double spacing = eps / double(grid_points);
    double min_margin = std::numeric_limits<double>::infinity();
    long argmin = 1;
    for (long i = 1; i <= grid_points; ++i) {
        const double z = eps * double(i) / double(grid_points);
        const double margin = z - de_step(z, m);
        if (margin <= 0.0) return DEVerdict::unidentifiable;
        if (margin < min_margin) {
            min_margin = margin;
            argmin = i;
        }
    }
    if (min_margin < 10.0 * spacing) {
        const double lo = eps * double(std::max<long>(1, argmin - 1)) / double(grid_points);
        const double hi = eps * double(std::min(grid_points, argmin + 1)) / double(grid_points);
        if (detail::min_margin_on(m, lo, hi) <= 0.0) return DEVerdict::unidentifiable;
    }
    return DEVerdict::identifiable;
}

inline const char* to_string(DEVerdict v) {
    switch (v) {
        case DEVerdict::identifiable: return "identifiable";
        case DEVerdict::unidentifiable: return "unidentifiable";
        default: return "undetermined";
    }
}

inline void write_trace_csv(const DensityEvolutionTrace& trace, std::ostream& os) {
    os << "iter,z\n";
    char buf[48];
    for (std::size_t i = 0; i < trace.iterates.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%zu,%.12g\n", i + 1, trace.iterates[i]);
        os << buf;
    }
}

}  // namespace cfmid
