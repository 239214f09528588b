#pragma once

#include "hsvol/timeseries.hpp"
#include "hsvol/volatility.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace hsvol {

/// Conditional Gaussian quasi-log-likelihood
///   l = -1/2 sum_k [log v_{k-1}^2 + log gamma^2(S_{k-1}) + dS_k^2 / (v_{k-1}^2 gamma^2(S_{k-1}))]
/// with v filtered from r_k = dS_k / gamma(S_{k-1}) exactly as filter_vol
/// does. `drop_first` conditions on the first step and skips its term.
double qmle_objective(const PriceSeries& series, const LocalVolSpec& lv, const StochVolSpec& sv,
                      const InitRule& init = {}, bool drop_first = false);

/// Names of the natural parameters in the order the gradient reports them:
/// sigma (and alpha, beta for the displaced kind), then a0, a1, b1 for
/// GARCH or lambda for EWMA.
std::vector<std::string> qmle_parameter_names(const LocalVolSpec& lv, const StochVolSpec& sv);
std::vector<double> qmle_parameter_values(const LocalVolSpec& lv, const StochVolSpec& sv);

/// Rebuilds the specs from a vector laid out like qmle_parameter_values.
std::pair<LocalVolSpec, StochVolSpec> qmle_specs_from_values(const LocalVolSpec& lv_shape,
                                                             const StochVolSpec& sv_shape,
                                                             const std::vector<double>& values);

/// Exact gradient of qmle_objective with respect to the natural parameters
/// (forward-mode differentiation of the same recursion).
std::vector<double> qmle_gradient(const PriceSeries& series, const LocalVolSpec& lv, const StochVolSpec& sv,
                                  const InitRule& init = {}, bool drop_first = false);

/// Which parameters fit_qmle may move; the rest stay at the template values.
struct FreeMask {
    bool sigma = false;
    bool alpha = false;
    bool beta = false;
    bool a0 = true;
    bool a1 = true;
    bool b1 = true;
    bool lambda = true;

    /// Comma-separated names, e.g. "a0,a1,b1" or "sigma".
    static FreeMask parse(const std::string& names);
    static FreeMask none() { return {false, false, false, false, false, false, false}; }
};

struct QmleOptions {
    std::size_t max_iterations = 500;
    double param_tolerance = 1e-8;
    double gradient_tolerance = 1e-8;  // on the mean log-likelihood, transformed space
    std::size_t starts = 5;            // first start is the default, the rest are jittered
    std::uint64_t seed = 12345;
    std::size_t min_length = 100;
    bool drop_first = false;
};

struct QmleFit {
    LocalVolSpec local_vol;
    StochVolSpec stoch_vol;
    double loglik = 0.0;
    double start_loglik = 0.0;
    bool converged = false;
    std::size_t iterations = 0;
    double gradient_norm = 0.0;
    std::vector<std::vector<double>> start_points;  // natural parameters, qmle_parameter_names order
    std::string message;
};

/**
 * Maximizes qmle_objective over the free parameters with BFGS in an
 * unconstrained parametrization (log sigma, tanh for alpha, log a0, a
 * logistic persistence/share split for a1 + b1 < 1, logistic lambda), so
 * every iterate is feasible. v_0 follows `init` and is not a free
 * parameter.
 *
 * Throws SeriesTooShort below opts.min_length, ConstraintViolation for an
 * infeasible template and NumericalFailure when the objective is not finite
 * at the start. A flat series returns converged = false.
 */
QmleFit fit_qmle(const PriceSeries& series, const LocalVolSpec& lv_template, const StochVolSpec& sv_template,
                 const FreeMask& free, const InitRule& init = {}, const QmleOptions& opts = {});

} // namespace hsvol
