#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hsvol {

struct TestResult {
    std::string name;  // "ljung_box" or "arch_lm"
    double statistic = 0.0;
    std::size_t df = 0;
    double p_value = 1.0;
    std::size_t lags = 0;
};

/// Sample autocorrelation at `lag`: mean-subtracted, biased (1/n) denominator.
/// Throws ZeroVariance for a constant input.
double autocorrelation(std::span<const double> x, std::size_t lag);

/// Q = n (n + 2) sum_{k=1}^{h} rho_k^2 / (n - k), chi-square(h) p-value.
TestResult ljung_box(std::span<const double> x, std::size_t lags = 10);

/**
 * Engle's ARCH-LM test: n_eff R^2 from regressing x_t^2 on a constant and
 * h lagged squares, with n_eff = n - h. The input is used as-is (innovations
 * are zero-mean under the model); a constant regressand gives statistic 0.
 *
 * The normal equations carry a ridge of 1e-12 * trace(X'X) so collinear
 * regressors do not break the solve.
 */
TestResult arch_lm(std::span<const double> x, std::size_t lags = 10);

enum class Verdict { Pass, Warn, Fail };

std::string to_string(Verdict verdict);

struct TestOutcome {
    std::string name;
    std::size_t lags = 0;
    std::optional<TestResult> result;
    std::optional<std::string> error_kind;  // set when the test could not be computed
    std::optional<std::string> error_message;
};

struct DiagnosticsReport {
    std::vector<TestOutcome> tests;
    double significance = 0.05;
    Verdict verdict = Verdict::Pass;
};

/// Runs both tests. Fail if any p-value is below `significance`, warn if a
/// test could not be computed, pass otherwise.
DiagnosticsReport diagnose(std::span<const double> innovations, std::size_t lags = 10,
                           double significance = 0.05);

} // namespace hsvol
