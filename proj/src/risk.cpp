#include "hsvol/risk.hpp"

#include "hsvol/chi_square.hpp"
#include "hsvol/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hsvol {

namespace {

void require_confidence(double confidence) {
    if (!(confidence > 0.5 && confidence < 1.0)) {
        throw Error(ErrorKind::InvalidParameter, "confidence must lie in (0.5, 1)");
    }
}

// x log(x / y) with the 0 log 0 = 0 convention.
double xlogratio(double x, double num, double den) {
    if (x == 0.0) {
        return 0.0;
    }
    return x * std::log(num / den);
}

} // namespace

std::string to_string(QuantileRule rule) { return rule == QuantileRule::Lower ? "lower" : "interpolated"; }

std::vector<double> pnl(const ScenarioSet& scen) {
    std::vector<double> out;
    out.reserve(scen.size());
    for (double s : scen.scenarios) {
        out.push_back(s - scen.base.s0);
    }
    return out;
}

std::size_t lower_quantile_index(double confidence, std::size_t n) {
    const double target = (1.0 - confidence) * static_cast<double>(n);
    const double nearest = std::round(target);
    // (1 - c) n often lands a few ulps above an integer, e.g. 0.95 with n = 100.
    double idx = std::abs(target - nearest) <= 1e-9 * std::max(1.0, target) ? nearest : std::ceil(target);
    idx = std::clamp(idx, 1.0, static_cast<double>(n));
    return static_cast<std::size_t>(idx);
}

VaRReport var_from_pnl(std::span<const double> values, double confidence, QuantileRule rule, ScenarioMode mode) {
    require_confidence(confidence);
    if (values.empty()) {
        throw Error(ErrorKind::EmptyScenarios, "VaR needs at least one scenario");
    }
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();

    VaRReport report{confidence, 0.0, n, mode, rule, std::nullopt};
    if (rule == QuantileRule::Lower) {
        report.var_value = -sorted[lower_quantile_index(confidence, n) - 1];
    } else {
        const double h = (1.0 - confidence) * static_cast<double>(n - 1);
        const auto lo = static_cast<std::size_t>(std::floor(h));
        const auto hi = std::min(lo + 1, n - 1);
        const double frac = h - static_cast<double>(lo);
        report.var_value = -(sorted[lo] + frac * (sorted[hi] - sorted[lo]));
    }
    const auto needed = static_cast<std::size_t>(std::ceil(1.0 / (1.0 - confidence) - 1e-9));
    if (n < needed) {
        report.warning = "quantile outside sample resolution: " + std::to_string(n) + " scenarios, " +
                         std::to_string(needed) + " needed";
    }
    if (report.var_value == 0.0) {
        report.var_value = 0.0;  // no negative zero in reports
    }
    return report;
}

VaRReport var(const ScenarioSet& scen, double confidence, QuantileRule rule) {
    const auto values = pnl(scen);
    return var_from_pnl(values, confidence, rule, scen.mode);
}

ScenarioSet stressed_scenarios(const PriceSeries& series, const LocalVolSpec& lv, const DateWindow& window,
                               std::optional<double> base_s0) {
    const auto sub = series.window(window.from, window.to);
    const auto extraction = extract(sub, lv, NoStochVol{});
    return simulate_stressed(extraction.innovations, sub, lv, base_s0.value_or(series.back()));
}

VaRReport stressed_var(const PriceSeries& series, const LocalVolSpec& lv, const DateWindow& window,
                       std::optional<double> base_s0, double confidence, QuantileRule rule) {
    return var(stressed_scenarios(series, lv, window, base_s0), confidence, rule);
}

BacktestReport kupiec_backtest(std::size_t exceptions, std::size_t n, double confidence) {
    if (n == 0) {
        throw Error(ErrorKind::InvalidParameter, "backtest needs at least one observation");
    }
    if (exceptions > n) {
        throw Error(ErrorKind::InvalidParameter, "exceptions cannot exceed observations");
    }
    if (!(confidence > 0.0 && confidence < 1.0)) {
        throw Error(ErrorKind::InvalidParameter, "confidence must lie in (0, 1)");
    }
    const double p = 1.0 - confidence;
    const double x = static_cast<double>(exceptions);
    const double nn = static_cast<double>(n);
    const double observed = x / nn;

    BacktestReport report{n, exceptions, confidence, 0.0, 1.0};
    // Rates equal up to the representation error of 1 - confidence.
    if (std::abs(observed - p) <= 8.0 * std::numeric_limits<double>::epsilon() * std::max(p, observed)) {
        return report;
    }
    const double lr = -2.0 * (xlogratio(nn - x, 1.0 - p, 1.0 - observed) + xlogratio(x, p, observed));
    report.lr_pof = std::max(0.0, lr);
    report.p_value = chi_square_survival(report.lr_pof, 1.0);
    return report;
}

} // namespace hsvol
