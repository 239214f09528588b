#pragma once

#include "hsvol/innovations.hpp"
#include "hsvol/timeseries.hpp"
#include "hsvol/volatility.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hsvol {

enum class QuantileRule {
    Lower,         // order statistic at ceil((1 - c) n), no interpolation
    Interpolated,  // linear between neighbouring order statistics at (1 - c)(n - 1)
};

std::string to_string(QuantileRule rule);

struct VaRReport {
    double confidence = 0.99;
    double var_value = 0.0;  // positive = loss
    std::size_t n_scenarios = 0;
    ScenarioMode mode = ScenarioMode::Standard;
    QuantileRule quantile_rule = QuantileRule::Lower;
    std::optional<std::string> warning;
};

struct BacktestReport {
    std::size_t n = 0;
    std::size_t exceptions = 0;
    double confidence = 0.99;
    double lr_pof = 0.0;
    double p_value = 1.0;
};

/// P&L_k = S~_k - S_0.
std::vector<double> pnl(const ScenarioSet& scen);

/// 1-indexed ascending order statistic used by the lower rule.
std::size_t lower_quantile_index(double confidence, std::size_t n);

VaRReport var_from_pnl(std::span<const double> pnl, double confidence, QuantileRule rule = QuantileRule::Lower,
                       ScenarioMode mode = ScenarioMode::Standard);

VaRReport var(const ScenarioSet& scen, double confidence, QuantileRule rule = QuantileRule::Lower);

struct DateWindow {
    Date from;
    Date to;
};

/// Restrict to the window, extract without stochastic volatility and replay
/// the window's steps from base_s0 (default: last observation of the full
/// series) with local-volatility scaling only.
ScenarioSet stressed_scenarios(const PriceSeries& series, const LocalVolSpec& lv, const DateWindow& window,
                               std::optional<double> base_s0 = std::nullopt);

VaRReport stressed_var(const PriceSeries& series, const LocalVolSpec& lv, const DateWindow& window,
                       std::optional<double> base_s0, double confidence,
                       QuantileRule rule = QuantileRule::Lower);

/// Kupiec proportion-of-failures likelihood ratio with chi-square(1) p-value.
BacktestReport kupiec_backtest(std::size_t exceptions, std::size_t n, double confidence);

} // namespace hsvol
