#pragma once

#include "hsvol/timeseries.hpp"
#include "hsvol/volatility.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace hsvol {

/// Extracted increments dW_k, k = 1..N, stored at values[k-1] and dated at
/// the later day of each pair.
struct InnovationSeries {
    std::vector<double> values;
    LocalVolSpec local_vol;
    StochVolSpec stoch_vol;
    std::string source_label;

    [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
};

struct Extraction {
    InnovationSeries innovations;
    VolPath vol_path;
};

/// Filtered returns r_k = (S_k - S_{k-1}) / gamma(S_{k-1}).
std::vector<double> filtered_returns(const PriceSeries& series, const LocalVolSpec& lv);

/// dW_k = (S_k - S_{k-1}) / (v_{k-1} gamma(S_{k-1})) with v filtered from
/// the returns above (v = 1 without stochastic volatility).
Extraction extract(const PriceSeries& series, const LocalVolSpec& lv, const StochVolSpec& sv,
                   const InitRule& init = {});

struct BaseState {
    double s0 = 0.0;
    double v0 = 1.0;
};

/// Last observation and final filtered volatility.
BaseState default_base(const PriceSeries& series, const VolPath& path);

enum class ScenarioMode { Standard, Stressed };

std::string to_string(ScenarioMode mode);

struct ScenarioSet {
    BaseState base;
    std::vector<double> scenarios;  // scenarios[k-1] is S~_k
    std::vector<Date> dates;        // date of observation k
    ScenarioMode mode = ScenarioMode::Standard;
    LocalVolSpec local_vol;
    StochVolSpec stoch_vol;

    [[nodiscard]] std::size_t size() const noexcept { return scenarios.size(); }
};

/// S~_k = S_0 + (v_0 gamma(S_0)) / (v_{k-1} gamma(S_{k-1})) (S_k - S_{k-1}).
ScenarioSet simulate(const InnovationSeries& innov, const VolPath& vol_path, const PriceSeries& series,
                     const BaseState& base);

/// Stressed scenarios keep the historical volatility level:
/// S_0 + gamma(S_0) / gamma(S_{k-1}) (S_k - S_{k-1}).
ScenarioSet simulate_stressed(const InnovationSeries& innov, const PriceSeries& series, const LocalVolSpec& lv,
                              double base_s0);

/// S~_k = S_0 + w(S_{k-1}) S_0 r^rel_k + (1 - w(S_{k-1})) r^abs_k for a
/// caller-supplied interpolation weight w. The returned set carries a
/// proportional placeholder model since no volatility function is implied.
ScenarioSet hybrid_shift(const PriceSeries& series, double base_s0, const std::function<double(double)>& weight,
                         std::optional<double> eps = std::nullopt);

/// S_k = S_{k-1} + v_{k-1} gamma(S_{k-1}) dW_k for k = 1..N, starting at s_first.
std::vector<double> reconstruct(const InnovationSeries& innov, const VolPath& vol_path, double s_first);

} // namespace hsvol
