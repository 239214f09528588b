#include "hsvol/innovations.hpp"

#include "hsvol/error.hpp"

#include <cmath>

namespace hsvol {

namespace {

void require_aligned(const InnovationSeries& innov, const PriceSeries& series) {
    if (innov.size() + 1 != series.size()) {
        throw Error(ErrorKind::MisalignedInput, "innovations (" + std::to_string(innov.size()) +
                                                    ") must have one element fewer than the series (" +
                                                    std::to_string(series.size()) + ")");
    }
}

std::vector<Date> step_dates(const PriceSeries& series) {
    std::vector<Date> dates;
    dates.reserve(series.size() - 1);
    for (std::size_t k = 1; k < series.size(); ++k) {
        dates.push_back(series.date(k));
    }
    return dates;
}

double gamma_at(const LocalVolSpec& lv, double x, std::size_t index) {
    try {
        return lv(x);
    } catch (const Error& e) {
        throw Error(e.kind(), e.what(), index);
    }
}

} // namespace

std::string to_string(ScenarioMode mode) { return mode == ScenarioMode::Standard ? "standard" : "stressed"; }

std::vector<double> filtered_returns(const PriceSeries& series, const LocalVolSpec& lv) {
    const auto& obs = series.observations();
    if (std::holds_alternative<ProportionalVol>(lv.kind())) {
        // the relative-shift model: small or negative levels are a denominator problem
        (void)relative_shifts(series);
    }
    std::vector<double> r;
    r.reserve(obs.size() - 1);
    for (std::size_t k = 1; k < obs.size(); ++k) {
        r.push_back((obs[k].value - obs[k - 1].value) / gamma_at(lv, obs[k - 1].value, k - 1));
    }
    return r;
}

Extraction extract(const PriceSeries& series, const LocalVolSpec& lv, const StochVolSpec& sv, const InitRule& init) {
    const auto& obs = series.observations();
    const auto r = filtered_returns(series, lv);
    auto path = filter_vol(sv, r, init);

    InnovationSeries innov{{}, lv, sv, series.label()};
    innov.values.reserve(r.size());
    for (std::size_t k = 1; k < obs.size(); ++k) {
        const double scale = path[k - 1] * lv(obs[k - 1].value);
        const double dw = (obs[k].value - obs[k - 1].value) / scale;
        if (!std::isfinite(dw)) {
            throw Error(ErrorKind::NonpositiveVolatility, "non-finite innovation at step " + std::to_string(k), k);
        }
        innov.values.push_back(dw);
    }
    return {std::move(innov), std::move(path)};
}

BaseState default_base(const PriceSeries& series, const VolPath& path) { return {series.back(), path.back()}; }

ScenarioSet simulate(const InnovationSeries& innov, const VolPath& vol_path, const PriceSeries& series,
                     const BaseState& base) {
    require_aligned(innov, series);
    if (vol_path.size() != series.size()) {
        throw Error(ErrorKind::MisalignedInput, "volatility path must match the series length");
    }
    if (!(base.v0 > 0.0)) {
        throw Error(ErrorKind::NonpositiveVolatility, "base volatility v0 must be positive");
    }
    const auto& lv = innov.local_vol;
    const double base_scale = base.v0 * lv(base.s0);
    const auto& obs = series.observations();

    ScenarioSet out{base, {}, step_dates(series), ScenarioMode::Standard, lv, innov.stoch_vol};
    out.scenarios.reserve(innov.size());
    for (std::size_t k = 1; k < obs.size(); ++k) {
        const double hist_scale = vol_path[k - 1] * gamma_at(lv, obs[k - 1].value, k - 1);
        out.scenarios.push_back(base.s0 + base_scale / hist_scale * (obs[k].value - obs[k - 1].value));
    }
    return out;
}

ScenarioSet simulate_stressed(const InnovationSeries& innov, const PriceSeries& series, const LocalVolSpec& lv,
                              double base_s0) {
    require_aligned(innov, series);
    const double base_scale = lv(base_s0);
    const auto& obs = series.observations();

    ScenarioSet out{{base_s0, 1.0}, {}, step_dates(series), ScenarioMode::Stressed, lv, innov.stoch_vol};
    out.scenarios.reserve(innov.size());
    for (std::size_t k = 1; k < obs.size(); ++k) {
        const double hist_scale = gamma_at(lv, obs[k - 1].value, k - 1);
        out.scenarios.push_back(base_s0 + base_scale / hist_scale * (obs[k].value - obs[k - 1].value));
    }
    return out;
}

ScenarioSet hybrid_shift(const PriceSeries& series, double base_s0, const std::function<double(double)>& weight,
                         std::optional<double> eps) {
    const auto rel = eps ? relative_shifts(series, *eps) : relative_shifts(series);
    const auto abs = absolute_shifts(series);
    const auto& obs = series.observations();

    ScenarioSet out{{base_s0, 1.0}, {}, step_dates(series), ScenarioMode::Standard, ProportionalVol{1.0},
                    NoStochVol{}};
    out.scenarios.reserve(abs.values.size());
    for (std::size_t k = 1; k < obs.size(); ++k) {
        const double w = weight(obs[k - 1].value);
        out.scenarios.push_back(base_s0 + w * base_s0 * rel.values[k - 1] + (1.0 - w) * abs.values[k - 1]);
    }
    return out;
}

std::vector<double> reconstruct(const InnovationSeries& innov, const VolPath& vol_path, double s_first) {
    if (vol_path.size() != innov.size() + 1) {
        throw Error(ErrorKind::MisalignedInput, "volatility path must have one element more than the innovations");
    }
    std::vector<double> s{s_first};
    s.reserve(innov.size() + 1);
    for (std::size_t k = 1; k <= innov.size(); ++k) {
        s.push_back(s[k - 1] + vol_path[k - 1] * innov.local_vol(s[k - 1]) * innov.values[k - 1]);
    }
    return s;
}

} // namespace hsvol
