// Acceptance checks for the volatility-scaled historical simulation engine.
// Prints one PASS/FAIL line per criterion and exits nonzero if any fail.

#include "hsvol/diagnostics.hpp"
#include "hsvol/estimation.hpp"
#include "hsvol/innovations.hpp"
#include "hsvol/risk.hpp"
#include "support/synthetic.hpp"

#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <future>
#include <sstream>
#include <string>
#include <vector>

using namespace hsvol;
using hsvol::testing::rel_close;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;
};

std::string fmt(double x) {
    std::ostringstream out;
    out.precision(6);
    out << x;
    return out.str();
}

double max_rel_error(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) return INFINITY;
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == b[i]) continue;
        worst = std::max(worst, std::abs(a[i] - b[i]) / std::max(std::abs(a[i]), std::abs(b[i])));
    }
    return worst;
}

Outcome shift_rule_equivalence() {
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const auto v = testing::random_positive_path(seed, 250);
        const auto s = PriceSeries::from_values(v);
        const double s0 = v.back();
        std::vector<double> abs_expected;
        std::vector<double> rel_expected;
        for (std::size_t k = 1; k < v.size(); ++k) {
            abs_expected.push_back(s0 + (v[k] - v[k - 1]));
            rel_expected.push_back(s0 * (1.0 + (v[k] - v[k - 1]) / v[k - 1]));
        }
        const auto c = extract(s, ConstantVol{1.3}, NoStochVol{});
        const auto p = extract(s, ProportionalVol{0.7}, NoStochVol{});
        worst = std::max(worst, max_rel_error(simulate(c.innovations, c.vol_path, s, {s0, 1.0}).scenarios, abs_expected));
        worst = std::max(worst, max_rel_error(simulate(p.innovations, p.vol_path, s, {s0, 1.0}).scenarios, rel_expected));
    }
    return {worst <= 1e-12, "100 paths, max rel error " + fmt(worst)};
}

Outcome historical_consistency() {
    std::vector<LocalVolSpec> specs{ConstantVol{1.0}, ProportionalVol{0.5}};
    for (double alpha : {0.0, 0.3, 0.7, 1.0}) specs.push_back(DisplacedVol{alpha, 80.0, 0.4});
    const std::vector<StochVolSpec> filters{NoStochVol{}, GarchVol{1e-2, 0.1, 0.85}};
    double worst = 0.0;
    std::size_t checked = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto v = testing::random_positive_path(seed, 250);
        const auto s = PriceSeries::from_values(v);
        for (const auto& lv : specs) {
            for (const auto& sv : filters) {
                const auto ex = extract(s, lv, sv);
                for (std::size_t k = 1; k < v.size(); ++k) {
                    const auto scen = simulate(ex.innovations, ex.vol_path, s, {v[k - 1], ex.vol_path[k - 1]});
                    worst = std::max(worst, max_rel_error({scen.scenarios[k - 1]}, {v[k]}));
                    ++checked;
                }
            }
        }
    }
    return {worst <= 1e-12, std::to_string(checked) + " steps over 12 specs, max rel error " + fmt(worst)};
}

Outcome displaced_identity() {
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        const auto v = testing::random_positive_path(seed, 250);
        const auto s = PriceSeries::from_values(v);
        const double s0 = v.back() * 1.01;  // never equal to a historical level
        const double alpha = 0.1 + 0.016 * static_cast<double>(seed);
        const LocalVolSpec lv = DisplacedVol{alpha, 90.0, 0.3};
        const auto ex = extract(s, lv, NoStochVol{});
        const auto scaled = simulate(ex.innovations, ex.vol_path, s, {s0, 1.0});
        const auto hybrid = hybrid_shift(s, s0, [&](double prev) { return alpha_from_vol_ratio(s0, prev, lv); });
        worst = std::max(worst, max_rel_error(hybrid.scenarios, scaled.scenarios));
    }
    return {worst <= 1e-12, "50 paths, max rel error " + fmt(worst)};
}

Outcome fhs_equivalence() {
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto gen = testing::generate_lsv(
            seed, 500, [](double x) { return x; }, 1e-6, 0.08, 0.9, 100.0, std::sqrt(5e-5));
        const auto& v = gen.prices;
        const auto s = PriceSeries::from_values(v);
        const StochVolSpec sv = GarchVol{1e-6, 0.08, 0.9};
        const auto ex = extract(s, ProportionalVol{1.0}, sv);
        const auto scen = simulate(ex.innovations, ex.vol_path, s, default_base(s, ex.vol_path));

        // independent GARCH filter on relative returns
        std::vector<double> vol{std::sqrt(1e-6 / 0.02)};
        for (std::size_t k = 1; k < v.size(); ++k) {
            const double r = (v[k] - v[k - 1]) / v[k - 1];
            vol.push_back(std::sqrt(1e-6 + 0.08 * r * r + 0.9 * vol.back() * vol.back()));
        }
        const double s0 = v.back();
        std::vector<double> expected;
        for (std::size_t k = 1; k < v.size(); ++k) {
            expected.push_back(s0 + s0 * (vol.back() / vol[k - 1]) * (v[k] - v[k - 1]) / v[k - 1]);
        }
        worst = std::max(worst, max_rel_error(scen.scenarios, expected));
    }
    return {worst <= 1e-12, "20 paths, max rel error " + fmt(worst)};
}

Outcome stressed_reduction() {
    std::size_t mismatches = 0;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        const auto s = PriceSeries::from_values(testing::random_positive_path(seed, 250));
        for (const LocalVolSpec& lv :
             {LocalVolSpec(ConstantVol{2.0}), LocalVolSpec(ProportionalVol{0.3}), LocalVolSpec(DisplacedVol{0.5, 70.0, 1.0})}) {
            const auto ex = extract(s, lv, NoStochVol{});
            const auto standard = simulate(ex.innovations, ex.vol_path, s, {s.back(), 1.0});
            const auto stressed = simulate_stressed(ex.innovations, s, lv, s.back());
            mismatches += standard.scenarios == stressed.scenarios ? 0 : 1;
        }
    }
    return {mismatches == 0, "150 path/spec pairs, " + std::to_string(mismatches) + " not bit-identical"};
}

Outcome scale_invariance() {
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        const auto v = testing::random_positive_path(seed, 250);
        const auto s = PriceSeries::from_values(v);
        const LocalVolSpec lv = DisplacedVol{0.4, 80.0, 0.2};
        const auto ex = extract(s, lv, EwmaVol{0.94}, InitRule::fixed(0.05));
        const auto base = simulate(ex.innovations, ex.vol_path, s, default_base(s, ex.vol_path));

        // sigma -> 10 sigma shrinks filtered returns tenfold, so the filter is restarted at v0 / 10
        const auto big = extract(s, lv.with_sigma(2.0), EwmaVol{0.94}, InitRule::fixed(0.005));
        const auto sigma_scaled = simulate(big.innovations, big.vol_path, s, default_base(s, big.vol_path));

        auto path = ex.vol_path;
        for (auto& x : path.values) x *= 3.0;
        const auto v_scaled = simulate(ex.innovations, path, s, {v.back(), path.back()});

        worst = std::max(worst, max_rel_error(base.scenarios, sigma_scaled.scenarios));
        worst = std::max(worst, max_rel_error(base.scenarios, v_scaled.scenarios));
    }
    return {worst <= 1e-12, "50 paths, max rel error " + fmt(worst)};
}

Outcome ewma_closed_form() {
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto r = testing::normal_sample(seed, 1000);
        for (double lambda : {0.9, 0.94, 0.99}) {
            const auto path = filter_vol(EwmaVol{lambda}, r, InitRule::fixed(1.0));
            worst = std::max(worst, max_rel_error(path.values, testing::ewma_closed_form(r, lambda, 1.0)));
        }
    }
    return {worst <= 1e-10, "15 paths of 1000 steps, max rel error " + fmt(worst)};
}

Outcome qmle_recovery() {
    std::vector<std::future<bool>> jobs;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        jobs.push_back(std::async(std::launch::async, [seed] {
            const auto gen = testing::generate_lsv(
                1000 + seed, 5000, [](double x) { return x; }, 1e-6, 0.08, 0.9, 100.0, std::sqrt(5e-5));
            const auto s = PriceSeries::from_values(gen.prices);
            QmleOptions opts;
            opts.seed = seed;
            const auto fit = fit_qmle(s, ProportionalVol{1.0}, GarchVol{1e-6, 0.05, 0.9}, FreeMask{}, {}, opts);
            const auto& g = std::get<GarchVol>(fit.stoch_vol.kind());
            return std::abs(g.a1 - 0.08) <= 0.04 && std::abs(g.b1 - 0.90) <= 0.04;
        }));
    }
    int hits = 0;
    for (auto& j : jobs) hits += j.get() ? 1 : 0;

    const auto v = testing::random_positive_path(5, 500, 100.0, 0.01);
    const auto s = PriceSeries::from_values(v);
    const auto fit = fit_qmle(s, ConstantVol{1.0}, GarchVol{1.0, 0.0, 0.0}, FreeMask::parse("sigma"));
    double mean_sq = 0.0;
    for (std::size_t k = 1; k < v.size(); ++k) mean_sq += (v[k] - v[k - 1]) * (v[k] - v[k - 1]);
    mean_sq /= static_cast<double>(v.size() - 1);
    const double sigma = fit.local_vol.sigma();
    const double err = std::abs(sigma * sigma - mean_sq) / mean_sq;
    return {hits >= 18 && err <= 1e-6,
            std::to_string(hits) + "/20 seeds within 0.04, closed-form sigma^2 rel error " + fmt(err)};
}

Outcome gradient_check() {
    const auto gen = testing::generate_lsv(
        3, 1000, [](double x) { return x; }, 1e-6, 0.08, 0.9, 100.0, std::sqrt(5e-5));
    const auto s = PriceSeries::from_values(gen.prices);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int point = 0; point < 10; ++point) {
        const double a1 = 0.02 + 0.15 * u(rng);
        const double b1 = 0.5 + (0.95 - a1 - 0.5) * u(rng);
        const LocalVolSpec lv = DisplacedVol{0.1 + 0.8 * u(rng), 50.0 + 50.0 * u(rng), 0.5 + u(rng)};
        const StochVolSpec sv = GarchVol{5e-7 + 5e-6 * u(rng), a1, b1};
        const auto analytic = qmle_gradient(s, lv, sv);
        const auto p = qmle_parameter_values(lv, sv);
        for (std::size_t i = 0; i < p.size(); ++i) {
            const double h = 1e-6 * std::max(std::abs(p[i]), 1e-3);
            auto up = p;
            auto down = p;
            up[i] += h;
            down[i] -= h;
            const auto [lu, su] = qmle_specs_from_values(lv, sv, up);
            const auto [ld, sd] = qmle_specs_from_values(lv, sv, down);
            const double numeric = (qmle_objective(s, lu, su) - qmle_objective(s, ld, sd)) / (2.0 * h);
            worst = std::max(worst, max_rel_error({analytic[i]}, {numeric}));
        }
    }
    return {worst <= 1e-5, "10 points x 6 parameters, max rel error " + fmt(worst)};
}

Outcome diagnostics_calibration() {
    const auto [lo, hi] = testing::binomial_band(500, 0.05, 0.99);
    std::size_t lb_rejects = 0;
    for (std::uint64_t seed = 1; seed <= 500; ++seed) {
        lb_rejects += ljung_box(testing::normal_sample(20000 + seed, 1000), 10).p_value < 0.05 ? 1 : 0;
    }
    std::size_t raw_rejects = 0;
    std::size_t filtered_rejects = 0;
    const double a0 = 1e-5;
    const double a1 = 0.3;
    const double b1 = 0.6;
    for (std::uint64_t seed = 1; seed <= 200; ++seed) {
        const auto gen = testing::generate_lsv(
            seed, 2000, [](double) { return 1.0; }, a0, a1, b1, 0.0, std::sqrt(a0 / (1 - a1 - b1)));
        const auto s = PriceSeries::from_values(gen.prices);
        const auto raw = absolute_shifts(s).values;
        raw_rejects += arch_lm(raw, 10).p_value < 0.05 ? 1 : 0;
        const auto ex = extract(s, ConstantVol{1.0}, GarchVol{a0, a1, b1});
        filtered_rejects += arch_lm(ex.innovations.values, 10).p_value < 0.05 ? 1 : 0;
    }
    const auto [flo, fhi] = testing::binomial_band(200, 0.05, 0.99);
    const bool ok = lb_rejects >= lo && lb_rejects <= hi && raw_rejects >= 190 && filtered_rejects >= flo &&
                    filtered_rejects <= fhi;
    return {ok, "Ljung-Box " + std::to_string(lb_rejects) + "/500 in [" + std::to_string(lo) + ", " +
                    std::to_string(hi) + "]; ARCH-LM raw " + std::to_string(raw_rejects) + "/200, filtered " +
                    std::to_string(filtered_rejects) + "/200 in [" + std::to_string(flo) + ", " +
                    std::to_string(fhi) + "]"};
}

Outcome var_sanity() {
    const auto x = testing::normal_sample(7, 1000);
    const double v = var_from_pnl(x, 0.99).var_value;
    const auto k1 = kupiec_backtest(1, 100, 0.99);
    const auto k2 = kupiec_backtest(10, 1000, 0.99);
    const auto k3 = kupiec_backtest(5, 100, 0.95);
    const bool ok = std::abs(v - 2.326) <= 0.15 && k1.lr_pof == 0.0 && k2.lr_pof == 0.0 && k3.lr_pof == 0.0;
    return {ok, "99% VaR " + fmt(v) + ", Kupiec LR at x/n = p: " + fmt(k1.lr_pof) + ", " + fmt(k2.lr_pof) + ", " +
                    fmt(k3.lr_pof)};
}

} // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"shift-rule equivalence", shift_rule_equivalence},
        {"historical consistency", historical_consistency},
        {"displaced hybrid identity", displaced_identity},
        {"filtered HS equivalence", fhs_equivalence},
        {"stressed reduction", stressed_reduction},
        {"scale invariance", scale_invariance},
        {"EWMA closed form", ewma_closed_form},
        {"QMLE recovery", qmle_recovery},
        {"gradient check", gradient_check},
        {"diagnostics calibration and power", diagnostics_calibration},
        {"VaR sanity", var_sanity},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome outcome;
        try {
            outcome = criteria[i].second();
        } catch (const std::exception& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        failures += outcome.ok ? 0 : 1;
        std::printf("[%s] %2zu. %s: %s\n", outcome.ok ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                    outcome.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%zu/%zu criteria passed\n", criteria.size() - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
