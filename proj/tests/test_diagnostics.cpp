#include "hsvol/diagnostics.hpp"
#include "hsvol/innovations.hpp"
#include "support/error_of.hpp"
#include "support/synthetic.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace hsvol;
using hsvol::testing::error_of;
using hsvol::testing::rel_close;

namespace {

// Ljung-Box written out directly from the sample moments.
double ljung_box_oracle(const std::vector<double>& x, std::size_t h) {
    const double n = static_cast<double>(x.size());
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= n;
    double c0 = 0.0;
    for (double v : x) c0 += (v - mean) * (v - mean);
    double q = 0.0;
    for (std::size_t k = 1; k <= h; ++k) {
        double ck = 0.0;
        for (std::size_t t = k; t < x.size(); ++t) ck += (x[t] - mean) * (x[t - k] - mean);
        const double rho = ck / c0;
        q += rho * rho / (n - static_cast<double>(k));
    }
    return n * (n + 2.0) * q;
}

// One-lag ARCH-LM: R^2 of a simple regression is the squared correlation.
double arch_lm_one_lag_oracle(const std::vector<double>& x) {
    std::vector<double> y;
    std::vector<double> z;
    for (std::size_t t = 1; t < x.size(); ++t) {
        y.push_back(x[t] * x[t]);
        z.push_back(x[t - 1] * x[t - 1]);
    }
    const double m = static_cast<double>(y.size());
    double my = 0.0;
    double mz = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        my += y[i];
        mz += z[i];
    }
    my /= m;
    mz /= m;
    double syz = 0.0;
    double syy = 0.0;
    double szz = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        syz += (y[i] - my) * (z[i] - mz);
        syy += (y[i] - my) * (y[i] - my);
        szz += (z[i] - mz) * (z[i] - mz);
    }
    return m * syz * syz / (syy * szz);
}

} // namespace

TEST_SUITE("diagnostics") {

TEST_CASE("ljung-box on an alternating series") {
    std::vector<double> x(100);
    for (std::size_t t = 0; t < x.size(); ++t) x[t] = t % 2 == 0 ? 1.0 : -1.0;
    CHECK(autocorrelation(x, 1) == doctest::Approx(-0.99).epsilon(1e-14));
    const auto r = ljung_box(x, 1);
    CHECK(rel_close(r.statistic, 100.0 * 102.0 * 0.99 * 0.99 / 99.0, 1e-12));
    CHECK(r.df == 1);
    CHECK(r.p_value < 1e-20);
}

TEST_CASE("ljung-box matches the direct formula") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto x = testing::normal_sample(seed, 250);
        for (std::size_t h : {1u, 5u, 10u, 20u}) {
            CHECK(rel_close(ljung_box(x, h).statistic, ljung_box_oracle(x, h), 1e-12));
        }
    }
}

TEST_CASE("ljung-box rejects degenerate input") {
    CHECK(error_of([] { (void)ljung_box(std::vector<double>(50, 3.0), 10); }) == ErrorKind::ZeroVariance);
    CHECK(error_of([] { (void)ljung_box(std::vector<double>{1, 2, 3}, 3); }) == ErrorKind::InsufficientLength);
    CHECK(error_of([] { (void)ljung_box(std::vector<double>{1, 2, 3}, 0); }) == ErrorKind::InsufficientLength);
}

TEST_CASE("arch-lm with one lag matches the squared correlation") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto x = testing::garch_returns(seed, 500, 1e-5, 0.2, 0.7).first;
        CHECK(rel_close(arch_lm(x, 1).statistic, arch_lm_one_lag_oracle(x), 1e-8));
    }
}

TEST_CASE("arch-lm on constant magnitude is zero") {
    std::vector<double> x(200);
    for (std::size_t t = 0; t < x.size(); ++t) x[t] = t % 3 == 0 ? -2.0 : 2.0;
    const auto r = arch_lm(x, 5);
    CHECK(r.statistic == 0.0);
    CHECK(r.p_value == 1.0);
    CHECK(error_of([] { (void)arch_lm(std::vector<double>(21, 1.0), 10); }) == ErrorKind::InsufficientLength);
    CHECK_NOTHROW((void)arch_lm(testing::normal_sample(1, 22), 10));
}

TEST_CASE("invariances") {
    const auto x = testing::garch_returns(3, 800, 1e-5, 0.2, 0.7).first;
    auto scaled = x;
    auto flipped = x;
    auto shifted = x;
    for (auto& v : scaled) v *= 37.0;
    for (auto& v : flipped) v = -v;
    for (auto& v : shifted) v += 5.0;
    const double lb = ljung_box(x, 10).statistic;
    CHECK(rel_close(ljung_box(scaled, 10).statistic, lb, 1e-10));
    CHECK(rel_close(ljung_box(shifted, 10).statistic, lb, 1e-8));
    const double lm = arch_lm(x, 10).statistic;
    CHECK(rel_close(arch_lm(scaled, 10).statistic, lm, 1e-8));
    CHECK(arch_lm(flipped, 10).statistic == lm);

    // arch-lm works on the raw series, so a shift only washes out once removed
    double mean = 0.0;
    for (double v : shifted) mean += v;
    mean /= static_cast<double>(shifted.size());
    std::vector<double> demeaned_shift;
    std::vector<double> demeaned;
    double base_mean = 0.0;
    for (double v : x) base_mean += v;
    base_mean /= static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        demeaned_shift.push_back(shifted[i] - mean);
        demeaned.push_back(x[i] - base_mean);
    }
    CHECK(rel_close(arch_lm(demeaned_shift, 10).statistic, arch_lm(demeaned, 10).statistic, 1e-6));
}

TEST_CASE("p-values decrease with the statistic") {
    std::vector<TestResult> results;
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        const auto x = testing::garch_returns(seed, 300, 1e-5, 0.1 + 0.01 * static_cast<double>(seed), 0.5).first;
        results.push_back(ljung_box(x, 10));
        results.push_back(arch_lm(x, 10));
    }
    std::sort(results.begin(), results.end(), [](const auto& a, const auto& b) { return a.statistic < b.statistic; });
    for (std::size_t i = 1; i < results.size(); ++i) {
        CHECK(results[i].p_value <= results[i - 1].p_value);
    }
}

TEST_CASE("size under the null stays inside the binomial band") {
    const std::size_t reps = 500;
    const auto [lo, hi] = testing::binomial_band(reps, 0.05, 0.99);
    std::size_t lb_rejects = 0;
    std::size_t lm_rejects = 0;
    for (std::uint64_t seed = 1; seed <= reps; ++seed) {
        const auto x = testing::normal_sample(10000 + seed, 1000);
        lb_rejects += ljung_box(x, 10).p_value < 0.05 ? 1 : 0;
        lm_rejects += arch_lm(x, 10).p_value < 0.05 ? 1 : 0;
    }
    INFO("band [" << lo << ", " << hi << "]");
    CHECK(lb_rejects >= lo);
    CHECK(lb_rejects <= hi);
    CHECK(lm_rejects >= lo);
    CHECK(lm_rejects <= hi);
}

TEST_CASE("arch-lm has power against garch returns") {
    std::size_t rejects = 0;
    for (std::uint64_t seed = 1; seed <= 200; ++seed) {
        const auto r = testing::garch_returns(seed, 2000, 1e-5, 0.3, 0.6).first;
        rejects += arch_lm(r, 10).p_value < 0.05 ? 1 : 0;
    }
    CHECK(rejects >= 190);
}

TEST_CASE("innovations extracted with the true model look like noise") {
    const std::size_t reps = 200;
    const auto [lo, hi] = testing::binomial_band(reps, 0.05, 0.99);
    std::size_t rejects = 0;
    const double a0 = 1e-6;
    const double a1 = 0.1;
    const double b1 = 0.85;
    for (std::uint64_t seed = 1; seed <= reps; ++seed) {
        const auto gen = testing::generate_lsv(
            seed, 1000, [](double x) { return x; }, a0, a1, b1, 100.0, std::sqrt(a0 / (1 - a1 - b1)));
        const auto ex = extract(PriceSeries::from_values(gen.prices), ProportionalVol{1.0}, GarchVol{a0, a1, b1});
        rejects += arch_lm(ex.innovations.values, 10).p_value < 0.05 ? 1 : 0;
    }
    INFO("band [" << lo << ", " << hi << "]");
    CHECK(rejects >= lo);
    CHECK(rejects <= hi);
}

TEST_CASE("verdicts") {
    const auto noise = diagnose(testing::normal_sample(4, 1000));
    CHECK(noise.tests.size() == 2);
    CHECK(noise.tests[0].name == "ljung_box");
    CHECK(noise.tests[1].name == "arch_lm");
    CHECK(noise.verdict == Verdict::Pass);

    const auto garch = diagnose(testing::garch_returns(2, 2000, 1e-5, 0.3, 0.6).first);
    CHECK(garch.verdict == Verdict::Fail);
    CHECK(garch.tests[1].result->p_value < 0.05);

    const auto flat = diagnose(std::vector<double>(100, 0.0));
    CHECK(flat.verdict == Verdict::Warn);
    CHECK(flat.tests[0].error_kind == std::optional<std::string>("ZeroVariance"));
    CHECK(flat.tests[1].result.has_value());

    CHECK(to_string(Verdict::Fail) == "fail");
    CHECK(error_of([] { (void)diagnose(std::vector<double>(30, 1.0), 10, 1.5); }) == ErrorKind::InvalidParameter);
}

}
