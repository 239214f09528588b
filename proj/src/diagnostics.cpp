#include "hsvol/diagnostics.hpp"

#include "hsvol/chi_square.hpp"
#include "hsvol/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hsvol {

namespace {

double mean(std::span<const double> x) {
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

} // namespace

double autocorrelation(std::span<const double> x, std::size_t lag) {
    const std::size_t n = x.size();
    if (lag >= n) {
        throw Error(ErrorKind::InsufficientLength, "lag must be smaller than the sample size");
    }
    const double m = mean(x);
    double denom = 0.0;
    for (double v : x) {
        denom += (v - m) * (v - m);
    }
    if (!(denom > 0.0)) {
        throw Error(ErrorKind::ZeroVariance, "sample variance is zero; autocorrelation undefined");
    }
    double num = 0.0;
    for (std::size_t t = lag; t < n; ++t) {
        num += (x[t] - m) * (x[t - lag] - m);
    }
    return num / denom;
}

TestResult ljung_box(std::span<const double> x, std::size_t lags) {
    const std::size_t n = x.size();
    if (lags < 1 || n <= lags) {
        throw Error(ErrorKind::InsufficientLength, "Ljung-Box needs n > lags >= 1");
    }
    const double nn = static_cast<double>(n);
    double sum = 0.0;
    for (std::size_t k = 1; k <= lags; ++k) {
        const double rho = autocorrelation(x, k);
        sum += rho * rho / (nn - static_cast<double>(k));
    }
    const double q = nn * (nn + 2.0) * sum;
    return {"ljung_box", q, lags, chi_square_survival(q, static_cast<double>(lags)), lags};
}

TestResult arch_lm(std::span<const double> x, std::size_t lags) {
    const std::size_t n = x.size();
    if (lags < 1 || n <= 2 * lags + 1) {
        throw Error(ErrorKind::InsufficientLength, "ARCH-LM needs n > 2 * lags + 1");
    }
    const std::size_t rows = n - lags;
    const auto cols = static_cast<Eigen::Index>(lags + 1);
    Eigen::VectorXd y(static_cast<Eigen::Index>(rows));
    Eigen::MatrixXd design(static_cast<Eigen::Index>(rows), cols);
    for (std::size_t t = lags; t < n; ++t) {
        const auto row = static_cast<Eigen::Index>(t - lags);
        y(row) = x[t] * x[t];
        design(row, 0) = 1.0;
        for (std::size_t j = 1; j <= lags; ++j) {
            design(row, static_cast<Eigen::Index>(j)) = x[t - j] * x[t - j];
        }
    }

    const double y_mean = y.mean();
    const double sst = (y.array() - y_mean).square().sum();
    const bool constant = y.maxCoeff() == y.minCoeff();
    if (constant || !(sst > 1e-14 * y.squaredNorm())) {
        return {"arch_lm", 0.0, lags, 1.0, lags};
    }

    Eigen::MatrixXd normal = design.transpose() * design;
    normal.diagonal().array() += 1e-12 * normal.trace();
    const Eigen::VectorXd coef = normal.ldlt().solve(design.transpose() * y);
    const double ssr = (y - design * coef).squaredNorm();
    const double r2 = std::clamp(1.0 - ssr / sst, 0.0, 1.0);
    const double stat = static_cast<double>(rows) * r2;
    if (!std::isfinite(stat)) {
        throw Error(ErrorKind::NumericalFailure, "ARCH-LM regression produced a non-finite statistic");
    }
    return {"arch_lm", stat, lags, chi_square_survival(stat, static_cast<double>(lags)), lags};
}

std::string to_string(Verdict verdict) {
    switch (verdict) {
    case Verdict::Pass: return "pass";
    case Verdict::Warn: return "warn";
    case Verdict::Fail: return "fail";
    }
    return "warn";
}

DiagnosticsReport diagnose(std::span<const double> innovations, std::size_t lags, double significance) {
    if (!(significance > 0.0 && significance < 1.0)) {
        throw Error(ErrorKind::InvalidParameter, "significance must lie in (0, 1)");
    }
    DiagnosticsReport report;
    report.significance = significance;

    auto run = [&](const std::string& name, auto&& test) {
        TestOutcome outcome{name, lags, std::nullopt, std::nullopt, std::nullopt};
        try {
            outcome.result = test(innovations, lags);
        } catch (const Error& e) {
            outcome.error_kind = std::string(to_string(e.kind()));
            outcome.error_message = e.what();
        }
        report.tests.push_back(std::move(outcome));
    };
    run("ljung_box", [](auto x, auto h) { return ljung_box(x, h); });
    run("arch_lm", [](auto x, auto h) { return arch_lm(x, h); });

    bool failed = false;
    bool incomplete = false;
    for (const auto& t : report.tests) {
        if (!t.result) {
            incomplete = true;
        } else if (t.result->p_value < significance) {
            failed = true;
        }
    }
    report.verdict = failed ? Verdict::Fail : (incomplete ? Verdict::Warn : Verdict::Pass);
    return report;
}

} // namespace hsvol
