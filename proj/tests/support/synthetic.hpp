#pragma once

// Test-only generators and oracles. Nothing here calls into the library's
// extraction or filtering code, so the values it produces can be used to
// check that code independently.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <utility>
#include <vector>

namespace hsvol::testing {

/// Positive random-walk path with multiplicative N(0, vol) steps.
inline std::vector<double> random_positive_path(std::uint64_t seed, std::size_t n, double s0 = 100.0,
                                                double vol = 0.02) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z(0.0, 1.0);
    std::vector<double> s{s0};
    for (std::size_t k = 1; k < n; ++k) {
        s.push_back(s.back() * std::exp(vol * z(rng)));
    }
    return s;
}

struct GeneratedPath {
    std::vector<double> prices;      // S_0..S_N
    std::vector<double> innovations; // z_1..z_N
    std::vector<double> vols;        // v_0..v_N
};

/// S_k = S_{k-1} + v_{k-1} gamma(S_{k-1}) z_k with
/// v_k^2 = a0 + a1 r_k^2 + b1 v_{k-1}^2, r_k = v_{k-1} z_k.
inline GeneratedPath generate_lsv(std::uint64_t seed, std::size_t steps, const std::function<double(double)>& gamma,
                                  double a0, double a1, double b1, double s0, double v0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    GeneratedPath out;
    out.prices.push_back(s0);
    out.vols.push_back(v0);
    double h = v0 * v0;
    for (std::size_t k = 1; k <= steps; ++k) {
        const double z = normal(rng);
        const double r = std::sqrt(h) * z;
        out.prices.push_back(out.prices.back() + gamma(out.prices.back()) * r);
        out.innovations.push_back(z);
        h = a0 + a1 * r * r + b1 * h;
        out.vols.push_back(std::sqrt(h));
    }
    return out;
}

/// Raw GARCH(1,1) returns r_k = v_{k-1} z_k, v_0^2 unconditional.
inline std::pair<std::vector<double>, std::vector<double>> garch_returns(std::uint64_t seed, std::size_t n, double a0,
                                                                         double a1, double b1) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> r;
    std::vector<double> z;
    double h = a0 / (1.0 - a1 - b1);
    for (std::size_t k = 0; k < n; ++k) {
        z.push_back(normal(rng));
        r.push_back(std::sqrt(h) * z.back());
        h = a0 + a1 * r.back() * r.back() + b1 * h;
    }
    return {r, z};
}

inline std::vector<double> normal_sample(std::uint64_t seed, std::size_t n) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> x(n);
    for (auto& v : x) {
        v = normal(rng);
    }
    return x;
}

/// v_k^2 = (1 - lambda) sum_{i=1}^{k} lambda^{i-1} r[k-i]^2 + lambda^k v0^2.
inline std::vector<double> ewma_closed_form(const std::vector<double>& r, double lambda, double v0) {
    std::vector<double> v{v0};
    for (std::size_t k = 1; k <= r.size(); ++k) {
        long double sum = 0.0L;
        long double weight = 1.0L;
        for (std::size_t i = 1; i <= k; ++i) {
            sum += weight * static_cast<long double>(r[k - i]) * r[k - i];
            weight *= lambda;
        }
        const long double h = (1.0L - lambda) * sum + weight * static_cast<long double>(v0) * v0;
        v.push_back(static_cast<double>(std::sqrt(h)));
    }
    return v;
}

/// Smallest [lo, hi] with P(X < lo) <= tail and P(X > hi) <= tail for
/// X ~ Binomial(n, p), tail = (1 - level) / 2.
inline std::pair<std::size_t, std::size_t> binomial_band(std::size_t n, double p, double level) {
    const double tail = 0.5 * (1.0 - level);
    std::vector<double> pmf(n + 1);
    for (std::size_t k = 0; k <= n; ++k) {
        const double logp = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) +
                            k * std::log(p) + (n - k) * std::log1p(-p);
        pmf[k] = std::exp(logp);
    }
    std::size_t lo = 0;
    double below = 0.0;
    while (lo <= n && below + pmf[lo] <= tail) {
        below += pmf[lo++];
    }
    std::size_t hi = n;
    double above = 0.0;
    while (hi > 0 && above + pmf[hi] <= tail) {
        above += pmf[hi--];
    }
    return {lo, hi};
}

/// |a - b| <= tol * max(|a|, |b|); exact equality always passes.
inline bool rel_close(double a, double b, double tol) {
    return a == b || std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

} // namespace hsvol::testing
