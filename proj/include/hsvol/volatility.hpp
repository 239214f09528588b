#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace hsvol {

// Local volatility functions gamma(x; theta).

struct ConstantVol {
    double sigma = 1.0;
};

struct ProportionalVol {
    double sigma = 1.0;
};

/// gamma(x) = ((1 - |alpha|) x + alpha beta) sigma
struct DisplacedVol {
    double alpha = 0.0;
    double beta = 0.0;
    double sigma = 1.0;
};

class LocalVolSpec {
public:
    using Kind = std::variant<ConstantVol, ProportionalVol, DisplacedVol>;

    LocalVolSpec(ConstantVol v);
    LocalVolSpec(ProportionalVol v);
    LocalVolSpec(DisplacedVol v);

    [[nodiscard]] const Kind& kind() const noexcept { return kind_; }
    [[nodiscard]] double sigma() const noexcept;
    [[nodiscard]] std::string name() const;

    /// Same function shape with sigma replaced.
    [[nodiscard]] LocalVolSpec with_sigma(double sigma) const;

    /// gamma(x). Throws NonpositiveVolatility when the value is not > 0.
    [[nodiscard]] double operator()(double x) const;

private:
    Kind kind_;
};

double eval_gamma(const LocalVolSpec& spec, double x);

/// x / (x + a) with a = alpha / (1 - |alpha|) * beta, alpha in [0, 1].
/// alpha = 1 is the a -> infinity limit (pure absolute shift) and returns 0.
double alpha_interp(double x, double alpha, double beta);

/// The interpolation weight for which the hybrid shift reproduces the
/// volatility-scaled scenario: s_prev / (s0 - s_prev) * (gamma(s0) / gamma(s_prev) - 1).
/// Throws DegenerateBase when s0 == s_prev.
double alpha_from_vol_ratio(double s0, double s_prev, const LocalVolSpec& spec);

// Stochastic volatility filters.

struct NoStochVol {};

struct EwmaVol {
    double lambda = 0.94;
};

struct GarchVol {
    double a0 = 0.0;
    double a1 = 0.0;
    double b1 = 0.0;

    [[nodiscard]] double unconditional_variance() const { return a0 / (1.0 - a1 - b1); }
};

class StochVolSpec {
public:
    using Kind = std::variant<NoStochVol, EwmaVol, GarchVol>;

    StochVolSpec() = default;
    StochVolSpec(NoStochVol v) : kind_(v) {}
    StochVolSpec(EwmaVol v);
    StochVolSpec(GarchVol v);

    [[nodiscard]] const Kind& kind() const noexcept { return kind_; }
    [[nodiscard]] bool is_none() const noexcept { return std::holds_alternative<NoStochVol>(kind_); }
    [[nodiscard]] std::string name() const;

private:
    Kind kind_;
};

/// How v_0 is chosen before running a filter.
struct InitRule {
    enum class Kind {
        Default,             // unconditional variance (GARCH), warm-up second moment (EWMA)
        Unconditional,       // GARCH only
        WarmupSecondMoment,  // mean of r_k^2 over the first `warmup` filtered returns
        Fixed,               // v_0 = fixed_v0
    };
    Kind kind = Kind::Default;
    std::size_t warmup = 20;
    double fixed_v0 = 1.0;

    static InitRule fixed(double v0) { return {Kind::Fixed, 20, v0}; }
};

/// v_k for k = 0..N over N filtered returns; v_0 from the init rule.
struct VolPath {
    std::vector<double> values;
    StochVolSpec spec;

    [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
    [[nodiscard]] double operator[](std::size_t k) const { return values[k]; }
    [[nodiscard]] double back() const { return values.back(); }
};

/// Initial variance v_0^2 implied by the rule; 1 for NoStochVol.
double initial_variance(const StochVolSpec& spec, std::span<const double> filtered_returns,
                        const InitRule& init);

/// Runs v_k^2 = a0 + a1 r_k^2 + b1 v_{k-1}^2 (EWMA: a0 = 0, a1 = 1 - lambda,
/// b1 = lambda), where r_k = filtered_returns[k-1] is the return over step k.
/// The scale v_{k-1} of step k therefore only depends on returns up to k-1.
/// NoStochVol yields the all-ones path.
VolPath filter_vol(const StochVolSpec& spec, std::span<const double> filtered_returns,
                   const InitRule& init = {});

// Key-value config block: localvol.kind, localvol.sigma, localvol.alpha,
// localvol.beta, stochvol.kind, stochvol.lambda, stochvol.a0/a1/b1.
using ConfigBlock = std::map<std::string, std::string>;

ConfigBlock to_config_block(const LocalVolSpec& lv, const StochVolSpec& sv);
LocalVolSpec local_vol_from_config(const ConfigBlock& block);
StochVolSpec stoch_vol_from_config(const ConfigBlock& block);

} // namespace hsvol
