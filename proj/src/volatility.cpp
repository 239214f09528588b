#include "hsvol/volatility.hpp"

#include "hsvol/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <optional>

namespace hsvol {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string num(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

void require_sigma(double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw Error(ErrorKind::InvalidParameter, "sigma must be positive and finite, got " + num(sigma));
    }
}

double lookup(const ConfigBlock& block, const std::string& key, std::optional<double> fallback = std::nullopt) {
    const auto it = block.find(key);
    if (it == block.end()) {
        if (fallback) {
            return *fallback;
        }
        throw Error(ErrorKind::InvalidParameter, "missing config key '" + key + "'");
    }
    double out = 0.0;
    const auto& s = it->second;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw Error(ErrorKind::InvalidParameter, "config key '" + key + "' is not a number: '" + s + "'");
    }
    return out;
}

} // namespace

LocalVolSpec::LocalVolSpec(ConstantVol v) : kind_(v) { require_sigma(v.sigma); }

LocalVolSpec::LocalVolSpec(ProportionalVol v) : kind_(v) { require_sigma(v.sigma); }

LocalVolSpec::LocalVolSpec(DisplacedVol v) : kind_(v) {
    require_sigma(v.sigma);
    if (!(v.alpha >= -1.0 && v.alpha <= 1.0)) {
        throw Error(ErrorKind::InvalidParameter, "displaced alpha must lie in [-1, 1], got " + num(v.alpha));
    }
    if (!std::isfinite(v.beta)) {
        throw Error(ErrorKind::InvalidParameter, "displaced beta must be finite");
    }
}

double LocalVolSpec::sigma() const noexcept {
    return std::visit([](const auto& v) { return v.sigma; }, kind_);
}

std::string LocalVolSpec::name() const {
    return std::visit(overloaded{[](const ConstantVol&) { return std::string("constant"); },
                                 [](const ProportionalVol&) { return std::string("proportional"); },
                                 [](const DisplacedVol&) { return std::string("displaced"); }},
                      kind_);
}

LocalVolSpec LocalVolSpec::with_sigma(double sigma) const {
    return std::visit(
        [sigma](auto v) {
            v.sigma = sigma;
            return LocalVolSpec(v);
        },
        kind_);
}

double LocalVolSpec::operator()(double x) const {
    const double g = std::visit(
        overloaded{[](const ConstantVol& v) { return v.sigma; },
                   [x](const ProportionalVol& v) { return v.sigma * x; },
                   [x](const DisplacedVol& v) {
                       return ((1.0 - std::abs(v.alpha)) * x + v.alpha * v.beta) * v.sigma;
                   }},
        kind_);
    if (!(g > 0.0) || !std::isfinite(g)) {
        throw Error(ErrorKind::NonpositiveVolatility,
                    name() + " local volatility is " + num(g) + " at x = " + num(x));
    }
    return g;
}

double eval_gamma(const LocalVolSpec& spec, double x) { return spec(x); }

double alpha_interp(double x, double alpha, double beta) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw Error(ErrorKind::InvalidParameter, "interpolation alpha must lie in [0, 1], got " + num(alpha));
    }
    if (alpha == 1.0) {
        if (beta == 0.0) {
            throw Error(ErrorKind::InvalidParameter, "alpha = 1 with beta = 0 has no interpolation limit");
        }
        return 0.0;
    }
    const double a = alpha / (1.0 - alpha) * beta;
    const double denom = x + a;
    if (denom == 0.0) {
        throw Error(ErrorKind::InvalidParameter, "alpha interpolation undefined at x = -a = " + num(x));
    }
    return x / denom;
}

double alpha_from_vol_ratio(double s0, double s_prev, const LocalVolSpec& spec) {
    if (s0 == s_prev) {
        throw Error(ErrorKind::DegenerateBase, "base level equals S_{k-1} = " + num(s_prev));
    }
    const double ratio = spec(s0) / spec(s_prev);
    return s_prev / (s0 - s_prev) * (ratio - 1.0);
}

StochVolSpec::StochVolSpec(EwmaVol v) : kind_(v) {
    if (!(v.lambda > 0.0 && v.lambda < 1.0)) {
        throw Error(ErrorKind::InvalidParameter, "EWMA lambda must lie in (0, 1), got " + num(v.lambda));
    }
}

StochVolSpec::StochVolSpec(GarchVol v) : kind_(v) {
    if (!(v.a0 > 0.0) || !std::isfinite(v.a0)) {
        throw Error(ErrorKind::ConstraintViolation, "GARCH a0 must be positive, got " + num(v.a0));
    }
    if (!(v.a1 >= 0.0) || !(v.b1 >= 0.0)) {
        throw Error(ErrorKind::ConstraintViolation, "GARCH a1 and b1 must be non-negative");
    }
    if (!(v.a1 + v.b1 < 1.0)) {
        throw Error(ErrorKind::ConstraintViolation, "GARCH requires a1 + b1 < 1, got " + num(v.a1 + v.b1));
    }
}

std::string StochVolSpec::name() const {
    return std::visit(overloaded{[](const NoStochVol&) { return std::string("none"); },
                                 [](const EwmaVol&) { return std::string("ewma"); },
                                 [](const GarchVol&) { return std::string("garch"); }},
                      kind_);
}

double initial_variance(const StochVolSpec& spec, std::span<const double> returns, const InitRule& init) {
    if (spec.is_none()) {
        return 1.0;
    }
    auto warmup_moment = [&](std::size_t warmup) {
        const std::size_t n = std::min(std::max<std::size_t>(warmup, 1), returns.size());
        if (n == 0) {
            throw Error(ErrorKind::InsufficientLength, "no filtered returns for v0 warm-up");
        }
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            sum += returns[i] * returns[i];
        }
        return sum / static_cast<double>(n);
    };
    switch (init.kind) {
    case InitRule::Kind::Fixed:
        if (!(init.fixed_v0 > 0.0)) {
            throw Error(ErrorKind::InvalidParameter, "fixed v0 must be positive");
        }
        return init.fixed_v0 * init.fixed_v0;
    case InitRule::Kind::WarmupSecondMoment:
        return warmup_moment(init.warmup);
    case InitRule::Kind::Unconditional:
        if (const auto* g = std::get_if<GarchVol>(&spec.kind())) {
            return g->unconditional_variance();
        }
        throw Error(ErrorKind::InvalidParameter, "unconditional v0 requires a GARCH filter");
    case InitRule::Kind::Default:
        break;
    }
    if (const auto* g = std::get_if<GarchVol>(&spec.kind())) {
        return g->unconditional_variance();
    }
    return warmup_moment(init.warmup);
}

VolPath filter_vol(const StochVolSpec& spec, std::span<const double> returns, const InitRule& init) {
    if (returns.empty()) {
        throw Error(ErrorKind::InsufficientLength, "filter needs at least one return");
    }
    VolPath path{std::vector<double>(returns.size() + 1, 1.0), spec};
    if (spec.is_none()) {
        return path;
    }
    double a0 = 0.0;
    double a1 = 0.0;
    double b1 = 0.0;
    if (const auto* g = std::get_if<GarchVol>(&spec.kind())) {
        a0 = g->a0;
        a1 = g->a1;
        b1 = g->b1;
    } else {
        const auto& e = std::get<EwmaVol>(spec.kind());
        a1 = 1.0 - e.lambda;
        b1 = e.lambda;
    }
    double h = initial_variance(spec, returns, init);
    if (!(h > 0.0) || !std::isfinite(h)) {
        throw Error(ErrorKind::NonpositiveVolatility, "initial variance v0^2 = " + num(h) + " is not positive", 0);
    }
    path.values[0] = std::sqrt(h);
    for (std::size_t k = 1; k <= returns.size(); ++k) {
        const double r = returns[k - 1];
        h = a0 + a1 * r * r + b1 * h;
        if (!(h > 0.0) || !std::isfinite(h)) {
            throw Error(ErrorKind::NonpositiveVolatility, "filtered variance v_k^2 = " + num(h) + " at k = " +
                                                              std::to_string(k),
                        k);
        }
        path.values[k] = std::sqrt(h);
    }
    return path;
}

ConfigBlock to_config_block(const LocalVolSpec& lv, const StochVolSpec& sv) {
    ConfigBlock block;
    block["localvol.kind"] = lv.name();
    block["localvol.sigma"] = num(lv.sigma());
    if (const auto* d = std::get_if<DisplacedVol>(&lv.kind())) {
        block["localvol.alpha"] = num(d->alpha);
        block["localvol.beta"] = num(d->beta);
    }
    block["stochvol.kind"] = sv.name();
    std::visit(overloaded{[](const NoStochVol&) {},
                          [&](const EwmaVol& e) { block["stochvol.lambda"] = num(e.lambda); },
                          [&](const GarchVol& g) {
                              block["stochvol.a0"] = num(g.a0);
                              block["stochvol.a1"] = num(g.a1);
                              block["stochvol.b1"] = num(g.b1);
                          }},
               sv.kind());
    return block;
}

LocalVolSpec local_vol_from_config(const ConfigBlock& block) {
    const auto it = block.find("localvol.kind");
    const std::string kind = it == block.end() ? "proportional" : it->second;
    const double sigma = lookup(block, "localvol.sigma", 1.0);
    if (kind == "constant") {
        return ConstantVol{sigma};
    }
    if (kind == "proportional") {
        return ProportionalVol{sigma};
    }
    if (kind == "displaced") {
        return DisplacedVol{lookup(block, "localvol.alpha"), lookup(block, "localvol.beta"), sigma};
    }
    throw Error(ErrorKind::InvalidParameter, "unknown localvol.kind '" + kind + "'");
}

StochVolSpec stoch_vol_from_config(const ConfigBlock& block) {
    const auto it = block.find("stochvol.kind");
    const std::string kind = it == block.end() ? "none" : it->second;
    if (kind == "none") {
        return NoStochVol{};
    }
    if (kind == "ewma") {
        return EwmaVol{lookup(block, "stochvol.lambda", 0.94)};
    }
    if (kind == "garch") {
        return GarchVol{lookup(block, "stochvol.a0"), lookup(block, "stochvol.a1"), lookup(block, "stochvol.b1")};
    }
    throw Error(ErrorKind::InvalidParameter, "unknown stochvol.kind '" + kind + "'");
}

} // namespace hsvol
