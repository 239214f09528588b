#pragma once

#include "hsvol/estimation.hpp"
#include "hsvol/risk.hpp"
#include "hsvol/timeseries.hpp"
#include "hsvol/volatility.hpp"

#include <cstdint>
#include <istream>
#include <optional>
#include <string>

namespace hsvol::cli {

/**
 * Fully resolved run settings. Built from a flat key-value block so that the
 * same block can be echoed into every report and fed back to reproduce the
 * run. Recognised keys:
 *
 *   input, label, out, seed, confidence, quantile,
 *   localvol.kind|sigma|alpha|beta, stochvol.kind|lambda|a0|a1|b1,
 *   init.kind (default|unconditional|warmup|fixed), init.v0, init.warmup,
 *   base.s0, base.v0, stressed (true|false), stressed.from, stressed.to,
 *   fit.free, fit.drop_first, fit.min_length, fit.starts, fit.max_iterations,
 *   diagnostics.lags, diagnostics.significance, var.pnl_csv
 */
struct RunConfig {
    std::string input;
    std::string label;
    std::string out = ".";
    std::uint64_t seed = 12345;
    double confidence = 0.99;
    QuantileRule quantile = QuantileRule::Lower;

    LocalVolSpec local_vol = ProportionalVol{1.0};
    StochVolSpec stoch_vol = NoStochVol{};
    InitRule init;

    std::optional<double> base_s0;
    std::optional<double> base_v0;

    bool stressed = false;
    std::optional<Date> stressed_from;
    std::optional<Date> stressed_to;

    std::string free_mask;  // empty: model default
    QmleOptions fit;

    std::size_t lags = 10;
    double significance = 0.05;
    bool pnl_csv = false;

    ConfigBlock block;  // resolved key-value form, echoed into reports
};

/// Parses `key = value` lines; `#` starts a comment.
ConfigBlock parse_config_text(std::istream& in);
ConfigBlock load_config_file(const std::string& path);

/// Validates and converts a block. `for_fit` fills GARCH/EWMA placeholders
/// that only serve as fit templates.
RunConfig resolve_config(const ConfigBlock& block, bool for_fit = false);

/// FNV-1a hash of the canonical `key=value` lines, as 16 hex digits.
std::string config_hash(const ConfigBlock& block);

} // namespace hsvol::cli
