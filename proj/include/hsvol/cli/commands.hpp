#pragma once

#include "hsvol/cli/run_config.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace hsvol::cli {

enum ExitCode : int {
    kSuccess = 0,
    kInputError = 1,
    kNumericalFailure = 2,
};

/// innovations.csv (k,date,innovation) and volpath.csv (k,date,v).
int cmd_extract(const RunConfig& cfg, std::ostream& out);

/// var_report.json plus scenarios.csv (k,date,s_tilde); pnl_sorted.csv on request.
int cmd_var(const RunConfig& cfg, std::ostream& out);

/// fit_report.json; exit 2 on NumericalFailure.
int cmd_fit(const RunConfig& cfg, std::ostream& out);

/// diagnostics.json.
int cmd_diagnose(const RunConfig& cfg, std::ostream& out);

/// Full front end: `hsvar <extract|var|fit|diagnose> [flags]`. Errors are
/// written to `out` as a single-line JSON object {"error": {...}}.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace hsvol::cli
