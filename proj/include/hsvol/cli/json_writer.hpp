#pragma once

#include <json.hpp>

#include <string>

namespace hsvol::cli {

using Json = nlohmann::ordered_json;

/// Pretty-prints `value` with every floating-point number written with 17
/// significant digits; non-finite numbers become null.
std::string dump_json(const Json& value, int indent = 2);

/// "%.17g" formatting shared by reports and CSV outputs.
std::string format_number(double value);

} // namespace hsvol::cli
