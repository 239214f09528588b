#include "hsvol/cli/json_writer.hpp"

#include <cmath>
#include <cstdio>

namespace hsvol::cli {

namespace {

void write(const Json& value, int indent, int depth, std::string& out) {
    const auto pad = [&](int level) { out.append(static_cast<std::size_t>(indent * level), ' '); };
    switch (value.type()) {
    case Json::value_t::object: {
        if (value.empty()) {
            out += "{}";
            return;
        }
        out += "{\n";
        bool first = true;
        for (const auto& [key, item] : value.items()) {
            if (!first) {
                out += ",\n";
            }
            first = false;
            pad(depth + 1);
            out += Json(key).dump();
            out += ": ";
            write(item, indent, depth + 1, out);
        }
        out += '\n';
        pad(depth);
        out += '}';
        return;
    }
    case Json::value_t::array: {
        if (value.empty()) {
            out += "[]";
            return;
        }
        out += "[\n";
        bool first = true;
        for (const auto& item : value) {
            if (!first) {
                out += ",\n";
            }
            first = false;
            pad(depth + 1);
            write(item, indent, depth + 1, out);
        }
        out += '\n';
        pad(depth);
        out += ']';
        return;
    }
    case Json::value_t::number_float: {
        const double x = value.get<double>();
        out += std::isfinite(x) ? format_number(x) : "null";
        return;
    }
    default:
        out += value.dump();
        return;
    }
}

} // namespace

std::string format_number(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

std::string dump_json(const Json& value, int indent) {
    std::string out;
    write(value, indent, 0, out);
    out += '\n';
    return out;
}

} // namespace hsvol::cli
