#include "hsvol/cli/run_config.hpp"

#include "hsvol/error.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>

namespace hsvol::cli {

namespace {

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys{
        "input", "label", "out", "seed", "confidence", "quantile",
        "localvol.kind", "localvol.sigma", "localvol.alpha", "localvol.beta",
        "stochvol.kind", "stochvol.lambda", "stochvol.a0", "stochvol.a1", "stochvol.b1",
        "init.kind", "init.v0", "init.warmup",
        "base.s0", "base.v0",
        "stressed", "stressed.from", "stressed.to",
        "fit.free", "fit.drop_first", "fit.min_length", "fit.starts", "fit.max_iterations",
        "diagnostics.lags", "diagnostics.significance", "var.pnl_csv",
    };
    return keys;
}

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

double to_double(const std::string& key, const std::string& text) {
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw Error(ErrorKind::InvalidParameter, "'" + key + "' is not a number: '" + text + "'");
    }
    return out;
}

std::uint64_t to_unsigned(const std::string& key, const std::string& text) {
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw Error(ErrorKind::InvalidParameter, "'" + key + "' is not a non-negative integer: '" + text + "'");
    }
    return out;
}

bool to_bool(const std::string& key, const std::string& text) {
    if (text == "true" || text == "1") return true;
    if (text == "false" || text == "0") return false;
    throw Error(ErrorKind::InvalidParameter, "'" + key + "' must be true or false");
}

Date to_date(const std::string& key, const std::string& text) {
    const auto d = parse_date(text);
    if (!d) {
        throw Error(ErrorKind::InvalidParameter, "'" + key + "' is not an ISO-8601 date: '" + text + "'");
    }
    return *d;
}

} // namespace

ConfigBlock parse_config_text(std::istream& in) {
    ConfigBlock block;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw Error(ErrorKind::InvalidParameter, "config line " + std::to_string(line_no) + ": expected key = value",
                        line_no);
        }
        block[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return block;
}

ConfigBlock load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::Io, "cannot open config file " + path);
    }
    return parse_config_text(in);
}

RunConfig resolve_config(const ConfigBlock& input_block, bool for_fit) {
    for (const auto& [key, value] : input_block) {
        if (!known_keys().contains(key)) {
            throw Error(ErrorKind::InvalidParameter, "unknown config key '" + key + "'");
        }
    }
    ConfigBlock block = input_block;
    auto get = [&](const std::string& key) -> std::optional<std::string> {
        const auto it = block.find(key);
        return it == block.end() ? std::nullopt : std::optional(it->second);
    };

    RunConfig cfg;
    if (const auto v = get("input")) cfg.input = *v;
    if (cfg.input.empty()) {
        throw Error(ErrorKind::InvalidParameter, "no input file given");
    }
    cfg.label = get("label").value_or(cfg.input);
    cfg.out = get("out").value_or(".");
    if (const auto v = get("seed")) cfg.seed = to_unsigned("seed", *v);
    if (const auto v = get("confidence")) cfg.confidence = to_double("confidence", *v);
    if (!(cfg.confidence > 0.5 && cfg.confidence < 1.0)) {
        throw Error(ErrorKind::InvalidParameter, "confidence must lie in (0.5, 1)");
    }
    if (const auto v = get("quantile")) {
        if (*v == "lower") cfg.quantile = QuantileRule::Lower;
        else if (*v == "interpolated") cfg.quantile = QuantileRule::Interpolated;
        else throw Error(ErrorKind::InvalidParameter, "quantile must be 'lower' or 'interpolated'");
    }

    if (for_fit && get("stochvol.kind") == std::optional<std::string>("garch")) {
        block.try_emplace("stochvol.a0", "1");
        block.try_emplace("stochvol.a1", "0.050000000000000003");
        block.try_emplace("stochvol.b1", "0.90000000000000002");
    }
    cfg.local_vol = local_vol_from_config(block);
    cfg.stoch_vol = stoch_vol_from_config(block);

    if (const auto v = get("init.kind")) {
        if (*v == "default") cfg.init.kind = InitRule::Kind::Default;
        else if (*v == "unconditional") cfg.init.kind = InitRule::Kind::Unconditional;
        else if (*v == "warmup") cfg.init.kind = InitRule::Kind::WarmupSecondMoment;
        else if (*v == "fixed") cfg.init.kind = InitRule::Kind::Fixed;
        else throw Error(ErrorKind::InvalidParameter, "unknown init.kind '" + *v + "'");
    }
    if (const auto v = get("init.v0")) {
        cfg.init.fixed_v0 = to_double("init.v0", *v);
        if (!get("init.kind")) cfg.init.kind = InitRule::Kind::Fixed;
    }
    if (cfg.init.kind == InitRule::Kind::Fixed && !(cfg.init.fixed_v0 > 0.0)) {
        throw Error(ErrorKind::InvalidParameter, "init.v0 must be positive");
    }
    if (const auto v = get("init.warmup")) cfg.init.warmup = to_unsigned("init.warmup", *v);

    if (const auto v = get("base.s0")) cfg.base_s0 = to_double("base.s0", *v);
    if (const auto v = get("base.v0")) {
        cfg.base_v0 = to_double("base.v0", *v);
        if (!(*cfg.base_v0 > 0.0)) {
            throw Error(ErrorKind::InvalidParameter, "base.v0 must be positive");
        }
    }
    if (const auto v = get("stressed")) cfg.stressed = to_bool("stressed", *v);
    if (const auto v = get("stressed.from")) cfg.stressed_from = to_date("stressed.from", *v);
    if (const auto v = get("stressed.to")) cfg.stressed_to = to_date("stressed.to", *v);
    if (cfg.stressed_from || cfg.stressed_to) cfg.stressed = true;

    if (const auto v = get("fit.free")) cfg.free_mask = *v;
    if (const auto v = get("fit.drop_first")) cfg.fit.drop_first = to_bool("fit.drop_first", *v);
    if (const auto v = get("fit.min_length")) cfg.fit.min_length = to_unsigned("fit.min_length", *v);
    if (const auto v = get("fit.starts")) cfg.fit.starts = to_unsigned("fit.starts", *v);
    if (const auto v = get("fit.max_iterations")) cfg.fit.max_iterations = to_unsigned("fit.max_iterations", *v);
    cfg.fit.seed = cfg.seed;

    if (const auto v = get("diagnostics.lags")) cfg.lags = to_unsigned("diagnostics.lags", *v);
    if (const auto v = get("diagnostics.significance")) {
        cfg.significance = to_double("diagnostics.significance", *v);
    }
    if (const auto v = get("var.pnl_csv")) cfg.pnl_csv = to_bool("var.pnl_csv", *v);

    // Canonical echo: the model block as re-serialized plus every other key.
    ConfigBlock resolved = block;
    for (auto it = resolved.begin(); it != resolved.end();) {
        if (it->first.starts_with("localvol.") || it->first.starts_with("stochvol.")) {
            it = resolved.erase(it);
        } else {
            ++it;
        }
    }
    for (const auto& [key, value] : to_config_block(cfg.local_vol, cfg.stoch_vol)) {
        resolved[key] = value;
    }
    resolved["confidence"] = block.count("confidence") ? block.at("confidence") : "0.99";
    resolved["seed"] = std::to_string(cfg.seed);
    resolved["out"] = cfg.out;
    resolved["label"] = cfg.label;
    cfg.block = std::move(resolved);
    return cfg;
}

std::string config_hash(const ConfigBlock& block) {
    std::uint64_t hash = 1469598103934665603ULL;
    auto feed = [&](const std::string& s) {
        for (unsigned char c : s) {
            hash ^= c;
            hash *= 1099511628211ULL;
        }
    };
    for (const auto& [key, value] : block) {
        feed(key);
        feed("=");
        feed(value);
        feed("\n");
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

} // namespace hsvol::cli
