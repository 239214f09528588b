#include "hsvol/cli/commands.hpp"

#include "hsvol/cli/json_writer.hpp"
#include "hsvol/diagnostics.hpp"
#include "hsvol/error.hpp"
#include "hsvol/innovations.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace hsvol::cli {

namespace {

namespace fs = std::filesystem;

PriceSeries load_series(const RunConfig& cfg) {
    std::ifstream in(cfg.input);
    if (!in) {
        throw Error(ErrorKind::Io, "cannot open input " + cfg.input);
    }
    return ingest_csv(in, cfg.label);
}

fs::path output_path(const RunConfig& cfg, const std::string& name) {
    std::error_code ec;
    fs::create_directories(cfg.out, ec);
    if (ec) {
        throw Error(ErrorKind::Io, "cannot create output directory " + cfg.out + ": " + ec.message());
    }
    return fs::path(cfg.out) / name;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) {
        throw Error(ErrorKind::Io, "cannot write " + path.string());
    }
    file << content;
    if (!file) {
        throw Error(ErrorKind::Io, "failed writing " + path.string());
    }
}

Json block_json(const ConfigBlock& block) {
    Json out = Json::object();
    for (const auto& [key, value] : block) {
        out[key] = value;
    }
    return out;
}

void add_echo(Json& report, const RunConfig& cfg) {
    report["model_echo"] = block_json(to_config_block(cfg.local_vol, cfg.stoch_vol));
    report["config"] = block_json(cfg.block);
    report["config_hash"] = config_hash(cfg.block);
}

DateWindow stressed_window(const RunConfig& cfg, const PriceSeries& series) {
    const Date first = series.date(0);
    const Date last = series.date(series.size() - 1);
    DateWindow window{cfg.stressed_from.value_or(first), cfg.stressed_to.value_or(last)};
    if (window.from < first || last < window.to) {
        throw Error(ErrorKind::InvalidWindow, "stressed window [" + format_date(window.from) + ", " +
                                                  format_date(window.to) + "] lies outside the series range [" +
                                                  format_date(first) + ", " + format_date(last) + "]");
    }
    return window;
}

std::string error_json(const Error& e) {
    Json body = Json::object();
    body["kind"] = std::string(to_string(e.kind()));
    body["message"] = e.what();
    if (e.index()) {
        body["index"] = *e.index();
    }
    Json root = Json::object();
    root["error"] = body;
    return root.dump();
}

} // namespace

int cmd_extract(const RunConfig& cfg, std::ostream& out) {
    const auto series = load_series(cfg);
    const auto ex = extract(series, cfg.local_vol, cfg.stoch_vol, cfg.init);

    std::ostringstream innov;
    innov << "k,date,innovation\n";
    for (std::size_t k = 1; k < series.size(); ++k) {
        innov << k << ',' << format_date(series.date(k)) << ',' << format_number(ex.innovations.values[k - 1])
              << '\n';
    }
    std::ostringstream vol;
    vol << "k,date,v\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        vol << k << ',' << format_date(series.date(k)) << ',' << format_number(ex.vol_path[k]) << '\n';
    }
    const auto innov_path = output_path(cfg, "innovations.csv");
    const auto vol_path = output_path(cfg, "volpath.csv");
    write_file(innov_path, innov.str());
    write_file(vol_path, vol.str());
    out << innov_path.string() << '\n' << vol_path.string() << '\n';
    return kSuccess;
}

int cmd_var(const RunConfig& cfg, std::ostream& out) {
    const auto series = load_series(cfg);
    ScenarioSet scen = [&]() {
        if (cfg.stressed) {
            return stressed_scenarios(series, cfg.local_vol, stressed_window(cfg, series), cfg.base_s0);
        }
        const auto ex = extract(series, cfg.local_vol, cfg.stoch_vol, cfg.init);
        auto base = default_base(series, ex.vol_path);
        if (cfg.base_s0) base.s0 = *cfg.base_s0;
        if (cfg.base_v0) base.v0 = *cfg.base_v0;
        return simulate(ex.innovations, ex.vol_path, series, base);
    }();
    const auto report = var(scen, cfg.confidence, cfg.quantile);

    Json json = Json::object();
    json["confidence"] = report.confidence;
    json["var"] = report.var_value;
    json["n_scenarios"] = report.n_scenarios;
    json["mode"] = to_string(report.mode);
    json["quantile_rule"] = to_string(report.quantile_rule);
    json["base"] = Json{{"s0", scen.base.s0}, {"v0", scen.base.v0}};
    if (report.mode == ScenarioMode::Stressed) {
        const auto window = stressed_window(cfg, series);
        json["window"] = Json{{"from", format_date(window.from)}, {"to", format_date(window.to)}};
    }
    if (report.warning) {
        json["warning"] = *report.warning;
    }
    add_echo(json, cfg);

    std::ostringstream scenarios;
    scenarios << "k,date,s_tilde\n";
    for (std::size_t i = 0; i < scen.size(); ++i) {
        scenarios << i + 1 << ',' << format_date(scen.dates[i]) << ',' << format_number(scen.scenarios[i]) << '\n';
    }
    write_file(output_path(cfg, "scenarios.csv"), scenarios.str());
    if (cfg.pnl_csv) {
        auto values = pnl(scen);
        std::sort(values.begin(), values.end());
        std::ostringstream sorted;
        sorted << "rank,pnl\n";
        for (std::size_t i = 0; i < values.size(); ++i) {
            sorted << i + 1 << ',' << format_number(values[i]) << '\n';
        }
        write_file(output_path(cfg, "pnl_sorted.csv"), sorted.str());
    }
    const auto path = output_path(cfg, "var_report.json");
    write_file(path, dump_json(json));
    out << path.string() << '\n';
    return kSuccess;
}

int cmd_fit(const RunConfig& cfg, std::ostream& out) {
    const auto series = load_series(cfg);
    FreeMask mask = FreeMask::none();
    if (!cfg.free_mask.empty()) {
        mask = FreeMask::parse(cfg.free_mask);
    } else if (std::holds_alternative<GarchVol>(cfg.stoch_vol.kind())) {
        mask = FreeMask::parse("a0,a1,b1");
    } else if (std::holds_alternative<EwmaVol>(cfg.stoch_vol.kind())) {
        mask = FreeMask::parse("lambda");
    } else {
        mask = FreeMask::parse("sigma");
    }
    const auto fit = fit_qmle(series, cfg.local_vol, cfg.stoch_vol, mask, cfg.init, cfg.fit);

    const auto names = qmle_parameter_names(fit.local_vol, fit.stoch_vol);
    const auto values = qmle_parameter_values(fit.local_vol, fit.stoch_vol);
    Json params = Json::object();
    for (std::size_t i = 0; i < names.size(); ++i) {
        params[names[i]] = values[i];
    }
    Json starts = Json::array();
    for (const auto& s : fit.start_points) {
        Json point = Json::object();
        for (std::size_t i = 0; i < names.size() && i < s.size(); ++i) {
            point[names[i]] = s[i];
        }
        starts.push_back(point);
    }
    Json json = Json::object();
    json["parameters"] = params;
    json["free"] = cfg.free_mask.empty() ? Json("default") : Json(cfg.free_mask);
    json["loglik"] = fit.loglik;
    json["start_loglik"] = fit.start_loglik;
    json["converged"] = fit.converged;
    json["iterations"] = fit.iterations;
    json["gradient_norm"] = fit.gradient_norm;
    json["message"] = fit.message;
    json["n_observations"] = series.size();
    json["start_points"] = starts;
    json["fitted_model"] = block_json(to_config_block(fit.local_vol, fit.stoch_vol));
    add_echo(json, cfg);

    const auto path = output_path(cfg, "fit_report.json");
    write_file(path, dump_json(json));
    out << path.string() << '\n';
    return kSuccess;
}

int cmd_diagnose(const RunConfig& cfg, std::ostream& out) {
    const auto series = load_series(cfg);
    const auto ex = extract(series, cfg.local_vol, cfg.stoch_vol, cfg.init);
    const auto report = diagnose(ex.innovations.values, cfg.lags, cfg.significance);

    Json tests = Json::array();
    for (const auto& t : report.tests) {
        Json entry = Json::object();
        entry["name"] = t.name;
        entry["lags"] = t.lags;
        if (t.result) {
            entry["statistic"] = t.result->statistic;
            entry["df"] = t.result->df;
            entry["p_value"] = t.result->p_value;
        } else {
            entry["error"] = Json{{"kind", t.error_kind.value_or("")}, {"message", t.error_message.value_or("")}};
        }
        tests.push_back(entry);
    }
    Json json = Json::object();
    json["tests"] = tests;
    json["verdict"] = to_string(report.verdict);
    json["significance"] = report.significance;
    json["n_innovations"] = ex.innovations.size();
    add_echo(json, cfg);

    const auto path = output_path(cfg, "diagnostics.json");
    write_file(path, dump_json(json));
    out << path.string() << '\n';
    return kSuccess;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Volatility-scaled historical simulation: innovation extraction, VaR, QMLE and diagnostics",
                 "hsvar"};
    app.require_subcommand(1);
    app.fallthrough();

    struct Flag {
        const char* name;
        const char* key;
        const char* help;
    };
    static const Flag flags[] = {
        {"--input", "input", "price CSV with header date,value"},
        {"--label", "label", "series label (default: input path)"},
        {"--out", "out", "output directory"},
        {"--model", "localvol.kind", "local volatility: constant | proportional | displaced"},
        {"--sigma", "localvol.sigma", "local volatility scale"},
        {"--alpha", "localvol.alpha", "displaced mixing weight in [-1, 1]"},
        {"--beta", "localvol.beta", "displaced level"},
        {"--stochvol", "stochvol.kind", "stochastic volatility filter: none | ewma | garch"},
        {"--lambda", "stochvol.lambda", "EWMA smoothing parameter"},
        {"--a0", "stochvol.a0", "GARCH constant"},
        {"--a1", "stochvol.a1", "GARCH ARCH coefficient"},
        {"--b1", "stochvol.b1", "GARCH persistence coefficient"},
        {"--init", "init.kind", "v0 rule: default | unconditional | warmup | fixed"},
        {"--v0", "init.v0", "fixed initial volatility"},
        {"--warmup", "init.warmup", "returns used by the warm-up v0 rule"},
        {"--confidence", "confidence", "VaR confidence level in (0.5, 1)"},
        {"--quantile", "quantile", "quantile rule: lower | interpolated"},
        {"--stressed-from", "stressed.from", "first date of the stressed window"},
        {"--stressed-to", "stressed.to", "last date of the stressed window"},
        {"--base-s0", "base.s0", "override the base price"},
        {"--base-v0", "base.v0", "override the base volatility"},
        {"--seed", "seed", "seed for jittered optimizer starts"},
        {"--free", "fit.free", "comma-separated parameters to fit"},
        {"--min-length", "fit.min_length", "minimum series length for fitting"},
        {"--starts", "fit.starts", "optimizer starts"},
        {"--max-iterations", "fit.max_iterations", "optimizer iteration budget"},
        {"--lags", "diagnostics.lags", "lags for Ljung-Box and ARCH-LM"},
        {"--significance", "diagnostics.significance", "significance level for the verdict"},
    };
    constexpr std::size_t kFlagCount = sizeof(flags) / sizeof(flags[0]);
    std::vector<std::string> storage(kFlagCount);
    std::vector<CLI::Option*> options(kFlagCount);
    for (std::size_t i = 0; i < kFlagCount; ++i) {
        options[i] = app.add_option(flags[i].name, storage[i], flags[i].help);
    }
    std::string config_path;
    app.add_option("--config", config_path, "key = value config file; flags override it");
    bool stressed = false;
    bool drop_first = false;
    bool pnl_csv = false;
    auto* stressed_flag = app.add_flag("--stressed", stressed, "stressed VaR over the window");
    auto* drop_flag = app.add_flag("--drop-first", drop_first, "condition on the first step in the likelihood");
    auto* pnl_flag = app.add_flag("--pnl-csv", pnl_csv, "also write the sorted P&L");

    auto* extract_cmd = app.add_subcommand("extract", "write innovations.csv and volpath.csv");
    auto* var_cmd = app.add_subcommand("var", "write var_report.json");
    auto* fit_cmd = app.add_subcommand("fit", "write fit_report.json");
    auto* diagnose_cmd = app.add_subcommand("diagnose", "write diagnostics.json");

    std::vector<std::string> argv_storage{"hsvar"};
    argv_storage.insert(argv_storage.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : argv_storage) {
        argv.push_back(a.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kSuccess : kInputError;
    }

    try {
        ConfigBlock block;
        if (!config_path.empty()) {
            block = load_config_file(config_path);
        }
        for (std::size_t i = 0; i < kFlagCount; ++i) {
            if (options[i]->count() > 0) {
                block[flags[i].key] = storage[i];
            }
        }
        if (stressed_flag->count() > 0) block["stressed"] = "true";
        if (drop_flag->count() > 0) block["fit.drop_first"] = "true";
        if (pnl_flag->count() > 0) block["var.pnl_csv"] = "true";

        const auto cfg = resolve_config(block, fit_cmd->parsed());
        if (extract_cmd->parsed()) return cmd_extract(cfg, out);
        if (var_cmd->parsed()) return cmd_var(cfg, out);
        if (fit_cmd->parsed()) return cmd_fit(cfg, out);
        if (diagnose_cmd->parsed()) return cmd_diagnose(cfg, out);
        return kInputError;
    } catch (const Error& e) {
        out << error_json(e) << '\n';
        return e.kind() == ErrorKind::NumericalFailure ? kNumericalFailure : kInputError;
    } catch (const std::exception& e) {
        out << error_json(Error(ErrorKind::InvalidParameter, e.what())) << '\n';
        return kInputError;
    }
}

} // namespace hsvol::cli
