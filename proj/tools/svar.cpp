// svar: oil-market structural VAR pipeline.
//
//   svar fetch    --config data/updated.conf --out out/
//   svar estimate --config ... [--with-residuals]
//   svar shocks   --config ...
//   svar irf      --config ... --seed 1 [--method wild|mbb --reps 1000 --block-len 36]
//   svar hd       --config ...
//   svar stage2   --config ... --seed 1 [--target gdp,cpi]
//
// Every artifact gets a `<name>.meta.json` sidecar holding the effective settings.

#include "svar/boot.hpp"
#include "svar/config.hpp"
#include "svar/error.hpp"
#include "svar/hdecomp.hpp"
#include "svar/ident.hpp"
#include "svar/ingest.hpp"
#include "svar/report.hpp"
#include "svar/stage2.hpp"
#include "svar/var.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <set>
#include <sstream>

namespace fs = std::filesystem;
using svar::Error;
using svar::ErrorCode;

namespace {

struct Flags {
    std::string config;
    std::string out = "out";
    std::optional<std::uint64_t> seed;
    std::optional<std::string> sample;
    std::optional<int> lags;
    std::optional<int> horizon;
    std::optional<int> reps;
    std::optional<std::string> method;
    std::optional<int> block_len;
    std::optional<std::string> cumulate;
    std::optional<std::string> demean;
    std::optional<std::string> targets;
    std::optional<int> threads;
    bool offline = false;
    bool with_residuals = false;
};

struct Run {
    std::string command;
    std::string config_path;
    svar::config::KeyValues kv;
    fs::path out_dir;
    bool offline = false;
    std::unique_ptr<svar::ingest::Transport> transport;
    svar::ingest::FetchContext ctx;
};

svar::config::KeyValues merged_config(const Flags& f) {
    auto kv = svar::config::KeyValues::load(f.config);
    if (f.seed) kv.set("seed", std::to_string(*f.seed));
    if (f.sample) kv.set("sample", *f.sample);
    if (f.lags) kv.set("lags", std::to_string(*f.lags));
    if (f.horizon) kv.set("horizon", std::to_string(*f.horizon));
    if (f.reps) kv.set("reps", std::to_string(*f.reps));
    if (f.method) kv.set("method", *f.method);
    if (f.block_len) kv.set("block_len", std::to_string(*f.block_len));
    if (f.cumulate) kv.set("cumulate", *f.cumulate);
    if (f.demean) kv.set("price.demean", *f.demean);
    if (f.targets) kv.set("targets", *f.targets);
    if (f.threads) kv.set("threads", std::to_string(*f.threads));
    return kv;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    out << content;
    if (!out) throw Error(ErrorCode::IoError, "short write to " + path.string());
}

template <typename Writer>
void write_artifact(const Run& run, const std::string& name, Writer&& writer, nlohmann::ordered_json meta) {
    std::ostringstream os;
    writer(os);
    write_file(run.out_dir / name, os.str());
    nlohmann::ordered_json settings;
    for (const auto& [k, v] : run.kv.entries()) settings[k] = v;
    meta["artifact"] = name;
    meta["command"] = run.command;
    meta["config"] = run.config_path;
    meta["settings"] = std::move(settings);
    write_file(run.out_dir / (name + ".meta.json"), meta.dump(2) + "\n");
}

int get_int(const svar::config::KeyValues& kv, const std::string& key, int fallback) {
    return kv.get_int(key).value_or(fallback);
}

std::uint64_t require_seed(const svar::config::KeyValues& kv) {
    auto s = kv.get("seed");
    if (!s || s->empty()) throw Error(ErrorCode::ConfigError, "a seed is required for bootstrap commands (--seed)");
    try {
        std::size_t used = 0;
        const auto v = std::stoull(*s, &used);
        if (used != s->size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw Error(ErrorCode::ConfigError, "seed must be a non-negative integer, got '" + *s + "'");
    }
}

svar::ts::Panel load_panel(const Run& run) {
    return svar::ingest::build_panel(svar::ingest::panel_config_from(run.kv), run.ctx);
}

std::set<int> cumulative_rows(const svar::config::KeyValues& kv, const std::vector<std::string>& names) {
    const auto spec = kv.get_or("cumulate", names.front());
    std::set<int> rows;
    if (spec == "none" || spec.empty()) return rows;
    for (const auto& item : svar::config::split_list(spec)) {
        bool found = false;
        for (std::size_t i = 0; i < names.size(); ++i) {
            if (names[i] == item) {
                rows.insert(static_cast<int>(i));
                found = true;
            }
        }
        if (!found) throw Error(ErrorCode::ConfigError, "cumulate: unknown variable '" + item + "'");
    }
    return rows;
}

int price_row(const svar::config::KeyValues& kv, const std::vector<std::string>& names) {
    const auto name = kv.get_or("price_variable", names.back());
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return static_cast<int>(i);
    throw Error(ErrorCode::ConfigError, "price_variable: unknown variable '" + name + "'");
}

svar::ident::StructuralModel fit_model(const Run& run, const svar::ts::Panel& panel) {
    svar::var::VarSpec spec;
    spec.lags = get_int(run.kv, "lags", 24);
    spec.intercept = run.kv.get_bool("intercept").value_or(true);
    const auto rf = svar::var::estimate(panel, spec);
    std::vector<std::string> shock_names;
    if (auto s = run.kv.get("shock_names")) shock_names = svar::config::split_list(*s);
    return svar::ident::identify(rf, price_row(run.kv, panel.names()), shock_names);
}

nlohmann::ordered_json model_meta(const svar::ident::StructuralModel& sm) {
    nlohmann::ordered_json m;
    m["variables"] = sm.rf.var_names;
    m["shocks"] = sm.shock_names;
    m["sample"] = sm.rf.sample_range().str();
    m["residual_sample"] = sm.rf.residual_range().str();
    m["lags"] = sm.rf.lags();
    m["intercept"] = sm.rf.spec.intercept;
    m["price_variable"] = sm.rf.var_names[static_cast<std::size_t>(sm.price_row)];
    m["sign_flips"] = sm.sign_flips;
    return m;
}

// --- subcommands -----------------------------------------------------------------

struct Target {
    std::string name;
    svar::ingest::SeriesRecipe recipe;
};

std::vector<Target> targets(const svar::config::KeyValues& kv) {
    std::vector<Target> out;
    for (const auto& name : svar::config::split_list(kv.get_or("targets", "")))
        out.push_back({name, svar::ingest::recipe_from(kv, "target." + name)});
    return out;
}

int cmd_fetch(const Run& run) {
    const auto panel = load_panel(run);
    nlohmann::ordered_json meta;
    meta["columns"] = panel.names();
    meta["range"] = panel.range().str();
    meta["rows"] = panel.rows();
    write_artifact(run, "panel.csv", [&](std::ostream& os) { svar::ts::write_panel_csv(os, panel); }, meta);
    for (const auto& t : targets(run.kv)) {
        if (t.recipe.output_frequency() == svar::ingest::Frequency::monthly) {
            (void)svar::ingest::load_monthly(t.recipe, run.ctx, t.name);
        } else {
            (void)svar::ingest::load_quarterly(t.recipe, run.ctx, t.name);
        }
    }
    return 0;
}

int cmd_estimate(const Run& run, bool with_residuals) {
    const auto panel = load_panel(run);
    const auto sm = fit_model(run, panel);
    auto meta = model_meta(sm);
    const auto json = svar::report::reduced_form_json(sm.rf, with_residuals);
    write_artifact(run, "reduced_form.json", [&](std::ostream& os) { os << json.dump(2) << '\n'; }, meta);
    return 0;
}

int cmd_shocks(const Run& run) {
    const auto panel = load_panel(run);
    const auto sm = fit_model(run, panel);
    const auto shocks = svar::ident::structural_shocks(sm);
    const double n = static_cast<double>(shocks.values.rows());
    const Eigen::MatrixXd cov = shocks.values.transpose() * shocks.values / n;
    const double err = (cov - Eigen::MatrixXd::Identity(cov.rows(), cov.cols())).cwiseAbs().maxCoeff();
    if (!(err <= 1e-8))
        throw Error(ErrorCode::InvariantViolation, "structural shock covariance deviates from I by " + std::to_string(err));
    auto meta = model_meta(sm);
    meta["covariance_max_deviation"] = err;
    write_artifact(run, "shocks.csv", [&](std::ostream& os) { svar::report::write_shocks_csv(os, shocks); }, meta);
    return 0;
}

int cmd_irf(const Run& run) {
    const auto panel = load_panel(run);
    const auto sm = fit_model(run, panel);
    svar::boot::BootConfig cfg;
    cfg.seed = require_seed(run.kv);
    cfg.replications = get_int(run.kv, "reps", 1000);
    cfg.method = svar::boot::parse_method(run.kv.get_or("method", "wild"));
    cfg.block_len = get_int(run.kv, "block_len", 36);
    cfg.horizon = get_int(run.kv, "horizon", 15);
    cfg.threads = get_int(run.kv, "threads", 1);
    cfg.cumulative_rows = cumulative_rows(run.kv, sm.rf.var_names);
    const auto bands = svar::boot::bootstrap(sm, cfg);

    auto meta = model_meta(sm);
    meta["horizon"] = cfg.horizon;
    meta["replications"] = cfg.replications;
    meta["successful_replications"] = bands.replications;
    meta["failed_replications"] = bands.failures;
    meta["method"] = svar::boot::to_string(cfg.method);
    if (cfg.method == svar::boot::Method::mbb) meta["block_len"] = cfg.block_len;
    meta["seed"] = cfg.seed;
    std::vector<std::string> cum;
    for (int r : cfg.cumulative_rows) cum.push_back(sm.rf.var_names[static_cast<std::size_t>(r)]);
    meta["cumulated_variables"] = cum;
    write_artifact(run, "irf_bands.csv",
                   [&](std::ostream& os) { svar::report::write_bandset_csv(os, bands, sm.rf.var_names, sm.shock_names); },
                   meta);
    return 0;
}

int cmd_hd(const Run& run) {
    const auto panel = load_panel(run);
    const auto sm = fit_model(run, panel);
    const auto hd = svar::hdecomp::decompose(sm, svar::ident::structural_shocks(sm));
    const double err = hd.max_reconstruction_error();
    if (!(err <= 1e-8))
        throw Error(ErrorCode::InvariantViolation, "historical decomposition does not add up (max error " +
                                                       std::to_string(err) + ")");
    auto meta = model_meta(sm);
    meta["max_reconstruction_error"] = err;
    write_artifact(run, "hd_contributions.csv",
                   [&](std::ostream& os) { svar::report::write_hd_contributions_csv(os, hd); }, meta);
    write_artifact(run, "hd_baseline.csv", [&](std::ostream& os) { svar::report::write_hd_baseline_csv(os, hd); },
                   meta);
    return 0;
}

int cmd_stage2(const Run& run) {
    const auto panel = load_panel(run);
    const auto sm = fit_model(run, panel);
    const auto shocks = svar::ident::structural_shocks(sm);
    const auto monthly = shocks.to_panel();
    const auto quarterly = svar::stage2::shocks_to_quarterly(shocks);

    svar::stage2::Stage2Spec base;
    base.seed = require_seed(run.kv);
    base.lags = get_int(run.kv, "stage2.lags", 12);
    base.block_len = get_int(run.kv, "stage2.block_len", 6);
    base.replications = get_int(run.kv, "stage2.reps", get_int(run.kv, "reps", 1000));
    base.threads = get_int(run.kv, "threads", 1);

    const auto list = targets(run.kv);
    if (list.empty()) throw Error(ErrorCode::ConfigError, "no stage-2 targets configured (targets = ...)");
    for (const auto& t : list) {
        auto spec = base;
        const std::string prefix = "target." + t.name;
        spec.lags = get_int(run.kv, prefix + ".lags", spec.lags);
        spec.block_len = get_int(run.kv, prefix + ".block_len", spec.block_len);
        spec.cumulative = run.kv.get_bool(prefix + ".cumulative").value_or(false);

        std::vector<svar::stage2::Stage2Fit> fits;
        std::string first, last;
        const bool is_monthly = t.recipe.output_frequency() == svar::ingest::Frequency::monthly;
        std::optional<svar::ts::MonthlySeries> zm;
        std::optional<svar::ts::QuarterlySeries> zq;
        if (is_monthly) {
            zm = svar::ingest::load_monthly(t.recipe, run.ctx, t.name);
        } else {
            zq = svar::ingest::load_quarterly(t.recipe, run.ctx, t.name);
        }
        for (std::size_t j = 0; j < sm.shock_names.size(); ++j) {
            const auto aligned = is_monthly ? svar::stage2::align(*zm, monthly.column(j))
                                            : svar::stage2::align(*zq, quarterly[j]);
            fits.push_back(svar::stage2::estimate(aligned.z, aligned.shock, spec, sm.shock_names[j]));
            first = aligned.first;
            last = aligned.last;
        }
        auto meta = model_meta(sm);
        meta["target"] = t.name;
        meta["frequency"] = is_monthly ? "monthly" : "quarterly";
        meta["aligned_sample"] = first + ":" + last;
        meta["regression_rows"] = fits.front().residuals.size();
        meta["lags"] = spec.lags;
        meta["block_len"] = spec.block_len;
        meta["replications"] = spec.replications;
        meta["seed"] = spec.seed;
        meta["cumulative"] = spec.cumulative;
        write_artifact(run, "stage2_" + t.name + ".csv",
                       [&](std::ostream& os) { svar::report::write_stage2_csv(os, fits); }, meta);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Structural VAR pipeline for the global crude-oil market"};
    app.require_subcommand(1);
    Flags flags;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", flags.config, "Key-value run/data configuration")->required();
        sub->add_option("--out", flags.out, "Output directory");
        sub->add_option("--seed", flags.seed, "Bootstrap seed");
        sub->add_option("--sample", flags.sample, "Estimation window FROM:TO (YYYY-MM:YYYY-MM)");
        sub->add_option("--lags", flags.lags, "VAR lag order");
        sub->add_option("--horizon", flags.horizon, "IRF horizon in months");
        sub->add_option("--reps", flags.reps, "Bootstrap replications");
        sub->add_option("--method", flags.method, "Bootstrap method: wild or mbb");
        sub->add_option("--block-len", flags.block_len, "Moving-block length in months");
        sub->add_option("--cumulate", flags.cumulate, "Variables whose IRFs are cumulated (comma list or 'none')");
        sub->add_option("--demean", flags.demean, "Real-price demeaning window FROM:TO");
        sub->add_option("--threads", flags.threads, "Bootstrap worker threads");
        sub->add_flag("--offline", flags.offline, "Use cached provider data only; never touch the network");
    };

    auto* fetch = app.add_subcommand("fetch", "Resolve sources, warm the cache and write the panel");
    auto* estimate = app.add_subcommand("estimate", "Reduced-form estimates as JSON");
    auto* shocks = app.add_subcommand("shocks", "Structural shock series");
    auto* irf = app.add_subcommand("irf", "Structural IRFs with bootstrap bands");
    auto* hd = app.add_subcommand("hd", "Historical decomposition");
    auto* stage2 = app.add_subcommand("stage2", "Distributed-lag regressions on structural shocks");
    for (auto* sub : {fetch, estimate, shocks, irf, hd, stage2}) add_common(sub);
    estimate->add_flag("--with-residuals", flags.with_residuals, "Include residuals in the JSON");
    stage2->add_option("--target", flags.targets, "Stage-2 targets (comma list)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: InvalidArgument: " << e.what() << '\n';
        return 2;
    }

    try {
        Run run;
        run.command = app.get_subcommands().front()->get_name();
        run.config_path = flags.config;
        run.kv = merged_config(flags);
        run.out_dir = flags.out;
        run.offline = flags.offline;
        if (flags.offline) {
            run.transport = std::make_unique<svar::ingest::OfflineTransport>();
        } else {
            run.transport = std::make_unique<svar::ingest::HttpTransport>();
        }
        run.ctx.transport = run.transport.get();
        run.ctx.offline = flags.offline;
        std::error_code ec;
        fs::create_directories(run.out_dir, ec);
        if (ec) throw Error(ErrorCode::IoError, "cannot create output directory " + run.out_dir.string());

        if (run.command == "fetch") return cmd_fetch(run);
        if (run.command == "estimate") return cmd_estimate(run, flags.with_residuals);
        if (run.command == "shocks") return cmd_shocks(run);
        if (run.command == "irf") return cmd_irf(run);
        if (run.command == "hd") return cmd_hd(run);
        if (run.command == "stage2") return cmd_stage2(run);
        return 1;
    } catch (const Error& e) {
        std::string msg = e.what();
        for (auto& c : msg)
            if (c == '\n') c = ' ';
        std::cerr << "error: " << msg << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: Internal: " << e.what() << '\n';
        return 3;
    }
}
