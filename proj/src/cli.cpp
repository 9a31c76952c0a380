#include "cheapsub/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string_view>
#include <type_traits>

#include "cheapsub/dgm.hpp"
#include "cheapsub/errors.hpp"
#include "cheapsub/estimate.hpp"
#include "cheapsub/intervals.hpp"
#include "cheapsub/longitudinal.hpp"
#include "cheapsub/simstudy.hpp"

namespace cheapsub {

namespace {

using nlohmann::json;

struct FieldCodec {
    std::string name;
    std::function<void(json&, const RunConfig&)> write;
    std::function<void(const json&, RunConfig&)> read;
};

template <class T>
bool json_has_type(const json& v)
{
    if constexpr (std::is_same_v<T, bool>) return v.is_boolean();
    else if constexpr (std::is_same_v<T, std::string>) return v.is_string();
    else if constexpr (std::is_floating_point_v<T>) return v.is_number();
    else if constexpr (std::is_unsigned_v<T>) return v.is_number_unsigned();
    else if constexpr (std::is_integral_v<T>) return v.is_number_integer();
    else {
        if (!v.is_array()) return false;
        for (const auto& e : v) {
            if (!json_has_type<typename T::value_type>(e)) return false;
        }
        return true;
    }
}

template <class T>
const char* type_label()
{
    if constexpr (std::is_same_v<T, bool>) return "a boolean";
    else if constexpr (std::is_same_v<T, std::string>) return "a string";
    else if constexpr (std::is_floating_point_v<T>) return "a number";
    else if constexpr (std::is_unsigned_v<T>) return "a non-negative integer";
    else if constexpr (std::is_integral_v<T>) return "an integer";
    else return "an array";
}

template <class T>
FieldCodec codec(std::string name, T RunConfig::*member)
{
    return {name, [=](json& j, const RunConfig& c) { j[name] = c.*member; },
            [=](const json& v, RunConfig& c) {
                if (!json_has_type<T>(v)) {
                    throw std::invalid_argument("config." + name + ": expected " + type_label<T>());
                }
                c.*member = v.get<T>();
            }};
}

const std::vector<FieldCodec>& codecs()
{
    static const std::vector<FieldCodec> all = {
        codec("command", &RunConfig::command),
        codec("master_seed", &RunConfig::master_seed),
        codec("workers", &RunConfig::workers),
        codec("output", &RunConfig::output),
        codec("format", &RunConfig::format),
        codec("input", &RunConfig::input),
        codec("estimator", &RunConfig::estimator),
        codec("column", &RunConfig::column),
        codec("methods", &RunConfig::methods),
        codec("m", &RunConfig::m),
        codec("eta", &RunConfig::eta),
        codec("B", &RunConfig::B),
        codec("alpha", &RunConfig::alpha),
        codec("max_retries", &RunConfig::max_retries),
        codec("regime", &RunConfig::regime),
        codec("targeting", &RunConfig::targeting),
        codec("q2_scope", &RunConfig::q2_scope),
        codec("q2_interaction", &RunConfig::q2_interaction),
        codec("n", &RunConfig::n),
        codec("n_sim", &RunConfig::n_sim),
        codec("model", &RunConfig::model),
        codec("raw_output", &RunConfig::raw_output),
        codec("draws", &RunConfig::draws),
        codec("truth_seed", &RunConfig::truth_seed),
        codec("tolerance", &RunConfig::tolerance),
        codec("eta_grid", &RunConfig::eta_grid),
        codec("B_grid", &RunConfig::B_grid),
        codec("n_seeds", &RunConfig::n_seeds),
    };
    return all;
}

bool one_of(const std::string& value, std::initializer_list<std::string_view> allowed)
{
    for (auto a : allowed) {
        if (value == a) return true;
    }
    return false;
}

std::vector<Method> resolved_methods(const RunConfig& cfg)
{
    std::vector<Method> out;
    if (cfg.methods.empty()) {
        if (cfg.command == "simulate") {
            return {Method::cheap_subsampling, Method::cheap_bootstrap, Method::jackknife_limit,
                    Method::asymptotic_if};
        }
        return {Method::cheap_subsampling};
    }
    for (const auto& name : cfg.methods) out.push_back(parse_method(name));
    return out;
}

LongitudinalOptions longitudinal_options(const RunConfig& cfg)
{
    LongitudinalOptions opt;
    opt.regime = cfg.regime;
    opt.targeting = cfg.targeting;
    opt.q2_scope = cfg.q2_scope == "stratified" ? OutcomeRegressionScope::stratified : OutcomeRegressionScope::pooled;
    opt.q2_interaction = cfg.q2_interaction;
    return opt;
}

std::ifstream open_input(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw DataError("cannot open input file '" + path + "'");
    return in;
}

template <class F>
auto with_dataset(const RunConfig& cfg, F&& body)
{
    auto in = open_input(cfg.input);
    if (cfg.estimator == "mean") return body(read_sample_csv(in, cfg.column), MeanEstimator{});
    return body(read_longitudinal_csv(in), LongitudinalEstimator{longitudinal_options(cfg)});
}

// Writes `text` to `path` (or `out` when empty). Unless the text is itself a
// JSON document carrying the config, a file output gets a "<path>.json"
// sidecar holding the resolved config and `summary`.
void emit(const RunConfig& cfg, const std::string& path, const std::string& text,
          const std::optional<json>& summary, std::ostream& out)
{
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot open output file '" + path + "'");
    f << text;
    if (!f) throw DataError("failed writing '" + path + "'");
    if (!summary) return;
    std::ofstream side(path + ".json", std::ios::binary);
    if (!side) throw DataError("cannot open output file '" + path + ".json'");
    const json doc{{"config", provenance_json(cfg)}, {"result", *summary}};
    side << doc.dump(2) << '\n';
}

void cmd_ci(const RunConfig& cfg, std::ostream& out)
{
    IntervalRequest req;
    req.methods = resolved_methods(cfg);
    req.alpha = Probability(cfg.alpha);
    req.B = cfg.B;
    req.size = cfg.m > 0 ? SubsampleRule::fixed(cfg.m) : SubsampleRule::fraction(cfg.eta);
    req.max_retries = cfg.max_retries;
    req.workers = cfg.workers;
    req.seed = cfg.master_seed;
    const auto intervals =
        with_dataset(cfg, [&](const auto& data, const auto& est) { return compute_intervals(data, est, req); });

    json rows = intervals;
    std::string text;
    if (cfg.format == "json") {
        text = json{{"config", provenance_json(cfg)}, {"intervals", rows}}.dump(2) + "\n";
    } else {
        text = interval_csv_header() + "\n";
        for (const auto& ci : intervals) text += interval_csv_row(ci) + "\n";
    }
    emit(cfg, cfg.output, text, cfg.format == "json" ? std::nullopt : std::optional<json>(rows), out);
}

ScenarioSpec scenario(const RunConfig& cfg)
{
    ScenarioSpec spec;
    spec.n = cfg.n;
    spec.eta = cfg.eta;
    spec.B = cfg.B;
    spec.alpha = cfg.alpha;
    spec.n_sim = cfg.n_sim;
    spec.methods = resolved_methods(cfg);
    spec.master_seed = cfg.master_seed;
    spec.workers = cfg.workers;
    spec.max_retries = cfg.max_retries;
    return spec;
}

void cmd_simulate(const RunConfig& cfg, std::ostream& out)
{
    const ScenarioSpec spec = scenario(cfg);
    std::unique_ptr<SimulationModel> model;
    if (cfg.model == "normal-mean") {
        model = std::make_unique<NormalMeanSimulation>(0.0, 1.0);
    } else {
        const double truth = truth_by_quadrature(TruthModel::from(DgmParameters{}, cfg.regime));
        model = std::make_unique<LongitudinalSimulation>(longitudinal_options(cfg), truth);
    }
    const CoverageReport report = run_coverage_study(spec, *model, !cfg.raw_output.empty());

    const json summary = report;
    if (cfg.format == "json") {
        emit(cfg, cfg.output, json{{"config", provenance_json(cfg)}, {"report", summary}}.dump(2) + "\n",
             std::nullopt, out);
    } else {
        std::ostringstream csv;
        write_coverage_csv(csv, report);
        emit(cfg, cfg.output, csv.str(), summary, out);
    }
    if (!cfg.raw_output.empty()) {
        std::ostringstream raw;
        write_raw_intervals_csv(raw, report);
        emit(cfg, cfg.raw_output, raw.str(), json{{"truth", report.truth}}, out);
    }
}

void cmd_truth(const RunConfig& cfg, std::ostream& out)
{
    const TruthResult t = truth_oracle(cfg.regime, DgmParameters{}, cfg.draws, cfg.truth_seed, cfg.tolerance);
    const json doc{{"config", provenance_json(cfg)},
                   {"regime", t.regime},
                   {"truth", t.value()},
                   {"quadrature", t.quadrature},
                   {"monte_carlo", t.monte_carlo},
                   {"monte_carlo_draws", t.monte_carlo_draws},
                   {"monte_carlo_seed", t.seed},
                   {"difference", t.monte_carlo - t.quadrature},
                   {"tolerance", cfg.tolerance}};
    emit(cfg, cfg.output, doc.dump(2) + "\n", std::nullopt, out);
}

void cmd_generate(const RunConfig& cfg, std::ostream& out)
{
    std::ostringstream csv;
    write_longitudinal_csv(csv, generate_dgm(cfg.n, cfg.master_seed));
    emit(cfg, cfg.output, csv.str(), json{{"records", cfg.n}}, out);
}

void cmd_seed_experiment(const RunConfig& cfg, std::ostream& out)
{
    SeedExperimentSpec spec;
    spec.eta_grid = cfg.eta_grid;
    spec.B_grid = cfg.B_grid;
    spec.n_seeds = cfg.n_seeds;
    spec.alpha = cfg.alpha;
    spec.master_seed = cfg.master_seed;
    spec.workers = cfg.workers;
    spec.max_retries = cfg.max_retries;
    const auto report =
        with_dataset(cfg, [&](const auto& data, const auto& est) { return run_seed_experiment(data, est, spec); });
    const json summary = report;
    if (cfg.format == "json") {
        emit(cfg, cfg.output, json{{"config", provenance_json(cfg)}, {"report", summary}}.dump(2) + "\n",
             std::nullopt, out);
    } else {
        std::ostringstream csv;
        write_seed_experiment_csv(csv, report);
        emit(cfg, cfg.output, csv.str(), summary, out);
    }
}

// Flags are parsed into `flags`; only those actually given are copied onto
// the config loaded from file.
class CommandLine {
public:
    CommandLine() : app_("Cheap subsampling confidence intervals and simulation studies", "cheapsub")
    {
        app_.require_subcommand(1);
        app_.set_help_all_flag("--help-all", "Help for every subcommand");

        auto* ci = add_command("ci", "Confidence intervals for an estimator on a CSV dataset");
        common(ci);
        data_input(ci);
        resampling(ci);
        bind(ci, "--method", &RunConfig::methods,
             "Interval method(s): cheap-subsampling, cheap-bootstrap, jackknife-limit, asymptotic-if")
            ->delimiter(',');
        bind(ci, "-m,--m", &RunConfig::m, "Subsample size (overrides --eta when > 0)");
        bind(ci, "--eta", &RunConfig::eta, "Subsample proportion, m = floor(eta * n)");
        bind(ci, "--format", &RunConfig::format, "Output format: csv or json");
        longitudinal(ci);

        auto* sim = add_command("simulate", "Coverage and relative-width study on simulated data");
        common(sim);
        resampling(sim);
        bind(sim, "--method", &RunConfig::methods, "Interval methods to compare (default: all four)")
            ->delimiter(',');
        bind(sim, "--eta", &RunConfig::eta, "Subsample proportion");
        bind(sim, "-n,--n", &RunConfig::n, "Records per simulated dataset");
        bind(sim, "--n-sim", &RunConfig::n_sim, "Number of simulated datasets");
        bind(sim, "--model", &RunConfig::model, "Data model: longitudinal or normal-mean");
        bind(sim, "--raw-output", &RunConfig::raw_output, "Also write per-simulation intervals to this CSV");
        bind(sim, "--format", &RunConfig::format, "Report format: csv or json");
        longitudinal(sim);

        auto* truth = add_command("truth", "True intervened risk by quadrature, checked by Monte Carlo");
        common(truth);
        bind(truth, "--regime", &RunConfig::regime, "Sustained treatment level (0 or 1)");
        bind(truth, "--draws", &RunConfig::draws, "Monte Carlo draws for the cross-check");
        bind(truth, "--truth-seed", &RunConfig::truth_seed, "Seed of the Monte Carlo cross-check");
        bind(truth, "--tolerance", &RunConfig::tolerance, "Allowed quadrature vs Monte Carlo difference");

        auto* gen = add_command("generate", "Write a simulated longitudinal dataset as CSV");
        common(gen);
        bind(gen, "-n,--n", &RunConfig::n, "Number of records");

        auto* seeds = add_command("seed-experiment", "Repeat the cheap subsampling interval over seeds and a grid");
        common(seeds);
        data_input(seeds);
        bind(seeds, "--alpha", &RunConfig::alpha, "Miscoverage level");
        bind(seeds, "--max-retries", &RunConfig::max_retries, "Refits allowed per failed replicate");
        bind(seeds, "--eta-grid", &RunConfig::eta_grid, "Subsample proportions")->delimiter(',');
        bind(seeds, "--B-grid", &RunConfig::B_grid, "Replicate counts")->delimiter(',');
        bind(seeds, "--n-seeds", &RunConfig::n_seeds, "Runs per grid cell");
        bind(seeds, "--format", &RunConfig::format, "Output format: csv or json");
        longitudinal(seeds);
    }

    CLI::App& app() { return app_; }

    std::string chosen() const { return app_.get_subcommands().front()->get_name(); }

    RunConfig resolve() const
    {
        RunConfig cfg;
        if (!config_path_.empty()) {
            auto in = open_input(config_path_);
            json j;
            try {
                j = json::parse(in);
            } catch (const json::parse_error& e) {
                throw std::invalid_argument("config: " + config_path_ + " is not valid JSON: " + e.what());
            }
            // A sidecar written next to an output file nests the config.
            if (j.is_object() && j.contains("config") && j.at("config").is_object()) j = j.at("config");
            from_json(j, cfg);
            if (!cfg.command.empty() && cfg.command != chosen()) {
                throw std::invalid_argument("config.command: '" + cfg.command + "' does not match subcommand '" +
                                            chosen() + "'");
            }
        }
        for (const auto& o : overrides_) {
            if (o.option->count() > 0) o.copy(cfg, flags_);
        }
        cfg.command = chosen();
        return cfg;
    }

private:
    struct Override {
        CLI::Option* option;
        std::function<void(RunConfig&, const RunConfig&)> copy;
    };

    CLI::App* add_command(const std::string& name, const std::string& description)
    {
        auto* sub = app_.add_subcommand(name, description);
        sub->add_option("--config", config_path_, "JSON config file; flags given on the command line win");
        return sub;
    }

    template <class T>
    CLI::Option* bind(CLI::App* sub, const std::string& names, T RunConfig::*member, const std::string& help)
    {
        auto* opt = sub->add_option(names, flags_.*member, help)->capture_default_str();
        overrides_.push_back({opt, [member](RunConfig& dst, const RunConfig& src) { dst.*member = src.*member; }});
        return opt;
    }

    void common(CLI::App* sub)
    {
        bind(sub, "--seed", &RunConfig::master_seed, "Master seed");
        bind(sub, "--workers", &RunConfig::workers, "Worker threads (0 = all cores)");
        bind(sub, "-o,--output", &RunConfig::output, "Output file (default: stdout)");
    }

    void data_input(CLI::App* sub)
    {
        bind(sub, "-i,--input", &RunConfig::input, "Input CSV");
        bind(sub, "--estimator", &RunConfig::estimator, "Estimator: mean or longitudinal");
        bind(sub, "--column", &RunConfig::column, "Column for the mean estimator (default: first)");
    }

    void resampling(CLI::App* sub)
    {
        bind(sub, "-B,--B", &RunConfig::B, "Number of replicates");
        bind(sub, "--alpha", &RunConfig::alpha, "Miscoverage level");
        bind(sub, "--max-retries", &RunConfig::max_retries, "Refits allowed per failed replicate");
    }

    void longitudinal(CLI::App* sub)
    {
        bind(sub, "--regime", &RunConfig::regime, "Sustained treatment level (0 or 1)");
        bind(sub, "--targeting", &RunConfig::targeting, "Apply the targeting step (true/false)");
        bind(sub, "--q2-scope", &RunConfig::q2_scope, "Time-2 outcome regression: pooled or stratified");
        bind(sub, "--q2-interaction", &RunConfig::q2_interaction, "Add a W0*W1 term to the time-2 regression");
    }

    CLI::App app_;
    RunConfig flags_;
    std::string config_path_;
    std::vector<Override> overrides_;
};

}  // namespace

void to_json(nlohmann::json& j, const RunConfig& cfg)
{
    j = json::object();
    for (const auto& c : codecs()) c.write(j, cfg);
}

void from_json(const nlohmann::json& j, RunConfig& cfg)
{
    if (!j.is_object()) throw std::invalid_argument("config: expected a JSON object");
    for (const auto& [key, value] : j.items()) {
        bool known = false;
        for (const auto& c : codecs()) {
            if (c.name == key) {
                c.read(value, cfg);
                known = true;
                break;
            }
        }
        if (!known) throw std::invalid_argument("config." + key + ": unknown field");
    }
}

nlohmann::json provenance_json(const RunConfig& cfg)
{
    json j = cfg;
    j.erase("workers");
    j.erase("output");
    j.erase("raw_output");
    return j;
}

void validate(const RunConfig& cfg)
{
    auto fail = [](const std::string& field, const std::string& what) {
        throw std::invalid_argument("config." + field + ": " + what);
    };
    if (!one_of(cfg.command, {"ci", "simulate", "truth", "generate", "seed-experiment"})) {
        fail("command", "unknown command '" + cfg.command + "'");
    }
    if (!one_of(cfg.format, {"csv", "json"})) fail("format", "must be csv or json");
    if (!one_of(cfg.estimator, {"mean", "longitudinal"})) fail("estimator", "must be mean or longitudinal");
    if (!one_of(cfg.q2_scope, {"pooled", "stratified"})) fail("q2_scope", "must be pooled or stratified");
    if (!one_of(cfg.model, {"longitudinal", "normal-mean"})) fail("model", "must be longitudinal or normal-mean");
    for (const auto& name : cfg.methods) {
        try {
            parse_method(name);
        } catch (const std::invalid_argument& e) {
            fail("methods", e.what());
        }
    }
    if (!(cfg.eta > 0.0 && cfg.eta < 1.0)) fail("eta", "must lie in (0, 1)");
    if (cfg.B < 1) fail("B", "must be >= 1");
    if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) fail("alpha", "must lie in (0, 1)");
    if (cfg.regime != 0 && cfg.regime != 1) fail("regime", "must be 0 or 1");
    if (cfg.n < 1) fail("n", "must be >= 1");
    if (cfg.n_sim < 1) fail("n_sim", "must be >= 1");
    if (cfg.draws < 1) fail("draws", "must be >= 1");
    if (!(cfg.tolerance > 0.0)) fail("tolerance", "must be positive");
    if (cfg.eta_grid.empty()) fail("eta_grid", "must not be empty");
    for (double e : cfg.eta_grid) {
        if (!(e > 0.0 && e < 1.0)) fail("eta_grid", "entries must lie in (0, 1)");
    }
    if (cfg.B_grid.empty()) fail("B_grid", "must not be empty");
    for (auto b : cfg.B_grid) {
        if (b < 1) fail("B_grid", "entries must be >= 1");
    }
    if (cfg.n_seeds < 1) fail("n_seeds", "must be >= 1");
    if ((cfg.command == "ci" || cfg.command == "seed-experiment") && cfg.input.empty()) {
        fail("input", "required for " + cfg.command);
    }
    if (cfg.command == "simulate") {
        if (cfg.n < 2) fail("n", "must be >= 2");
        const auto methods = resolved_methods(cfg);
        const bool subsampling = std::find(methods.begin(), methods.end(), Method::cheap_subsampling) !=
                                     methods.end() ||
                                 std::find(methods.begin(), methods.end(), Method::jackknife_limit) != methods.end();
        if (subsampling) {
            try {
                SubsampleRule::fraction(cfg.eta).resolve(cfg.n);
            } catch (const std::invalid_argument& e) {
                fail("eta", e.what());
            }
        }
    }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CommandLine cli;
    try {
        cli.app().parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = cli.app().exit(e, out, err);
        return code == 0 ? kExitOk : kExitDataError;
    }

    try {
        const RunConfig cfg = cli.resolve();
        validate(cfg);
        if (cfg.command == "ci") cmd_ci(cfg, out);
        else if (cfg.command == "simulate") cmd_simulate(cfg, out);
        else if (cfg.command == "truth") cmd_truth(cfg, out);
        else if (cfg.command == "generate") cmd_generate(cfg, out);
        else cmd_seed_experiment(cfg, out);
        return kExitOk;
    } catch (const EstimatorFailure& e) {
        err << "error: estimator failure: " << e.what() << '\n';
        return kExitEstimatorFailure;
    } catch (const DataError& e) {
        err << "error: " << e.what() << '\n';
        return kExitDataError;
    } catch (const Unsupported& e) {
        err << "error: " << e.what() << '\n';
        return kExitDataError;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitDataError;
    } catch (const std::domain_error& e) {
        err << "error: " << e.what() << '\n';
        return kExitDataError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
}

}  // namespace cheapsub
