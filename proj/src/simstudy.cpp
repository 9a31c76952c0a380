#include "cheapsub/simstudy.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

#include "cheapsub/format.hpp"
#include "cheapsub/parallel.hpp"

namespace cheapsub {

bool ScenarioSpec::has(Method m) const { return std::find(methods.begin(), methods.end(), m) != methods.end(); }

void validate(const ScenarioSpec& spec)
{
    auto fail = [](const std::string& what) { throw std::invalid_argument("scenario." + what); };
    if (spec.n < 2) fail("n: must be >= 2");
    if (!(spec.eta > 0.0 && spec.eta < 1.0)) fail("eta: must lie in (0, 1)");
    if (spec.B < 1) fail("B: must be >= 1");
    if (!(spec.alpha > 0.0 && spec.alpha < 1.0)) fail("alpha: must lie in (0, 1)");
    if (spec.n_sim < 1) fail("n_sim: must be >= 1");
    if (spec.methods.empty()) fail("methods: at least one method is required");
    for (std::size_t i = 0; i < spec.methods.size(); ++i) {
        for (std::size_t j = i + 1; j < spec.methods.size(); ++j) {
            if (spec.methods[i] == spec.methods[j]) fail("methods: duplicate entry");
        }
    }
    if (spec.has(Method::cheap_subsampling) || spec.has(Method::jackknife_limit)) {
        try {
            SubsampleRule::fraction(spec.eta).resolve(spec.n);
        } catch (const std::invalid_argument& e) {
            fail(std::string("eta: ") + e.what());
        }
    }
}

std::uint64_t simulation_seed(const ScenarioSpec& spec, std::size_t sim_index) noexcept
{
    return derive_seed(spec.master_seed, kSimulationDomain, sim_index);
}

LongitudinalSimulation::LongitudinalSimulation(LongitudinalOptions options, double truth, DgmParameters params)
    : options_(options), truth_(truth), params_(params)
{
}

SimulationDraw LongitudinalSimulation::simulate(const ScenarioSpec& spec, std::size_t sim_index) const
{
    const std::uint64_t seed = simulation_seed(spec, sim_index);
    const auto data = generate_dgm(spec.n, derive_seed(seed, kDataDomain, 0), params_);
    return draw_intervals(data, LongitudinalEstimator{options_}, spec, seed);
}

NormalMeanSimulation::NormalMeanSimulation(double mean, double sd) : mean_(mean), sd_(sd)
{
    if (!(sd > 0.0)) throw std::invalid_argument("NormalMeanSimulation: sd must be positive");
}

SimulationDraw NormalMeanSimulation::simulate(const ScenarioSpec& spec, std::size_t sim_index) const
{
    const std::uint64_t seed = simulation_seed(spec, sim_index);
    StreamRng rng(derive_seed(seed, kDataDomain, 0), 0);
    Sample sample;
    sample.values.resize(spec.n);
    for (auto& v : sample.values) v = mean_ + sd_ * rng.normal();
    return draw_intervals(sample, MeanEstimator{}, spec, seed);
}

const MethodSummary& CoverageReport::summary(Method m) const
{
    for (const auto& s : methods) {
        if (s.method == m) return s;
    }
    throw std::out_of_range("coverage report has no row for method " + std::string(method_name(m)));
}

CoverageReport run_coverage_study(const ScenarioSpec& spec, const SimulationModel& model, bool keep_raw)
{
    validate(spec);
    std::vector<SimulationDraw> draws(spec.n_sim);
    parallel_for(spec.n_sim, spec.workers, [&](std::size_t s) {
        try {
            draws[s] = model.simulate(spec, s);
        } catch (const EstimatorFailure& e) {
            throw EstimatorFailure("scenario n=" + std::to_string(spec.n) + " eta=" + format_double(spec.eta) +
                                   " B=" + std::to_string(spec.B) + " simulation " + std::to_string(s) + ": " +
                                   e.what());
        }
    });

    CoverageReport report;
    report.spec = spec;
    report.model = model.name();
    report.truth = model.truth();
    if (spec.has(Method::cheap_subsampling) || spec.has(Method::jackknife_limit)) {
        report.m = SubsampleRule::fraction(spec.eta).resolve(spec.n);
    }

    const auto n_sim = static_cast<double>(spec.n_sim);
    for (std::size_t k = 0; k < spec.methods.size(); ++k) {
        MethodSummary s;
        s.method = spec.methods[k];
        double width_sum = 0.0;
        for (const auto& d : draws) {
            const auto& ci = d.intervals[k];
            s.covered += ci.contains(report.truth) ? 1 : 0;
            width_sum += ci.width();
            s.failures += ci.retries;
            s.dropped += ci.dropped;
        }
        s.coverage = static_cast<double>(s.covered) / n_sim;
        s.coverage_se = std::sqrt(s.coverage * (1.0 - s.coverage) / n_sim);
        s.mean_width = width_sum / n_sim;
        report.methods.push_back(s);
    }
    if (spec.has(Method::asymptotic_if)) {
        const double reference = report.summary(Method::asymptotic_if).mean_width;
        for (auto& s : report.methods) s.relative_width_pct = 100.0 * (s.mean_width / reference);
    }
    if (keep_raw) report.raw = std::move(draws);
    return report;
}

std::string coverage_csv_header()
{
    return "method,n,eta,m,B,alpha,coverage,coverage_se,mean_width,relative_width_pct,failures,seed";
}

void write_coverage_csv(std::ostream& out, const CoverageReport& report)
{
    const auto& spec = report.spec;
    out << coverage_csv_header() << '\n';
    for (const auto& s : report.methods) {
        const bool is_bootstrap = s.method == Method::cheap_bootstrap;
        const bool is_if = s.method == Method::asymptotic_if;
        out << method_name(s.method) << ',' << spec.n << ',' << format_double(spec.eta) << ','
            << (is_bootstrap ? spec.n : is_if ? 0 : report.m) << ',' << (is_if ? 0 : spec.B) << ',' << format_double(spec.alpha)
            << ',' << format_double(s.coverage) << ',' << format_double(s.coverage_se) << ','
            << format_double(s.mean_width) << ','
            << (std::isnan(s.relative_width_pct) ? std::string() : format_double(s.relative_width_pct)) << ','
            << s.failures << ',' << spec.master_seed << '\n';
    }
}

void write_raw_intervals_csv(std::ostream& out, const CoverageReport& report)
{
    out << "sim,method,point,lower,upper,covered\n";
    for (std::size_t s = 0; s < report.raw.size(); ++s) {
        for (const auto& ci : report.raw[s].intervals) {
            out << s << ',' << method_name(ci.method) << ',' << format_double(ci.point) << ','
                << format_double(ci.lower) << ',' << format_double(ci.upper) << ','
                << (ci.contains(report.truth) ? 1 : 0) << '\n';
        }
    }
}

void to_json(nlohmann::json& j, const ScenarioSpec& spec)
{
    std::vector<std::string> methods;
    for (Method m : spec.methods) methods.emplace_back(method_name(m));
    j = nlohmann::json{{"n", spec.n},
                       {"eta", spec.eta},
                       {"B", spec.B},
                       {"alpha", spec.alpha},
                       {"n_sim", spec.n_sim},
                       {"methods", methods},
                       {"master_seed", spec.master_seed},
                       {"max_retries", spec.max_retries}};
}

void from_json(const nlohmann::json& j, ScenarioSpec& spec)
{
    spec.n = j.value("n", spec.n);
    spec.eta = j.value("eta", spec.eta);
    spec.B = j.value("B", spec.B);
    spec.alpha = j.value("alpha", spec.alpha);
    spec.n_sim = j.value("n_sim", spec.n_sim);
    spec.master_seed = j.value("master_seed", spec.master_seed);
    spec.workers = j.value("workers", spec.workers);
    spec.max_retries = j.value("max_retries", spec.max_retries);
    if (j.contains("methods")) {
        spec.methods.clear();
        for (const auto& name : j.at("methods")) spec.methods.push_back(parse_method(name.get<std::string>()));
    }
}

void to_json(nlohmann::json& j, const CoverageReport& report)
{
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& s : report.methods) {
        nlohmann::json row{{"method", std::string(method_name(s.method))},
                           {"covered", s.covered},
                           {"coverage", s.coverage},
                           {"coverage_se", s.coverage_se},
                           {"mean_width", s.mean_width},
                           {"failures", s.failures},
                           {"dropped", s.dropped}};
        row["relative_width_pct"] =
            std::isnan(s.relative_width_pct) ? nlohmann::json(nullptr) : nlohmann::json(s.relative_width_pct);
        rows.push_back(std::move(row));
    }
    j = nlohmann::json{{"model", report.model},
                       {"truth", report.truth},
                       {"m", report.m},
                       {"scenario", report.spec},
                       {"methods", rows}};
}

void validate(const SeedExperimentSpec& spec)
{
    if (spec.eta_grid.empty()) throw std::invalid_argument("seed_experiment.eta_grid: must not be empty");
    if (spec.B_grid.empty()) throw std::invalid_argument("seed_experiment.B_grid: must not be empty");
    if (spec.n_seeds == 0) throw std::invalid_argument("seed_experiment.n_seeds: must be >= 1");
    for (auto B : spec.B_grid) {
        if (B == 0) throw std::invalid_argument("seed_experiment.B_grid: entries must be >= 1");
    }
    for (auto eta : spec.eta_grid) {
        if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("seed_experiment.eta_grid: entries must lie in (0, 1)");
    }
    if (!(spec.alpha > 0.0 && spec.alpha < 1.0)) throw std::invalid_argument("seed_experiment.alpha: must lie in (0, 1)");
}

SeedExperimentCell summarize_seed_cell(double eta, std::size_t m, std::size_t B, std::vector<double> lower,
                                       std::vector<double> upper, std::vector<double> S)
{
    SeedExperimentCell cell;
    cell.eta = eta;
    cell.m = m;
    cell.B = B;
    const auto [lo, hi] = std::minmax_element(upper.begin(), upper.end());
    cell.upper_min = *lo;
    cell.upper_max = *hi;
    cell.upper_spread = *hi - *lo;
    if (upper.size() > 1) {
        double mean = 0.0;
        for (double u : upper) mean += u;
        mean /= static_cast<double>(upper.size());
        double ss = 0.0;
        for (double u : upper) ss += (u - mean) * (u - mean);
        cell.upper_sd = std::sqrt(ss / static_cast<double>(upper.size() - 1));
    }
    cell.lower = std::move(lower);
    cell.upper = std::move(upper);
    cell.S = std::move(S);
    return cell;
}

void write_seed_experiment_csv(std::ostream& out, const SeedExperimentReport& report)
{
    out << "eta,m,B,run,lower,upper,S\n";
    for (const auto& c : report.cells) {
        for (std::size_t r = 0; r < c.upper.size(); ++r) {
            out << format_double(c.eta) << ',' << c.m << ',' << c.B << ',' << r << ',' << format_double(c.lower[r])
                << ',' << format_double(c.upper[r]) << ',' << format_double(c.S[r]) << '\n';
        }
    }
}

void to_json(nlohmann::json& j, const SeedExperimentReport& report)
{
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& c : report.cells) {
        cells.push_back({{"eta", c.eta},
                         {"m", c.m},
                         {"B", c.B},
                         {"upper_min", c.upper_min},
                         {"upper_max", c.upper_max},
                         {"upper_spread", c.upper_spread},
                         {"upper_sd", c.upper_sd}});
    }
    j = nlohmann::json{{"n", report.n},
                       {"point", report.point},
                       {"alpha", report.spec.alpha},
                       {"n_seeds", report.spec.n_seeds},
                       {"master_seed", report.spec.master_seed},
                       {"cells", cells}};
}

}  // namespace cheapsub
