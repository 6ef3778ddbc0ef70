// chiralflow: command-line front end for the chain/bath simulator

#include "chiralflow/errors.hpp"
#include "chiralflow/io.hpp"
#include "chiralflow/runner.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace cf = chiralflow;
namespace fs = std::filesystem;

namespace {

struct CommonOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string engine;
    std::string out;
    int workers{0};
    bool svg{false};
};

void add_common(CLI::App* sub, CommonOptions& o)
{
    sub->add_option("--config", o.config_path, "JSON run configuration")->check(CLI::ExistingFile);
    sub->add_option("--seed", o.seed, "bath sampling seed (overrides the config)");
    sub->add_option("--engine", o.engine, "FullPropagator, KernelVolterra or Analytic3");
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--workers", o.workers, "concurrent sweep points")->check(CLI::PositiveNumber);
    sub->add_flag("--svg", o.svg, "also write an SVG line plot");
}

cf::json read_json(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw cf::ConfigError(path + ": cannot open");
    try {
        return cf::json::parse(in);
    } catch (const cf::json::parse_error& e) {
        throw cf::ConfigError(path + ": " + e.what());
    }
}

// Precedence: flag > CHIRALFLOW_OUT_DIR > config file > defaults.
cf::RunConfig load_config(const CommonOptions& o, cf::json* raw = nullptr)
{
    cf::json j = o.config_path.empty() ? cf::json::object() : read_json(o.config_path);
    if (raw) *raw = j;
    cf::RunConfig cfg = cf::run_config_from_json(j);
    if (o.seed) cfg.bath.seed = *o.seed;
    if (!o.engine.empty()) {
        try {
            cfg.engine = cf::engine_from_string(o.engine);
        } catch (const cf::ParameterError& e) {
            throw cf::ConfigError(std::string("--engine: ") + e.what());
        }
    }
    if (const char* env = std::getenv("CHIRALFLOW_OUT_DIR"); env && *env) cfg.output.dir = env;
    if (!o.out.empty()) cfg.output.dir = o.out;
    if (o.svg) cfg.output.svg = true;
    cfg.validate();
    return cfg;
}

fs::path out_file(const cf::RunConfig& cfg, const std::string& suffix)
{
    return fs::path(cfg.output.dir) / (cfg.output.prefix + suffix);
}

void report(const fs::path& p)
{
    std::cout << "wrote " << p.string() << "\n";
}

void print_metrics(const cf::FlowSegments& s)
{
    std::cout << "n_switch=" << s.n_switch << " A_mod=" << cf::io::format_double(s.A_mod)
              << " fraction_positive=" << cf::io::format_double(s.fraction_positive)
              << (s.degenerate ? " (degenerate)" : "") << "\n";
}

int cmd_spectrum(const CommonOptions& o)
{
    const cf::RunConfig cfg = load_config(o);
    const cf::SystemSpectrum s = cf::build_spectrum(cfg.chain, cfg.convention);
    cf::io::CsvWriter csv({"n", "E_n", "omega_n"});
    for (int n = 0; n < s.size(); ++n) {
        csv.add_row(std::vector<std::string>{std::to_string(n + 1), cf::io::format_double(s.E_n[n]),
                                             cf::io::format_double(s.omega_n[n])});
    }
    const auto path = out_file(cfg, "_spectrum.csv");
    csv.save(path);
    std::cout << "E_g=" << cf::io::format_double(s.E_g) << " convention=" << cf::to_string(s.convention) << "\n";
    report(path);
    return 0;
}

int cmd_sample_bath(const CommonOptions& o)
{
    const cf::RunConfig cfg = cf::resolve(load_config(o));
    const cf::BathModes m = cf::sample_modes(cfg.bath);
    cf::io::CsvWriter csv({"k", "omega_k", "g_k"});
    for (std::size_t k = 0; k < m.omega_k.size(); ++k) {
        csv.add_row(std::vector<std::string>{std::to_string(k + 1), cf::io::format_double(m.omega_k[k]),
                                             cf::io::format_double(m.g_k[k])});
    }
    const auto path = out_file(cfg, "_bath.csv");
    csv.save(path);
    std::cout << "omega_c=" << cf::io::format_double(cfg.bath.omega_c) << " prng=" << cf::prng_id << "\n";
    report(path);
    return 0;
}

int cmd_evolve(const CommonOptions& o, int state_index, bool verbose)
{
    const cf::RunConfig cfg = cf::resolve(load_config(o));
    if (cfg.engine != cf::Engine::FullPropagator) {
        throw cf::ConfigError("engine: evolve writes full trajectories and needs FullPropagator");
    }
    const cf::SystemSpectrum spectrum = cf::build_spectrum(cfg.chain, cfg.convention);
    const cf::BathModes modes = cf::sample_modes(cfg.bath);
    auto [c0, c] = cfg.initial_pair[static_cast<std::size_t>(state_index - 1)].resolve(cfg.chain.N);
    const auto states = cf::evolve(cf::make_state(c0, c, cfg.bath.k_max), cfg.evolve, spectrum, modes);
    std::vector<cf::AmplitudeState> lab;
    lab.reserve(states.size());
    for (const auto& s : states) lab.push_back(cf::to_frame(s, cf::Frame::Lab, spectrum, modes));
    const auto path = out_file(cfg, "_trajectory.csv");
    cf::io::write_text(path, cf::trajectory_csv(lab, verbose || cfg.output.verbose));
    const auto prov = out_file(cfg, "_trajectory.json");
    cf::io::write_text(prov, cf::provenance(cfg).dump(2) + "\n");
    double worst = 0.0;
    for (const auto& s : lab) worst = std::max(worst, s.norm_defect());
    std::cout << "max norm defect=" << cf::io::format_double(worst) << "\n";
    report(path);
    report(prov);
    return 0;
}

int cmd_flow(const CommonOptions& o, std::optional<cf::Engine> force)
{
    cf::RunConfig cfg = load_config(o);
    if (force) {
        cfg.engine = *force;
        cfg.validate();
    }
    const cf::RunResult r = cf::run(cfg);
    for (const auto& d : r.diagnostics) std::cerr << "note: " << d << "\n";
    print_metrics(r.segments);
    for (const auto& p : cf::write_run(r, cfg.output.dir)) report(p);
    return 0;
}

std::vector<double> parse_values(const std::string& list)
{
    std::vector<double> values;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            values.push_back(std::stod(item, &used));
            if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw cf::ConfigError("--values: not a number: '" + item + "'");
        }
    }
    return values;
}

int cmd_sweep(const CommonOptions& o, const std::string& param, const std::string& values, const std::string& policy)
{
    cf::json raw;
    const cf::RunConfig cfg = load_config(o, &raw);
    cf::SweepSpec spec = raw.contains("sweep") ? cf::sweep_spec_from_json(raw.at("sweep")) : cf::SweepSpec{};
    if (!param.empty()) spec.parameter = param;
    if (!values.empty()) spec.values = parse_values(values);
    if (!policy.empty()) {
        if (policy == "shared") spec.policy = cf::SeedPolicy::Shared;
        else if (policy == "resample") spec.policy = cf::SeedPolicy::Resample;
        else throw cf::ConfigError("--policy: must be shared or resample");
    }
    if (o.workers > 0) spec.workers = o.workers;
    spec.validate();

    const cf::SweepResult r = cf::sweep(cfg, spec);
    const auto csv_path = out_file(cfg, "_sweep.csv");
    cf::io::write_text(csv_path, cf::sweep_csv(r));
    const auto json_path = out_file(cfg, "_sweep.json");
    cf::io::write_text(json_path, cf::sweep_json(r).dump(2) + "\n");
    report(csv_path);
    report(json_path);
    if (cfg.output.svg && !r.all_failed()) {
        static constexpr const char* palette[] = {"#c0392b", "#2980b9", "#27ae60", "#8e44ad", "#d35400", "#2c3e50"};
        std::vector<cf::io::PlotSeries> traces;
        std::vector<double> t;
        for (std::size_t i = 0; i < r.points.size(); ++i) {
            if (!r.points[i].ok) continue;
            if (t.empty()) t = r.points[i].series.t;
            traces.push_back({spec.parameter + "=" + cf::io::format_double(r.points[i].value), r.points[i].series.R,
                              palette[i % std::size(palette)]});
        }
        const auto svg_path = out_file(cfg, "_sweep_R.svg");
        cf::io::write_text(svg_path, cf::io::svg_line_chart("R(t) across the sweep", "t", t, traces));
        report(svg_path);
    }
    for (const auto& pt : r.points) {
        std::cout << spec.parameter << "=" << cf::io::format_double(pt.value) << ": ";
        if (pt.ok) print_metrics(pt.segments);
        else std::cout << "error: " << pt.error << "\n";
    }
    return r.all_failed() ? 1 : 0;
}

int cmd_compare(const CommonOptions& o, const std::string& against)
{
    const cf::RunConfig cfg = load_config(o);
    cf::Engine second;
    try {
        second = cf::engine_from_string(against);
    } catch (const cf::ParameterError& e) {
        throw cf::ConfigError(std::string("--against: ") + e.what());
    }
    cf::RunConfig other = cfg;
    other.engine = second;
    other.validate();
    const cf::CompareReport rep = cf::compare(cfg, cfg.engine, second);
    const auto path = out_file(cfg, "_compare.json");
    cf::io::write_text(path, cf::to_json(rep).dump(2) + "\n");
    std::cout << cf::to_string(rep.first) << " vs " << cf::to_string(rep.second)
              << ": max|dD|=" << cf::io::format_double(rep.max_abs_dD)
              << " max|dR|=" << cf::io::format_double(rep.max_abs_dR)
              << " max|d|c||=" << cf::io::format_double(rep.max_abs_damplitude) << "\n";
    report(path);
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Chiral spin ring coupled to a Lorentzian magnon bath: dynamics and information flow"};
    app.require_subcommand(1);

    CommonOptions opts;
    auto* spectrum = app.add_subcommand("spectrum", "write the single-excitation spectrum");
    auto* bath = app.add_subcommand("sample-bath", "write the sampled bath modes");
    auto* evolve = app.add_subcommand("evolve", "write the full amplitude trajectory of one initial state");
    auto* flow = app.add_subcommand("flow", "trace-distance flow R(t) and its segmentation");
    auto* analytic = app.add_subcommand("analytic3", "N = 3 residue solution, flow and pole report");
    auto* sweep = app.add_subcommand("sweep", "flow metrics across a parameter sweep");
    auto* compare = app.add_subcommand("compare", "difference report between two engines");
    for (auto* sub : {spectrum, bath, evolve, flow, analytic, sweep, compare}) add_common(sub, opts);

    int state_index = 1;
    bool verbose = false;
    evolve->add_option("--state", state_index, "which state of the initial pair (1 or 2)")->check(CLI::Range(1, 2));
    evolve->add_flag("--verbose", verbose, "include bath amplitudes");

    std::string param, values, policy;
    sweep->add_option("--param", param, "B, D, lambda or gamma0");
    sweep->add_option("--values", values, "comma-separated values");
    sweep->add_option("--policy", policy, "shared or resample");

    std::string against;
    compare->add_option("--against", against, "second engine")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*spectrum) return cmd_spectrum(opts);
        if (*bath) return cmd_sample_bath(opts);
        if (*evolve) return cmd_evolve(opts, state_index, verbose);
        if (*flow) return cmd_flow(opts, std::nullopt);
        if (*analytic) return cmd_flow(opts, cf::Engine::Analytic3);
        if (*sweep) return cmd_sweep(opts, param, values, policy);
        if (*compare) return cmd_compare(opts, against);
    } catch (const cf::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const cf::IntegrationError& e) {
        std::cerr << "integration failed: " << e.what() << "\n";
        return 3;
    } catch (const cf::NormalizationError& e) {
        std::cerr << "integration failed: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
