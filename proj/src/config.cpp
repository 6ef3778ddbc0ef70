#include "chiralflow/config.hpp"

#include "chiralflow/errors.hpp"

#include <cmath>
#include <set>

namespace chiralflow {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what)
{
    throw ConfigError(path + ": " + what);
}

void reject_unknown(const json& j, const std::string& path, std::initializer_list<const char*> known)
{
    if (!j.is_object()) fail(path, "expected an object");
    const std::set<std::string> allowed(known.begin(), known.end());
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!allowed.count(it.key())) fail(path + "." + it.key(), "unknown field");
    }
}

double get_number(const json& j, const std::string& key, const std::string& path, double fallback)
{
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_number()) fail(path + "." + key, "expected a number");
    return v.get<double>();
}

template <class Int>
Int get_integer(const json& j, const std::string& key, const std::string& path, Int fallback)
{
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_number_integer() && !v.is_number_unsigned()) fail(path + "." + key, "expected an integer");
    return v.get<Int>();
}

std::string get_string(const json& j, const std::string& key, const std::string& path,
                       const std::string& fallback)
{
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_string()) fail(path + "." + key, "expected a string");
    return v.get<std::string>();
}

bool get_bool(const json& j, const std::string& key, const std::string& path, bool fallback)
{
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_boolean()) fail(path + "." + key, "expected true or false");
    return v.get<bool>();
}

cplx parse_cplx(const json& v, const std::string& path)
{
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
        return {v[0].get<double>(), v[1].get<double>()};
    }
    fail(path, "expected a number or [re, im]");
}

json cplx_json(cplx z)
{
    return json::array({z.real(), z.imag()});
}

template <class F>
auto wrap(const std::string& path, F&& f)
{
    try {
        return f();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        fail(path, e.what());
    }
}

InitialAmplitudes parse_initial(const json& j, const std::string& path)
{
    reject_unknown(j, path, {"c0", "c"});
    InitialAmplitudes a;
    if (j.contains("c0")) a.c0 = parse_cplx(j.at("c0"), path + ".c0");
    if (j.contains("c")) {
        const json& c = j.at("c");
        if (!c.is_object()) fail(path + ".c", "expected an object mapping mode index to amplitude");
        for (auto it = c.begin(); it != c.end(); ++it) {
            int n = 0;
            try {
                std::size_t used = 0;
                n = std::stoi(it.key(), &used);
                if (used != it.key().size()) throw std::invalid_argument("trailing");
            } catch (const std::exception&) {
                fail(path + ".c." + it.key(), "mode index must be an integer");
            }
            a.modes.emplace_back(n, parse_cplx(it.value(), path + ".c." + it.key()));
        }
    }
    return a;
}

json initial_json(const InitialAmplitudes& a)
{
    json j;
    j["c0"] = cplx_json(a.c0);
    json c = json::object();
    for (const auto& [n, z] : a.modes) c[std::to_string(n)] = cplx_json(z);
    j["c"] = c;
    return j;
}

} // namespace

std::string_view to_string(Engine e)
{
    switch (e) {
        case Engine::FullPropagator: return "FullPropagator";
        case Engine::KernelVolterra: return "KernelVolterra";
        case Engine::Analytic3: return "Analytic3";
    }
    return "FullPropagator";
}

Engine engine_from_string(std::string_view s)
{
    if (s == "FullPropagator") return Engine::FullPropagator;
    if (s == "KernelVolterra") return Engine::KernelVolterra;
    if (s == "Analytic3") return Engine::Analytic3;
    throw ParameterError("unknown engine: " + std::string(s));
}

std::string_view to_string(SeedPolicy p)
{
    return p == SeedPolicy::Shared ? "shared" : "resample";
}

std::pair<cplx, Eigen::VectorXcd> InitialAmplitudes::resolve(int N) const
{
    Eigen::VectorXcd c = Eigen::VectorXcd::Zero(N);
    for (const auto& [n, z] : modes) {
        if (n < 1 || n > N) {
            throw ParameterError("mode index " + std::to_string(n) + " outside 1.." + std::to_string(N));
        }
        c[n - 1] += z;
    }
    const double norm = std::sqrt(std::norm(c0) + c.squaredNorm());
    if (!(norm > 0.0) || !std::isfinite(norm)) throw ParameterError("zero or non-finite state");
    return {c0 / norm, c / norm};
}

InitialAmplitudes default_initial_state(int sign)
{
    const double a = std::sqrt(0.5);
    return InitialAmplitudes{{a, 0.0}, {{1, {sign * a, 0.0}}}};
}

void RunConfig::validate() const
{
    wrap("chain", [&] { chain.validate(); });
    wrap("bath", [&] { bath.validate(); });
    wrap("evolve", [&] { evolve.validate(); });
    if (engine == Engine::Analytic3 && chain.N != 3) fail("engine", "Analytic3 requires chain.N = 3");
    if (engine != Engine::FullPropagator && chain.N > 8) {
        fail("engine", "kernel engines support chain.N <= 8");
    }
    if (!(deadband >= 0.0)) fail("flow.deadband", "must be >= 0");
    for (int i = 0; i < 2; ++i) {
        wrap("initial_pair[" + std::to_string(i) + "]", [&] { (void)initial_pair[i].resolve(chain.N); });
    }
}

void SweepSpec::validate() const
{
    static const std::set<std::string> params{"B", "D", "lambda", "gamma0"};
    if (!params.count(parameter)) fail("sweep.parameter", "must be one of B, D, lambda, gamma0");
    if (values.empty()) fail("sweep.values", "must not be empty");
    if (workers < 1) fail("sweep.workers", "must be >= 1");
}

double field_free_center(const ChainParams& chain, FrequencyConvention conv)
{
    ChainParams free = chain;
    free.B = 0.0;
    const SystemSpectrum s = build_spectrum(free, conv);
    double sum = 0.0;
    for (double w : s.omega_n) sum += w;
    return sum / static_cast<double>(s.omega_n.size());
}

RunConfig resolve(const RunConfig& cfg)
{
    RunConfig out = cfg;
    if (out.omega_c_auto) {
        out.bath.omega_c = field_free_center(out.chain, out.convention);
        out.omega_c_auto = false;
    }
    return out;
}

RunConfig run_config_from_json(const json& j)
{
    RunConfig cfg;
    reject_unknown(j, "config", {"chain", "bath", "evolve", "engine", "kernel", "initial_pair", "flow", "output", "sweep"});

    if (j.contains("chain")) {
        const json& c = j.at("chain");
        reject_unknown(c, "chain", {"N", "J1", "J2", "D", "c_ME", "E_field", "B", "convention"});
        cfg.chain.N = get_integer<int>(c, "N", "chain", cfg.chain.N);
        cfg.chain.J1 = get_number(c, "J1", "chain", cfg.chain.J1);
        cfg.chain.J2 = get_number(c, "J2", "chain", cfg.chain.J2);
        cfg.chain.D = get_number(c, "D", "chain", cfg.chain.D);
        if (c.contains("c_ME")) cfg.chain.c_ME = get_number(c, "c_ME", "chain", 0.0);
        if (c.contains("E_field")) cfg.chain.E_field = get_number(c, "E_field", "chain", 0.0);
        cfg.chain.B = get_number(c, "B", "chain", cfg.chain.B);
        const std::string conv = get_string(c, "convention", "chain", "PaperLiteral");
        cfg.convention = wrap("chain.convention", [&] { return frequency_convention_from_string(conv); });
    }
    if (j.contains("bath")) {
        const json& b = j.at("bath");
        reject_unknown(b, "bath", {"gamma0", "lambda", "omega_c", "k_max", "window_halfwidth", "seed", "scheme", "jitter"});
        cfg.bath.gamma0 = get_number(b, "gamma0", "bath", cfg.bath.gamma0);
        cfg.bath.lambda = get_number(b, "lambda", "bath", cfg.bath.lambda);
        if (b.contains("omega_c")) {
            const json& w = b.at("omega_c");
            if (w.is_string() && w.get<std::string>() == "auto") {
                cfg.omega_c_auto = true;
            } else if (w.is_number()) {
                cfg.bath.omega_c = w.get<double>();
                cfg.omega_c_auto = false;
            } else {
                fail("bath.omega_c", "expected a number or \"auto\"");
            }
        }
        cfg.bath.k_max = get_integer<int>(b, "k_max", "bath", cfg.bath.k_max);
        cfg.bath.window_halfwidth = get_number(b, "window_halfwidth", "bath", cfg.bath.window_halfwidth);
        cfg.bath.seed = get_integer<std::uint64_t>(b, "seed", "bath", cfg.bath.seed);
        const std::string scheme = get_string(b, "scheme", "bath", std::string(to_string(cfg.bath.scheme)));
        cfg.bath.scheme = wrap("bath.scheme", [&] { return sampling_scheme_from_string(scheme); });
        cfg.bath.jitter = get_number(b, "jitter", "bath", cfg.bath.jitter);
    }
    if (j.contains("evolve")) {
        const json& e = j.at("evolve");
        reject_unknown(e, "evolve", {"t_max", "n_samples", "method", "rel_tol", "abs_tol", "frame"});
        cfg.evolve.t_max = get_number(e, "t_max", "evolve", cfg.evolve.t_max);
        cfg.evolve.n_samples = get_integer<int>(e, "n_samples", "evolve", cfg.evolve.n_samples);
        const std::string method = get_string(e, "method", "evolve", std::string(to_string(cfg.evolve.method)));
        cfg.evolve.method = wrap("evolve.method", [&] { return evolve_method_from_string(method); });
        cfg.evolve.rel_tol = get_number(e, "rel_tol", "evolve", cfg.evolve.rel_tol);
        cfg.evolve.abs_tol = get_number(e, "abs_tol", "evolve", cfg.evolve.abs_tol);
        const std::string frame = get_string(e, "frame", "evolve", "Lab");
        if (frame == "Lab") cfg.evolve.frame = Frame::Lab;
        else if (frame == "Gauged") cfg.evolve.frame = Frame::Gauged;
        else fail("evolve.frame", "must be Lab or Gauged");
    }
    if (j.contains("engine")) {
        if (!j.at("engine").is_string()) fail("engine", "expected a string");
        const std::string e = j.at("engine").get<std::string>();
        cfg.engine = wrap("engine", [&] { return engine_from_string(e); });
    }
    if (j.contains("kernel")) {
        const json& k = j.at("kernel");
        reject_unknown(k, "kernel", {"variant"});
        const std::string v = get_string(k, "variant", "kernel", std::string(to_string(cfg.kernel_variant)));
        cfg.kernel_variant = wrap("kernel.variant", [&] { return kernel_variant_from_string(v); });
    }
    if (j.contains("initial_pair")) {
        const json& p = j.at("initial_pair");
        if (!p.is_array() || p.size() != 2) fail("initial_pair", "expected an array of two states");
        for (int i = 0; i < 2; ++i) cfg.initial_pair[i] = parse_initial(p[i], "initial_pair[" + std::to_string(i) + "]");
    }
    if (j.contains("flow")) {
        const json& f = j.at("flow");
        reject_unknown(f, "flow", {"deadband"});
        cfg.deadband = get_number(f, "deadband", "flow", cfg.deadband);
    }
    if (j.contains("output")) {
        const json& o = j.at("output");
        reject_unknown(o, "output", {"dir", "prefix", "svg", "verbose"});
        cfg.output.dir = get_string(o, "dir", "output", cfg.output.dir);
        cfg.output.prefix = get_string(o, "prefix", "output", cfg.output.prefix);
        cfg.output.svg = get_bool(o, "svg", "output", cfg.output.svg);
        cfg.output.verbose = get_bool(o, "verbose", "output", cfg.output.verbose);
    }
    return cfg;
}

json to_json(const RunConfig& cfg)
{
    json j;
    json chain;
    chain["N"] = cfg.chain.N;
    chain["J1"] = cfg.chain.J1;
    chain["J2"] = cfg.chain.J2;
    chain["D"] = cfg.chain.effective_D();
    if (cfg.chain.c_ME) chain["c_ME"] = *cfg.chain.c_ME;
    if (cfg.chain.E_field) chain["E_field"] = *cfg.chain.E_field;
    chain["B"] = cfg.chain.B;
    chain["convention"] = std::string(to_string(cfg.convention));
    j["chain"] = chain;

    json bath;
    bath["gamma0"] = cfg.bath.gamma0;
    bath["lambda"] = cfg.bath.lambda;
    if (cfg.omega_c_auto) bath["omega_c"] = "auto";
    else bath["omega_c"] = cfg.bath.omega_c;
    bath["k_max"] = cfg.bath.k_max;
    bath["window_halfwidth"] = cfg.bath.window_halfwidth;
    bath["seed"] = cfg.bath.seed;
    bath["scheme"] = std::string(to_string(cfg.bath.scheme));
    bath["jitter"] = cfg.bath.jitter;
    j["bath"] = bath;

    json ev;
    ev["t_max"] = cfg.evolve.t_max;
    ev["n_samples"] = cfg.evolve.n_samples;
    ev["method"] = std::string(to_string(cfg.evolve.method));
    ev["rel_tol"] = cfg.evolve.rel_tol;
    ev["abs_tol"] = cfg.evolve.abs_tol;
    ev["frame"] = std::string(to_string(cfg.evolve.frame));
    j["evolve"] = ev;

    j["engine"] = std::string(to_string(cfg.engine));
    j["kernel"] = json{{"variant", std::string(to_string(cfg.kernel_variant))}};
    j["initial_pair"] = json::array({initial_json(cfg.initial_pair[0]), initial_json(cfg.initial_pair[1])});
    j["flow"] = json{{"deadband", cfg.deadband}};
    json out;
    // output.dir is left out on purpose: where files land must not change their bytes
    out["prefix"] = cfg.output.prefix;
    out["svg"] = cfg.output.svg;
    out["verbose"] = cfg.output.verbose;
    j["output"] = out;
    return j;
}

SweepSpec sweep_spec_from_json(const json& j)
{
    SweepSpec s;
    reject_unknown(j, "sweep", {"parameter", "values", "policy", "workers"});
    s.parameter = get_string(j, "parameter", "sweep", s.parameter);
    if (j.contains("values")) {
        const json& v = j.at("values");
        if (!v.is_array()) fail("sweep.values", "expected an array of numbers");
        for (const json& x : v) {
            if (!x.is_number()) fail("sweep.values", "expected an array of numbers");
            s.values.push_back(x.get<double>());
        }
    }
    const std::string policy = get_string(j, "policy", "sweep", "shared");
    if (policy == "shared") s.policy = SeedPolicy::Shared;
    else if (policy == "resample") s.policy = SeedPolicy::Resample;
    else fail("sweep.policy", "must be shared or resample");
    s.workers = get_integer<int>(j, "workers", "sweep", s.workers);
    return s;
}

json to_json(const SweepSpec& spec)
{
    json j;
    j["parameter"] = spec.parameter;
    j["values"] = spec.values;
    j["policy"] = std::string(to_string(spec.policy));
    return j;
}

RunConfig with_parameter(const RunConfig& cfg, std::string_view parameter, double value)
{
    RunConfig out = cfg;
    if (parameter == "B") {
        out.chain.B = value;
    } else if (parameter == "D") {
        out.chain.D = value;
        out.chain.c_ME.reset();
        out.chain.E_field.reset();
    } else if (parameter == "lambda") {
        out.bath.lambda = value;
    } else if (parameter == "gamma0") {
        out.bath.gamma0 = value;
    } else {
        throw ConfigError("sweep.parameter: unknown parameter " + std::string(parameter));
    }
    return out;
}

} // namespace chiralflow
