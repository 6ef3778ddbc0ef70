// config.hpp: run configuration, sweep specification and their JSON form

#pragma once

#include "chiralflow/bath.hpp"
#include "chiralflow/kernel.hpp"
#include "chiralflow/model.hpp"
#include "chiralflow/propagator.hpp"

#include <json.hpp>

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace chiralflow {

using json = nlohmann::ordered_json;

// Field-level configuration problem; what() starts with the JSON path.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class Engine { FullPropagator, KernelVolterra, Analytic3 };

std::string_view to_string(Engine e);
Engine engine_from_string(std::string_view s);

// Initial amplitudes; `modes` holds (1-based mode index, amplitude). Normalized on use.
struct InitialAmplitudes {
    cplx c0{0.0, 0.0};
    std::vector<std::pair<int, cplx>> modes;

    // (c0, c_1..c_N) scaled to unit norm. Throws ParameterError on a zero vector or bad index.
    std::pair<cplx, Eigen::VectorXcd> resolve(int N) const;
};

// (|g> + sign |1>) / sqrt(2)
InitialAmplitudes default_initial_state(int sign);

struct OutputSpec {
    std::string dir{"out"};
    std::string prefix{"run"};
    bool svg{false};
    bool verbose{false};
};

struct RunConfig {
    ChainParams chain;
    FrequencyConvention convention{FrequencyConvention::PaperLiteral};
    BathParams bath;
    bool omega_c_auto{true};  // resolve the bath centre from the field-free chain
    EvolveConfig evolve;
    Engine engine{Engine::FullPropagator};
    KernelVariant kernel_variant{KernelVariant::Eq9AsPrinted};
    std::array<InitialAmplitudes, 2> initial_pair{default_initial_state(+1), default_initial_state(-1)};
    double deadband{1e-10};
    OutputSpec output;

    // Throws ConfigError naming the offending field.
    void validate() const;
};

enum class SeedPolicy { Shared, Resample };

std::string_view to_string(SeedPolicy p);

struct SweepSpec {
    std::string parameter{"B"};  // B, D, lambda or gamma0
    std::vector<double> values;
    SeedPolicy policy{SeedPolicy::Shared};
    int workers{1};

    void validate() const;
};

// Mean of the system frequencies of `chain` with the magnetic field switched off.
double field_free_center(const ChainParams& chain, FrequencyConvention conv);

// Copy with omega_c filled in when it is on auto.
RunConfig resolve(const RunConfig& cfg);

// Missing fields keep their defaults; unknown fields are rejected.
RunConfig run_config_from_json(const json& j);
json to_json(const RunConfig& cfg);

SweepSpec sweep_spec_from_json(const json& j);
json to_json(const SweepSpec& spec);

// Set `parameter` to `value` on a copy of cfg.
RunConfig with_parameter(const RunConfig& cfg, std::string_view parameter, double value);

} // namespace chiralflow
