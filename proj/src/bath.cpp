#include "chiralflow/bath.hpp"

#include "chiralflow/errors.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace chiralflow {

std::string_view to_string(SamplingScheme s)
{
    switch (s) {
        case SamplingScheme::IidUniform: return "IidUniform";
        case SamplingScheme::JitteredGrid: return "JitteredGrid";
    }
    return "IidUniform";
}

SamplingScheme sampling_scheme_from_string(std::string_view s)
{
    if (s == "IidUniform") return SamplingScheme::IidUniform;
    if (s == "JitteredGrid") return SamplingScheme::JitteredGrid;
    throw ParameterError("unknown bath sampling scheme: " + std::string(s));
}

void BathParams::validate() const
{
    if (!(gamma0 >= 0.0) || !std::isfinite(gamma0)) throw ParameterError("bath.gamma0 must be >= 0");
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ParameterError("bath.lambda must be > 0");
    if (!std::isfinite(omega_c)) throw ParameterError("bath.omega_c must be finite");
    if (k_max < 1) throw ParameterError("bath.k_max must be >= 1");
    if (!(window_halfwidth > 0.0) || !std::isfinite(window_halfwidth)) {
        throw ParameterError("bath.window_halfwidth must be > 0");
    }
    if (!(jitter >= 0.0 && jitter <= 1.0)) throw ParameterError("bath.jitter must lie in [0, 1]");
}

double spectral_density(double omega, const BathParams& p)
{
    const double x = omega - p.omega_c;
    return p.gamma0 * p.lambda * p.lambda / (2.0 * std::numbers::pi * (x * x + p.lambda * p.lambda));
}

double windowed_mass(const BathParams& p)
{
    return p.gamma0 * p.lambda * std::atan(p.window_halfwidth) / std::numbers::pi;
}

double uniform_from_bits(std::uint64_t bits)
{
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

BathModes sample_modes(const BathParams& p)
{
    p.validate();
    const double W = p.window();
    const double cell = 2.0 * W / p.k_max;
    std::mt19937_64 rng(p.seed);

    BathModes modes;
    modes.omega_k.resize(p.k_max);
    modes.g_k.resize(p.k_max);
    for (int k = 0; k < p.k_max; ++k) {
        const double u = uniform_from_bits(rng());
        double w = 0.0;
        switch (p.scheme) {
            case SamplingScheme::IidUniform:
                w = p.omega_c - W + 2.0 * W * u;
                break;
            case SamplingScheme::JitteredGrid:
                w = p.omega_c - W + (k + 0.5) * cell + (u - 0.5) * cell * p.jitter;
                break;
        }
        modes.omega_k[k] = w;
        modes.g_k[k] = std::sqrt(spectral_density(w, p) * cell);
    }
    return modes;
}

} // namespace chiralflow
