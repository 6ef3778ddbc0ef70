// bath.hpp: Lorentzian magnon reservoir and its reproducible discretization

#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace chiralflow {

enum class SamplingScheme { IidUniform, JitteredGrid };

std::string_view to_string(SamplingScheme s);
SamplingScheme sampling_scheme_from_string(std::string_view s);

// Identifier of the pseudo-random stream used by sample_modes; written into outputs.
inline constexpr std::string_view prng_id = "mt19937_64/u53";

struct BathParams {
    double gamma0{1.0};            // overall rate, ~ 1/tau
    double lambda{0.1};            // spectral width
    double omega_c{0.0};           // center frequency
    int k_max{200};
    double window_halfwidth{20.0}; // in units of lambda
    std::uint64_t seed{42};
    SamplingScheme scheme{SamplingScheme::JitteredGrid};
    double jitter{1.0};            // JitteredGrid: fraction of a cell used for jitter, in [0, 1]

    // gamma0 = 0 is admitted as the closed-system limit.
    void validate() const;

    double window() const { return window_halfwidth * lambda; }
};

struct BathModes {
    std::vector<double> omega_k;
    std::vector<double> g_k;

    int size() const { return static_cast<int>(omega_k.size()); }
};

// J(w) = gamma0 lambda^2 / (2 pi ((w - w_c)^2 + lambda^2))
double spectral_density(double omega, const BathParams& p);

// Mass of J inside [w_c - W, w_c + W]: gamma0 lambda atan(W / lambda) / pi.
double windowed_mass(const BathParams& p);

// Deterministic in p (seed included). g_k^2 = J(w_k) * 2W / k_max.
BathModes sample_modes(const BathParams& p);

// Uniform double in [0, 1) from the top 53 bits of one 64-bit draw.
double uniform_from_bits(std::uint64_t bits);

} // namespace chiralflow
