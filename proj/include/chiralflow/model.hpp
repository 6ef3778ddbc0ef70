// model.hpp: chiral spin ring and its single-excitation spectrum

#pragma once

#include <complex>
#include <optional>
#include <string_view>
#include <vector>

namespace chiralflow {

enum class FrequencyConvention {
    PaperLiteral,     // omega_n = E_n - B N
    GroundReferenced  // omega_n = E_n - E_g = E_n + B N
};

std::string_view to_string(FrequencyConvention c);
FrequencyConvention frequency_convention_from_string(std::string_view s);

// Ring of N spins with nearest/next-nearest exchange, DM coupling and a z field.
// Energies are in units of |J1| with hbar = 1.
struct ChainParams {
    int N{50};
    double J1{-1.0};
    double J2{1.0};
    double D{0.5};
    std::optional<double> c_ME;     // magnetoelectric coefficient
    std::optional<double> E_field;  // electric field along y
    double B{0.0};

    // DM constant actually used: c_ME * E_field when both are given, D otherwise.
    double effective_D() const;

    // Throws ParameterError on N < 3 or non-finite couplings.
    void validate() const;
};

struct SystemSpectrum {
    double E_g{0.0};
    std::vector<double> E_n;      // index i holds mode n = i + 1
    std::vector<double> omega_n;
    FrequencyConvention convention{FrequencyConvention::PaperLiteral};

    int size() const { return static_cast<int>(E_n.size()); }
};

// E_n = J1 cos(2 pi n/N) + J2 cos(4 pi n/N) + D sin(2 pi n/N) - B (N - 1), n = 1..N.
double dispersion(const ChainParams& params, int n);

SystemSpectrum build_spectrum(const ChainParams& params,
                              FrequencyConvention conv = FrequencyConvention::PaperLiteral);

// Bloch state |n> on sites l = 1..N: exp(-i 2 pi n l / N) / sqrt(N).
std::vector<std::complex<double>> site_amplitudes(int n, int N);

} // namespace chiralflow
