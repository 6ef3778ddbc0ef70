#include "chiralflow/model.hpp"

#include "chiralflow/errors.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <utility>

namespace chiralflow {

std::string_view to_string(FrequencyConvention c)
{
    switch (c) {
        case FrequencyConvention::PaperLiteral: return "PaperLiteral";
        case FrequencyConvention::GroundReferenced: return "GroundReferenced";
    }
    return "PaperLiteral";
}

FrequencyConvention frequency_convention_from_string(std::string_view s)
{
    if (s == "PaperLiteral") return FrequencyConvention::PaperLiteral;
    if (s == "GroundReferenced") return FrequencyConvention::GroundReferenced;
    throw ParameterError("unknown frequency convention: " + std::string(s));
}

double ChainParams::effective_D() const
{
    if (c_ME && E_field) return *c_ME * *E_field;
    return D;
}

void ChainParams::validate() const
{
    if (N < 3) throw ParameterError("chain.N must be >= 3, got " + std::to_string(N));
    const double values[] = {J1, J2, effective_D(), B};
    for (double v : values) {
        if (!std::isfinite(v)) throw ParameterError("chain couplings must be finite");
    }
    if (c_ME.has_value() != E_field.has_value()) {
        throw ParameterError("chain.c_ME and chain.E_field must be given together");
    }
}

namespace {

// cos and sin of 2 pi k / N with k reduced to [0, N/2] first, so that k and N - k
// give bit-identical cosines and exactly opposite sines.
std::pair<double, double> unit_phase(long long k, int N)
{
    k %= N;
    if (k < 0) k += N;
    double sign = 1.0;
    if (2 * k > N) {
        k = N - k;
        sign = -1.0;
    }
    const double theta = 2.0 * std::numbers::pi * static_cast<double>(k) / N;
    return {std::cos(theta), sign * std::sin(theta)};
}

} // namespace

double dispersion(const ChainParams& params, int n)
{
    const auto [c1, s1] = unit_phase(n, params.N);
    const auto [c2, s2] = unit_phase(2LL * n, params.N);
    (void)s2;
    const double band = params.J1 * c1 + params.J2 * c2 + params.effective_D() * s1;
    return band - params.B * (params.N - 1);
}

SystemSpectrum build_spectrum(const ChainParams& params, FrequencyConvention conv)
{
    params.validate();
    SystemSpectrum s;
    s.convention = conv;
    s.E_g = -params.B * params.N + 0.0;  // no negative zero at B = 0
    s.E_n.resize(params.N);
    s.omega_n.resize(params.N);
    for (int n = 1; n <= params.N; ++n) {
        const double e = dispersion(params, n);
        s.E_n[n - 1] = e;
        s.omega_n[n - 1] = conv == FrequencyConvention::PaperLiteral ? e - params.B * params.N
                                                                       : e - s.E_g;
    }
    return s;
}

std::vector<std::complex<double>> site_amplitudes(int n, int N)
{
    if (N < 1) throw ParameterError("site_amplitudes: N must be positive");
    if (n < 1 || n > N) {
        throw IndexError("site_amplitudes: mode index " + std::to_string(n) + " outside 1.." +
                         std::to_string(N));
    }
    const double norm = 1.0 / std::sqrt(static_cast<double>(N));
    std::vector<std::complex<double>> amp(N);
    for (int l = 1; l <= N; ++l) {
        const auto [c, s] = unit_phase(static_cast<long long>(n) * l, N);
        amp[l - 1] = {norm * c, -norm * s};
    }
    return amp;
}

} // namespace chiralflow
