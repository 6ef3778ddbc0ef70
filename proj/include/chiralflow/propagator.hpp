// propagator.hpp: exact single-excitation dynamics of the ring + discrete bath

#pragma once

#include "chiralflow/bath.hpp"
#include "chiralflow/model.hpp"

#include <Eigen/Dense>

#include <complex>
#include <string_view>
#include <vector>

namespace chiralflow {

using cplx = std::complex<double>;

enum class Frame {
    Lab,    // i dc/dt = w c + sum g f
    Gauged  // amplitudes with the free phases e^{-i w t} removed
};

enum class EvolveMethod { AdaptiveRK, EigenPropagate };

std::string_view to_string(Frame f);
std::string_view to_string(EvolveMethod m);
EvolveMethod evolve_method_from_string(std::string_view s);

// c0 |g>|0> + sum_n c_n |n>|0> + sum_k f_k |g>|1_k>
struct AmplitudeState {
    double t{0.0};
    cplx c0{0.0, 0.0};
    Eigen::VectorXcd c;
    Eigen::VectorXcd f;
    Frame frame{Frame::Lab};

    double excited_population() const { return c.squaredNorm(); }
    double bath_population() const { return f.squaredNorm(); }
    double norm_squared() const { return std::norm(c0) + c.squaredNorm() + f.squaredNorm(); }
    double norm_defect() const { return std::abs(norm_squared() - 1.0); }
};

struct EvolveConfig {
    double t_max{50.0};
    int n_samples{2000};
    EvolveMethod method{EvolveMethod::EigenPropagate};
    double rel_tol{1e-10};
    double abs_tol{1e-12};
    Frame frame{Frame::Lab};  // integration frame for AdaptiveRK

    void validate() const;
    std::vector<double> grid() const;  // n_samples uniform times on [0, t_max]
};

struct AmplitudeDerivative {
    Eigen::VectorXcd dc;
    Eigen::VectorXcd df;
};

// Time derivative of (c_n, f_k) in the frame recorded on the state.
AmplitudeDerivative rhs(const AmplitudeState& state, const SystemSpectrum& spectrum,
                        const BathModes& modes);

// Hermitian generator of the linear system on (c_1..c_N, f_1..f_K):
// diag(w_n, w_k) with every system row coupled to bath mode k by g_k.
Eigen::MatrixXd coupling_matrix(const SystemSpectrum& spectrum, const BathModes& modes);

// <x|H|x> for the lab-frame amplitudes, O(N + K).
double effective_energy(const AmplitudeState& state, const SystemSpectrum& spectrum,
                        const BathModes& modes);

// Convert between frames at the state's time.
AmplitudeState to_frame(const AmplitudeState& state, Frame target, const SystemSpectrum& spectrum,
                        const BathModes& modes);

// Pure excited-sector state (c0, c) with an empty bath; c is length N.
AmplitudeState make_state(cplx c0, Eigen::VectorXcd c, int k_max);

std::vector<AmplitudeState> evolve_ode(const AmplitudeState& init, const EvolveConfig& cfg,
                                       const SystemSpectrum& spectrum, const BathModes& modes);

std::vector<AmplitudeState> evolve_eig(const AmplitudeState& init, const EvolveConfig& cfg,
                                       const SystemSpectrum& spectrum, const BathModes& modes);

// Dispatch on cfg.method.
std::vector<AmplitudeState> evolve(const AmplitudeState& init, const EvolveConfig& cfg,
                                   const SystemSpectrum& spectrum, const BathModes& modes);

} // namespace chiralflow
