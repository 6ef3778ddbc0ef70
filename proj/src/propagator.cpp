#include "chiralflow/propagator.hpp"

#include "chiralflow/errors.hpp"
#include "chiralflow/ode.hpp"

#include <cmath>
#include <sstream>
#include <string>

namespace chiralflow {

namespace {

constexpr cplx I{0.0, 1.0};

void check_shapes(const AmplitudeState& s, const SystemSpectrum& spectrum, const BathModes& modes)
{
    if (s.c.size() != spectrum.size() || s.f.size() != modes.size() ||
        modes.g_k.size() != modes.omega_k.size()) {
        std::ostringstream os;
        os << "amplitude shapes (" << s.c.size() << ", " << s.f.size()
           << ") do not match spectrum/bath (" << spectrum.size() << ", " << modes.size() << ")";
        throw ShapeError(os.str());
    }
}

void check_normalized(const AmplitudeState& s)
{
    if (s.norm_defect() >= 1e-12) {
        throw NormalizationError("initial state norm defect " + std::to_string(s.norm_defect()) +
                                 " exceeds 1e-12");
    }
}

// Packed layout: [c_1..c_N, f_1..f_K].
Eigen::VectorXcd pack(const AmplitudeState& s)
{
    Eigen::VectorXcd x(s.c.size() + s.f.size());
    x << s.c, s.f;
    return x;
}

AmplitudeState unpack(const Eigen::VectorXcd& x, double t, cplx c0, Eigen::Index N, Frame frame)
{
    AmplitudeState s;
    s.t = t;
    s.c0 = c0;
    s.c = x.head(N);
    s.f = x.tail(x.size() - N);
    s.frame = frame;
    return s;
}

void lab_rhs(const SystemSpectrum& sp, const BathModes& modes, const Eigen::VectorXcd& x,
             Eigen::VectorXcd& dx)
{
    const Eigen::Index N = sp.size();
    const Eigen::Index K = modes.size();
    cplx bath_drive{0.0, 0.0};
    for (Eigen::Index k = 0; k < K; ++k) bath_drive += modes.g_k[k] * x[N + k];
    const cplx system_sum = x.head(N).sum();
    for (Eigen::Index n = 0; n < N; ++n) dx[n] = -I * (sp.omega_n[n] * x[n] + bath_drive);
    for (Eigen::Index k = 0; k < K; ++k) {
        dx[N + k] = -I * (modes.omega_k[k] * x[N + k] + modes.g_k[k] * system_sum);
    }
}

// i dc_n/dt = sum_k g_k e^{i(w_n - w_k)t} f_k,  i df_k/dt = sum_m g_k e^{-i(w_m - w_k)t} c_m
void gauged_rhs(const SystemSpectrum& sp, const BathModes& modes, double t,
                const Eigen::VectorXcd& x, Eigen::VectorXcd& dx)
{
    const Eigen::Index N = sp.size();
    const Eigen::Index K = modes.size();
    cplx bath_drive{0.0, 0.0};
    for (Eigen::Index k = 0; k < K; ++k) {
        bath_drive += modes.g_k[k] * std::polar(1.0, -modes.omega_k[k] * t) * x[N + k];
    }
    cplx system_sum{0.0, 0.0};
    for (Eigen::Index n = 0; n < N; ++n) system_sum += std::polar(1.0, -sp.omega_n[n] * t) * x[n];
    for (Eigen::Index n = 0; n < N; ++n) {
        dx[n] = -I * std::polar(1.0, sp.omega_n[n] * t) * bath_drive;
    }
    for (Eigen::Index k = 0; k < K; ++k) {
        dx[N + k] = -I * modes.g_k[k] * std::polar(1.0, modes.omega_k[k] * t) * system_sum;
    }
}

} // namespace

std::string_view to_string(Frame f)
{
    return f == Frame::Lab ? "Lab" : "Gauged";
}

std::string_view to_string(EvolveMethod m)
{
    return m == EvolveMethod::AdaptiveRK ? "AdaptiveRK" : "EigenPropagate";
}

EvolveMethod evolve_method_from_string(std::string_view s)
{
    if (s == "AdaptiveRK") return EvolveMethod::AdaptiveRK;
    if (s == "EigenPropagate") return EvolveMethod::EigenPropagate;
    throw ParameterError("unknown evolve method: " + std::string(s));
}

void EvolveConfig::validate() const
{
    if (!(t_max > 0.0) || !std::isfinite(t_max)) throw ParameterError("evolve.t_max must be > 0");
    if (n_samples < 2) throw ParameterError("evolve.n_samples must be >= 2");
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) {
        throw ParameterError("evolve tolerances must be positive");
    }
}

std::vector<double> EvolveConfig::grid() const
{
    std::vector<double> t(n_samples);
    const double h = t_max / (n_samples - 1);
    for (int i = 0; i < n_samples; ++i) t[i] = i * h;
    t.back() = t_max;
    return t;
}

AmplitudeDerivative rhs(const AmplitudeState& state, const SystemSpectrum& spectrum,
                        const BathModes& modes)
{
    check_shapes(state, spectrum, modes);
    const Eigen::Index N = spectrum.size();
    Eigen::VectorXcd x = pack(state);
    Eigen::VectorXcd dx(x.size());
    if (state.frame == Frame::Lab) {
        lab_rhs(spectrum, modes, x, dx);
    } else {
        gauged_rhs(spectrum, modes, state.t, x, dx);
    }
    return {dx.head(N), dx.tail(dx.size() - N)};
}

Eigen::MatrixXd coupling_matrix(const SystemSpectrum& spectrum, const BathModes& modes)
{
    const Eigen::Index N = spectrum.size();
    const Eigen::Index K = modes.size();
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(N + K, N + K);
    for (Eigen::Index n = 0; n < N; ++n) H(n, n) = spectrum.omega_n[n];
    for (Eigen::Index k = 0; k < K; ++k) {
        H(N + k, N + k) = modes.omega_k[k];
        for (Eigen::Index n = 0; n < N; ++n) {
            H(n, N + k) = modes.g_k[k];
            H(N + k, n) = modes.g_k[k];
        }
    }
    return H;
}

double effective_energy(const AmplitudeState& state, const SystemSpectrum& spectrum,
                        const BathModes& modes)
{
    check_shapes(state, spectrum, modes);
    const AmplitudeState s = to_frame(state, Frame::Lab, spectrum, modes);
    double e = 0.0;
    for (Eigen::Index n = 0; n < s.c.size(); ++n) e += spectrum.omega_n[n] * std::norm(s.c[n]);
    cplx drive{0.0, 0.0};
    for (Eigen::Index k = 0; k < s.f.size(); ++k) {
        e += modes.omega_k[k] * std::norm(s.f[k]);
        drive += modes.g_k[k] * s.f[k];
    }
    e += 2.0 * std::real(std::conj(s.c.sum()) * drive);
    return e;
}

AmplitudeState to_frame(const AmplitudeState& state, Frame target, const SystemSpectrum& spectrum,
                        const BathModes& modes)
{
    check_shapes(state, spectrum, modes);
    if (state.frame == target) return state;
    // lab = e^{-i w t} gauged
    const double sign = target == Frame::Lab ? -1.0 : 1.0;
    AmplitudeState out = state;
    out.frame = target;
    for (Eigen::Index n = 0; n < out.c.size(); ++n) {
        out.c[n] *= std::polar(1.0, sign * spectrum.omega_n[n] * state.t);
    }
    for (Eigen::Index k = 0; k < out.f.size(); ++k) {
        out.f[k] *= std::polar(1.0, sign * modes.omega_k[k] * state.t);
    }
    return out;
}

AmplitudeState make_state(cplx c0, Eigen::VectorXcd c, int k_max)
{
    AmplitudeState s;
    s.c0 = c0;
    s.c = std::move(c);
    s.f = Eigen::VectorXcd::Zero(k_max);
    return s;
}

std::vector<AmplitudeState> evolve_ode(const AmplitudeState& init, const EvolveConfig& cfg,
                                       const SystemSpectrum& spectrum, const BathModes& modes)
{
    cfg.validate();
    check_shapes(init, spectrum, modes);
    check_normalized(init);

    const Frame frame = cfg.frame;
    AmplitudeState start = to_frame(init, frame, spectrum, modes);
    const std::vector<double> times = cfg.grid();
    const double t0 = start.t;
    const Eigen::Index N = spectrum.size();

    ode::Rhs f;
    if (frame == Frame::Lab) {
        f = [&](double, const ode::Vector& x, ode::Vector& dx) { lab_rhs(spectrum, modes, x, dx); };
    } else {
        f = [&](double t, const ode::Vector& x, ode::Vector& dx) {
            gauged_rhs(spectrum, modes, t0 + t, x, dx);
        };
    }

    std::vector<AmplitudeState> out(times.size());
    ode::Options opt;
    opt.rel_tol = cfg.rel_tol;
    opt.abs_tol = cfg.abs_tol;
    ode::integrate(f, pack(start), times, opt, [&](std::size_t i, const ode::Vector& x) {
        out[i] = unpack(x, t0 + times[i], start.c0, N, frame);
    });
    return out;
}

std::vector<AmplitudeState> evolve_eig(const AmplitudeState& init, const EvolveConfig& cfg,
                                       const SystemSpectrum& spectrum, const BathModes& modes)
{
    cfg.validate();
    check_shapes(init, spectrum, modes);
    check_normalized(init);

    const AmplitudeState start = to_frame(init, Frame::Lab, spectrum, modes);
    const Eigen::MatrixXd H = coupling_matrix(spectrum, modes);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(H);
    if (solver.info() != Eigen::Success) {
        std::ostringstream os;
        os << "evolve_eig: eigendecomposition of the " << H.rows() << "x" << H.cols()
           << " coupling matrix did not converge (max |H_ij| = " << H.cwiseAbs().maxCoeff() << ")";
        throw NumericError(os.str());
    }
    const Eigen::MatrixXd& V = solver.eigenvectors();
    const Eigen::VectorXd& energies = solver.eigenvalues();
    const Eigen::VectorXcd x0 = pack(start);
    const Eigen::VectorXcd modal = V.transpose() * x0;
    const Eigen::Index N = spectrum.size();

    const std::vector<double> times = cfg.grid();
    std::vector<AmplitudeState> out;
    out.reserve(times.size());
    Eigen::VectorXcd phased(modal.size());
    for (double t : times) {
        if (t == 0.0) {
            AmplitudeState s = start;
            s.t = start.t;
            out.push_back(std::move(s));
            continue;
        }
        for (Eigen::Index j = 0; j < modal.size(); ++j) {
            phased[j] = modal[j] * std::polar(1.0, -energies[j] * t);
        }
        const Eigen::VectorXcd x = V * phased;
        out.push_back(unpack(x, start.t + t, start.c0, N, Frame::Lab));
    }
    return out;
}

std::vector<AmplitudeState> evolve(const AmplitudeState& init, const EvolveConfig& cfg,
                                   const SystemSpectrum& spectrum, const BathModes& modes)
{
    return cfg.method == EvolveMethod::AdaptiveRK ? evolve_ode(init, cfg, spectrum, modes)
                                                   : evolve_eig(init, cfg, spectrum, modes);
}

} // namespace chiralflow
