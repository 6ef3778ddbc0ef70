#include "chiralflow/observables.hpp"

#include "chiralflow/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace chiralflow {

namespace {

ReducedDensityMatrix assemble(cplx c0, const Eigen::VectorXcd& c)
{
    const Eigen::Index N = c.size();
    ReducedDensityMatrix rho;
    rho.entries.resize(N + 1, N + 1);
    rho.entries(0, 0) = 1.0 - c.squaredNorm();
    for (Eigen::Index n = 0; n < N; ++n) {
        rho.entries(0, n + 1) = c0 * std::conj(c[n]);
        rho.entries(n + 1, 0) = c[n] * std::conj(c0);
        for (Eigen::Index m = 0; m < N; ++m) rho.entries(n + 1, m + 1) = c[n] * std::conj(c[m]);
    }
    return rho;
}

} // namespace

ReducedDensityMatrix reduced_density(const AmplitudeState& state)
{
    if (state.norm_defect() > 1e-6) {
        throw NormalizationError("reduced_density: state norm defect " +
                                 std::to_string(state.norm_defect()) + " exceeds 1e-6");
    }
    return assemble(state.c0, state.c);
}

ReducedDensityMatrix reduced_density(cplx c0, const Eigen::VectorXcd& c)
{
    const double pop = std::norm(c0) + c.squaredNorm();
    if (!(pop <= 1.0 + 1e-6)) {
        throw NormalizationError("reduced_density: system population " + std::to_string(pop) +
                                 " exceeds 1");
    }
    return assemble(c0, c);
}

double trace_distance(const ReducedDensityMatrix& rho1, const ReducedDensityMatrix& rho2)
{
    if (rho1.dim() != rho2.dim() || rho1.entries.cols() != rho2.entries.cols()) {
        throw ShapeError("trace_distance: density matrices have different dimensions");
    }
    // Subtract in a canonical order so that D(a, b) and D(b, a) are bit-identical.
    const auto& a = rho1.entries;
    const auto& b = rho2.entries;
    const bool swap = std::lexicographical_compare(
        b.data(), b.data() + b.size(), a.data(), a.data() + a.size(), [](cplx x, cplx y) {
            return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
        });
    const Eigen::MatrixXcd diff = swap ? Eigen::MatrixXcd(b - a) : Eigen::MatrixXcd(a - b);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(diff, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw NumericError("trace_distance: Hermitian eigensolver did not converge");
    }
    const double d = 0.5 * solver.eigenvalues().cwiseAbs().sum();
    // rounding can push the distance of orthogonal pure states a few ulps past 1
    return std::min(d, 1.0);
}

std::vector<double> derivative_series(std::span<const double> D, double h)
{
    if (D.size() < 3) throw GridError("derivative_series: need at least 3 samples");
    if (!(h > 0.0)) throw GridError("derivative_series: step must be positive");
    const std::size_t n = D.size();
    std::vector<double> R(n);
    for (std::size_t i = 1; i + 1 < n; ++i) R[i] = (D[i + 1] - D[i - 1]) / (2.0 * h);
    // differences first, so a constant series gives exactly zero
    R[0] = (4.0 * (D[1] - D[0]) - (D[2] - D[0])) / (2.0 * h);
    R[n - 1] = (4.0 * (D[n - 1] - D[n - 2]) - (D[n - 1] - D[n - 3])) / (2.0 * h);
    return R;
}

std::vector<double> derivative_series(std::span<const double> D, std::span<const double> t)
{
    if (D.size() != t.size()) throw ShapeError("derivative_series: D and t differ in length");
    if (t.size() < 3) throw GridError("derivative_series: need at least 3 samples");
    const double h = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
    for (std::size_t i = 1; i < t.size(); ++i) {
        const double step = t[i] - t[i - 1];
        if (std::abs(step - h) > 1e-9 * std::max(1.0, std::abs(h))) {
            throw GridError("derivative_series: grid is not uniform");
        }
    }
    return derivative_series(D, h);
}

FlowSegments segment_flow(std::span<const double> R, std::span<const double> t, double deadband)
{
    if (R.size() != t.size()) throw ShapeError("segment_flow: R and t differ in length");
    if (!(deadband >= 0.0)) throw ParameterError("segment_flow: deadband must be >= 0");
    FlowSegments out;
    const std::size_t n = R.size();
    if (n == 0) return out;
    for (double r : R) {
        if (!std::isfinite(r)) throw ParameterError("segment_flow: non-finite R sample");
        out.A_mod = std::max(out.A_mod, std::abs(r));
    }

    int first_sign = 0;
    for (double r : R) {
        if (std::abs(r) > deadband) {
            first_sign = r > 0.0 ? 1 : -1;
            break;
        }
    }
    out.degenerate = first_sign == 0;
    int current = out.degenerate ? 1 : first_sign;
    out.sample_sign.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(R[i]) > deadband) current = R[i] > 0.0 ? 1 : -1;
        out.sample_sign[i] = current;
    }

    std::size_t positive = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (out.sample_sign[i] > 0) ++positive;
        if (i + 1 == n || out.sample_sign[i + 1] != out.sample_sign[i]) {
            out.segments.push_back({t[start], t[i], out.sample_sign[i], start, i});
            start = i + 1;
        }
    }
    out.n_switch = static_cast<int>(out.segments.size()) - 1;
    out.fraction_positive = static_cast<double>(positive) / static_cast<double>(n);
    return out;
}

FlowSeries flow_series(std::span<const double> t, std::span<const ReducedDensityMatrix> rho1,
                       std::span<const ReducedDensityMatrix> rho2, double deadband)
{
    if (rho1.size() != t.size() || rho2.size() != t.size()) {
        throw ShapeError("flow_series: trajectories and grid differ in length");
    }
    FlowSeries fs;
    fs.t.assign(t.begin(), t.end());
    fs.deadband = deadband;
    fs.D.resize(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) fs.D[i] = trace_distance(rho1[i], rho2[i]);
    fs.R = derivative_series(fs.D, t);
    return fs;
}

} // namespace chiralflow
