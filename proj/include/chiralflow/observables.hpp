// observables.hpp: reduced density matrix, trace distance and information-flow segmentation

#pragma once

#include "chiralflow/propagator.hpp"

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace chiralflow {

// Basis (|g>, |1>, ..., |N>).
struct ReducedDensityMatrix {
    Eigen::MatrixXcd entries;

    Eigen::Index dim() const { return entries.rows(); }
};

// rho = (1 - sum |c_n|^2) |g><g| + sum c0 c_n^* |g><n| + h.c. + sum c_n c_m^* |n><m|.
// Throws NormalizationError when the state's norm defect exceeds 1e-6.
ReducedDensityMatrix reduced_density(const AmplitudeState& state);

// Same matrix from system amplitudes alone (kernel engines carry no bath amplitudes).
// Throws NormalizationError when |c0|^2 + sum |c_n|^2 exceeds 1 by more than 1e-6.
ReducedDensityMatrix reduced_density(cplx c0, const Eigen::VectorXcd& c);

// (1/2) Tr |rho1 - rho2|, via the eigenvalues of the Hermitian difference.
double trace_distance(const ReducedDensityMatrix& rho1, const ReducedDensityMatrix& rho2);

// Central differences inside, second-order one-sided differences at both ends.
// Throws GridError on fewer than 3 samples or a non-uniform grid.
std::vector<double> derivative_series(std::span<const double> D, double h);
std::vector<double> derivative_series(std::span<const double> D, std::span<const double> t);

struct FlowSeries {
    std::vector<double> t;
    std::vector<double> D;
    std::vector<double> R;
    double deadband{1e-10};
};

struct FlowSegment {
    double t_start;
    double t_end;
    int sign;             // +1 backflow (R > 0), -1 outflow
    std::size_t first;    // sample index range [first, last]
    std::size_t last;
};

struct FlowSegments {
    std::vector<FlowSegment> segments;
    std::vector<int> sample_sign;  // sign assigned to each sample
    int n_switch{0};
    double A_mod{0.0};             // max |R|
    double fraction_positive{0.0}; // fraction of samples assigned +1
    bool degenerate{false};        // no sample left the dead band
};

// Samples with |R| <= deadband inherit the previous sign (leading ones take the first
// definite sign); maximal constant-sign runs become segments.
FlowSegments segment_flow(std::span<const double> R, std::span<const double> t, double deadband = 1e-10);

// D(t) between two trajectories sampled on the same grid, then R and segments.
FlowSeries flow_series(std::span<const double> t, std::span<const ReducedDensityMatrix> rho1,
                       std::span<const ReducedDensityMatrix> rho2, double deadband = 1e-10);

} // namespace chiralflow
