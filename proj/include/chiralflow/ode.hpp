// ode.hpp: adaptive Dormand–Prince 5(4) integrator for complex linear/nonlinear systems

#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <span>

namespace chiralflow::ode {

using Vector = Eigen::VectorXcd;

// dydt = f(t, y); dydt is pre-sized to y.size().
using Rhs = std::function<void(double t, const Vector& y, Vector& dydt)>;

// Called once per requested output time with the state at that time.
using Observer = std::function<void(std::size_t index, const Vector& y)>;

struct Options {
    double rel_tol{1e-10};
    double abs_tol{1e-12};
    double initial_step{0.0};   // 0 selects the step automatically
    long max_steps{50'000'000};
};

struct Stats {
    long accepted{0};
    long rejected{0};
    long rhs_evaluations{0};
};

// Integrate from times.front() through every entry of `times` (non-decreasing).
// Steps are clipped so that every output time is hit exactly; no interpolation is
// involved in the reported states. Error control uses a PI controller on the
// RMS norm of the embedded error estimate.
Stats integrate(const Rhs& f, Vector y, std::span<const double> times, const Options& opt,
                const Observer& observer);

} // namespace chiralflow::ode
