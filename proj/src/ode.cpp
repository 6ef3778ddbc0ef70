#include "chiralflow/ode.hpp"

#include "chiralflow/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace chiralflow::ode {

namespace {

// Dormand–Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

// PI controller constants (Hairer–Wanner DOPRI5 defaults).
constexpr double safety = 0.9;
constexpr double beta = 0.04;
constexpr double expo1 = 0.2 - beta * 0.75;
constexpr double fac_min = 0.2;   // largest shrink
constexpr double fac_max = 10.0;  // largest growth

double error_norm(const Vector& err, const Vector& y0, const Vector& y1, const Options& opt)
{
    double sum = 0.0;
    for (Eigen::Index i = 0; i < err.size(); ++i) {
        const double sc = opt.abs_tol + opt.rel_tol * std::max(std::abs(y0[i]), std::abs(y1[i]));
        const double r = std::abs(err[i]) / sc;
        sum += r * r;
    }
    return std::sqrt(sum / static_cast<double>(std::max<Eigen::Index>(err.size(), 1)));
}

double weighted_norm(const Vector& v, const Vector& y, const Options& opt)
{
    double sum = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double sc = opt.abs_tol + opt.rel_tol * std::abs(y[i]);
        const double r = std::abs(v[i]) / sc;
        sum += r * r;
    }
    return std::sqrt(sum / static_cast<double>(std::max<Eigen::Index>(v.size(), 1)));
}

// Starting step from the size of y and y' (Hairer, Nørsett & Wanner, II.4).
double initial_step(const Rhs& f, double t0, const Vector& y0, const Vector& f0, double span,
                    const Options& opt, Stats& stats)
{
    const double d0 = weighted_norm(y0, y0, opt);
    const double d1 = weighted_norm(f0, y0, opt);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, span);
    Vector y1 = y0 + h0 * f0;
    Vector f1(y0.size());
    f(t0 + h0, y1, f1);
    ++stats.rhs_evaluations;
    const double d2 = weighted_norm(f1 - f0, y0, opt) / h0;
    const double dmax = std::max(d1, d2);
    const double h1 = dmax <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dmax, 0.2);
    return std::min({100.0 * h0, h1, span});
}

} // namespace

Stats integrate(const Rhs& f, Vector y, std::span<const double> times, const Options& opt,
                const Observer& observer)
{
    Stats stats;
    if (times.empty()) return stats;
    if (!(opt.rel_tol > 0.0) || !(opt.abs_tol > 0.0)) {
        throw ParameterError("ode::integrate: tolerances must be positive");
    }
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (!(times[i] >= times[i - 1])) {
            throw GridError("ode::integrate: output times must be non-decreasing");
        }
    }

    const Eigen::Index n = y.size();
    double t = times.front();
    const double t_end = times.back();
    observer(0, y);
    if (times.size() == 1 || t_end == t) {
        for (std::size_t i = 1; i < times.size(); ++i) observer(i, y);
        return stats;
    }

    Vector k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n), err(n);
    f(t, y, k1);
    ++stats.rhs_evaluations;

    double h = opt.initial_step > 0.0 ? opt.initial_step
                                      : initial_step(f, t, y, k1, t_end - t, opt, stats);
    double fac_old = 1e-4;
    std::size_t next = 1;
    while (next < times.size() && times[next] == t) observer(next++, y);

    while (next < times.size()) {
        if (stats.accepted + stats.rejected >= opt.max_steps) {
            throw IntegrationError("ode::integrate: maximum number of steps exceeded", t);
        }
        const double target = times[next];
        const bool clipped = t + h >= target;
        const double h_step = clipped ? target - t : h;
        const double h_floor = 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t));
        if (h_step < h_floor && !clipped) {
            throw IntegrationError("ode::integrate: step size underflow", t);
        }

        ytmp = y + h_step * a21 * k1;
        f(t + c2 * h_step, ytmp, k2);
        ytmp = y + h_step * (a31 * k1 + a32 * k2);
        f(t + c3 * h_step, ytmp, k3);
        ytmp = y + h_step * (a41 * k1 + a42 * k2 + a43 * k3);
        f(t + c4 * h_step, ytmp, k4);
        ytmp = y + h_step * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
        f(t + c5 * h_step, ytmp, k5);
        ytmp = y + h_step * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
        f(t + h_step, ytmp, k6);
        ynew = y + h_step * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
        f(t + h_step, ynew, k7);
        stats.rhs_evaluations += 6;

        err = h_step * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        const double en = error_norm(err, y, ynew, opt);
        if (!std::isfinite(en)) {
            throw IntegrationError("ode::integrate: non-finite state", t);
        }

        const double fac11 = std::pow(std::max(en, 1e-300), expo1);
        if (en <= 1.0) {
            ++stats.accepted;
            double fac = fac11 / std::pow(fac_old, beta);
            fac = std::clamp(fac / safety, 1.0 / fac_max, 1.0 / fac_min);
            const double h_proposed = h_step / fac;
            fac_old = std::max(en, 1e-4);

            t = clipped ? target : t + h_step;
            y.swap(ynew);
            k1.swap(k7);
            // a clipped step says nothing about the admissible step; keep the larger proposal
            h = clipped ? std::max(h, h_proposed) : h_proposed;
            while (next < times.size() && times[next] <= t) observer(next++, y);
        } else {
            ++stats.rejected;
            h = h_step / std::min(1.0 / fac_min, fac11 / safety);
        }
    }
    return stats;
}

} // namespace chiralflow::ode
