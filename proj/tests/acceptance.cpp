// acceptance: one PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include "chiralflow/errors.hpp"
#include "chiralflow/ode.hpp"
#include "chiralflow/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace chiralflow;
namespace fs = std::filesystem;

namespace {

// Tolerances and limits, fixed here rather than read from anywhere.
constexpr double norm_defect_limit = 1e-8;
constexpr double runtime_limit_1 = 60.0;
constexpr double method_gap_limit = 1e-7;
constexpr double runtime_limit_2 = 120.0;
constexpr double residue_gap_limit = 1e-5;
constexpr double multiplicity_rel_tol = 1e-8;
constexpr double continuum_gap_limit = 0.10;
constexpr double runtime_limit_4 = 120.0;
constexpr double initial_distance_tol = 1e-12;
constexpr double metric_tol = 1e-10;
constexpr double closed_system_tol = 1e-8;
constexpr int min_sign_changes = 4;
constexpr double runtime_limit_6 = 300.0;
constexpr double half_period_tol = 0.20;
constexpr double runtime_limit_7 = 180.0;

struct Verdict {
    bool pass;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

// Every trace distance the acceptance runs produce, for criterion 5.
std::vector<double> all_distances;

void collect(const FlowSeries& s)
{
    all_distances.insert(all_distances.end(), s.D.begin(), s.D.end());
}

Verdict norm_conservation()
{
    const auto t0 = Clock::now();
    RunConfig cfg;  // N = 50, k_max = 200, t_max = 50
    cfg.evolve.method = EvolveMethod::AdaptiveRK;
    const RunResult r = run(cfg);
    const double elapsed = seconds_since(t0);
    double worst = 0.0;
    for (const auto& series : r.norm_defect) {
        for (double d : series) worst = std::max(worst, d);
    }
    collect(r.series);
    return {worst <= norm_defect_limit && elapsed <= runtime_limit_1,
            fmt("max norm defect %.3g (limit %.0e), %.1f s (limit %.0f s)", worst, norm_defect_limit, elapsed,
                runtime_limit_1)};
}

Verdict method_agreement()
{
    const auto t0 = Clock::now();
    std::mt19937_64 rng(20240601);
    std::uniform_int_distribution<int> pickN(3, 20), pickK(10, 100);
    std::uniform_real_distribution<double> u(-1.0, 1.0), pos(0.05, 1.0), tm(5.0, 50.0);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        ChainParams chain{.N = pickN(rng), .J1 = -1.0 + 0.3 * u(rng), .J2 = u(rng), .D = u(rng), .B = 0.2 * u(rng)};
        const SystemSpectrum spectrum = build_spectrum(chain);
        BathParams bath{.gamma0 = pos(rng), .lambda = 0.2 * pos(rng), .omega_c = 0.5 * u(rng), .k_max = pickK(rng),
                        .seed = rng()};
        const BathModes modes = sample_modes(bath);
        Eigen::VectorXcd c(chain.N);
        for (auto& z : c) z = cplx(u(rng), u(rng));
        cplx c0(u(rng), u(rng));
        const double norm = std::sqrt(std::norm(c0) + c.squaredNorm());
        const AmplitudeState init = make_state(c0 / norm, c / norm, bath.k_max);
        const EvolveConfig ev{.t_max = tm(rng), .n_samples = 200};
        const auto a = evolve_ode(init, ev, spectrum, modes);
        const auto b = evolve_eig(init, ev, spectrum, modes);
        for (std::size_t i = 0; i < a.size(); ++i) {
            worst = std::max(worst, (a[i].c - b[i].c).cwiseAbs().maxCoeff());
            worst = std::max(worst, (a[i].f - b[i].f).cwiseAbs().maxCoeff());
        }
    }
    const double elapsed = seconds_since(t0);
    return {worst <= method_gap_limit && elapsed <= runtime_limit_2,
            fmt("20 random instances, max |ode - eig| %.3g (limit %.0e), %.1f s", worst, method_gap_limit, elapsed)};
}

Polynomial from_roots(const std::vector<cplx>& roots)
{
    Polynomial q = Polynomial::constant(1.0);
    for (cplx r : roots) q = q * Polynomial::monomial_root(r);
    return q;
}

bool recovers(const Polynomial& q, const std::vector<std::pair<cplx, int>>& expect)
{
    const auto poles = find_poles(q, multiplicity_rel_tol);
    if (poles.size() != expect.size()) return false;
    for (const auto& [root, mu] : expect) {
        bool found = false;
        for (const Pole& p : poles) {
            const double rel = std::abs(p.value - root) / std::max(1.0, std::abs(root));
            found = found || (rel <= multiplicity_rel_tol && p.multiplicity == mu);
        }
        if (!found) return false;
    }
    return true;
}

Verdict residue_oracle()
{
    double worst = 0.0;
    bool distinct = true;
    std::vector<double> t(201);
    for (int i = 0; i <= 200; ++i) t[i] = 0.1 * i;
    for (auto variant : {KernelVariant::Eq9AsPrinted, KernelVariant::LaplaceAsPrinted}) {
        const ChainParams chain{.N = 3};
        const KernelParams p = KernelParams::from(BathParams{.omega_c = 0.0}, build_spectrum(chain), variant);
        const auto res = analytic_residue_solution(1.0, p, t);
        for (const Pole& pole : res.solution.poles) distinct = distinct && pole.multiplicity == 1;
        Eigen::VectorXcd c = Eigen::VectorXcd::Zero(3);
        c[0] = 1.0;
        const auto traj = evolve_volterra(c, p, 20.0, 201);
        worst = std::max(worst, (res.c - traj.c).cwiseAbs().maxCoeff());
    }
    const cplx a(-0.2, 0.7), b(-1.1, -0.4);
    const bool two_four = recovers(from_roots({a, a, b, b, b, b}), {{a, 2}, {b, 4}});
    const cplx x(-0.3, 1.1), y(-0.05, -0.7), z(-1.4, 0.2);
    const bool three_two = recovers(from_roots({x, x, y, y, z, z}), {{x, 2}, {y, 2}, {z, 2}});
    return {distinct && worst <= residue_gap_limit && two_four && three_two,
            fmt("max |residue - Volterra| %.3g on [0, 20] (limit %.0e); (p-a)^2(p-b)^4 %s; three double roots %s",
                worst, residue_gap_limit, two_four ? "recovered" : "MISSED", three_two ? "recovered" : "MISSED")};
}

// Lab-frame continuum limit of the discrete bath with the full Lorentzian kernel:
// dc_n/dt = -i w_n c_n - k y,  dy/dt = -(lambda + i w_c) y + sum_m c_m.
Eigen::MatrixXcd continuum_reference(const SystemSpectrum& s, const BathParams& bath, const Eigen::VectorXcd& c_init,
                                     const std::vector<double>& t)
{
    const Eigen::Index n = s.size();
    const double k = 0.5 * bath.gamma0 * bath.lambda;
    const cplx rate(bath.lambda, bath.omega_c);
    Eigen::MatrixXcd out(static_cast<Eigen::Index>(t.size()), n);
    ode::Vector x = ode::Vector::Zero(n + 1);
    x.head(n) = c_init;
    ode::integrate(
        [&](double, const ode::Vector& v, ode::Vector& dv) {
            for (Eigen::Index m = 0; m < n; ++m) dv[m] = cplx(0.0, -s.omega_n[m]) * v[m] - k * v[n];
            dv[n] = -rate * v[n] + v.head(n).sum();
        },
        x, t, {.rel_tol = 1e-12, .abs_tol = 1e-14},
        [&](std::size_t i, const ode::Vector& v) { out.row(static_cast<Eigen::Index>(i)) = v.head(n).transpose(); });
    return out;
}

Verdict continuum_limit()
{
    const auto t0 = Clock::now();
    RunConfig cfg;
    cfg.chain.N = 3;
    cfg.bath.lambda = 0.5;
    cfg.bath.k_max = 800;
    cfg = resolve(cfg);
    const SystemSpectrum spectrum = build_spectrum(cfg.chain, cfg.convention);
    const BathModes modes = sample_modes(cfg.bath);
    Eigen::VectorXcd c = Eigen::VectorXcd::Zero(3);
    c[0] = 1.0;
    const EvolveConfig ev{.t_max = 10.0, .n_samples = 201};
    const auto full = evolve(make_state(0.0, c, cfg.bath.k_max), ev, spectrum, modes);
    const KernelParams kp = KernelParams::from(cfg.bath, spectrum, KernelVariant::Eq9AsPrinted);
    const auto kern = evolve_volterra(c, kp, ev.t_max, ev.n_samples);
    const auto reference = continuum_reference(spectrum, cfg.bath, c, kern.t);

    double gap = 0.0, reference_gap = 0.0;
    for (std::size_t i = 0; i < full.size(); ++i) {
        for (int n = 0; n < 3; ++n) {
            const double f = std::abs(full[i].c[n]);
            gap = std::max(gap, std::abs(f - std::abs(kern.c(static_cast<Eigen::Index>(i), n))));
            reference_gap = std::max(reference_gap, std::abs(f - std::abs(reference(static_cast<Eigen::Index>(i), n))));
        }
    }
    const double elapsed = seconds_since(t0);
    return {gap <= continuum_gap_limit && elapsed <= runtime_limit_4,
            fmt("sup | |c_full| - |c_kernel| | = %.3g (limit %.2f); full Lorentzian memory term for comparison: "
                "%.3g; %.1f s",
                gap, continuum_gap_limit, reference_gap, elapsed)};
}

ReducedDensityMatrix random_state(std::mt19937_64& rng, int dim)
{
    std::normal_distribution<double> g;
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
    for (int r = 0; r < 3; ++r) {
        Eigen::VectorXcd v(dim);
        for (auto& z : v) z = cplx(g(rng), g(rng));
        rho += v * v.adjoint();
    }
    return {rho / rho.trace().real()};
}

Verdict trace_distance_properties()
{
    RunConfig cfg;
    const RunResult r = run(cfg);
    collect(r.series);
    const double d0 = std::abs(r.series.D.front() - 1.0);

    std::mt19937_64 rng(99);
    double asym = 0.0, triangle = 0.0;
    for (int i = 0; i < 100; ++i) {
        const auto a = random_state(rng, 6), b = random_state(rng, 6), c = random_state(rng, 6);
        asym = std::max(asym, std::abs(trace_distance(a, b) - trace_distance(b, a)));
        triangle = std::max(triangle, trace_distance(a, b) - trace_distance(a, c) - trace_distance(c, b));
    }

    RunConfig closed = cfg;
    closed.bath.gamma0 = 0.0;
    const RunResult rc = run(closed);
    collect(rc.series);
    double drift = 0.0;
    for (double d : rc.series.D) drift = std::max(drift, std::abs(d - rc.series.D.front()));

    double lo = 1.0, hi = 0.0;
    for (double d : all_distances) {
        lo = std::min(lo, d);
        hi = std::max(hi, d);
    }
    const bool pass = lo >= 0.0 && hi <= 1.0 && d0 <= initial_distance_tol && asym == 0.0 &&
                      triangle <= metric_tol && drift <= closed_system_tol;
    return {pass, fmt("D in [%.3g, %.17g] over %zu samples; |D(0) - 1| %.2g; asymmetry %.2g; triangle excess %.2g; "
                      "closed-system drift %.2g",
                      lo, hi, all_distances.size(), d0, asym, triangle, drift)};
}

Verdict field_trend()
{
    const auto t0 = Clock::now();
    RunConfig cfg;  // N = 50, k_max = 200, J1 = -1, J2 = 1, D = 0.5
    const SweepSpec spec{.parameter = "B", .values = {0.0, 0.25, 0.5, 1.0}, .policy = SeedPolicy::Shared};
    const SweepResult s = sweep(cfg, spec);
    const double elapsed = seconds_since(t0);
    bool pass = elapsed <= runtime_limit_6;
    std::ostringstream os;
    for (std::size_t i = 0; i < s.points.size(); ++i) {
        const SweepPoint& p = s.points[i];
        if (!p.ok) {
            pass = false;
            os << "B=" << p.value << " failed: " << p.error << "; ";
            continue;
        }
        collect(p.series);
        pass = pass && p.segments.n_switch >= min_sign_changes;
        if (i > 0 && s.points[i - 1].ok) {
            pass = pass && p.segments.n_switch >= s.points[i - 1].segments.n_switch;
            pass = pass && p.segments.A_mod <= s.points[i - 1].segments.A_mod;
        }
        os << fmt("B=%g: n_switch %d, A_mod %.3g; ", p.value, p.segments.n_switch, p.segments.A_mod);
    }
    os << fmt("%.1f s", elapsed);
    return {pass, os.str()};
}

// Dominant period from the peak of the Hann-windowed, mean-removed power spectrum.
double dominant_period(const std::vector<std::vector<double>>& traces, double h)
{
    const std::size_t n = traces.front().size();
    std::vector<double> power(n / 2 + 1, 0.0);
    for (const auto& x : traces) {
        double mean = 0.0;
        for (double v : x) mean += v;
        mean /= static_cast<double>(n);
        for (std::size_t f = 1; f <= n / 2; ++f) {
            cplx acc{};
            for (std::size_t i = 0; i < n; ++i) {
                const double w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / (n - 1));
                acc += w * (x[i] - mean) * std::polar(1.0, -2.0 * std::numbers::pi * f * i / n);
            }
            power[f] += std::norm(acc);
        }
    }
    std::size_t best = 1;
    for (std::size_t f = 2; f < power.size(); ++f) {
        if (power[f] > power[best]) best = f;
    }
    return n * h / static_cast<double>(best);
}

Verdict dm_phase_shift()
{
    const auto t0 = Clock::now();
    RunConfig cfg;
    cfg.chain.B = 0.0;
    const SweepSpec spec{.parameter = "D", .values = {0.0, 1.0}, .policy = SeedPolicy::Shared};
    const SweepResult s = sweep(cfg, spec);
    if (!s.points[0].ok || !s.points[1].ok) return {false, "a sweep point failed"};
    const auto& r0 = s.points[0].series;
    const auto& r1 = s.points[1].series;
    collect(r0);
    collect(r1);
    const double h = r0.t[1] - r0.t[0];
    const double T = dominant_period({r0.R, r1.R}, h);

    // Cross-correlation sum_i R0(t_i) R1(t_i + lag) over lags in [0, T].
    const std::size_t n = r0.R.size();
    const auto max_lag = static_cast<std::size_t>(std::lround(T / h));
    double best = -INFINITY;
    std::size_t best_lag = 0;
    for (std::size_t lag = 0; lag <= max_lag && lag < n; ++lag) {
        double acc = 0.0;
        for (std::size_t i = 0; i + lag < n; ++i) acc += r0.R[i] * r1.R[i + lag];
        acc /= static_cast<double>(n - lag);
        if (acc > best) {
            best = acc;
            best_lag = lag;
        }
    }
    const double shift = best_lag * h;
    const double miss = std::abs(shift - 0.5 * T);
    const double elapsed = seconds_since(t0);
    return {miss <= half_period_tol * 0.5 * T && elapsed <= runtime_limit_7,
            fmt("dominant period %.4g, correlation peak at lag %.4g, half period %.4g, |lag - T/2| = %.3g "
                "(limit %.3g); %.1f s",
                T, shift, 0.5 * T, miss, half_period_tol * 0.5 * T, elapsed)};
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

Verdict determinism()
{
    RunConfig cfg;
    cfg.output.svg = true;
    const fs::path base = fs::temp_directory_path() / "chiralflow_acceptance";
    fs::remove_all(base);
    const auto a = write_run(run(cfg), base / "first");
    const auto b = write_run(run(cfg), base / "second");
    bool same = a.size() == b.size();
    for (std::size_t i = 0; same && i < a.size(); ++i) same = slurp(a[i]) == slurp(b[i]);
    fs::remove_all(base);
    return {same, fmt("%zu files compared byte for byte", a.size())};
}

} // namespace

int main()
{
    struct Criterion {
        const char* name;
        std::function<Verdict()> check;
    };
    // Criterion 5 reads every distance gathered by the runs before it, so it goes last.
    const std::vector<std::pair<int, Criterion>> criteria{
        {1, {"norm conservation, N=50, k_max=200, t_max=50", norm_conservation}},
        {2, {"ODE vs eigen propagation on random instances", method_agreement}},
        {3, {"residue solution vs Volterra, confluent pole recovery", residue_oracle}},
        {4, {"continuum limit, full propagator vs Eq9AsPrinted kernel", continuum_limit}},
        {6, {"field sweep trend of n_switch and A_mod", field_trend}},
        {7, {"half-period shift between D=0 and D=1", dm_phase_shift}},
        {8, {"byte-identical outputs on repeated runs", determinism}},
        {5, {"trace distance bounds and metric properties", trace_distance_properties}},
    };
    std::vector<std::pair<int, std::string>> lines;
    int failures = 0;
    for (const auto& [id, c] : criteria) {
        Verdict v;
        try {
            v = c.check();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        failures += !v.pass;
        std::printf("%s criterion %d (%s): %s\n", v.pass ? "PASS" : "FAIL", id, c.name, v.detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
