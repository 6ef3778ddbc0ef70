#include "chiralflow/kernel.hpp"

#include "chiralflow/errors.hpp"
#include "chiralflow/ode.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace chiralflow {

namespace {

constexpr cplx I{0.0, 1.0};

std::string format_cplx(cplx z)
{
    char buf[96];
    std::snprintf(buf, sizeof buf, "(%.6g%+.6gi)", z.real(), z.imag());
    return buf;
}

// Power-series helpers, all truncated to `order` terms.
using Series = std::vector<cplx>;

Series series_mul(const Series& a, const Series& b, std::size_t order)
{
    Series c(order, cplx{});
    for (std::size_t i = 0; i < order && i < a.size(); ++i) {
        for (std::size_t j = 0; i + j < order && j < b.size(); ++j) c[i + j] += a[i] * b[j];
    }
    return c;
}

// 1 / (c + d)^mu
Series series_inverse_power(cplx c, int mu, std::size_t order)
{
    Series base(order);
    cplx inv = 1.0 / c;
    cplx pw = inv;
    for (std::size_t k = 0; k < order; ++k) {
        base[k] = (k % 2 == 0 ? 1.0 : -1.0) * pw;
        pw *= inv;
    }
    Series out(order, cplx{});
    out[0] = 1.0;
    for (int i = 0; i < mu; ++i) out = series_mul(out, base, order);
    return out;
}

Polynomial cofactor_det(const std::vector<std::vector<Polynomial>>& m)
{
    const std::size_t n = m.size();
    if (n == 1) return m[0][0];
    if (n == 2) return m[0][0] * m[1][1] - m[0][1] * m[1][0];
    Polynomial det({cplx{}});
    for (std::size_t col = 0; col < n; ++col) {
        if (m[0][col].is_zero()) continue;
        std::vector<std::vector<Polynomial>> minor(n - 1);
        for (std::size_t r = 1; r < n; ++r) {
            minor[r - 1].reserve(n - 1);
            for (std::size_t c = 0; c < n; ++c) {
                if (c != col) minor[r - 1].push_back(m[r][c]);
            }
        }
        const Polynomial term = m[0][col] * cofactor_det(minor);
        if (col % 2 == 0) det += term;
        else det -= term;
    }
    return det;
}

std::vector<std::vector<Polynomial>> laplace_matrix(const KernelSystem& ks)
{
    const std::size_t n = ks.rate.size();
    std::vector<std::vector<Polynomial>> m(n, std::vector<Polynomial>(n));
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
            const cplx sigma = ks.coupling(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
            if (r == c) {
                // p (p + a) + sigma
                m[r][c] = Polynomial({sigma, ks.rate[c], cplx{1.0, 0.0}});
            } else {
                m[r][c] = Polynomial::constant(sigma);
            }
        }
    }
    return m;
}

void require_size(const KernelParams& p, int lo, int hi, const char* where)
{
    if (p.size() < lo || p.size() > hi) {
        throw ParameterError(std::string(where) + ": unsupported number of modes N = " +
                             std::to_string(p.size()));
    }
}

} // namespace

std::string_view to_string(KernelVariant v)
{
    switch (v) {
        case KernelVariant::Eq9AsPrinted: return "Eq9AsPrinted";
        case KernelVariant::Eq8AsPrinted: return "Eq8AsPrinted";
        case KernelVariant::LaplaceAsPrinted: return "LaplaceAsPrinted";
    }
    return "Eq9AsPrinted";
}

KernelVariant kernel_variant_from_string(std::string_view s)
{
    if (s == "Eq9AsPrinted") return KernelVariant::Eq9AsPrinted;
    if (s == "Eq8AsPrinted") return KernelVariant::Eq8AsPrinted;
    if (s == "LaplaceAsPrinted") return KernelVariant::LaplaceAsPrinted;
    throw ParameterError("unknown kernel variant: " + std::string(s));
}

KernelParams KernelParams::from(const BathParams& bath, const SystemSpectrum& spectrum,
                                KernelVariant variant)
{
    KernelParams p;
    p.gamma0 = bath.gamma0;
    p.lambda = bath.lambda;
    p.omega_c = bath.omega_c;
    p.omega_m = spectrum.omega_n;
    p.variant = variant;
    p.omega_g = spectrum.E_g;
    return p;
}

void KernelParams::validate() const
{
    if (!(gamma0 >= 0.0) || !std::isfinite(gamma0)) throw ParameterError("kernel gamma0 must be >= 0");
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ParameterError("kernel lambda must be > 0");
    if (omega_m.empty()) throw ParameterError("kernel needs at least one system frequency");
}

cplx memory_kernel(std::size_t m, double dt, const KernelParams& p)
{
    if (m >= p.omega_m.size()) throw IndexError("memory_kernel: mode index out of range");
    const cplx rate{p.lambda, p.omega_m[m] + p.omega_c};
    return -p.amplitude() * std::exp(-rate * dt);
}

KernelSystem kernel_system(const KernelParams& p)
{
    p.validate();
    const Eigen::Index n = p.size();
    const double k = p.amplitude();
    KernelSystem ks;
    ks.rate.resize(n);
    ks.coupling = Eigen::MatrixXcd::Zero(n, n);
    for (Eigen::Index m = 0; m < n; ++m) {
        switch (p.variant) {
            case KernelVariant::Eq9AsPrinted:
            case KernelVariant::LaplaceAsPrinted:
                ks.rate[m] = cplx{p.lambda, p.omega_m[m] + p.omega_c};
                break;
            case KernelVariant::Eq8AsPrinted:
                ks.rate[m] = cplx{p.lambda, p.omega_g + p.omega_m[m] - p.omega_c};
                break;
        }
    }
    const cplx off = p.variant == KernelVariant::Eq9AsPrinted ? I * k : cplx{k, 0.0};
    for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index c = 0; c < n; ++c) {
            if (r != c) ks.coupling(r, c) = off;
            else if (p.variant == KernelVariant::Eq8AsPrinted) ks.coupling(r, c) = k;
        }
    }
    return ks;
}

KernelTrajectory evolve_volterra(const Eigen::VectorXcd& c_init, const KernelParams& p,
                                 double t_max, int n_samples, double rel_tol, double abs_tol)
{
    const KernelSystem ks = kernel_system(p);
    const Eigen::Index n = p.size();
    if (c_init.size() != n) throw ShapeError("evolve_volterra: initial amplitudes have wrong length");
    if (!(t_max > 0.0)) throw ParameterError("evolve_volterra: t_max must be > 0");
    if (n_samples < 2) throw ParameterError("evolve_volterra: n_samples must be >= 2");

    KernelTrajectory traj;
    traj.t.resize(n_samples);
    for (int i = 0; i < n_samples; ++i) traj.t[i] = t_max * i / (n_samples - 1);
    traj.t.back() = t_max;
    traj.c.resize(n_samples, n);
    traj.aux.resize(n_samples, n);

    Eigen::VectorXcd x = Eigen::VectorXcd::Zero(2 * n);
    x.head(n) = c_init;
    const Eigen::VectorXcd rate = Eigen::Map<const Eigen::VectorXcd>(ks.rate.data(), n);
    ode::Rhs f = [&](double, const ode::Vector& s, ode::Vector& ds) {
        ds.head(n) = -ks.coupling * s.tail(n);
        ds.tail(n) = s.head(n) - rate.cwiseProduct(s.tail(n));
    };
    ode::Options opt;
    opt.rel_tol = rel_tol;
    opt.abs_tol = abs_tol;
    ode::integrate(f, x, traj.t, opt, [&](std::size_t i, const ode::Vector& s) {
        traj.c.row(static_cast<Eigen::Index>(i)) = s.head(n).transpose();
        traj.aux.row(static_cast<Eigen::Index>(i)) = s.tail(n).transpose();
    });
    return traj;
}

Polynomial dp_denominator(const KernelParams& p)
{
    require_size(p, 3, 3, "dp_denominator");
    const KernelSystem ks = kernel_system(p);
    return Polynomial({ks.rate[0], 1.0}) * Polynomial({ks.rate[1], 1.0}) *
           Polynomial({ks.rate[2], 1.0});
}

Polynomial dp_numerator(const KernelParams& p)
{
    require_size(p, 3, 3, "dp_numerator");
    const KernelSystem ks = kernel_system(p);
    const Polynomial A({ks.rate[0], 1.0});
    const Polynomial B({ks.rate[1], 1.0});
    const Polynomial C({ks.rate[2], 1.0});
    const Polynomial P({0.0, 1.0});
    const double k = p.amplitude();
    if (p.variant == KernelVariant::Eq8AsPrinted) {
        return P * P * P * A * B * C + k * (P * P) * (A * B + A * C + B * C);
    }
    const cplx s = p.variant == KernelVariant::Eq9AsPrinted ? I : cplx{1.0, 0.0};
    return P * P * P * A * B * C - (s * s * k * k) * (P * (A + B + C)) +
           Polynomial::constant(2.0 * s * s * s * k * k * k);
}

DpEvaluation build_Dp(cplx p, const KernelParams& params)
{
    DpEvaluation e;
    e.numerator = dp_numerator(params)(p);
    e.denominator = dp_denominator(params)(p);
    e.quotient_defined = e.denominator != cplx{};
    e.value = e.quotient_defined ? e.numerator / e.denominator : e.numerator;
    return e;
}

Polynomial characteristic_polynomial(const KernelParams& p)
{
    require_size(p, 1, 8, "characteristic_polynomial");
    return cofactor_det(laplace_matrix(kernel_system(p)));
}

std::vector<Polynomial> cramer_numerators(const KernelParams& p, const Eigen::VectorXcd& c_init)
{
    require_size(p, 1, 8, "cramer_numerators");
    if (c_init.size() != p.size()) throw ShapeError("cramer_numerators: initial amplitudes have wrong length");
    const KernelSystem ks = kernel_system(p);
    const auto m = laplace_matrix(ks);
    std::vector<Polynomial> out;
    out.reserve(m.size());
    for (std::size_t col = 0; col < m.size(); ++col) {
        auto replaced = m;
        for (std::size_t r = 0; r < m.size(); ++r) {
            replaced[r][col] = Polynomial::constant(c_init[static_cast<Eigen::Index>(r)]);
        }
        out.push_back(Polynomial({ks.rate[col], 1.0}) * cofactor_det(replaced));
    }
    return out;
}

cplx RationalSolution::evaluate(std::size_t channel, double t) const
{
    cplx sum{};
    const auto& terms = residue_terms.at(channel);
    for (std::size_t j = 0; j < poles.size(); ++j) {
        cplx poly{};
        for (std::size_t r = terms[j].size(); r-- > 0;) poly = poly * t + terms[j][r];
        sum += std::exp(poles[j].value * t) * poly;
    }
    return sum;
}

Eigen::VectorXcd RationalSolution::evaluate(double t) const
{
    Eigen::VectorXcd v(static_cast<Eigen::Index>(channels()));
    for (std::size_t n = 0; n < channels(); ++n) v[static_cast<Eigen::Index>(n)] = evaluate(n, t);
    return v;
}

std::vector<cplx> RationalSolution::residue_sums() const
{
    std::vector<cplx> out(channels(), cplx{});
    for (std::size_t n = 0; n < channels(); ++n) {
        for (const auto& per_pole : residue_terms[n]) {
            if (!per_pole.empty()) out[n] += per_pole[0];
        }
    }
    return out;
}

bool RationalSolution::has_growing_pole(double tol) const
{
    for (const Pole& pole : poles) {
        if (pole.value.real() > tol) return true;
    }
    return false;
}

RationalSolution solve_laplace(const KernelParams& p, const Eigen::VectorXcd& c_init,
                               double clustering_eps)
{
    RationalSolution sol;
    sol.denominator = characteristic_polynomial(p);
    sol.numerators = cramer_numerators(p, c_init);
    sol.poles = find_poles(sol.denominator, clustering_eps);
    const cplx lead = sol.denominator.leading();

    for (const Pole& pole : sol.poles) {
        if (pole.value.real() > 1e-8) {
            sol.diagnostics.push_back("growing pole " + format_cplx(pole.value) +
                                      ": Re(p) > 0, amplitudes are not bounded");
        }
    }
    for (std::size_t i = 0; i < sol.poles.size(); ++i) {
        for (std::size_t j = i + 1; j < sol.poles.size(); ++j) {
            const double gap = std::abs(sol.poles[i].value - sol.poles[j].value);
            if (gap < 1e-5) {
                sol.diagnostics.push_back("near-confluent poles " + format_cplx(sol.poles[i].value) +
                                          " and " + format_cplx(sol.poles[j].value));
            }
        }
    }

    sol.residue_terms.resize(sol.numerators.size());
    for (std::size_t ch = 0; ch < sol.numerators.size(); ++ch) {
        const Polynomial& num = sol.numerators[ch];
        auto& per_channel = sol.residue_terms[ch];
        per_channel.resize(sol.poles.size());
        for (std::size_t j = 0; j < sol.poles.size(); ++j) {
            const cplx a = sol.poles[j].value;
            const int mu = sol.poles[j].multiplicity;
            const std::size_t order = static_cast<std::size_t>(mu);

            // (p - a)^mu / Q(p) around a
            Series h(order, cplx{});
            h[0] = 1.0 / lead;
            for (std::size_t i = 0; i < sol.poles.size(); ++i) {
                if (i == j) continue;
                h = series_mul(h, series_inverse_power(a - sol.poles[i].value,
                                                       sol.poles[i].multiplicity, order),
                               order);
            }
            Series g = num.taylor(a, order);
            const int z = num.is_zero() ? mu : zero_order(num, a, clustering_eps, mu);
            if (z > 0) {
                for (int r = 0; r < z; ++r) g[static_cast<std::size_t>(r)] = cplx{};
                if (!num.is_zero()) {
                    sol.diagnostics.push_back("channel " + std::to_string(ch + 1) + ": numerator zero of order " +
                                              std::to_string(z) + " cancels pole " + format_cplx(a) +
                                              " (multiplicity " + std::to_string(mu) + ")");
                }
            }
            const Series laurent = series_mul(g, h, order);
            std::vector<cplx> terms(order);
            double fact = 1.0;
            for (std::size_t r = 0; r < order; ++r) {
                if (r > 0) fact *= static_cast<double>(r);
                terms[r] = laurent[order - 1 - r] / fact;
            }
            per_channel[j] = std::move(terms);
        }
    }
    return sol;
}

Analytic3Result analytic_residue_solution(cplx c1_0, const KernelParams& p,
                                          std::span<const double> t, double clustering_eps)
{
    require_size(p, 3, 3, "analytic_residue_solution");
    Eigen::VectorXcd c0 = Eigen::VectorXcd::Zero(3);
    c0[0] = c1_0;
    Analytic3Result res;
    res.solution = solve_laplace(p, c0, clustering_eps);
    res.t.assign(t.begin(), t.end());
    res.c.resize(static_cast<Eigen::Index>(t.size()), 3);
    for (std::size_t i = 0; i < t.size(); ++i) {
        res.c.row(static_cast<Eigen::Index>(i)) = res.solution.evaluate(t[i]).transpose();
    }
    return res;
}

} // namespace chiralflow
