// kernel.hpp: memory-kernel reduction of the bath and its Laplace/residue solution
//
// All variants share one linear structure. With auxiliary integrals
//   y_m(t) = int_0^t exp(-a_m (t - s)) c_m(s) ds,   dy_m/dt = -a_m y_m + c_m,
// the amplitudes obey dc_n/dt = -sum_m sigma_nm y_m. In the Laplace domain this is
//   sum_m [p (p + a_m) delta_nm + sigma_nm] (c_m(p) / (p + a_m)) = c_n(0),
// so det of the bracketed polynomial matrix is the pole polynomial (degree 2N) and
// Cramer's rule gives each c_n(p) as a proper rational function.

#pragma once

#include "chiralflow/bath.hpp"
#include "chiralflow/model.hpp"
#include "chiralflow/polynomial.hpp"

#include <Eigen/Dense>

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace chiralflow {

enum class KernelVariant {
    Eq9AsPrinted,     // i dc_n/dt = -sum_{m != n} int f_m(t - s) c_m(s) ds
    Eq8AsPrinted,     // dc_n/dt = -sum_m int K_m(t - s) c_m(s) ds, K_m with phase w_g + w_m - w_c
    LaplaceAsPrinted  // p c_n - c_n(0) = sum_{m != n} f_m(p) c_m(p), the Laplace-domain D(p) system
};

std::string_view to_string(KernelVariant v);
KernelVariant kernel_variant_from_string(std::string_view s);

struct KernelParams {
    double gamma0{1.0};
    double lambda{0.1};
    double omega_c{0.0};
    std::vector<double> omega_m;  // system frequencies
    KernelVariant variant{KernelVariant::Eq9AsPrinted};
    double omega_g{0.0};          // Eq8AsPrinted only; defined as E_g

    static KernelParams from(const BathParams& bath, const SystemSpectrum& spectrum,
                             KernelVariant variant = KernelVariant::Eq9AsPrinted);

    int size() const { return static_cast<int>(omega_m.size()); }
    double amplitude() const { return 0.5 * gamma0 * lambda; }  // gamma0 lambda / 2
    void validate() const;
};

// f_m(dt) = -(gamma0 lambda / 2) exp(-(i (w_m + w_c) + lambda) dt), dt >= 0; m is an array index.
cplx memory_kernel(std::size_t m, double dt, const KernelParams& p);

struct KernelSystem {
    std::vector<cplx> rate;    // a_m
    Eigen::MatrixXcd coupling; // sigma_nm
};

KernelSystem kernel_system(const KernelParams& p);

struct KernelTrajectory {
    std::vector<double> t;
    Eigen::MatrixXcd c;    // row i = amplitudes at t[i]
    Eigen::MatrixXcd aux;  // row i = y_m(t[i])
};

// Integrates the integro-differential system through the exact auxiliary reduction.
KernelTrajectory evolve_volterra(const Eigen::VectorXcd& c_init, const KernelParams& p,
                                 double t_max, int n_samples, double rel_tol = 1e-12,
                                 double abs_tol = 1e-14);

// N = 3 pole polynomial in the closed form
//   ABC p^3 - s^2 k^2 (A + B + C) p + 2 s^3 k^3,  k = gamma0 lambda / 2,
// with A, B, C = p + lambda + i (w_{1,2,3} + w_c) and s = 1 (LaplaceAsPrinted) or i
// (Eq9AsPrinted). Eq8AsPrinted uses p^3 A'B'C' + k p^2 (A'B' + A'C' + B'C').
Polynomial dp_numerator(const KernelParams& p);

// A B C as a polynomial (the D(p) denominator), N = 3.
Polynomial dp_denominator(const KernelParams& p);

struct DpEvaluation {
    cplx numerator;
    cplx denominator;
    cplx value;            // numerator / denominator when defined
    bool quotient_defined;
};

DpEvaluation build_Dp(cplx p, const KernelParams& params);

// det[p (p + a_m) delta_nm + sigma_nm] by cofactor expansion, 2 <= N <= 8.
Polynomial characteristic_polynomial(const KernelParams& p);

// c_n(p) = (p + a_n) det(M with column n replaced by c(0)) / det M.
std::vector<Polynomial> cramer_numerators(const KernelParams& p, const Eigen::VectorXcd& c_init);

struct RationalSolution {
    std::vector<Pole> poles;
    Polynomial denominator;
    std::vector<Polynomial> numerators;
    // c_n(t) = sum_j exp(p_j t) sum_r residue_terms[n][j][r] t^r
    std::vector<std::vector<std::vector<cplx>>> residue_terms;
    std::vector<std::string> diagnostics;

    std::size_t channels() const { return numerators.size(); }
    cplx evaluate(std::size_t channel, double t) const;
    Eigen::VectorXcd evaluate(double t) const;
    // Residues of c_n(p) itself (no exp(pt)); equals c_n(0) for a proper rational c_n(p).
    std::vector<cplx> residue_sums() const;
    bool has_growing_pole(double tol = 1e-8) const;
};

RationalSolution solve_laplace(const KernelParams& p, const Eigen::VectorXcd& c_init,
                               double clustering_eps = 1e-8);

struct Analytic3Result {
    std::vector<double> t;
    Eigen::MatrixXcd c;  // row i = (c_1, c_2, c_3) at t[i]
    RationalSolution solution;
};

// N = 3 with c(0) = (c1_0, 0, 0), inverted by residues.
Analytic3Result analytic_residue_solution(cplx c1_0, const KernelParams& p,
                                          std::span<const double> t,
                                          double clustering_eps = 1e-8);

} // namespace chiralflow
