// polynomial.hpp: complex polynomials, companion-matrix roots and multiplicity clustering

#pragma once

#include <complex>
#include <initializer_list>
#include <vector>

namespace chiralflow {

using cplx = std::complex<double>;

// Coefficients in ascending order: a_0 + a_1 p + ... + a_n p^n.
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(std::vector<cplx> coeffs);
    Polynomial(std::initializer_list<cplx> coeffs);

    static Polynomial constant(cplx a);
    static Polynomial monomial_root(cplx root);  // p - root

    const std::vector<cplx>& coefficients() const { return coeffs_; }
    cplx operator[](std::size_t i) const { return i < coeffs_.size() ? coeffs_[i] : cplx{}; }

    // Degree after dropping exact trailing zeros; -1 for the zero polynomial.
    int degree() const;
    bool is_zero() const { return degree() < 0; }
    cplx leading() const;

    cplx operator()(cplx p) const;  // Horner
    Polynomial derivative(int order = 1) const;

    // Coefficients of q(d) = P(a + d), truncated to the first `count` terms.
    std::vector<cplx> taylor(cplx a, std::size_t count) const;

    // Infinity norm of the coefficient vector.
    double coefficient_norm() const;

    Polynomial& operator+=(const Polynomial& o);
    Polynomial& operator-=(const Polynomial& o);
    Polynomial& operator*=(cplx s);
    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    friend Polynomial operator*(Polynomial a, cplx s) { return a *= s; }
    friend Polynomial operator*(cplx s, Polynomial a) { return a *= s; }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b);

private:
    std::vector<cplx> coeffs_;
};

struct Pole {
    cplx value;
    int multiplicity{1};
    double spread{0.0};  // max distance of the merged raw eigenvalues from `value`
};

// Raw roots: eigenvalues of the companion matrix. Throws NumericError on failure.
std::vector<cplx> companion_roots(const Polynomial& q);

// True when q has a root of multiplicity >= mu at `at` up to a relative coefficient
// perturbation eps: |q^(j)(at)| / j! <= eps * ||q|| * sum_k C(k, j) |at|^(k-j) for j < mu.
bool admits_multiple_root(const Polynomial& q, cplx at, int mu, double eps);

// Roots with multiplicities. Companion eigenvalues are merged agglomeratively while
// the merged cluster passes admits_multiple_root(q, centre, size, clustering_eps);
// each merged centre is refined as a simple root of q^(mu-1). Sorted by real part,
// then imaginary part. Sum of multiplicities equals deg q.
std::vector<Pole> find_poles(const Polynomial& q, double clustering_eps = 1e-8);

// Order of vanishing of q at `at` under the same backward criterion (0 if q(at) != 0).
int zero_order(const Polynomial& q, cplx at, double eps, int max_order);

} // namespace chiralflow
