#include "chiralflow/polynomial.hpp"

#include "chiralflow/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace chiralflow {

Polynomial::Polynomial(std::vector<cplx> coeffs) : coeffs_(std::move(coeffs)) {}

Polynomial::Polynomial(std::initializer_list<cplx> coeffs) : coeffs_(coeffs) {}

Polynomial Polynomial::constant(cplx a)
{
    return Polynomial({a});
}

Polynomial Polynomial::monomial_root(cplx root)
{
    return Polynomial({-root, cplx{1.0, 0.0}});
}

int Polynomial::degree() const
{
    for (int i = static_cast<int>(coeffs_.size()) - 1; i >= 0; --i) {
        if (coeffs_[i] != cplx{}) return i;
    }
    return -1;
}

cplx Polynomial::leading() const
{
    const int d = degree();
    return d < 0 ? cplx{} : coeffs_[d];
}

cplx Polynomial::operator()(cplx p) const
{
    cplx acc{};
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * p + *it;
    return acc;
}

Polynomial Polynomial::derivative(int order) const
{
    std::vector<cplx> c = coeffs_;
    for (int o = 0; o < order; ++o) {
        if (c.size() <= 1) return Polynomial({cplx{}});
        std::vector<cplx> d(c.size() - 1);
        for (std::size_t i = 1; i < c.size(); ++i) d[i - 1] = c[i] * static_cast<double>(i);
        c = std::move(d);
    }
    return Polynomial(std::move(c));
}

std::vector<cplx> Polynomial::taylor(cplx a, std::size_t count) const
{
    // repeated synthetic division by (p - a)
    std::vector<cplx> work = coeffs_;
    std::vector<cplx> out;
    out.reserve(count);
    while (out.size() < count) {
        if (work.empty()) {
            out.push_back(cplx{});
            continue;
        }
        std::vector<cplx> quotient(work.size() > 1 ? work.size() - 1 : 0);
        cplx acc{};
        for (std::size_t i = work.size(); i-- > 0;) {
            acc = acc * a + work[i];
            if (i > 0) quotient[i - 1] = acc;
        }
        out.push_back(acc);
        work = std::move(quotient);
    }
    return out;
}

double Polynomial::coefficient_norm() const
{
    double m = 0.0;
    for (const cplx& a : coeffs_) m = std::max(m, std::abs(a));
    return m;
}

Polynomial& Polynomial::operator+=(const Polynomial& o)
{
    if (o.coeffs_.size() > coeffs_.size()) coeffs_.resize(o.coeffs_.size());
    for (std::size_t i = 0; i < o.coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
    return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o)
{
    if (o.coeffs_.size() > coeffs_.size()) coeffs_.resize(o.coeffs_.size());
    for (std::size_t i = 0; i < o.coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
    return *this;
}

Polynomial& Polynomial::operator*=(cplx s)
{
    for (cplx& a : coeffs_) a *= s;
    return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b)
{
    if (a.coeffs_.empty() || b.coeffs_.empty()) return Polynomial({cplx{}});
    std::vector<cplx> c(a.coeffs_.size() + b.coeffs_.size() - 1);
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i) {
        for (std::size_t j = 0; j < b.coeffs_.size(); ++j) c[i + j] += a.coeffs_[i] * b.coeffs_[j];
    }
    return Polynomial(std::move(c));
}

std::vector<cplx> companion_roots(const Polynomial& q)
{
    const int n = q.degree();
    if (n < 0) throw NumericError("companion_roots: zero polynomial");
    if (n == 0) return {};
    const cplx lead = q.leading();
    Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 1; i < n; ++i) C(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i) C(i, n - 1) = -q[i] / lead;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(C, false);
    if (solver.info() != Eigen::Success) {
        throw NumericError("companion_roots: eigenvalue iteration did not converge");
    }
    const Eigen::VectorXcd ev = solver.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

namespace {

double binomial(int n, int k)
{
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

double factorial(int n)
{
    double r = 1.0;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

// Newton iteration for a simple root of q near `start`.
cplx newton_refine(const Polynomial& q, cplx start)
{
    const Polynomial dq = q.derivative();
    cplx x = start;
    for (int it = 0; it < 60; ++it) {
        const cplx fx = q(x);
        const cplx dfx = dq(x);
        if (fx == cplx{} || dfx == cplx{}) break;
        const cplx step = fx / dfx;
        x -= step;
        if (std::abs(step) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x))) {
            break;
        }
    }
    return x;
}

cplx mean(const std::vector<cplx>& v, const std::vector<std::size_t>& idx)
{
    cplx s{};
    for (std::size_t i : idx) s += v[i];
    return s / static_cast<double>(idx.size());
}

} // namespace

namespace {

// 2 (eps S / |a_nu|)^(1/nu): spread of an order-nu root at `at` under a relative
// coefficient perturbation eps, with a_nu the first non-vanishing Taylor coefficient.
double confluence_radius(const Polynomial& q, cplx at, int nu, double eps)
{
    const int n = q.degree();
    const double r = std::abs(at);
    double scale = 0.0;
    for (int k = 0; k <= n; ++k) scale += std::pow(r, k);
    const double a_nu = std::abs(q.taylor(at, static_cast<std::size_t>(nu) + 1)[static_cast<std::size_t>(nu)]);
    if (a_nu == 0.0) return std::numeric_limits<double>::infinity();
    return 2.0 * std::pow(eps * q.coefficient_norm() * scale / a_nu, 1.0 / nu);
}

} // namespace

bool admits_multiple_root(const Polynomial& q, cplx at, int mu, double eps)
{
    const int n = q.degree();
    if (mu > n) return false;
    const double qnorm = q.coefficient_norm();
    const double r = std::abs(at);
    for (int j = 0; j < mu; ++j) {
        const cplx value = q.derivative(j)(at) / factorial(j);
        double scale = 0.0;
        for (int k = j; k <= n; ++k) scale += binomial(k, j) * std::pow(r, k - j);
        if (std::abs(value) > eps * qnorm * scale) return false;
    }
    return true;
}

int zero_order(const Polynomial& q, cplx at, double eps, int max_order)
{
    if (q.is_zero()) return max_order;
    int order = 0;
    while (order < max_order && admits_multiple_root(q, at, order + 1, eps)) ++order;
    return order;
}

std::vector<Pole> find_poles(const Polynomial& q, double clustering_eps)
{
    const std::vector<cplx> raw = companion_roots(q);
    const std::size_t n = raw.size();

    struct Cluster {
        std::vector<std::size_t> members;
        cplx centre;
    };
    std::vector<Cluster> clusters;
    for (std::size_t i = 0; i < n; ++i) clusters.push_back({{i}, newton_refine(q, raw[i])});

    auto refine = [&](const std::vector<std::size_t>& members) {
        const int mu = static_cast<int>(members.size());
        const cplx start = mean(raw, members);
        return mu == 1 ? newton_refine(q, start) : newton_refine(q.derivative(mu - 1), start);
    };

    // Agglomerate the closest admissible pair until no merge passes the backward test.
    std::vector<std::pair<std::size_t, std::size_t>> refused;
    auto was_refused = [&](const Cluster& a, const Cluster& b) {
        for (const auto& [x, y] : refused) {
            if ((x == a.members.front() && y == b.members.front()) ||
                (x == b.members.front() && y == a.members.front())) {
                return true;
            }
        }
        return false;
    };
    while (clusters.size() > 1) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t bi = 0, bj = 0;
        for (std::size_t i = 0; i < clusters.size(); ++i) {
            for (std::size_t j = i + 1; j < clusters.size(); ++j) {
                if (was_refused(clusters[i], clusters[j])) continue;
                double d = 0.0;
                for (std::size_t a : clusters[i].members) {
                    for (std::size_t b : clusters[j].members) d = std::max(d, std::abs(raw[a] - raw[b]));
                }
                if (d < best) {
                    best = d;
                    bi = i;
                    bj = j;
                }
            }
        }
        if (!std::isfinite(best)) break;

        std::vector<std::size_t> merged = clusters[bi].members;
        merged.insert(merged.end(), clusters[bj].members.begin(), clusters[bj].members.end());
        std::sort(merged.begin(), merged.end());
        const cplx centre = refine(merged);
        const int mu = static_cast<int>(merged.size());
        bool accept = admits_multiple_root(q, centre, mu, clustering_eps);
        if (accept) {
            // Every member has to lie inside the disc a root of the actual order at the
            // centre can spread over under the clustering perturbation.
            const double reach = confluence_radius(q, centre, zero_order(q, centre, clustering_eps, q.degree()),
                                                   clustering_eps);
            for (std::size_t a : merged) accept = accept && std::abs(raw[a] - centre) <= reach;
        }
        if (accept) {
            clusters[bi] = {merged, centre};
            clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(bj));
            refused.clear();
        } else {
            refused.emplace_back(clusters[bi].members.front(), clusters[bj].members.front());
        }
    }

    std::vector<Pole> poles;
    poles.reserve(clusters.size());
    for (const Cluster& c : clusters) {
        double spread = 0.0;
        for (std::size_t a : c.members) spread = std::max(spread, std::abs(raw[a] - c.centre));
        poles.push_back({c.centre, static_cast<int>(c.members.size()), spread});
    }
    std::sort(poles.begin(), poles.end(), [](const Pole& a, const Pole& b) {
        if (a.value.real() != b.value.real()) return a.value.real() < b.value.real();
        return a.value.imag() < b.value.imag();
    });
    return poles;
}

} // namespace chiralflow
