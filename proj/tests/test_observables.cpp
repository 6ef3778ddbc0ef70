#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "chiralflow/errors.hpp"
#include "chiralflow/observables.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace chiralflow;

namespace {

Eigen::VectorXcd random_unit(std::mt19937_64& rng, int dim)
{
    std::normal_distribution<double> g;
    Eigen::VectorXcd v(dim);
    for (auto& z : v) z = cplx(g(rng), g(rng));
    return v / v.norm();
}

ReducedDensityMatrix pure(const Eigen::VectorXcd& psi)
{
    return {psi * psi.adjoint()};
}

// Random mixed state of rank <= 3 in dimension dim.
ReducedDensityMatrix random_mixed(std::mt19937_64& rng, int dim)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double w[3] = {u(rng), u(rng), u(rng)};
    const double total = w[0] + w[1] + w[2];
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
    for (double x : w) {
        const Eigen::VectorXcd v = random_unit(rng, dim);
        rho += (x / total) * v * v.adjoint();
    }
    return {rho};
}

std::vector<double> uniform_grid(double t0, double h, int n)
{
    std::vector<double> t(n);
    for (int i = 0; i < n; ++i) t[i] = t0 + i * h;
    return t;
}

} // namespace

TEST_CASE("reduced density matrix examples")
{
    SUBCASE("ground state")
    {
        const auto rho = reduced_density(1.0, Eigen::VectorXcd::Zero(3));
        Eigen::MatrixXcd expect = Eigen::MatrixXcd::Zero(4, 4);
        expect(0, 0) = 1.0;
        CHECK((rho.entries - expect).norm() == 0.0);
    }
    SUBCASE("pure excited mode")
    {
        Eigen::VectorXcd c = Eigen::VectorXcd::Zero(3);
        c[0] = 1.0;
        const auto rho = reduced_density(0.0, c);
        CHECK(std::abs(rho.entries(1, 1) - 1.0) < 1e-15);
        CHECK(std::abs(rho.entries.trace() - 1.0) < 1e-15);
        CHECK(rho.entries.cwiseAbs().sum() == doctest::Approx(1.0));
    }
    SUBCASE("equal superposition")
    {
        Eigen::VectorXcd c = Eigen::VectorXcd::Zero(2);
        c[0] = 1.0 / std::sqrt(2.0);
        const auto rho = reduced_density(1.0 / std::sqrt(2.0), c);
        for (int i = 0; i < 2; ++i) {
            for (int j = 0; j < 2; ++j) CHECK(std::abs(rho.entries(i, j) - 0.5) < 1e-15);
        }
        CHECK(std::abs(rho.entries(2, 2)) == 0.0);
        CHECK(((rho.entries * rho.entries) - rho.entries).norm() < 1e-15);
    }
}

TEST_CASE("reduced density matrix with a populated bath")
{
    AmplitudeState s = make_state(cplx(0.0, 0.6), Eigen::VectorXcd::Constant(2, cplx(0.4, 0.0)), 2);
    s.f << cplx(0.0, 0.4), cplx(0.4, 0.0);
    REQUIRE(s.norm_defect() < 1e-15);
    const auto rho = reduced_density(s);
    // The bath population is traced into the ground level.
    CHECK(rho.entries(0, 0).real() == doctest::Approx(1.0 - 0.32));
    CHECK(std::abs(rho.entries(0, 1) - cplx(0.0, 0.6) * 0.4) < 1e-15);
    CHECK(std::abs(rho.entries.trace() - 1.0) < 1e-14);
    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(rho.entries).eigenvalues();
    CHECK(ev.minCoeff() >= -1e-9);

    s.c0 = 0.9;
    CHECK_THROWS_AS(reduced_density(s), NormalizationError);
    CHECK_THROWS_AS(reduced_density(cplx(0.9, 0.0), Eigen::VectorXcd::Constant(2, 0.9)), NormalizationError);
}

TEST_CASE("trace distance examples")
{
    std::mt19937_64 rng(5);
    const auto rho = random_mixed(rng, 4);
    CHECK(trace_distance(rho, rho) <= 1e-15);

    Eigen::VectorXcd g = Eigen::VectorXcd::Zero(4), e = Eigen::VectorXcd::Zero(4);
    g[0] = 1.0;
    e[1] = 1.0;
    CHECK(trace_distance(pure(g), pure(e)) == doctest::Approx(1.0).epsilon(1e-15));

    // Two pure states with overlap s have distance sqrt(1 - s); the oracle diagonalizes
    // the rank-2 difference in the plane the two vectors span.
    for (int i = 0; i < 25; ++i) {
        const Eigen::VectorXcd a = random_unit(rng, 4);
        const Eigen::VectorXcd b = random_unit(rng, 4);
        const double s = std::norm(a.dot(b));
        Eigen::MatrixXcd basis(4, 2);
        basis.col(0) = a;
        basis.col(1) = (b - a * a.dot(b)).normalized();
        const Eigen::MatrixXcd small = basis.adjoint() * (a * a.adjoint() - b * b.adjoint()) * basis;
        const Eigen::Vector2d ev = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd>(small).eigenvalues();
        const double brute = 0.5 * (std::abs(ev[0]) + std::abs(ev[1]));
        const double d = trace_distance(pure(a), pure(b));
        CHECK(d == doctest::Approx(std::sqrt(1.0 - s)).epsilon(1e-12));
        CHECK(d == doctest::Approx(brute).epsilon(1e-12));
    }
}

TEST_CASE("trace distance is a metric on random triples")
{
    std::mt19937_64 rng(17);
    for (int i = 0; i < 100; ++i) {
        const auto a = random_mixed(rng, 5), b = random_mixed(rng, 5), c = random_mixed(rng, 5);
        const double ab = trace_distance(a, b), ba = trace_distance(b, a);
        CHECK(ab == ba);
        CHECK(ab <= trace_distance(a, c) + trace_distance(c, b) + 1e-10);
        CHECK(ab >= 0.0);
        CHECK(ab <= 1.0);
    }
    CHECK_THROWS_AS(trace_distance(random_mixed(rng, 3), random_mixed(rng, 4)), ShapeError);
}

TEST_CASE("derivative series")
{
    SUBCASE("constant and linear")
    {
        const auto t = uniform_grid(0.0, 0.1, 50);
        std::vector<double> flat(50, 0.3), ramp(t);
        for (double r : derivative_series(flat, 0.1)) CHECK(r == 0.0);
        for (double r : derivative_series(ramp, t)) CHECK(r == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("sine against cosine")
    {
        const double h = 1e-3;
        const auto t = uniform_grid(0.0, h, 10001);
        std::vector<double> D(t.size());
        for (std::size_t i = 0; i < t.size(); ++i) D[i] = std::sin(t[i]);
        const auto R = derivative_series(D, t);
        double worst = 0.0;
        for (std::size_t i = 0; i < t.size(); ++i) worst = std::max(worst, std::abs(R[i] - std::cos(t[i])));
        CHECK(worst <= 1e-5);
    }
    SUBCASE("grid errors")
    {
        std::vector<double> two{0.0, 1.0};
        CHECK_THROWS_AS(derivative_series(two, 0.1), GridError);
        std::vector<double> D{0.0, 1.0, 2.0, 3.0};
        std::vector<double> bad{0.0, 0.1, 0.25, 0.3};
        CHECK_THROWS_AS(derivative_series(D, bad), GridError);
    }
}

TEST_CASE("flow segmentation")
{
    SUBCASE("constructed sign pattern")
    {
        const std::vector<double> R{1.0, 1.0, -1.0, -1.0, 1.0};
        const auto t = uniform_grid(0.0, 1.0, 5);
        const auto s = segment_flow(R, t);
        REQUIRE(s.segments.size() == 3);
        CHECK(s.n_switch == 2);
        CHECK(s.segments[0].sign == 1);
        CHECK(s.segments[1].sign == -1);
        CHECK(s.segments[1].first == 2);
        CHECK(s.segments[1].last == 3);
        CHECK(s.fraction_positive == doctest::Approx(0.6));
        CHECK(!s.degenerate);
    }
    SUBCASE("sampled sine over two periods")
    {
        const int n = 20001;
        const auto t = uniform_grid(0.0, 4 * std::numbers::pi / (n - 1), n);
        std::vector<double> R(n);
        for (int i = 0; i < n; ++i) R[i] = std::sin(t[i]);
        R.front() = 0.0;
        R.back() = 0.0;
        const auto s = segment_flow(R, t, 1e-10);
        CHECK(s.segments.size() == 4);
        CHECK(s.n_switch == 3);
        CHECK(s.A_mod == doctest::Approx(1.0).epsilon(1e-4));
        CHECK(s.segments.front().sign == 1);
    }
    SUBCASE("dead band wider than the signal")
    {
        const std::vector<double> R{1e-3, -2e-3, 5e-4};
        const auto t = uniform_grid(0.0, 1.0, 3);
        const auto s = segment_flow(R, t, 1e-2);
        CHECK(s.degenerate);
        REQUIRE(s.segments.size() == 1);
        CHECK(s.n_switch == 0);
    }
    SUBCASE("dead-band samples inherit the previous sign")
    {
        const std::vector<double> R{0.0, -1.0, 1e-12, 1.0, 0.0};
        const auto t = uniform_grid(0.0, 1.0, 5);
        const auto s = segment_flow(R, t);
        CHECK(s.sample_sign == std::vector<int>{-1, -1, -1, 1, 1});
        CHECK(s.n_switch == 1);
    }
}

TEST_CASE("flow series of the decoupled pair is flat")
{
    // Both states excited-sector superpositions evolving unitarily with distinct phases.
    const std::vector<double> w{0.3, -1.1, 0.7};
    const auto t = uniform_grid(0.0, 0.05, 200);
    std::vector<ReducedDensityMatrix> r1, r2;
    Eigen::VectorXcd a(3), b(3);
    a << 0.6, cplx(0.0, 0.8), 0.0;
    b << 0.0, 0.6, cplx(0.0, -0.8);
    for (double x : t) {
        Eigen::VectorXcd pa = a, pb = b;
        for (int n = 0; n < 3; ++n) {
            pa[n] *= std::polar(1.0, -w[n] * x);
            pb[n] *= std::polar(1.0, -w[n] * x);
        }
        r1.push_back(reduced_density(0.0, pa));
        r2.push_back(reduced_density(0.0, pb));
    }
    const FlowSeries fs = flow_series(t, r1, r2);
    for (double d : fs.D) CHECK(std::abs(d - fs.D.front()) <= 1e-8);
    CHECK(segment_flow(fs.R, fs.t).degenerate);
}
