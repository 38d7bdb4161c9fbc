#include "doctest.h"

#include "mfglab/density.hpp"
#include "mfglab/errors.hpp"
#include "mfglab/fields.hpp"
#include "mfglab/pde.hpp"
#include "mfglab/problem.hpp"
#include "mfglab/tridiag.hpp"

#include <cmath>
#include <random>
#include <vector>

using namespace mfg;

namespace {

// Dense Gaussian elimination with partial pivoting, used as an independent
// oracle for the banded solver.
std::vector<double> dense_solve(std::vector<std::vector<double>> A, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t r = k + 1; r < n; ++r)
            if (std::abs(A[r][k]) > std::abs(A[piv][k])) piv = r;
        std::swap(A[k], A[piv]);
        std::swap(b[k], b[piv]);
        for (std::size_t r = k + 1; r < n; ++r) {
            const double m = A[r][k] / A[k][k];
            for (std::size_t c = k; c < n; ++c) A[r][c] -= m * A[k][c];
            b[r] -= m * b[k];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t c = i + 1; c < n; ++c) s -= A[i][c] * x[c];
        x[i] = s / A[i][i];
    }
    return x;
}

double gaussian_pdf(double x, double mean, double var) {
    return std::exp(-(x - mean) * (x - mean) / (2.0 * var)) / std::sqrt(2.0 * M_PI * var);
}

} // namespace

TEST_CASE("uniform grid spacing and endpoints") {
    auto g = SpatialGrid::uniform(-2.0, 3.0, 21);
    CHECK(g.h() == doctest::Approx(0.25));
    CHECK(g.point(0) == doctest::Approx(-2.0));
    CHECK(g.point(20) == doctest::Approx(3.0));
    CHECK(g.points().size() == 21);

    auto m = TimeMesh::uniform(2.0, 5);
    CHECK(m.dt() == doctest::Approx(0.5));
    CHECK(m.time(4) == doctest::Approx(2.0));
}

TEST_CASE("tridiagonal solve matches dense elimination") {
    const std::size_t n = 40;
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> sub(n), diag(n), sup(n), rhs(n);
    for (std::size_t i = 0; i < n; ++i) {
        sub[i] = u(rng);
        sup[i] = u(rng);
        diag[i] = 3.0 + std::abs(u(rng)); // dominant
        rhs[i] = u(rng);
    }
    sub[0] = 0.0;
    sup[n - 1] = 0.0;

    std::vector<std::vector<double>> A(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        A[i][i] = diag[i];
        if (i > 0) A[i][i - 1] = sub[i];
        if (i + 1 < n) A[i][i + 1] = sup[i];
    }
    auto want = dense_solve(A, rhs);
    auto got = solve_tridiag(sub, diag, sup, rhs);
    REQUIRE(got.size() == n);
    for (std::size_t i = 0; i < n; ++i)
        CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-12));
}

TEST_CASE("spatial gradient is exact on quadratics") {
    auto g = SpatialGrid::uniform(-1.0, 2.0, 31);
    std::vector<double> f(31);
    for (std::size_t i = 0; i < 31; ++i) {
        const double x = g.point(i);
        f[i] = 1.5 * x * x - 2.0 * x + 0.25;
    }
    auto df = spatial_gradient(g, f.data());
    for (std::size_t i = 0; i < 31; ++i)
        CHECK(df[i] == doctest::Approx(3.0 * g.point(i) - 2.0).epsilon(1e-10));
}

TEST_CASE("density constructors normalize and locate mass") {
    auto g = SpatialGrid::uniform(-6.0, 6.0, 257);

    auto gauss = Density::gaussian(g, 0.7, 0.3);
    CHECK(gauss.mass() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(mean_of(gauss) == doctest::Approx(0.7).epsilon(1e-6));
    CHECK(gauss.sup() == doctest::Approx(1.0 / std::sqrt(2.0 * M_PI * 0.3)).epsilon(1e-3));

    auto uni = Density::uniform_on(g, -1.0, 2.0);
    CHECK(uni.mass() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(mean_of(uni) == doctest::Approx(0.5).epsilon(2e-2));

    auto spike = Density::point_mass(g, 1.234);
    CHECK(spike.mass() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(mean_of(spike) == doctest::Approx(1.234).epsilon(g.h()));

    auto bi = Density::bimodal(g, -2.0, 0.2, 2.0, 0.2);
    CHECK(bi.mass() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(mean_of(bi) == doctest::Approx(0.0).epsilon(1e-8));

    // rounding-level negatives are clipped, genuine ones rejected
    std::vector<double> vals(257, 1.0);
    vals[0] = -1e-12;
    auto clipped = Density::from_values(g, vals);
    CHECK(clipped.values[0] == 0.0);
    CHECK(clipped.mass() == doctest::Approx(1.0).epsilon(1e-12));
    vals[0] = -5.0;
    CHECK_THROWS_AS((void)Density::from_values(g, vals), std::invalid_argument);
}

TEST_CASE("cdf runs monotonically from zero to one") {
    auto g = SpatialGrid::uniform(-5.0, 5.0, 101);
    auto d = Density::gaussian(g, 0.0, 0.5);
    auto F = d.cdf();
    CHECK(F.front() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(F.back() == doctest::Approx(1.0).epsilon(1e-9));
    for (std::size_t i = 1; i < F.size(); ++i) CHECK(F[i] >= F[i - 1] - 1e-15);
}

TEST_CASE("d1 distance of a mean shift equals the shift") {
    auto g = SpatialGrid::uniform(-8.0, 8.0, 513);
    auto a = Density::gaussian(g, 0.0, 0.25);
    auto b = Density::gaussian(g, 0.5, 0.25);
    CHECK(mk_distance(a, b) == doctest::Approx(0.5).epsilon(1e-3));
    CHECK(mk_distance(a, a) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(mk_distance(a, b) == doctest::Approx(mk_distance(b, a)).epsilon(1e-12));

    auto c = SpatialGrid::uniform(-8.0, 8.0, 129);
    CHECK_THROWS_AS((void)mk_distance(a, Density::gaussian(c, 0.0, 0.25)), GridMismatch);
}

TEST_CASE("random mixtures are reproducible densities") {
    auto g = SpatialGrid::uniform(-6.0, 6.0, 101);
    auto a = random_mixture(g, 99);
    auto b = random_mixture(g, 99);
    auto c = random_mixture(g, 100);
    CHECK(a.mass() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(a.values == b.values);
    CHECK(a.values != c.values);
}

TEST_CASE("forward solve reproduces the spreading Gaussian") {
    const double T = 0.1, v0 = 0.25;
    for (auto scheme : {TimeScheme::ImplicitEuler, TimeScheme::CrankNicolson}) {
        auto g = SpatialGrid::uniform(-6.0, 6.0, 128);
        auto m = TimeMesh::uniform(T, 128);
        auto flow = solve_fp_forward(DriftField::constant(m, g, 0.0),
                                     [](double) { return 1.0; },
                                     Density::gaussian(g, 0.0, v0), m, scheme);
        double worst = 0.0;
        const auto fin = flow.frame(127);
        for (std::size_t i = 0; i < 128; ++i)
            worst = std::max(worst,
                             std::abs(fin.values[i] - gaussian_pdf(g.point(i), 0.0, v0 + T)));
        CHECK(worst <= 1e-3);
    }
}

TEST_CASE("forward solve conserves mass and positivity under strong drift") {
    auto g = SpatialGrid::uniform(-6.0, 6.0, 128);
    auto m = TimeMesh::uniform(1.0, 128);
    auto flow = solve_fp_forward(DriftField::constant(m, g, 3.0),
                                 [](double) { return 1.0; },
                                 Density::gaussian(g, 0.0, 0.25), m);
    for (std::size_t j = 0; j < 128; ++j) {
        auto fr = flow.frame(j);
        CHECK(std::abs(fr.mass() - 1.0) <= 1e-12);
        for (double v : fr.values) CHECK(v >= -1e-14);
    }
    // mass piles up against the right wall
    CHECK(mean_of(flow.frame(127)) > 1.5);
}

TEST_CASE("state-dependent volatility is accepted and mass-conserving") {
    auto g = SpatialGrid::uniform(-6.0, 6.0, 96);
    auto m = TimeMesh::uniform(0.5, 96);
    auto flow = solve_fp_forward(DriftField::constant(m, g, 0.2),
                                 [](double x) { return 0.6 + 0.3 * std::tanh(x); },
                                 Density::gaussian(g, 0.0, 0.25), m);
    for (std::size_t j = 0; j < 96; ++j)
        CHECK(std::abs(flow.frame(j).mass() - 1.0) <= 1e-12);
}

TEST_CASE("backward solve propagates affine data exactly") {
    const double T = 1.0, b = 0.7;
    auto g = SpatialGrid::uniform(-4.0, 4.0, 97);
    auto m = TimeMesh::uniform(T, 65);
    Array2d source(65, 97, 0.0);
    std::vector<double> terminal(97);
    for (std::size_t i = 0; i < 97; ++i) terminal[i] = 2.0 + 3.0 * g.point(i);

    auto v = solve_hjb_backward(DriftField::constant(m, g, b), [](double) { return 1.0; },
                                source, terminal, m, g);
    for (std::size_t j = 0; j < 65; ++j) {
        const double shift = b * (T - m.time(j));
        for (std::size_t i = 0; i < 97; ++i) {
            CHECK(v.v(j, i) == doctest::Approx(2.0 + 3.0 * (g.point(i) + shift)).epsilon(1e-10));
            CHECK(v.vx(j, i) == doctest::Approx(3.0).epsilon(1e-10));
        }
    }
}

TEST_CASE("policy iteration with a frozen control matches the linear solve") {
    auto g = SpatialGrid::uniform(-4.0, 4.0, 81);
    auto m = TimeMesh::uniform(0.8, 49);
    Array2d source(49, 81, 0.25);
    std::vector<double> terminal(81);
    for (std::size_t i = 0; i < 81; ++i) terminal[i] = std::cos(g.point(i));

    auto pol = solve_hjb_policy([](double) { return 0.7; }, [](double) { return 0.0; },
                                [](double) { return 1.0; }, source, terminal, m, g);
    auto lin = solve_hjb_backward(DriftField::constant(m, g, 0.7), [](double) { return 1.0; },
                                  source, terminal, m, g);
    double worst = 0.0;
    for (std::size_t j = 0; j < 49; ++j)
        for (std::size_t i = 0; i < 81; ++i) {
            worst = std::max(worst, std::abs(pol.value.v(j, i) - lin.v(j, i)));
            CHECK(pol.drift.b(j, i) == doctest::Approx(0.7));
        }
    CHECK(worst <= 1e-12);
}

TEST_CASE("flow frames interpolate linearly in time") {
    auto g = SpatialGrid::uniform(-6.0, 6.0, 64);
    auto m = TimeMesh::uniform(1.0, 5);
    auto flow = solve_fp_forward(DriftField::constant(m, g, 1.0),
                                 [](double) { return 1.0; },
                                 Density::gaussian(g, 0.0, 0.25), m);
    const double tmid = 0.5 * (m.time(1) + m.time(2));
    auto mid = flow.at_time(tmid);
    auto f1 = flow.frame(1);
    auto f2 = flow.frame(2);
    for (std::size_t i = 0; i < 64; ++i)
        CHECK(mid.values[i] ==
              doctest::Approx(0.5 * (f1.values[i] + f2.values[i])).epsilon(1e-9));

    auto curve = flow.mean_curve();
    REQUIRE(curve.size() == 5);
    CHECK(curve[0] == doctest::Approx(0.0).epsilon(1e-8));
}

TEST_CASE("nonpositive volatility is rejected") {
    auto g = SpatialGrid::uniform(-2.0, 2.0, 32);
    auto m = TimeMesh::uniform(0.5, 16);
    CHECK_THROWS_AS((void)solve_fp_forward(DriftField::constant(m, g, 0.0),
                                           [](double) { return 0.0; },
                                           Density::gaussian(g, 0.0, 0.25), m),
                    NonPositiveDiffusion);
}

TEST_CASE("suggested truncation adds support, drift reach and six sigmas") {
    CHECK(suggested_truncation(3.0, -1.0, 1.0, 1.0, 4.0) == doctest::Approx(19.0));
    CHECK(suggested_truncation(2.0, -2.0, 0.5, 0.0, 1.0) == doctest::Approx(4.0));
}
