#include "doctest.h"

#include "mfglab/cost.hpp"
#include "mfglab/density.hpp"
#include "mfglab/errors.hpp"
#include "mfglab/hamiltonian.hpp"

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

using namespace mfg;

namespace {

// Brute-force value of max over a control grid of -p g - l(g); independent of
// every closed form under test.
double grid_max(const Hamiltonian& H, double p, std::size_t n = 20001) {
    auto cb = control_bounds(H);
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        const double g = cb.a + (cb.b - cb.a) * static_cast<double>(i) / (n - 1);
        best = std::max(best, -p * g - control_cost(H, g));
    }
    return best;
}

const double inf = std::numeric_limits<double>::infinity();

} // namespace

TEST_CASE("closed-form Hamiltonians match the control-grid maximum") {
    const std::vector<Hamiltonian> hams = {BangBang{-1.0, 1.0}, BangBang{-0.4, 1.7},
                                           SmoothCapped{0.1}, SmoothCapped{0.75},
                                           QuadraticControl{1.0}, QuadraticControl{0.3}};
    for (const auto& H : hams)
        for (double p : {-3.0, -2.0, -0.6, -0.11, -0.05, 0.0, 0.03, 0.1, 0.5, 1.0, 2.5}) {
            CHECK(ham_eval(H, p) == doctest::Approx(grid_max(H, p)).epsilon(1e-7));
            auto ch = optimal_control(H, p);
            if (!ch.indeterminate)
                CHECK(ham_eval(H, p) ==
                      doctest::Approx(-p * ch.gamma - control_cost(H, ch.gamma))
                          .epsilon(1e-12));
        }
}

TEST_CASE("bang-bang values, slopes and kink resolution") {
    BangBang bb{-1.0, 1.0};
    CHECK(ham_eval(bb, 2.0) == doctest::Approx(2.0));
    CHECK(ham_eval(bb, -3.0) == doctest::Approx(3.0));
    CHECK(ham_derivative(bb, 2.0) == doctest::Approx(1.0));   // control a
    CHECK(ham_derivative(bb, -2.0) == doctest::Approx(-1.0)); // control b

    CHECK_THROWS_AS((void)ham_derivative(bb, 0.0), KinkWithoutHint);
    CHECK(ham_derivative(bb, 0.0, KinkHint::Minus) == doctest::Approx(-1.0));
    CHECK(ham_derivative(bb, 0.0, KinkHint::Plus) == doctest::Approx(1.0));
    CHECK(ham_derivative(bb, 0.0, KinkHint::Zero) == doctest::Approx(0.0));

    CHECK(optimal_control(bb, 0.5).gamma == doctest::Approx(-1.0));
    CHECK(optimal_control(bb, -0.5).gamma == doctest::Approx(1.0));
    CHECK(optimal_control(bb, 0.0).indeterminate);
    CHECK(optimal_control(bb, 0.0, KinkHint::Minus) == doctest::Approx(1.0));
    CHECK(optimal_control(bb, 0.0, KinkHint::Plus) == doctest::Approx(-1.0));
    CHECK(optimal_control(bb, 0.0, KinkHint::Zero) == doctest::Approx(0.0));

    // asymmetric interval: the kink slopes follow the endpoints
    BangBang wide{-0.4, 1.7};
    CHECK(ham_derivative(wide, 0.0, KinkHint::Minus) == doctest::Approx(-1.7));
    CHECK(ham_derivative(wide, 0.0, KinkHint::Plus) == doctest::Approx(0.4));
}

TEST_CASE("smoothed Hamiltonian interpolates the quadratic core and linear tails") {
    SmoothCapped sc{0.1};
    CHECK(ham_eval(sc, 0.05) == doctest::Approx(0.0625).epsilon(1e-12));
    CHECK(ham_eval(sc, 0.5) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(ham_derivative(sc, 0.05) == doctest::Approx(0.5));
    CHECK(ham_derivative(sc, 0.5) == doctest::Approx(1.0));
    CHECK(optimal_control(sc, 0.05).gamma == doctest::Approx(-0.5));
    CHECK(optimal_control(sc, -0.2).gamma == doctest::Approx(1.0));
    CHECK_FALSE(optimal_control(sc, 0.0).indeterminate);

    // derivative agrees with central differences away from |p| = delta
    for (double p : {-0.7, -0.04, 0.02, 0.3, 1.4}) {
        const double h = 1e-6;
        const double fd = (ham_eval(sc, p + h) - ham_eval(sc, p - h)) / (2.0 * h);
        CHECK(ham_derivative(sc, p) == doctest::Approx(fd).epsilon(1e-6));
    }
}

TEST_CASE("quadratic-control Hamiltonian and its saturation") {
    QuadraticControl qc{1.0};
    CHECK(ham_eval(qc, 1.0) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(ham_eval(qc, 3.0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(optimal_control(qc, 1.0).gamma == doctest::Approx(-0.5));
    CHECK(optimal_control(qc, 3.0).gamma == doctest::Approx(-1.0));
    CHECK(control_cost(qc, 0.5) == doctest::Approx(0.25));

    for (double p : {-3.5, -1.2, -0.3, 0.4, 1.1, 2.8}) {
        const double h = 1e-6;
        const double fd = (ham_eval(qc, p + h) - ham_eval(qc, p - h)) / (2.0 * h);
        CHECK(ham_derivative(qc, p) == doctest::Approx(fd).epsilon(1e-6));
    }
}

TEST_CASE("control costs by family") {
    CHECK(control_cost(BangBang{-1.0, 1.0}, 0.37) == doctest::Approx(0.0));
    SmoothCapped sc{0.2};
    CHECK(control_cost(sc, 1.0) == doctest::Approx(0.0));
    CHECK(control_cost(sc, -1.0) == doctest::Approx(0.0));
    CHECK(control_cost(sc, 0.0) == doctest::Approx(-0.1));
}

TEST_CASE("gradient and curvature bounds") {
    CHECK(ham_gradient_bound(BangBang{-1.5, 1.0}, inf) == doctest::Approx(1.5));
    CHECK(ham_gradient_bound(SmoothCapped{0.1}, inf) == doctest::Approx(1.0));
    CHECK(ham_gradient_bound(SmoothCapped{0.1}, 0.05) == doctest::Approx(0.5));
    CHECK(ham_gradient_bound(QuadraticControl{1.0}, inf) == doctest::Approx(1.0));
    CHECK(ham_gradient_bound(QuadraticControl{1.0}, 1.0) == doctest::Approx(0.5));

    CHECK(std::isinf(ham_hessian_bound(BangBang{-1.0, 1.0})));
    CHECK(ham_hessian_bound(SmoothCapped{0.1}) == doctest::Approx(10.0));
    CHECK(ham_hessian_bound(QuadraticControl{1.0}) == doctest::Approx(0.5));

    auto cb = control_bounds(BangBang{-0.3, 2.0});
    CHECK(cb.a == doctest::Approx(-0.3));
    CHECK(cb.b == doctest::Approx(2.0));
    auto cs = control_bounds(SmoothCapped{0.1});
    CHECK(cs.a == doctest::Approx(-1.0));
    CHECK(cs.b == doctest::Approx(1.0));
}

TEST_CASE("linear-in-mean cost fields") {
    auto g = SpatialGrid::uniform(-6.0, 6.0, 257);
    auto mu = Density::gaussian(g, 0.3, 0.25);
    const double M = mean_of(mu);

    auto field = cost_field(LinearMean{-2.0}, mu);
    for (std::size_t i = 0; i < 257; i += 32)
        CHECK(field[i] == doctest::Approx(-2.0 * g.point(i) * M).epsilon(1e-12));

    auto grad = cost_gradient_x(LinearMean{-2.0}, mu);
    for (double v : grad) CHECK(v == doctest::Approx(-2.0 * M).epsilon(1e-12));

    LinearMean shifted{1.0, [](const Density&) { return 5.0; }};
    auto f2 = cost_field(shifted, mu);
    CHECK(f2[128] == doctest::Approx(g.point(128) * M + 5.0).epsilon(1e-12));

    auto zero = cost_field(ZeroCost{}, mu);
    for (double v : zero) CHECK(v == 0.0);
}

TEST_CASE("kernel and local couplings reduce to quadrature") {
    auto g = SpatialGrid::uniform(-4.0, 4.0, 201);
    auto mu = Density::gaussian(g, 0.5, 0.3);

    KernelCost k{[](double x, double y) { return (x - y) * (x - y); },
                 [](double s) { return s; }, 1.0};
    auto field = cost_field(k, mu);
    // integral (x-y)^2 mu(dy) = x^2 - 2 x M + E[Y^2]
    std::vector<double> y2(201);
    for (std::size_t i = 0; i < 201; ++i) y2[i] = g.point(i) * g.point(i) * mu.values[i];
    const double m1 = mean_of(mu), m2 = trapezoid(g, y2);
    for (std::size_t i = 0; i < 201; i += 25) {
        const double x = g.point(i);
        CHECK(field[i] == doctest::Approx(x * x - 2.0 * x * m1 + m2).epsilon(1e-10));
    }

    LocalCost loc{[](double, double m) { return m * m; }, 2.0};
    auto lf = cost_field(loc, mu);
    for (std::size_t i = 0; i < 201; i += 40)
        CHECK(lf[i] == doctest::Approx(mu.values[i] * mu.values[i]).epsilon(1e-12));

    CustomCost cc{[](const Density& d) {
        return std::vector<double>(d.values.size(), mean_of(d));
    }};
    auto cf = cost_field(cc, mu);
    CHECK(cf[7] == doctest::Approx(m1).epsilon(1e-12));
}

TEST_CASE("sign condition screening for the one-sided construction") {
    auto g = SpatialGrid::uniform(-6.0, 6.0, 129);

    auto attract = check_FG2(LinearMean{-1.0}, LinearMean{-0.5}, g, 64, 7);
    CHECK(attract.pass);
    CHECK(attract.nonzero_clause_holds);
    CHECK(attract.max_violation <= 1e-12);

    auto repel = check_FG2(LinearMean{1.0}, LinearMean{-0.5}, g, 64, 7);
    CHECK_FALSE(repel.pass);
    CHECK(repel.max_violation > 0.0);

    auto allzero = check_FG2(ZeroCost{}, ZeroCost{}, g, 64, 7);
    CHECK_FALSE(allzero.pass);
    CHECK_FALSE(allzero.nonzero_clause_holds);
}

TEST_CASE("strict terminal slope condition and its sharp epsilon") {
    auto g = SpatialGrid::uniform(-6.0, 6.0, 129);
    auto rep = check_G3(LinearMean{-1.0}, 0.1, 0.12, -1.0, 1.0, g, 96, 3);
    CHECK(rep.pass);
    CHECK(rep.epsilon_closed_form == doctest::Approx(0.1).epsilon(1e-12));

    auto tight = check_G3(LinearMean{-1.0}, 0.1, 0.05, -1.0, 1.0, g, 96, 3);
    CHECK_FALSE(tight.pass);
    CHECK(tight.max_defect > 0.0);

    // weaker terminal pull doubles the required epsilon
    auto weak = check_G3(LinearMean{-0.5}, 0.1, 0.25, -1.0, 1.0, g, 96, 3);
    CHECK(weak.epsilon_closed_form == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(weak.pass);
}

TEST_CASE("empirical Lipschitz estimates respect the analytic constant") {
    auto g = SpatialGrid::uniform(-6.0, 6.0, 129);
    // Cauchy-Schwarz caps the field ratio by the kernel's L2 mass; the flat
    // x-profile keeps the gradient ratio well inside the same cap
    KernelCost ker{[](double x, double y) { return std::exp(-x * x / 8.0 - y * y); },
                   [](double s) { return s; }, 1.0};
    auto est = lipschitz_L2_estimate(ker, g, 48, 17, LipschitzMeasure::Field);
    CHECK(std::isfinite(est.analytic));
    CHECK(est.empirical <= est.analytic * (1.0 + 1e-9));
    CHECK(est.empirical > 0.0);

    auto gest = lipschitz_L2_estimate(ker, g, 48, 17, LipschitzMeasure::GradientX);
    CHECK(gest.empirical <= gest.analytic * (1.0 + 1e-9));

    // the x-linear mean coupling has no domain-free L2 constant
    auto lin = lipschitz_L2_estimate(LinearMean{1.5}, g, 48, 17, LipschitzMeasure::Field);
    CHECK(std::isnan(lin.analytic));
    CHECK(lin.empirical > 0.0);
}
