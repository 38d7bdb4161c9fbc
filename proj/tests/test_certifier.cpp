#include "doctest.h"

#include "mfglab/certify.hpp"
#include "mfglab/errors.hpp"
#include "mfglab/problem.hpp"

#include <cmath>
#include <string>
#include <vector>

using namespace mfg;

namespace {

double simpson(const std::function<double(double)>& f, double a, double b, std::size_t n) {
    if (n % 2 == 1) ++n;
    const double h = (b - a) / static_cast<double>(n);
    double s = f(a) + f(b);
    for (std::size_t i = 1; i < n; ++i) s += f(a + h * static_cast<double>(i)) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

// E[e^{c|Y|}] for Y ~ N(0, s), by direct quadrature of the density.
double abs_exp_moment(double c, double s) {
    const double sd = std::sqrt(s);
    const auto f = [&](double y) {
        return std::exp(c * y - y * y / (2.0 * s)) / std::sqrt(2.0 * M_PI * s);
    };
    return 2.0 * simpson(f, 0.0, (c * s) + 14.0 * sd, 40000);
}

// Rebuilds the sup-norm growth constant with the Gaussian factor replaced by
// quadrature; everything else is elementary arithmetic on the inputs.
double c_hat_quadrature(double sigma, double b, std::size_t d, double t) {
    const double s = sigma * sigma * t;
    const double c = b / (sigma * sigma);
    const double dd = static_cast<double>(d);
    const double first = std::pow(std::exp(8.0 * b * b * t / (sigma * sigma)) +
                                      (4.0 * b / sigma) * std::sqrt(2.0 * M_PI * t) *
                                          std::exp(16.0 * b * b * t / (sigma * sigma)),
                                  dd / 4.0);
    const double mid = std::exp(b * b * t / (2.0 * sigma * sigma));
    return first * mid * std::pow(abs_exp_moment(c, s), dd);
}

// The horizon inequality g(T) = T C1 C3 + T^2 C2 C3 / 2 with every constant
// rebuilt from the inputs; an independent check on the bisection target.
double threshold_gap(const ThresholdInputs& in, double T) {
    const double c_o = static_cast<double>(in.d) * (in.C_H + 3.0) / 2.0;
    const double c_1 = (in.C_H + 3.0) / 2.0;
    const double C1 = in.L_G * std::exp(c_o * in.C_H * T);
    const double C2 = c_o * in.L_F * std::exp(c_o * in.C_H * T);
    const double A = density_bound_constant(in.sigma, in.C_H, in.d, T) *
                     in.sup_init_density * in.Cbar_H;
    const double C3 = c_1 * std::exp(c_1 * in.C_H * T) * A * A;
    return T * C1 * C3 + 0.5 * T * T * C2 * C3;
}

} // namespace

TEST_CASE("bilinear forms certify the attracting and repelling couplings") {
    auto grid = SpatialGrid::uniform(-6.0, 6.0, 129);

    auto pass = monotonicity_check(LinearMean{1.0}, LinearMean{0.5}, grid, 48, 3);
    CHECK(pass.verdict == MonotoneVerdict::MonotonePass);
    CHECK(pass.min_f_form > 0.0);
    CHECK(pass.min_g_form >= -1e-9);
    REQUIRE(!pass.pairs.empty());
    // the sampled integral reduces to coef * (delta mean)^2 for this family
    for (const auto& pr : pass.pairs)
        CHECK(pr.f_form == doctest::Approx(pr.f_closed).epsilon(1e-9));

    auto fail = monotonicity_check(LinearMean{-1.0}, LinearMean{-1.0}, grid, 48, 3);
    CHECK(fail.verdict == MonotoneVerdict::MonotoneFail);
    CHECK(fail.min_f_form < 0.0);

    auto flat = monotonicity_check(ZeroCost{}, ZeroCost{}, grid, 48, 3);
    CHECK(flat.verdict == MonotoneVerdict::Inconclusive);

    auto bad_terminal = monotonicity_check(LinearMean{1.0}, LinearMean{-1.0}, grid, 48, 3);
    CHECK(bad_terminal.verdict == MonotoneVerdict::MonotoneFail);
}

TEST_CASE("verdict strings") {
    CHECK(std::string(to_string(MonotoneVerdict::MonotonePass)) == "MonotonePass");
    CHECK(std::string(to_string(RegimeVerdict::ProvablyUnique)) == "ProvablyUnique");
    CHECK(std::string(to_string(CheckStatus::Unchecked)) == "UNCHECKED");
}

TEST_CASE("sign regime classification for the linear family") {
    CHECK(regime_verdict(1.0, 0.0) == RegimeVerdict::ProvablyUnique);
    CHECK(regime_verdict(1.0, 1.0) == RegimeVerdict::ProvablyUnique);
    CHECK(regime_verdict(0.0, -1.0) == RegimeVerdict::ProvablyMultiple);
    CHECK(regime_verdict(-1.0, -1.0) == RegimeVerdict::ProvablyMultiple);
    CHECK(regime_verdict(0.0, 0.0) == RegimeVerdict::Undetermined);
    CHECK(regime_verdict(1.0, -0.5) == RegimeVerdict::Undetermined);
    CHECK(regime_verdict(-1.0, 0.0) == RegimeVerdict::Undetermined);
}

TEST_CASE("growth constant: pinned value, unit drift-free limit, dimension product") {
    CHECK(density_bound_constant(1.0, 1.0, 1, 0.25) ==
          doctest::Approx(7.2709108819302495).epsilon(1e-12));
    CHECK(density_bound_constant(1.0, 0.0, 1, 0.7) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(density_bound_constant(0.5, 0.0, 3, 2.0) == doctest::Approx(1.0).epsilon(1e-14));

    // the only factor not raised to a d-power is exp(b^2 t / (2 sigma^2))
    const double c1 = density_bound_constant(1.3, 0.8, 1, 0.5);
    const double c2 = density_bound_constant(1.3, 0.8, 2, 0.5);
    const double mid = std::exp(0.8 * 0.8 * 0.5 / (2.0 * 1.3 * 1.3));
    CHECK(c2 * mid == doctest::Approx(c1 * c1).epsilon(1e-12));
}

TEST_CASE("growth constant matches its quadrature reconstruction") {
    for (double b : {0.2, 1.0, 2.5})
        for (double t : {0.1, 0.5, 1.5})
            for (double sigma : {0.8, 1.0})
                CHECK(density_bound_constant(sigma, b, 1, t) ==
                      doctest::Approx(c_hat_quadrature(sigma, b, 1, t)).epsilon(1e-10));
    CHECK(density_bound_constant(1.0, 1.5, 2, 0.4) ==
          doctest::Approx(c_hat_quadrature(1.0, 1.5, 2, 0.4)).epsilon(1e-10));
}

TEST_CASE("solver output stays under the growth bound") {
    auto grid = SpatialGrid::uniform(-8.0, 8.0, 256);
    auto mesh = TimeMesh::uniform(0.25, 256);
    auto init = Density::gaussian(grid, 0.0, 0.25);

    auto rep = verify_density_bound(DriftField::constant(mesh, grid, 1.0), 1.0, 1.0,
                                    init, 0.25);
    CHECK(rep.pass);
    CHECK(rep.c_hat == doctest::Approx(7.2709108819302495).epsilon(1e-12));
    CHECK(rep.ratio <= 1.05);
    CHECK(rep.sup_init == doctest::Approx(init.sup()).epsilon(1e-12));

    // pure diffusion shrinks the sup norm outright
    auto calm = verify_density_bound(DriftField::constant(mesh, grid, 0.0), 0.0, 1.0,
                                     init, 0.25);
    CHECK(calm.pass);
    CHECK(calm.sup_final < calm.sup_init);
}

TEST_CASE("threshold: defaults, root location and regression pin") {
    auto res = short_time_threshold(ThresholdInputs{});
    CHECK(res.T_bar == doctest::Approx(0.06865173047109313).epsilon(1e-9));
    CHECK_FALSE(res.exceeds_scan);
    CHECK_FALSE(res.discrepancy_note.empty());
    CHECK(res.trace.C_3 > 0.0);

    // the returned horizon brackets the rebuilt inequality's root
    CHECK(threshold_gap(ThresholdInputs{}, res.T_bar * (1.0 - 1e-6)) < 1.0);
    CHECK(threshold_gap(ThresholdInputs{}, res.T_bar * (1.0 + 1e-6)) >= 1.0);
}

TEST_CASE("threshold shrinks when any constant grows") {
    const double grid_vals[2] = {0.8, 1.6};
    for (int mask = 0; mask < 32; ++mask) {
        ThresholdInputs lo;
        lo.L_F = grid_vals[(mask >> 0) & 1];
        lo.L_G = grid_vals[(mask >> 1) & 1];
        lo.C_H = grid_vals[(mask >> 2) & 1];
        lo.Cbar_H = grid_vals[(mask >> 3) & 1];
        lo.sup_init_density = grid_vals[(mask >> 4) & 1];
        const double base = short_time_threshold(lo).T_bar;
        CHECK(base > 0.0);
        for (int axis = 0; axis < 5; ++axis) {
            ThresholdInputs hi = lo;
            double* fields[5] = {&hi.L_F, &hi.L_G, &hi.C_H, &hi.Cbar_H,
                                 &hi.sup_init_density};
            *fields[axis] *= 1.5;
            CHECK(short_time_threshold(hi).T_bar <= base * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("vanishing terminal coupling reports both closed-form horizons") {
    ThresholdInputs in;
    in.L_G = 0.0;
    auto res = short_time_threshold(in);
    CHECK(res.lg_zero_quadratic > 0.0);
    CHECK(res.lg_zero_improved >= res.lg_zero_quadratic);
    CHECK(res.lg_zero_improved / res.lg_zero_quadratic ==
          doctest::Approx(M_PI / (2.0 * std::sqrt(2.0))).epsilon(1e-12));
    CHECK_FALSE(res.discrepancy_note.empty());

    ThresholdInputs with_g;
    with_g.L_G = 1.0;
    auto other = short_time_threshold(with_g);
    CHECK(std::isnan(other.lg_zero_quadratic));
}

TEST_CASE("threshold scan edge cases") {
    ThresholdInputs free;
    free.L_F = 0.0;
    free.L_G = 0.0;
    auto res = short_time_threshold(free);
    CHECK(res.exceeds_scan);
    CHECK(res.T_bar == doctest::Approx(free.T_max_scan));

    ThresholdInputs hopeless;
    hopeless.L_G = 1e20;
    hopeless.Cbar_H = 1e10;
    CHECK_THROWS_AS((void)short_time_threshold(hopeless), NoPositiveThreshold);
}

TEST_CASE("hypothesis audit separates smooth and kinked problems") {
    auto grid = SpatialGrid::uniform(-6.0, 6.0, 64);
    auto mesh = TimeMesh::uniform(1.0, 32);
    const CostSpec running = LocalCost{[](double, double m) { return m * m; }, 2.0};
    MfgProblem smooth{QuadraticControl{1.0}, [](double) { return 1.0; }, running,
                      ZeroCost{}, Density::gaussian(grid, 0.0, 0.25), mesh};
    auto rep = applicability_audit(smooth);
    CHECK(rep.no_failures);
    bool has_unchecked = false;
    for (const auto& e : rep.entries) has_unchecked |= e.status == CheckStatus::Unchecked;
    CHECK(has_unchecked);

    // an x-linear mean coupling has no global L2 Lipschitz constant
    MfgProblem kinked{BangBang{-1.0, 1.0}, [](double) { return 1.0; }, LinearMean{1.0},
                      LinearMean{0.5}, Density::gaussian(grid, 0.0, 0.25), mesh};
    auto bad = applicability_audit(kinked);
    CHECK_FALSE(bad.no_failures);
    bool kink_flagged = false;
    for (const auto& e : bad.entries)
        kink_flagged |= (e.status == CheckStatus::Fail &&
                         e.hypothesis.find("continuity") != std::string::npos);
    CHECK(kink_flagged);
}
