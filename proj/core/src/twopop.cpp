#include "mfglab/twopop.hpp"

#include "mfglab/errors.hpp"
#include "mfglab/parallel.hpp"
#include "mfglab/pde.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace mfg {

namespace {

struct PopView {
    BangBang ham;
    const SigmaFn* sigma;
    const Density* init;
    double alpha, beta, gamma, delta;
    double f_off, g_off;
};

PopView pop_view(const TwoPopProblem& pr, std::size_t i) {
    if (i == 0)
        return {pr.ham1, &pr.sigma1, &pr.init1, pr.coeffs.alpha1, pr.coeffs.beta1,
                pr.coeffs.gamma1, pr.coeffs.delta1, pr.f1, pr.g1};
    return {pr.ham2, &pr.sigma2, &pr.init2, pr.coeffs.alpha2, pr.coeffs.beta2,
            pr.coeffs.gamma2, pr.coeffs.delta2, pr.f2, pr.g2};
}

void validate(const TwoPopProblem& pr) {
    if (!(pr.ham1.a < 0.0 && 0.0 < pr.ham1.b) || !(pr.ham2.a < 0.0 && 0.0 < pr.ham2.b))
        throw PreconditionFail("twopop: control intervals need a_i < 0 < b_i");
    detail::require_same_grid(pr.init1.grid, pr.init2.grid, "twopop");
}

Array2d source_frames(const TwoPopProblem& pr, std::size_t i,
                      const std::vector<double>& mean1, const std::vector<double>& mean2) {
    const PopView pv = pop_view(pr, i);
    const SpatialGrid& grid = pr.grid();
    Array2d src(pr.mesh.n_t, grid.n_x);
    for (std::size_t j = 0; j < pr.mesh.n_t; ++j)
        for (std::size_t k = 0; k < grid.n_x; ++k)
            src(j, k) = (pv.alpha * mean1[j] + pv.beta * mean2[j]) * grid.point(k) + pv.f_off;
    return src;
}

std::vector<double> terminal_values(const TwoPopProblem& pr, std::size_t i,
                                    double mean1_T, double mean2_T) {
    const PopView pv = pop_view(pr, i);
    const SpatialGrid& grid = pr.grid();
    std::vector<double> term(grid.n_x);
    for (std::size_t k = 0; k < grid.n_x; ++k)
        term[k] = (pv.gamma * mean1_T + pv.delta * mean2_T) * grid.point(k) + pv.g_off;
    return term;
}

void require_centered(const Density& d, std::size_t i) {
    if (std::abs(mean_of(d)) > 1e-8)
        throw PreconditionFail("twopop: initial density of population " +
                               std::to_string(i + 1) + " must have zero mean");
}

[[noreturn]] void fail_sign(const char* what) {
    throw PreconditionFail(std::string("construct_twopop_branch: coefficient condition ") +
                           what + " violated");
}

void check_equal_seed_signs(const TwoPopCoeffs& c) {
    if (c.alpha1 > 0.0) fail_sign("alpha1 <= 0");
    if (c.beta1 > 0.0) fail_sign("beta1 <= 0");
    if (c.gamma1 > 0.0) fail_sign("gamma1 <= 0");
    if (c.delta1 > 0.0) fail_sign("delta1 <= 0");
    if (c.alpha2 > 0.0) fail_sign("alpha2 <= 0");
    if (c.beta2 > 0.0) fail_sign("beta2 <= 0");
    if (c.gamma2 > 0.0) fail_sign("gamma2 <= 0");
    if (c.delta2 > 0.0) fail_sign("delta2 <= 0");
    if (!(c.gamma1 + c.delta1 < 0.0)) fail_sign("gamma1 + delta1 < 0");
    if (!(c.gamma2 + c.delta2 < 0.0)) fail_sign("gamma2 + delta2 < 0");
}

void check_mixed_seed_signs(const TwoPopCoeffs& c) {
    if (c.alpha1 > 0.0) fail_sign("alpha1 <= 0");
    if (c.beta2 > 0.0) fail_sign("beta2 <= 0");
    if (c.gamma1 > 0.0) fail_sign("gamma1 <= 0");
    if (c.delta2 > 0.0) fail_sign("delta2 <= 0");
    if (c.alpha2 < 0.0) fail_sign("alpha2 >= 0");
    if (c.beta1 < 0.0) fail_sign("beta1 >= 0");
    if (c.gamma2 < 0.0) fail_sign("gamma2 >= 0");
    if (c.delta1 < 0.0) fail_sign("delta1 >= 0");
    if (!(c.gamma1 < c.delta1)) fail_sign("gamma1 < delta1");
    if (!(c.gamma2 > c.delta2)) fail_sign("gamma2 > delta2");
}

} // namespace

TwoPopSolution construct_twopop_branch(const TwoPopProblem& pr, BranchSeed seed1,
                                       BranchSeed seed2) {
    validate(pr);
    if (seed1 == BranchSeed::ZeroDrift || seed2 == BranchSeed::ZeroDrift)
        throw std::invalid_argument(
            "construct_twopop_branch: seeds must be PlusDrift or MinusDrift");
    require_centered(pr.init1, 0);
    require_centered(pr.init2, 1);
    if (seed1 == seed2)
        check_equal_seed_signs(pr.coeffs);
    else
        check_mixed_seed_signs(pr.coeffs);

    const BranchSeed seeds[2] = {seed1, seed2};
    double gamma_d[2];
    for (std::size_t i = 0; i < 2; ++i) {
        const PopView pv = pop_view(pr, i);
        gamma_d[i] = (seeds[i] == BranchSeed::PlusDrift) ? pv.ham.b : pv.ham.a;
    }

    DensityFlow flows[2];
    parallel_for(2, [&](std::size_t i) {
        const PopView pv = pop_view(pr, i);
        const DriftField drift = DriftField::constant(pr.mesh, pr.grid(), gamma_d[i]);
        flows[i] = solve_fp_forward(drift, *pv.sigma, *pv.init, pr.mesh);
    });
    const std::vector<double> mean1 = flows[0].mean_curve();
    const std::vector<double> mean2 = flows[1].mean_curve();

    ValueField values[2];
    parallel_for(2, [&](std::size_t i) {
        const PopView pv = pop_view(pr, i);
        const Array2d src = source_frames(pr, i, mean1, mean2);
        const auto term = terminal_values(pr, i, mean1.back(), mean2.back());
        const DriftField drift = DriftField::constant(pr.mesh, pr.grid(), gamma_d[i]);
        values[i] = solve_hjb_backward(drift, *pv.sigma, src, term, pr.mesh, pr.grid());
    });

    for (std::size_t i = 0; i < 2; ++i) {
        const bool want_negative = (seeds[i] == BranchSeed::PlusDrift);
        for (std::size_t j = 0; j + 1 < pr.mesh.n_t; ++j)
            for (std::size_t k = 0; k < pr.grid().n_x; ++k) {
                const double g = values[i].vx(j, k);
                if (want_negative ? (g >= 0.0) : (g <= 0.0))
                    throw SignConditionViolated(pr.mesh.time(j), pr.grid().point(k), g);
            }
    }

    TwoPopSolution sol;
    sol.value1 = std::move(values[0]);
    sol.value2 = std::move(values[1]);
    sol.flow1 = std::move(flows[0]);
    sol.flow2 = std::move(flows[1]);
    sol.cert1 = certificate_of(sol.value1);
    sol.cert2 = certificate_of(sol.value2);
    sol.hint1 = kink_hint_for(seed1);
    sol.hint2 = kink_hint_for(seed2);
    sol.label = std::string(seed1 == BranchSeed::PlusDrift ? "plus" : "minus") + "/" +
                (seed2 == BranchSeed::PlusDrift ? "plus" : "minus");
    sol.joint_residual = twopop_residual(pr, sol);
    return sol;
}

double twopop_residual(const TwoPopProblem& pr, const TwoPopSolution& sol) {
    validate(pr);
    detail::require_same_mesh(pr.mesh, sol.flow1.mesh, "twopop_residual");
    detail::require_same_mesh(pr.mesh, sol.flow2.mesh, "twopop_residual");

    const std::vector<double> mean1 = sol.flow1.mean_curve();
    const std::vector<double> mean2 = sol.flow2.mean_curve();
    const KinkHint hints[2] = {sol.hint1, sol.hint2};
    const DensityFlow* flows[2] = {&sol.flow1, &sol.flow2};

    double defects[2];
    parallel_for(2, [&](std::size_t i) {
        const PopView pv = pop_view(pr, i);
        const Array2d src = source_frames(pr, i, mean1, mean2);
        const auto term = terminal_values(pr, i, mean1.back(), mean2.back());
        const Hamiltonian ham = pv.ham;
        const KinkHint hint = hints[i];
        auto control = [ham, hint](double p) { return optimal_control(ham, p, hint); };
        auto lcost = [ham](double g) { return control_cost(ham, g); };
        const PolicySolution ps = solve_hjb_policy(control, lcost, *pv.sigma, src, term,
                                                   pr.mesh, pr.grid());
        const DensityFlow replay =
            solve_fp_forward(ps.drift, *pv.sigma, *pv.init, pr.mesh);
        defects[i] = flow_distance(replay, *flows[i]);
    });
    return std::max(defects[0], defects[1]);
}

std::vector<double> default_lambda_scan(const TwoPopCoeffs& c) {
    std::vector<double> scan;
    const double num = 2.0 * c.alpha1 * c.beta2 - c.beta1 * c.alpha2;
    if (c.beta1 != 0.0) {
        const double cand = num / (c.beta1 * c.beta1);
        if (cand > 0.0 && std::isfinite(cand)) scan.push_back(cand);
    }
    if (c.alpha2 != 0.0) {
        const double cand = num / (c.alpha2 * c.alpha2);
        if (cand > 0.0 && std::isfinite(cand)) scan.push_back(cand);
    }
    for (int k = 0; k <= 100; ++k)
        scan.push_back(std::pow(10.0, -3.0 + 6.0 * static_cast<double>(k) / 100.0));
    return scan;
}

namespace {

bool m1_positive_definite(const TwoPopCoeffs& c, double lambda) {
    const double q_xx = lambda * c.alpha1;
    const double q_xy = lambda * c.beta1 + c.alpha2;
    const double q_yy = c.beta2;
    return q_xx > 0.0 && q_yy > 0.0 && 4.0 * q_xx * q_yy > q_xy * q_xy;
}

bool m2_positive_semidefinite(const TwoPopCoeffs& c, double lambda) {
    // Symmetric part of [[lambda gamma1, lambda delta1], [gamma2, delta2]].
    const double s_xx = lambda * c.gamma1;
    const double s_xy = 0.5 * (lambda * c.delta1 + c.gamma2);
    const double s_yy = c.delta2;
    const double tr = s_xx + s_yy;
    const double det = s_xx * s_yy - s_xy * s_xy;
    const double disc = std::sqrt(std::max(0.0, tr * tr - 4.0 * det));
    const double min_eig = 0.5 * (tr - disc);
    return min_eig >= -1e-12;
}

bool pattern_all_nonpositive(const TwoPopCoeffs& c) {
    return c.alpha1 <= 0.0 && c.beta1 <= 0.0 && c.gamma1 <= 0.0 && c.delta1 <= 0.0 &&
           c.alpha2 <= 0.0 && c.beta2 <= 0.0 && c.gamma2 <= 0.0 && c.delta2 <= 0.0 &&
           c.gamma1 + c.delta1 < 0.0 && c.gamma2 + c.delta2 < 0.0;
}

bool pattern_mixed(const TwoPopCoeffs& c) {
    return c.alpha1 <= 0.0 && c.beta2 <= 0.0 && c.gamma1 <= 0.0 && c.delta2 <= 0.0 &&
           c.alpha2 >= 0.0 && c.beta1 >= 0.0 && c.gamma2 >= 0.0 && c.delta1 >= 0.0 &&
           c.gamma1 < c.delta1 && c.gamma2 > c.delta2;
}

} // namespace

MatrixVerdict matrix_uniqueness_check(const TwoPopCoeffs& c,
                                      const std::vector<double>& lambda_scan) {
    const std::vector<double> scan =
        lambda_scan.empty() ? default_lambda_scan(c) : lambda_scan;

    MatrixVerdict out;
    out.lambda = std::numeric_limits<double>::quiet_NaN();
    for (double lambda : scan) {
        if (!(lambda > 0.0)) continue;
        if (m1_positive_definite(c, lambda) && m2_positive_semidefinite(c, lambda)) {
            out.verdict = RegimeVerdict::ProvablyUnique;
            out.lambda = lambda;
            return out;
        }
    }
    if (pattern_all_nonpositive(c) || pattern_mixed(c)) {
        out.verdict = RegimeVerdict::ProvablyMultiple;
        return out;
    }
    out.verdict = RegimeVerdict::Undetermined;
    return out;
}

} // namespace mfg
