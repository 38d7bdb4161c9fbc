#include "mfglab/certify.hpp"

#include "mfglab/errors.hpp"
#include "mfglab/pde.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace mfg {

namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double bilinear_form(const CostSpec& spec, const Density& mu, const Density& nu) {
    const auto f_mu = cost_field(spec, mu);
    const auto f_nu = cost_field(spec, nu);
    std::vector<double> integrand(mu.values.size());
    for (std::size_t i = 0; i < integrand.size(); ++i)
        integrand[i] = (f_mu[i] - f_nu[i]) * (mu.values[i] - nu.values[i]);
    return trapezoid(mu.grid, integrand);
}

} // namespace

const char* to_string(MonotoneVerdict v) {
    switch (v) {
    case MonotoneVerdict::MonotonePass: return "MonotonePass";
    case MonotoneVerdict::MonotoneFail: return "MonotoneFail";
    default: return "Inconclusive";
    }
}

const char* to_string(RegimeVerdict v) {
    switch (v) {
    case RegimeVerdict::ProvablyUnique: return "ProvablyUnique";
    case RegimeVerdict::ProvablyMultiple: return "ProvablyMultiple";
    default: return "Undetermined";
    }
}

const char* to_string(CheckStatus s) {
    switch (s) {
    case CheckStatus::Pass: return "PASS";
    case CheckStatus::Fail: return "FAIL";
    default: return "UNCHECKED";
    }
}

MonotonicityReport monotonicity_check(const CostSpec& F, const CostSpec& G,
                                      const SpatialGrid& grid, std::size_t n_pairs,
                                      std::uint64_t seed, double tol) {
    if (n_pairs < 10)
        throw std::invalid_argument("monotonicity_check: need at least 10 pairs");

    MonotonicityReport rep;
    rep.min_f_form = std::numeric_limits<double>::infinity();
    rep.min_g_form = std::numeric_limits<double>::infinity();

    for (std::size_t i = 0; i < n_pairs; ++i) {
        const Density mu = random_mixture(grid, seed + 2 * i);
        Density nu = random_mixture(grid, seed + 2 * i + 1);
        // Means must be distinct for the strict clause to be meaningful.
        for (std::uint64_t attempt = 1; std::abs(mean_of(mu) - mean_of(nu)) < 0.05; ++attempt)
            nu = random_mixture(grid, seed + 2 * i + 1 + 7919 * attempt);

        PairForm p;
        p.delta_mean = mean_of(mu) - mean_of(nu);
        p.f_form = bilinear_form(F, mu, nu);
        p.g_form = bilinear_form(G, mu, nu);
        if (const auto* lin = std::get_if<LinearMean>(&F))
            p.f_closed = lin->coef * p.delta_mean * p.delta_mean;
        else
            p.f_closed = std::numeric_limits<double>::quiet_NaN();
        rep.min_f_form = std::min(rep.min_f_form, p.f_form);
        rep.min_g_form = std::min(rep.min_g_form, p.g_form);
        rep.pairs.push_back(p);
    }

    if (rep.min_f_form < -tol || rep.min_g_form < -tol)
        rep.verdict = MonotoneVerdict::MonotoneFail;
    else if (rep.min_f_form > tol && rep.min_g_form >= -tol)
        rep.verdict = MonotoneVerdict::MonotonePass;
    else
        rep.verdict = MonotoneVerdict::Inconclusive;
    return rep;
}

RegimeVerdict regime_verdict(double alpha, double beta) {
    if (alpha > 0.0 && beta >= 0.0) return RegimeVerdict::ProvablyUnique;
    if (alpha <= 0.0 && beta < 0.0) return RegimeVerdict::ProvablyMultiple;
    return RegimeVerdict::Undetermined;
}

double density_bound_constant(double sigma, double drift_bound, std::size_t d, double t) {
    if (!(sigma > 0.0))
        throw DegenerateDiffusion("density_bound_constant: sigma must be positive");
    if (!(t > 0.0) || drift_bound < 0.0 || d == 0)
        throw std::invalid_argument("density_bound_constant: bad inputs");

    const double b = drift_bound;
    const double s2 = sigma * sigma;
    const double dd = static_cast<double>(d);

    const double head = std::exp(8.0 * b * b * t / s2) +
                        (4.0 * b / sigma) * std::sqrt(2.0 * M_PI * t) *
                            std::exp(16.0 * b * b * t / s2);
    const double factor1 = std::pow(head, dd / 4.0);
    const double factor2 = std::exp(b * b * t / (2.0 * s2));

    const double c = b / s2;     // exponential tilt rate
    const double s = s2 * t;     // heat-kernel variance
    const double one_dim = 2.0 * std::exp(c * c * s / 2.0) * normal_cdf(c * std::sqrt(s));
    const double integral = std::pow(one_dim, dd);

    return factor1 * factor2 * integral;
}

DensityBoundReport verify_density_bound(const DriftField& drift, double drift_bound,
                                        double sigma, const Density& init, double t,
                                        double slack) {
    if (!(sigma > 0.0))
        throw DegenerateDiffusion("verify_density_bound: sigma must be positive");
    detail::require_same_grid(drift.grid, init.grid, "verify_density_bound");
    if (std::abs(drift.mesh.horizon - t) > 1e-12 * std::max(1.0, t))
        throw GridMismatch("verify_density_bound: drift horizon differs from t");
    for (std::size_t j = 0; j < drift.b.rows(); ++j)
        for (std::size_t i = 0; i < drift.b.cols(); ++i)
            if (std::abs(drift.b(j, i)) > drift_bound + 1e-12)
                throw PreconditionFail("verify_density_bound: drift exceeds the stated bound");

    const DensityFlow flow =
        solve_fp_forward(drift, [sigma](double) { return sigma; }, init, drift.mesh);

    DensityBoundReport rep;
    rep.c_hat = density_bound_constant(sigma, drift_bound, 1, t);
    rep.sup_init = init.sup();
    rep.sup_final = flow.frame(drift.mesh.n_t - 1).sup();
    rep.ratio = rep.sup_final / (rep.c_hat * rep.sup_init);
    rep.pass = rep.ratio <= 1.0 + slack;
    return rep;
}

namespace {

ConstantsTrace trace_at(const ThresholdInputs& in, double T) {
    ConstantsTrace tr;
    tr.c_o = static_cast<double>(in.d) * (in.C_H + 3.0) / 2.0;
    tr.c_1 = (in.C_H + 3.0) / 2.0;
    tr.c_hat_T = density_bound_constant(in.sigma, in.C_H, in.d, T);
    if (in.Cbar_H == 0.0 || in.sup_init_density == 0.0)
        tr.A_inf = 0.0; // avoid inf * 0 when C_hat overflows
    else
        tr.A_inf = tr.c_hat_T * in.sup_init_density * in.Cbar_H;
    tr.C_1 = in.L_G * std::exp(tr.c_o * in.C_H * T);
    tr.C_2 = tr.c_o * in.L_F * std::exp(tr.c_o * in.C_H * T);
    tr.C_3 = tr.c_1 * std::exp(tr.c_1 * in.C_H * T) * tr.A_inf * tr.A_inf;
    return tr;
}

double gap_value(const ThresholdInputs& in, double T) {
    const ConstantsTrace tr = trace_at(in, T);
    if (tr.C_3 == 0.0) return 0.0;
    // both couplings flat: the gap is identically zero no matter how the
    // growth constant behaves (avoids 0 * inf once C_hat overflows)
    if (tr.C_1 == 0.0 && tr.C_2 == 0.0) return 0.0;
    return T * tr.C_1 * tr.C_3 + T * T * tr.C_2 * tr.C_3 / 2.0;
}

} // namespace

ThresholdResult short_time_threshold(const ThresholdInputs& in) {
    if (in.d == 0 || in.L_F < 0.0 || in.L_G < 0.0 || in.sup_init_density < 0.0 ||
        in.C_H < 0.0 || in.Cbar_H < 0.0 || !(in.T_max_scan > 0.0))
        throw std::invalid_argument("short_time_threshold: bad inputs");
    if (!(in.sigma > 0.0))
        throw DegenerateDiffusion("short_time_threshold: sigma must be positive");

    ThresholdResult res;
    if (gap_value(in, in.T_max_scan) < 1.0) {
        res.T_bar = in.T_max_scan;
        res.exceeds_scan = true;
    } else {
        double lo = 1e-12;
        if (!(gap_value(in, lo) < 1.0))
            throw NoPositiveThreshold(
                "short_time_threshold: inequality fails down to T = 1e-12");
        double hi = in.T_max_scan;
        for (int it = 0; it < 200 && (hi - lo) > 1e-12 * hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (gap_value(in, mid) < 1.0)
                lo = mid;
            else
                hi = mid;
        }
        res.T_bar = lo;
        res.exceeds_scan = false;
    }

    res.trace = trace_at(in, res.T_bar);
    {
        std::ostringstream note;
        note << "the decisive quadratic C2*T^2/2 + C1*T = 1/C3 has positive root "
                "(-C1 + sqrt(C1^2 + 2*C2/C3))/C2; a closed form sometimes quoted "
                "with +C1 in place of -C1 differs in sign and is not a root. "
                "T_bar here comes from bisection with all constants re-evaluated "
                "at each trial horizon.";
        res.discrepancy_note = note.str();
    }

    if (in.L_G == 0.0) {
        const double c2c3 = res.trace.C_2 * res.trace.C_3;
        if (c2c3 > 0.0) {
            res.lg_zero_quadratic = std::sqrt(2.0 / c2c3);
            res.lg_zero_improved = M_PI / (2.0 * std::sqrt(c2c3));
        } else {
            res.lg_zero_quadratic = std::numeric_limits<double>::infinity();
            res.lg_zero_improved = std::numeric_limits<double>::infinity();
        }
    } else {
        res.lg_zero_quadratic = std::numeric_limits<double>::quiet_NaN();
        res.lg_zero_improved = std::numeric_limits<double>::quiet_NaN();
    }
    return res;
}

namespace {

HypothesisCheck cost_l2_check(const char* which, const CostSpec& spec,
                              const SpatialGrid& grid) {
    HypothesisCheck c;
    c.hypothesis = std::string(which) + " cost L2 Lipschitz in the measure";
    if (const auto* lin = std::get_if<LinearMean>(&spec)) {
        if (lin->coef != 0.0) {
            c.status = CheckStatus::Fail;
            c.detail = "x-linear mean coupling: the difference field is linear in x, "
                       "so its L2 norm grows with the domain";
        } else {
            c.status = CheckStatus::Pass;
            c.detail = "no x-dependent coupling";
        }
    } else if (std::holds_alternative<ZeroCost>(spec)) {
        c.status = CheckStatus::Pass;
        c.detail = "identically zero";
    } else if (std::holds_alternative<KernelCost>(spec)) {
        const auto est = lipschitz_L2_estimate(spec, grid, 8, 20240811);
        c.status = CheckStatus::Pass;
        std::ostringstream os;
        os << "kernel coupling, empirical constant " << est.empirical;
        c.detail = os.str();
    } else if (const auto* loc = std::get_if<LocalCost>(&spec)) {
        if (std::isfinite(loc->slope_bound)) {
            c.status = CheckStatus::Pass;
            std::ostringstream os;
            os << "local coupling with slope bound " << loc->slope_bound;
            c.detail = os.str();
        } else {
            c.status = CheckStatus::Unchecked;
            c.detail = "local coupling without a declared slope bound";
        }
    } else {
        c.status = CheckStatus::Unchecked;
        c.detail = "opaque cost field";
    }
    return c;
}

} // namespace

ApplicabilityReport applicability_audit(const MfgProblem& problem) {
    ApplicabilityReport rep;
    const double inf = std::numeric_limits<double>::infinity();

    {
        HypothesisCheck c;
        c.hypothesis = "H gradient continuity";
        if (std::holds_alternative<BangBang>(problem.ham)) {
            c.status = CheckStatus::Fail;
            c.detail = "H' jumps at p = 0";
        } else {
            c.status = CheckStatus::Pass;
            c.detail = "H is C^1";
        }
        rep.entries.push_back(c);
    }
    {
        HypothesisCheck c;
        c.hypothesis = "H gradient bound (C_H)";
        const double bound = ham_gradient_bound(problem.ham, inf);
        std::ostringstream os;
        os << "sup |H'| = " << bound;
        c.status = std::isfinite(bound) ? CheckStatus::Pass : CheckStatus::Fail;
        c.detail = os.str();
        rep.entries.push_back(c);
    }
    {
        HypothesisCheck c;
        c.hypothesis = "H gradient Lipschitz (Cbar_H)";
        const double bound = ham_hessian_bound(problem.ham);
        if (std::isfinite(bound)) {
            std::ostringstream os;
            os << "Lip(H') = " << bound;
            c.status = CheckStatus::Pass;
            c.detail = os.str();
        } else {
            c.status = CheckStatus::Fail;
            c.detail = "H' is not Lipschitz (kink)";
        }
        rep.entries.push_back(c);
    }
    rep.entries.push_back(cost_l2_check("running", problem.running, problem.grid()));
    rep.entries.push_back(cost_l2_check("terminal", problem.terminal, problem.grid()));
    {
        HypothesisCheck c;
        c.hypothesis = "uniform ellipticity";
        double lo = inf;
        for (std::size_t i = 0; i < problem.grid().n_x; ++i)
            lo = std::min(lo, problem.sigma(problem.grid().point(i)));
        std::ostringstream os;
        os << "min sigma on grid = " << lo;
        c.status = (lo > 0.0) ? CheckStatus::Pass : CheckStatus::Fail;
        c.detail = os.str();
        rep.entries.push_back(c);
    }
    {
        HypothesisCheck c;
        c.hypothesis = "square-integrability of value-gradient differences";
        c.status = CheckStatus::Unchecked;
        c.detail = "not certifiable on a truncated domain";
        rep.entries.push_back(c);
    }

    for (const auto& e : rep.entries)
        if (e.status == CheckStatus::Fail) rep.no_failures = false;
    return rep;
}

} // namespace mfg
