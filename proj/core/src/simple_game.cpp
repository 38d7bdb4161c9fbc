#include "mfglab/simple_game.hpp"

#include "mfglab/errors.hpp"
#include "mfglab/hamiltonian.hpp"
#include "mfglab/pde.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mfg {

namespace {

double sgn(double x) { return (x > 0.0) - (x < 0.0); }

void validate(const SimpleGameSpec& s) {
    if (!(s.c0 > 0.0)) throw std::invalid_argument("SimpleGameSpec: c0 must be positive");
    if (!(s.horizon > 0.0)) throw std::invalid_argument("SimpleGameSpec: horizon must be positive");
}

HorizonRegime regime_of(const SimpleGameSpec& s) {
    if (s.horizon == 2.0 * s.c0) return HorizonRegime::Critical;
    return s.horizon < 2.0 * s.c0 ? HorizonRegime::SmallHorizon : HorizonRegime::LargeHorizon;
}

} // namespace

double consistency_residual(double M, const SimpleGameSpec& spec) {
    validate(spec);
    return M - sgn(M) * spec.horizon * std::min(std::abs(M) / (2.0 * spec.c0), 1.0) -
           spec.mean_init;
}

double feedback_level(double M, double c0) {
    return sgn(M) * std::min(std::abs(M) / (2.0 * c0), 1.0);
}

double value_function(const SimpleGameSpec& spec, double M, double t, double x) {
    validate(spec);
    const double c0 = spec.c0;
    return -M * x + (spec.horizon - t) * (c0 * std::min(M * M / (4.0 * c0 * c0), 1.0) -
                                          std::abs(M) * std::min(std::abs(M) / (2.0 * c0), 1.0));
}

RootSet enumerate_roots(const SimpleGameSpec& spec) {
    validate(spec);
    const double T = spec.horizon;
    const double c0 = spec.c0;
    const double m0 = spec.mean_init;
    const HorizonRegime reg = regime_of(spec);

    RootSet out;
    std::vector<double> roots;

    if (reg == HorizonRegime::Critical && m0 == 0.0) {
        // Every |M| <= 2 c0 satisfies the equation; nothing survives outside.
        out.is_continuum = true;
        out.band_lo = -2.0 * c0;
        out.band_hi = 2.0 * c0;
        return out;
    }

    if (m0 == 0.0) roots.push_back(0.0);

    // Interior band 0 < |M| < 2 c0: the min() clause is |M| / (2 c0), so the
    // equation is linear with slope 1 - T / (2 c0).
    if (reg != HorizonRegime::Critical) {
        const double slope = 1.0 - T / (2.0 * c0);
        const double M = m0 / slope;
        if (std::abs(M) > 0.0 && std::abs(M) < 2.0 * c0) roots.push_back(M);
    }

    // Saturated region |M| >= 2 c0: control pinned at +-1, M = m0 + sgn(M) T.
    if (m0 + T >= 2.0 * c0) roots.push_back(m0 + T);
    if (m0 - T <= -2.0 * c0) roots.push_back(m0 - T);

    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end(),
                            [](double a, double b) { return std::abs(a - b) < 1e-12; }),
                roots.end());
    for (double M : roots) {
        ConsistencyRoot r;
        r.M = M;
        r.residual = consistency_residual(M, spec);
        r.regime = reg;
        r.continuum_member = false;
        if (std::abs(r.residual) > 1e-12)
            throw std::logic_error("enumerate_roots: closed-form root fails the residual check");
        out.roots.push_back(r);
    }
    return out;
}

BruteForceResult brute_force_roots(const SimpleGameSpec& spec, double lo, double hi,
                                   std::size_t n_scan) {
    validate(spec);
    if (!(lo < hi) || n_scan < 3) throw std::invalid_argument("brute_force_roots: bad scan");
    BruteForceResult out;
    const double step = (hi - lo) / static_cast<double>(n_scan - 1);
    std::vector<double> rs(n_scan);
    std::size_t flat_run = 0, max_flat_run = 0;
    for (std::size_t i = 0; i < n_scan; ++i) {
        rs[i] = consistency_residual(lo + step * static_cast<double>(i), spec);
        if (std::abs(rs[i]) < 1e-12) {
            ++flat_run;
            max_flat_run = std::max(max_flat_run, flat_run);
        } else {
            flat_run = 0;
        }
    }
    out.continuum_detected = max_flat_run >= 3;

    auto push_root = [&](double r) {
        for (double existing : out.roots)
            if (std::abs(existing - r) < 1e-9) return;
        out.roots.push_back(r);
    };

    for (std::size_t i = 0; i + 1 < n_scan; ++i) {
        const double a = lo + step * static_cast<double>(i);
        const double b = a + step;
        if (rs[i] == 0.0) {
            push_root(a);
            continue;
        }
        if (rs[i] * rs[i + 1] < 0.0) {
            double xa = a, xb = b, fa = rs[i];
            for (int it = 0; it < 200; ++it) {
                const double xm = 0.5 * (xa + xb);
                const double fm = consistency_residual(xm, spec);
                if (fm == 0.0 || (xb - xa) < 1e-14) {
                    xa = xb = xm;
                    break;
                }
                if (fa * fm < 0.0) {
                    xb = xm;
                } else {
                    xa = xm;
                    fa = fm;
                }
            }
            push_root(0.5 * (xa + xb));
        }
    }
    if (!rs.empty() && rs.back() == 0.0) push_root(hi);
    // The residual is piecewise linear, so it can touch zero without a sign
    // change only at one of its breakpoints; probe those directly.
    for (const double kink : {-2.0 * spec.c0, 0.0, 2.0 * spec.c0})
        if (kink >= lo && kink <= hi &&
            std::abs(consistency_residual(kink, spec)) <= 1e-12)
            push_root(kink);
    std::sort(out.roots.begin(), out.roots.end());
    return out;
}

CrosscheckReport crosscheck_pde(const SimpleGameSpec& spec, double root_M,
                                const Density& init, const TimeMesh& mesh) {
    validate(spec);
    const SpatialGrid& grid = init.grid;
    const double alpha = feedback_level(root_M, spec.c0);
    const SigmaFn sigma = [s = spec.sigma](double) { return s; };

    CrosscheckReport rep;
    const DriftField drift = DriftField::constant(mesh, grid, alpha);
    const DensityFlow flow = solve_fp_forward(drift, sigma, init, mesh);
    rep.mean_terminal = mean_of(flow.frame(mesh.n_t - 1));
    rep.mean_error = std::abs(rep.mean_terminal - root_M);

    const Hamiltonian H = QuadraticControl{spec.c0};
    auto control = [&H](double p) { return optimal_control(H, p, KinkHint::None); };
    auto lcost = [&H](double g) { return control_cost(H, g); };
    Array2d source(mesh.n_t, grid.n_x, 0.0);
    std::vector<double> terminal(grid.n_x);
    for (std::size_t i = 0; i < grid.n_x; ++i) terminal[i] = -root_M * grid.point(i);
    const PolicySolution ps =
        solve_hjb_policy(control, lcost, sigma, source, terminal, mesh, grid);

    for (std::size_t j = 0; j < mesh.n_t; ++j) {
        const double t = mesh.time(j);
        for (std::size_t i = 0; i < grid.n_x; ++i) {
            rep.control_error = std::max(rep.control_error, std::abs(ps.drift.b(j, i) - alpha));
            const double vref = value_function(spec, root_M, t, grid.point(i));
            rep.value_error = std::max(rep.value_error, std::abs(ps.value.v(j, i) - vref));
        }
    }
    rep.pass = rep.mean_error <= 1e-3 && rep.control_error <= 1e-3 && rep.value_error <= 1e-3;
    return rep;
}

} // namespace mfg
