#include "mfglab/pde.hpp"

#include "mfglab/errors.hpp"
#include "mfglab/tridiag.hpp"

#include <algorithm>
#include <cmath>

namespace mfg {

namespace {

std::vector<double> eval_sigma_sq(const SigmaFn& sigma, const SpatialGrid& grid) {
    std::vector<double> s2(grid.n_x);
    for (std::size_t i = 0; i < grid.n_x; ++i) {
        const double s = sigma(grid.point(i));
        s2[i] = s * s;
        if (!(s2[i] > 0.0))
            throw NonPositiveDiffusion("sigma^2 <= 0 at x=" + std::to_string(grid.point(i)));
    }
    return s2;
}

// Flux-operator bands for one FP level: row i of L m picks up the divided
// flux differences, so that  w_i dm_i/dt + (L m)_i = 0  conserves sum(w m).
struct FpBands {
    std::vector<double> sub, diag, sup;
};

FpBands fp_operator(const SpatialGrid& grid, const std::vector<double>& D,
                    const double* b_row) {
    const std::size_t n = grid.n_x;
    const double h = grid.h();
    FpBands L{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0),
              std::vector<double>(n, 0.0)};
    for (std::size_t i = 0; i + 1 < n; ++i) {
        // Face between node i and i+1. F = b_f upwind(m) - ((D m)_{i+1} - (D m)_i)/h.
        const double bf = 0.5 * (b_row[i] + b_row[i + 1]);
        const double bp = std::max(bf, 0.0);
        const double bm = std::min(bf, 0.0);
        const double ci = bp + D[i] / h;       // multiplies m_i in F
        const double cip = bm - D[i + 1] / h;  // multiplies m_{i+1} in F
        // Row i: +F, row i+1: -F.
        L.diag[i] += ci;
        L.sup[i] += cip;
        L.sub[i + 1] -= ci;
        L.diag[i + 1] -= cip;
    }
    return L;
}

std::vector<double> cell_volumes(const SpatialGrid& grid) {
    std::vector<double> w(grid.n_x, grid.h());
    w.front() *= 0.5;
    w.back() *= 0.5;
    return w;
}

} // namespace

DensityFlow solve_fp_forward(const DriftField& drift, const SigmaFn& sigma,
                             const Density& init, const TimeMesh& mesh,
                             TimeScheme scheme) {
    detail::require_same_grid(drift.grid, init.grid, "solve_fp_forward");
    detail::require_same_mesh(drift.mesh, mesh, "solve_fp_forward");
    const SpatialGrid grid = init.grid;
    const std::size_t n = grid.n_x;
    const double dt = mesh.dt();
    const auto s2 = eval_sigma_sq(sigma, grid);
    std::vector<double> D(n);
    for (std::size_t i = 0; i < n; ++i) D[i] = 0.5 * s2[i];
    const auto w = cell_volumes(grid);
    const double theta = (scheme == TimeScheme::CrankNicolson) ? 0.5 : 1.0;

    DensityFlow flow{mesh, grid, Array2d(mesh.n_t, n)};
    std::vector<double> m = init.values;
    for (std::size_t i = 0; i < n; ++i) flow.frames(0, i) = m[i];

    std::vector<double> sub(n), diag(n), sup(n), rhs(n);
    for (std::size_t k = 1; k < mesh.n_t; ++k) {
        const FpBands Lnew = fp_operator(grid, D, drift.b.row(k));
        for (std::size_t i = 0; i < n; ++i) {
            sub[i] = theta * dt * Lnew.sub[i];
            diag[i] = w[i] + theta * dt * Lnew.diag[i];
            sup[i] = theta * dt * Lnew.sup[i];
            rhs[i] = w[i] * m[i];
        }
        if (theta < 1.0) {
            const FpBands Lold = fp_operator(grid, D, drift.b.row(k - 1));
            const double c = (1.0 - theta) * dt;
            for (std::size_t i = 0; i < n; ++i) {
                double lm = Lold.diag[i] * m[i];
                if (i > 0) lm += Lold.sub[i] * m[i - 1];
                if (i + 1 < n) lm += Lold.sup[i] * m[i + 1];
                rhs[i] -= c * lm;
            }
        }
        m = solve_tridiag(sub, diag, sup, rhs);
        for (std::size_t i = 0; i < n; ++i) flow.frames(k, i) = m[i];
        const double mass = trapezoid(grid, m);
        if (std::abs(mass - 1.0) > mass_tol) throw MassDrift(mass, mass_tol);
    }
    return flow;
}

namespace {

// Bands of the spatial operator  A v = -b v_x - D v_xx  at one time level,
// upwinded so that off-diagonals stay nonpositive. Boundary rows use the
// interior-side difference for advection and a v_xx = 0 closure.
struct HjbBands {
    std::vector<double> sub, diag, sup;
};

HjbBands hjb_operator(const SpatialGrid& grid, const std::vector<double>& D,
                      const double* b_row) {
    const std::size_t n = grid.n_x;
    const double h = grid.h();
    HjbBands A{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0),
               std::vector<double>(n, 0.0)};
    for (std::size_t i = 0; i < n; ++i) {
        const double b = b_row[i];
        if (i == 0) {
            A.diag[i] += b / h;
            A.sup[i] -= b / h;
        } else if (i == n - 1) {
            A.diag[i] += -b / h;
            A.sub[i] -= -b / h;
        } else if (b > 0.0) {
            // -b (v_{i+1} - v_i)/h
            A.diag[i] += b / h;
            A.sup[i] -= b / h;
        } else {
            // -b (v_i - v_{i-1})/h
            A.diag[i] += -b / h;
            A.sub[i] -= -b / h;
        }
        if (i > 0 && i + 1 < n) {
            const double d = D[i] / (h * h);
            A.sub[i] -= d;
            A.diag[i] += 2.0 * d;
            A.sup[i] -= d;
        }
    }
    return A;
}

void apply_bands(const HjbBands& A, const std::vector<double>& v, std::vector<double>& out) {
    const std::size_t n = v.size();
    for (std::size_t i = 0; i < n; ++i) {
        double s = A.diag[i] * v[i];
        if (i > 0) s += A.sub[i] * v[i - 1];
        if (i + 1 < n) s += A.sup[i] * v[i + 1];
        out[i] = s;
    }
}

} // namespace

ValueField solve_hjb_backward(const DriftField& drift, const SigmaFn& sigma,
                              const Array2d& source, const std::vector<double>& terminal,
                              const TimeMesh& mesh, const SpatialGrid& grid,
                              TimeScheme scheme) {
    detail::require_same_grid(drift.grid, grid, "solve_hjb_backward");
    detail::require_same_mesh(drift.mesh, mesh, "solve_hjb_backward");
    if (terminal.size() != grid.n_x || source.rows() != mesh.n_t || source.cols() != grid.n_x)
        throw GridMismatch("solve_hjb_backward: source/terminal shape");
    const std::size_t n = grid.n_x;
    const double dt = mesh.dt();
    const auto s2 = eval_sigma_sq(sigma, grid);
    std::vector<double> D(n);
    for (std::size_t i = 0; i < n; ++i) D[i] = 0.5 * s2[i];
    const double theta = (scheme == TimeScheme::CrankNicolson) ? 0.5 : 1.0;

    ValueField vf{mesh, grid, Array2d(mesh.n_t, n), Array2d(mesh.n_t, n)};
    std::vector<double> v = terminal;
    for (std::size_t i = 0; i < n; ++i) vf.v(mesh.n_t - 1, i) = v[i];

    std::vector<double> sub(n), diag(n), sup(n), rhs(n), av(n);
    for (std::size_t k = mesh.n_t - 1; k-- > 0;) {
        const HjbBands Anew = hjb_operator(grid, D, drift.b.row(k));
        for (std::size_t i = 0; i < n; ++i) {
            sub[i] = theta * dt * Anew.sub[i];
            diag[i] = 1.0 + theta * dt * Anew.diag[i];
            sup[i] = theta * dt * Anew.sup[i];
            rhs[i] = v[i] + theta * dt * source(k, i);
        }
        if (theta < 1.0) {
            const HjbBands Aold = hjb_operator(grid, D, drift.b.row(k + 1));
            apply_bands(Aold, v, av);
            const double c = (1.0 - theta) * dt;
            for (std::size_t i = 0; i < n; ++i) rhs[i] += c * (source(k + 1, i) - av[i]);
        }
        v = solve_tridiag(sub, diag, sup, rhs);
        for (std::size_t i = 0; i < n; ++i) vf.v(k, i) = v[i];
    }
    vf.vx = gradient_frames(grid, vf.v);
    return vf;
}

PolicySolution solve_hjb_policy(const std::function<double(double)>& control,
                                const std::function<double(double)>& control_cost,
                                const SigmaFn& sigma, const Array2d& source,
                                const std::vector<double>& terminal, const TimeMesh& mesh,
                                const SpatialGrid& grid) {
    if (terminal.size() != grid.n_x || source.rows() != mesh.n_t || source.cols() != grid.n_x)
        throw GridMismatch("solve_hjb_policy: source/terminal shape");
    const std::size_t n = grid.n_x;
    const double dt = mesh.dt();
    const auto s2 = eval_sigma_sq(sigma, grid);
    std::vector<double> D(n);
    for (std::size_t i = 0; i < n; ++i) D[i] = 0.5 * s2[i];

    ValueField vf{mesh, grid, Array2d(mesh.n_t, n), Array2d(mesh.n_t, n)};
    DriftField df{mesh, grid, Array2d(mesh.n_t, n)};
    std::vector<double> v = terminal;
    for (std::size_t i = 0; i < n; ++i) vf.v(mesh.n_t - 1, i) = v[i];

    std::vector<double> gamma(n);
    {
        const auto g = spatial_gradient(grid, terminal.data());
        for (std::size_t i = 0; i < n; ++i) gamma[i] = control(g[i]);
        for (std::size_t i = 0; i < n; ++i) df.b(mesh.n_t - 1, i) = gamma[i];
    }

    std::vector<double> sub(n), diag(n), sup(n), rhs(n), vnew(n);
    constexpr int max_policy_iters = 16;
    for (std::size_t k = mesh.n_t - 1; k-- > 0;) {
        // Howard iteration: freeze controls, take one implicit step, refresh
        // controls from the new gradient, repeat until the policy is stable.
        for (int it = 0; it < max_policy_iters; ++it) {
            const HjbBands A = hjb_operator(grid, D, gamma.data());
            for (std::size_t i = 0; i < n; ++i) {
                sub[i] = dt * A.sub[i];
                diag[i] = 1.0 + dt * A.diag[i];
                sup[i] = dt * A.sup[i];
                rhs[i] = v[i] + dt * (source(k, i) + control_cost(gamma[i]));
            }
            vnew = solve_tridiag(sub, diag, sup, rhs);
            const auto g = spatial_gradient(grid, vnew.data());
            double change = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double gi = control(g[i]);
                change = std::max(change, std::abs(gi - gamma[i]));
                gamma[i] = gi;
            }
            if (change < 1e-13) break;
        }
        v = vnew;
        for (std::size_t i = 0; i < n; ++i) {
            vf.v(k, i) = v[i];
            df.b(k, i) = gamma[i];
        }
    }
    vf.vx = gradient_frames(grid, vf.v);
    return PolicySolution{std::move(vf), std::move(df)};
}

} // namespace mfg
