#include "ratiolab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ratiolab {

namespace {

struct TriDiag {
    std::vector<double> lower; // lower[i] multiplies u[i-1] in row i (lower[0] unused)
    std::vector<double> diag;
    std::vector<double> upper; // upper[i] multiplies u[i+1] in row i (upper[N] unused)

    explicit TriDiag(std::size_t n) : lower(n, 0.0), diag(n, 0.0), upper(n, 0.0) {}

    void apply(std::span<const double> x, std::span<double> y) const {
        const std::size_t n = diag.size();
        for (std::size_t i = 0; i < n; ++i) {
            double s = diag[i] * x[i];
            if (i > 0) s += lower[i] * x[i - 1];
            if (i + 1 < n) s += upper[i] * x[i + 1];
            y[i] = s;
        }
    }
};

// Thomas algorithm; returns false on a vanishing pivot.
bool solve_tridiag(const TriDiag& m, std::span<const double> rhs, std::span<double> x,
                   std::vector<double>& cp, std::vector<double>& dp) {
    const std::size_t n = m.diag.size();
    cp.resize(n);
    dp.resize(n);
    double piv = m.diag[0];
    if (piv == 0.0 || !std::isfinite(piv)) return false;
    cp[0] = m.upper[0] / piv;
    dp[0] = rhs[0] / piv;
    for (std::size_t i = 1; i < n; ++i) {
        piv = m.diag[i] - m.lower[i] * cp[i - 1];
        if (piv == 0.0 || !std::isfinite(piv)) return false;
        cp[i] = m.upper[i] / piv;
        dp[i] = (rhs[i] - m.lower[i] * dp[i - 1]) / piv;
    }
    x[n - 1] = dp[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = dp[i] - cp[i] * x[i + 1];
    return true;
}

// Tridiagonal coefficients of the radial diffusion operator
// d*(u'' + (n-1)u'/r) with the r = 0 symmetry closure and the ghost-node
// Neumann closure at r = 1.
TriDiag assemble_diffusion(int n, double d, const RadialGrid& grid) {
    const auto& r = grid.nodes;
    const std::size_t N = r.size();
    TriDiag op(N);

    const double h0 = r[1] - r[0];
    op.diag[0] = -2.0 * n * d / (h0 * h0);
    op.upper[0] = 2.0 * n * d / (h0 * h0);

    for (std::size_t i = 1; i + 1 < N; ++i) {
        const double hm = r[i] - r[i - 1];
        const double hp = r[i + 1] - r[i];
        const double drift = (n - 1) * d / r[i];
        op.lower[i] = 2.0 * d / (hm * (hm + hp)) - drift * hp / (hm * (hm + hp));
        op.diag[i] = -2.0 * d / (hm * hp) + drift * (hp - hm) / (hm * hp);
        op.upper[i] = 2.0 * d / (hp * (hm + hp)) + drift * hm / (hp * (hm + hp));
    }

    const double hN = r[N - 1] - r[N - 2];
    op.lower[N - 1] = 2.0 * d / (hN * hN);
    op.diag[N - 1] = -2.0 * d / (hN * hN);
    return op;
}

double inf_norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s = std::max(s, std::abs(x));
    return s;
}

// Line-search merit norm. The inf-norm is dominated by the few nodes next
// to the resource jump, which stalls backtracking; the RMS norm sees the
// global shape.
double rms_norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s / v.size());
}

bool all_positive(std::span<const double> v) {
    for (double x : v)
        if (!(x > 0.0)) return false;
    return true;
}

void reaction_residual(std::span<const double> u, std::span<const double> mv,
                       std::span<double> f) {
    for (std::size_t i = 0; i < u.size(); ++i) f[i] += u[i] * (mv[i] - u[i]);
}

std::vector<double> initial_iterate(int n, const ResourceProfile& m, const RadialGrid& grid,
                                    const SolveOptions& opts) {
    const std::size_t N = grid.size();
    const double mbar = resource_l1_norm(n, m) / ball_volume(n);
    switch (opts.initial_guess) {
    case InitialGuess::supplied:
        if (opts.supplied_guess.size() != N)
            throw std::invalid_argument("solve_steady: supplied guess has wrong size");
        if (!all_positive(opts.supplied_guess))
            throw std::invalid_argument("solve_steady: supplied guess must be positive");
        return opts.supplied_guess;
    case InitialGuess::sub_solution: {
        if (!opts.construction)
            throw std::invalid_argument("solve_steady: sub_solution guess needs construction params");
        const auto& p = *opts.construction;
        const double super = super_solution_value(p);
        std::vector<double> u(N);
        for (std::size_t i = 0; i < N; ++i)
            u[i] = std::min(std::max(sub_solution_value(p, grid.nodes[i]), mbar), super);
        return u;
    }
    case InitialGuess::flat_average:
    default:
        return std::vector<double>(N, mbar);
    }
}

} // namespace

std::vector<double> nodal_resource_values(const ResourceProfile& m, const RadialGrid& grid) {
    const std::size_t N = grid.size();
    std::vector<double> mv(N);
    for (std::size_t i = 0; i < N; ++i) {
        const double r = grid.nodes[i];
        bool at_breakpoint = false;
        for (std::size_t k = 1; k + 1 < m.breakpoints.size(); ++k) {
            if (r == m.breakpoints[k]) {
                mv[i] = 0.5 * (m.values[k - 1] + m.values[k]);
                at_breakpoint = true;
                break;
            }
        }
        if (!at_breakpoint) mv[i] = m.value_at(r);
    }
    return mv;
}

std::vector<double> discrete_residual(int n, double d, const ResourceProfile& m,
                                      const RadialGrid& grid, std::span<const double> u) {
    const auto op = assemble_diffusion(n, d, grid);
    const auto mv = nodal_resource_values(m, grid);
    std::vector<double> f(grid.size());
    op.apply(u, f);
    reaction_residual(u, mv, f);
    return f;
}

SteadySolution solve_steady(int n, double d, const ResourceProfile& m,
                            const RadialGrid& grid, const SolveOptions& opts) {
    m.validate();
    if (!(d > 0.0)) throw std::domain_error("solve_steady: d must be positive");
    if (!(opts.tol > 0.0) || opts.max_newton < 1 || !(opts.damping > 0.0) ||
        !(opts.damping < 1.0))
        throw std::invalid_argument("solve_steady: invalid options");

    const std::size_t N = grid.size();
    const auto op = assemble_diffusion(n, d, grid);
    const auto mv = nodal_resource_values(m, grid);
    const double tol_abs = opts.tol * m.sup_norm();

    auto eval_residual = [&](std::span<const double> u, std::span<double> f) {
        op.apply(u, f);
        reaction_residual(u, mv, f);
    };

    std::vector<double> u = initial_iterate(n, m, grid, opts);
    std::vector<double> f(N), ft(N), rhs(N), delta(N), trial(N), cp, dp;
    eval_residual(u, f);
    double res = inf_norm(f);

    auto snapshot = [&](bool ok, int iters, double r) {
        SteadySolution s;
        s.grid = grid;
        s.u = u;
        s.d = d;
        s.residual_inf = r;
        s.iterations = iters;
        s.converged = ok;
        return s;
    };

    bool march_fallback_used = false;
    int iterations = 0;

    for (; iterations < opts.max_newton; ++iterations) {
        if (res <= tol_abs) return snapshot(true, iterations, res);

        TriDiag jac = op;
        for (std::size_t i = 0; i < N; ++i) jac.diag[i] += mv[i] - 2.0 * u[i];
        for (std::size_t i = 0; i < N; ++i) rhs[i] = -f[i];
        if (!solve_tridiag(jac, rhs, delta, cp, dp))
            throw NonConvergenceError("solve_steady: singular Jacobian",
                                      snapshot(false, iterations, res));

        // Backtracking: halve until the iterate is positive and the
        // residual decreases.
        double lambda = 1.0;
        bool accepted = false;
        bool positivity_only = true;
        for (int halvings = 0; halvings <= 30; ++halvings) {
            for (std::size_t i = 0; i < N; ++i) trial[i] = u[i] + lambda * delta[i];
            if (all_positive(trial)) {
                eval_residual(trial, ft);
                const double rt = inf_norm(ft);
                positivity_only = false;
                if (rt < res) {
                    u.swap(trial);
                    f.swap(ft);
                    res = rt;
                    accepted = true;
                    break;
                }
            }
            lambda *= opts.damping;
        }
        if (accepted) continue;

        if (march_fallback_used) {
            if (positivity_only)
                throw NonPositiveIterateError(
                    "solve_steady: could not restore a positive iterate");
            throw NonConvergenceError("solve_steady: Newton stalled",
                                      snapshot(false, iterations, res));
        }

        // One burst of time marching to re-center the iterate, then retry.
        march_fallback_used = true;
        const double dt = 0.25 / std::max(m.sup_norm(), 1.0);
        const auto marched = march_to_steady(n, d, m, grid, u, dt, 200.0 * dt, 0.0);
        u = marched.u;
        eval_residual(u, f);
        res = inf_norm(f);
    }

    if (res <= tol_abs) return snapshot(true, iterations, res);
    throw NonConvergenceError("solve_steady: iteration cap reached",
                              snapshot(false, iterations, res));
}

SteadySolution march_to_steady(int n, double d, const ResourceProfile& m,
                               const RadialGrid& grid, std::span<const double> u0,
                               double dt, double t_end, double settle_tol_rel) {
    m.validate();
    if (!(dt > 0.0) || !(t_end > 0.0))
        throw std::invalid_argument("march_to_steady: dt and t_end must be positive");
    if (u0.size() != grid.size())
        throw std::invalid_argument("march_to_steady: u0 has wrong size");
    if (!all_positive(u0))
        throw std::invalid_argument("march_to_steady: u0 must be positive nodewise");

    const std::size_t N = grid.size();
    const auto op = assemble_diffusion(n, d, grid);
    const auto mv = nodal_resource_values(m, grid);
    const double settle_tol = settle_tol_rel * m.sup_norm();

    std::vector<double> u(u0.begin(), u0.end());
    std::vector<double> unext(N), rhs(N), cp, dp;

    double t = 0.0;
    double step = dt;
    int steps = 0;
    int clean_steps = 0;
    bool settled = false;

    while (t < t_end) {
        const double h = std::min(step, t_end - t);
        // (I - h*L - h*diag(m - u_k)) u_{k+1} = u_k
        TriDiag sys(N);
        bool ok = true;
        for (std::size_t i = 0; i < N; ++i) {
            sys.lower[i] = -h * op.lower[i];
            sys.diag[i] = 1.0 - h * (op.diag[i] + mv[i] - u[i]);
            sys.upper[i] = -h * op.upper[i];
        }
        ok = solve_tridiag(sys, u, unext, cp, dp);
        if (ok)
            for (double x : unext)
                if (!std::isfinite(x)) ok = false;

        if (!ok || !all_positive(unext)) {
            if (step < 1e-14 * dt)
                throw StepFailureError(ok ? "march_to_steady: positivity lost"
                                          : "march_to_steady: non-finite iterate");
            step *= 0.5;
            clean_steps = 0;
            continue;
        }

        double change = 0.0;
        for (std::size_t i = 0; i < N; ++i)
            change = std::max(change, std::abs(unext[i] - u[i]));
        u.swap(unext);
        t += h;
        ++steps;

        if (++clean_steps >= 5 && step < dt) {
            step = std::min(2.0 * step, dt);
            clean_steps = 0;
        }

        if (settle_tol > 0.0 && change / h < settle_tol) {
            settled = true;
            break;
        }
    }

    SteadySolution s;
    s.grid = grid;
    s.u = std::move(u);
    s.d = d;
    s.residual_inf = inf_norm(discrete_residual(n, d, m, grid, s.u));
    s.iterations = steps;
    s.converged = settled;
    return s;
}

double l1_norm(const SteadySolution& sol) { return sol.grid.integrate(sol.u); }

double ratio(const SteadySolution& sol, const ResourceProfile& m) {
    const double mass = resource_l1_norm(sol.grid.dim, m);
    if (!(mass > 0.0)) throw std::domain_error("ratio: resource mass must be positive");
    return l1_norm(sol) / mass;
}

double energy_identity_residual(const SteadySolution& sol, const ResourceProfile& m, double d) {
    const auto& r = sol.grid.nodes;
    const auto& u = sol.u;
    const std::size_t N = r.size();
    std::vector<double> g(N, 0.0); // (u'/u)^2, zero at both no-flux ends
    for (std::size_t i = 1; i + 1 < N; ++i) {
        const double hm = r[i] - r[i - 1];
        const double hp = r[i + 1] - r[i];
        const double du = -hp / (hm * (hm + hp)) * u[i - 1] +
                          (hp - hm) / (hm * hp) * u[i] +
                          hm / (hp * (hm + hp)) * u[i + 1];
        g[i] = (du / u[i]) * (du / u[i]);
    }
    const double mass = resource_l1_norm(sol.grid.dim, m);
    const double lhs = l1_norm(sol) - mass;
    const double rhs = d * sol.grid.integrate(g);
    return std::abs(lhs - rhs) / mass;
}

GridCounts default_grid_counts(double eps) {
    if (!(eps > 0.0) || !(eps < 1.0))
        throw std::domain_error("default_grid_counts: eps must be in (0,1)");
    const int decades = static_cast<int>(std::ceil(std::log10(1.0 / eps)));
    GridCounts c;
    c.inner = std::max(64, 16 * decades);
    c.outer = std::max(192, 48 * decades);
    return c;
}

RadialGrid construction_grid(int n, double eps) {
    const auto c = default_grid_counts(eps);
    return build_grid(n, make_resource_profile(n, eps), c.inner, c.outer);
}

std::vector<double> bhl_asymptotic_profile(double eps, const RadialGrid& grid) {
    // Inside the resource interval the solution levels at 3/(2 sqrt(eps));
    // outside it follows the decaying branch of d*u'' = u^2 with d =
    // sqrt(eps), u(x) = 6d/(x - eps + 2 sqrt(eps))^2, which matches the
    // inner level at x = eps.
    const double level = 1.5 / std::sqrt(eps);
    std::vector<double> u(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double x = grid.nodes[i];
        if (x <= eps) {
            u[i] = level;
        } else {
            const double shift = x - eps + 2.0 * std::sqrt(eps);
            u[i] = 6.0 * std::sqrt(eps) / (shift * shift);
        }
    }
    return u;
}

SteadySolution solve_construction(const ConstructionParams& params,
                                  const SolveOptions* base_opts) {
    const auto m = make_resource_profile(params.n, params.eps);
    const auto grid = construction_grid(params.n, params.eps);
    SolveOptions opts = base_opts ? *base_opts : SolveOptions{};
    double d;
    if (params.n == 1) {
        d = diffusion_rate(1, params.eps, 0.0);
        opts.initial_guess = InitialGuess::supplied;
        opts.supplied_guess = bhl_asymptotic_profile(params.eps, grid);
    } else {
        d = diffusion_rate(params.n, params.eps, params.c1);
        opts.initial_guess = InitialGuess::sub_solution;
        opts.construction = params;
    }
    return solve_steady(params.n, d, m, grid, opts);
}

} // namespace ratiolab
