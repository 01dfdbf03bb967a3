#pragma once

// Steady states of d*Lap(u) + u(m(r) - u) = 0 on the unit ball (radial
// reduction, no-flux boundary) by damped Newton on a finite-difference
// discretization, with semi-implicit time marching as a fallback and as a
// behavioral check of global attraction.

#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ratiolab/core_math.hpp"
#include "ratiolab/grid.hpp"

namespace ratiolab {

enum class InitialGuess { flat_average, sub_solution, supplied };

struct SolveOptions {
    double tol = 1e-10;   ///< residual tolerance, relative to ||m||_inf
    int max_newton = 100; ///< Newton iteration cap
    double damping = 0.5; ///< line-search contraction factor, in (0,1)
    InitialGuess initial_guess = InitialGuess::flat_average;
    std::vector<double> supplied_guess; ///< nodal values for InitialGuess::supplied
    std::optional<ConstructionParams> construction; ///< for InitialGuess::sub_solution
};

struct SteadySolution {
    RadialGrid grid;
    std::vector<double> u;    ///< strictly positive nodal values when converged
    double d = 0.0;           ///< diffusion rate used
    double residual_inf = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Newton failed; carries the last iterate and its residual.
class NonConvergenceError : public std::runtime_error {
public:
    NonConvergenceError(const std::string& msg, SteadySolution last)
        : std::runtime_error(msg),
          last_(std::make_shared<SteadySolution>(std::move(last))) {}
    const SteadySolution& last_iterate() const { return *last_; }

private:
    std::shared_ptr<SteadySolution> last_;
};

/// Line search could not restore a positive iterate.
class NonPositiveIterateError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Time marching produced a non-finite iterate.
class StepFailureError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Reaction-term value of m at each node: the interval value inside a
/// cell, the mean of the two one-sided values at an interior breakpoint.
std::vector<double> nodal_resource_values(const ResourceProfile& m, const RadialGrid& grid);

/// Second-order residual of d(u'' + (n-1)u'/r) + u(m - u). r = 0 uses the
/// symmetry limit d*n*u''(0); r = 1 a ghost-node Neumann closure.
std::vector<double> discrete_residual(int n, double d, const ResourceProfile& m,
                                      const RadialGrid& grid, std::span<const double> u);

/// Positive steady state by damped Newton with tridiagonal Jacobian
/// solves. Falls back to a burst of time marching when the line search
/// stalls, then retries. Throws NonConvergenceError / NonPositiveIterateError.
SteadySolution solve_steady(int n, double d, const ResourceProfile& m,
                            const RadialGrid& grid, const SolveOptions& opts = {});

/// Semi-implicit marching (diffusion implicit, reaction linearized as
/// u_{k+1}(m - u_k)) from u0 until ||u_{k+1}-u_k||_inf/dt drops below
/// settle_tol_rel*||m||_inf or t_end is reached.
SteadySolution march_to_steady(int n, double d, const ResourceProfile& m,
                               const RadialGrid& grid, std::span<const double> u0,
                               double dt, double t_end, double settle_tol_rel = 1e-8);

/// Quadrature-weighted total population A_n int u r^(n-1) dr.
double l1_norm(const SteadySolution& sol);

/// Population per unit resource, ||u||_1 / ||m||_1.
double ratio(const SteadySolution& sol, const ResourceProfile& m);

/// Relative defect of the integral identity
/// ||u||_1 - ||m||_1 = d * A_n int (u'/u)^2 r^(n-1) dr, with u' by
/// centered differences. Vanishes at grid accuracy for converged solves.
double energy_identity_residual(const SteadySolution& sol, const ResourceProfile& m, double d);

struct GridCounts {
    int inner = 64;
    int outer = 192;
};

/// Mesh sizing rule tied to the concentration radius: the inner count
/// grows like 16 per decade of 1/eps so the resource ball stays resolved.
GridCounts default_grid_counts(double eps);

/// build_grid for the concentration profile with the default sizing rule.
RadialGrid construction_grid(int n, double eps);

/// Closed-form approximate profile of the one-dimensional concentration
/// solution (3/(2 sqrt(eps)) inside, algebraic tail outside); continuous,
/// used as a Newton starting point.
std::vector<double> bhl_asymptotic_profile(double eps, const RadialGrid& grid);

/// Solve the concentration family member described by params: n = 1 uses
/// d = sqrt(eps) and the asymptotic starting profile, n >= 2 uses
/// d = c1/eps^(n-2) and the sub-solution sandwich start.
SteadySolution solve_construction(const ConstructionParams& params,
                                  const SolveOptions* base_opts = nullptr);

} // namespace ratiolab
