#pragma once

// Closed-form building blocks for the concentrated-resource family on the
// unit ball: piecewise-constant resource profiles, the matched diffusion
// rate, explicit sub/super solutions with their radial derivatives, the
// admissible (c1,c2) parameter triangle, and exact L1 norms.

#include <array>
#include <cstddef>
#include <vector>

namespace ratiolab {

/// Parameter bundle (n, eps, c1, c2) describing one member of the
/// concentration family. c1 and c2 are ignored when n == 1.
struct ConstructionParams {
    int n = 2;        ///< space dimension, >= 1
    double eps = 0.1; ///< concentration radius, in (0,1)
    double c1 = 0.0;  ///< diffusion scale (n >= 2 only)
    double c2 = 0.0;  ///< sub-solution amplitude (n >= 2 only)
};

/// Piecewise-constant radial resource density m(r) on [0,1].
///
/// Intervals are right-closed, (b_k, b_{k+1}], with the first one also
/// containing r = 0; this matches the convention that the resource patch
/// is the closed ball of radius eps.
struct ResourceProfile {
    std::vector<double> breakpoints; ///< ascending, breakpoints.front()==0, back()==1
    std::vector<double> values;      ///< one per interval, >= 0, not all zero

    std::size_t interval_count() const { return values.size(); }

    /// Index of the interval containing r.
    std::size_t interval_of(double r) const;

    /// Point value m(r); throws std::domain_error for r outside [0,1].
    double value_at(double r) const;

    double sup_norm() const;

    /// Throws std::invalid_argument when the breakpoint/value shape is invalid.
    void validate() const;
};

/// A point of the (c1,c2) parameter plane.
struct TrianglePoint {
    double c1 = 0.0;
    double c2 = 0.0;
};

/// Which side of a breakpoint a one-sided derivative query refers to.
enum class Side { below, above };

/// Value and first two radial derivatives of the sub-solution at one radius.
struct RadialDerivatives {
    double v = 0.0;
    double dv = 0.0;
    double ddv = 0.0;
};

/// Resource profile of the concentration family: eps^-n on [0,eps], 0 on
/// (eps,1]. Total mass equals ball_volume(n) for every eps.
ResourceProfile make_resource_profile(int n, double eps);

/// Diffusion rate matched to the family: sqrt(eps) when n == 1,
/// c1/eps^(n-2) when n >= 2.
double diffusion_rate(int n, double eps, double c1);

/// Constant super-solution eps^-n (n >= 2).
double super_solution_value(const ConstructionParams& p);

/// Sub-solution v(r): (c2/eps^n) exp(-r^n/eps^n) for r <= eps, c2/(e r^n)
/// for r > eps. Continuous and C1 across r = eps. Requires n >= 2.
double sub_solution_value(const ConstructionParams& p, double r);

/// (v, v', v'') at r, using the closed-form branch derivatives. v'' jumps
/// at r = eps, so that radius is rejected; use the Side overload there.
RadialDerivatives sub_solution_derivatives(const ConstructionParams& p, double r);

/// One-sided (v, v', v'') where Side selects the branch at r = eps.
RadialDerivatives sub_solution_derivatives(const ConstructionParams& p, double r, Side side);

/// Membership in the admissible triangle T: c1 > 0, c2 > 0,
/// 1 - 2 c1 n (n-1) - c2 >= 0 and 2 c1 n - c2/e >= 0.
bool in_parameter_triangle(int n, double c1, double c2);

/// Slack of the two triangle inequalities at (c1,c2); both nonnegative on T.
std::array<double, 2> triangle_slacks(int n, double c1, double c2);

/// Vertices of T: (0,0), (1/(2n(e+n-1)), e/(e+n-1)), (1/(2n(n-1)), 0).
std::array<TrianglePoint, 3> triangle_vertices(int n);

/// Canonical strictly interior point of T: the centroid scaled by
/// `shrink` toward the origin vertex. shrink in (0,1]; shrink == 1 gives
/// the centroid itself, which is already strictly interior.
TrianglePoint interior_triangle_point(int n, double shrink);

/// Exact L1 norm of the sub-solution over the ball:
/// c2 * A_n * ((1/n)(1 - 1/e) + (1/e) |log eps|), with |log eps| = -ln(eps).
double sub_solution_l1_norm(int n, double eps, double c2);

/// Guaranteed population/resource ratio of the family:
/// c2 * (1 - 1/e + (n/e) |log eps|) = sub_solution_l1_norm / ball_volume(n).
double ratio_lower_bound(int n, double eps, double c2);

/// Exact L1 norm of a piecewise-constant profile, A_n * sum v_k (b^n - a^n)/n.
double resource_l1_norm(int n, const ResourceProfile& m);

/// Surface area A_n of the unit sphere, 2 pi^(n/2) / Gamma(n/2), evaluated
/// by the exact integer/half-integer Gamma recursion. For n == 1 the
/// domain is the interval (0,1) and the radial weight factor is 1.
double sphere_area(int n);

/// Volume of the unit ball, A_n / n (1 for the n == 1 interval convention).
double ball_volume(int n);

} // namespace ratiolab
