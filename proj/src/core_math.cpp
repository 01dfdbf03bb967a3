#include "ratiolab/core_math.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ratiolab {

namespace {

constexpr double kEulerE = 2.718281828459045235360287471352662498;

// Tight inequalities at a triangle vertex evaluate to rounding noise, so
// membership uses a small absolute band around zero.
constexpr double kTriangleSlackTol = 1e-12;

void require(bool cond, const char* msg) {
    if (!cond) throw std::domain_error(msg);
}

void require_dimension(int n, int min_n, const char* who) {
    if (n < min_n) {
        std::ostringstream os;
        os << who << ": dimension n = " << n << " requires n >= " << min_n;
        throw std::domain_error(os.str());
    }
}

void require_eps(double eps, const char* who) {
    if (!(eps > 0.0) || !(eps < 1.0)) {
        std::ostringstream os;
        os << who << ": eps must be in (0,1), got " << eps;
        throw std::domain_error(os.str());
    }
}

// Gamma(n/2) by the recursion Gamma(k+1) = k Gamma(k) from Gamma(1) = 1,
// Gamma(1/2) = sqrt(pi). Argument passed as twice its value to stay integral.
double gamma_half_integer(int twice_arg) {
    double g = (twice_arg % 2 == 0) ? 1.0 : std::sqrt(M_PI);
    for (int t = (twice_arg % 2 == 0) ? 2 : 1; t < twice_arg; t += 2) {
        g *= 0.5 * t;
    }
    return g;
}

} // namespace

std::size_t ResourceProfile::interval_of(double r) const {
    if (!(r >= 0.0) || r > 1.0) throw std::domain_error("ResourceProfile: r outside [0,1]");
    // Right-closed intervals: (b_k, b_{k+1}], first interval includes 0.
    for (std::size_t k = 0; k + 1 < breakpoints.size(); ++k) {
        if (r <= breakpoints[k + 1]) return k;
    }
    return values.size() - 1;
}

double ResourceProfile::value_at(double r) const { return values[interval_of(r)]; }

double ResourceProfile::sup_norm() const {
    double s = 0.0;
    for (double v : values) s = std::max(s, v);
    return s;
}

void ResourceProfile::validate() const {
    if (breakpoints.size() < 2 || values.size() + 1 != breakpoints.size())
        throw std::invalid_argument("ResourceProfile: values must have one entry per interval");
    if (breakpoints.front() != 0.0 || breakpoints.back() != 1.0)
        throw std::invalid_argument("ResourceProfile: breakpoints must start at 0 and end at 1");
    for (std::size_t k = 0; k + 1 < breakpoints.size(); ++k)
        if (!(breakpoints[k] < breakpoints[k + 1]))
            throw std::invalid_argument("ResourceProfile: breakpoints must be strictly increasing");
    bool any_positive = false;
    for (double v : values) {
        if (v < 0.0) throw std::invalid_argument("ResourceProfile: values must be nonnegative");
        if (v > 0.0) any_positive = true;
    }
    if (!any_positive) throw std::invalid_argument("ResourceProfile: at least one value must be positive");
}

ResourceProfile make_resource_profile(int n, double eps) {
    require_dimension(n, 1, "make_resource_profile");
    require_eps(eps, "make_resource_profile");
    ResourceProfile m;
    m.breakpoints = {0.0, eps, 1.0};
    m.values = {std::pow(eps, -n), 0.0};
    return m;
}

double diffusion_rate(int n, double eps, double c1) {
    require_dimension(n, 1, "diffusion_rate");
    require_eps(eps, "diffusion_rate");
    if (n == 1) return std::sqrt(eps);
    require(c1 > 0.0, "diffusion_rate: c1 must be positive for n >= 2");
    return c1 * std::pow(eps, -(n - 2));
}

double super_solution_value(const ConstructionParams& p) {
    require_dimension(p.n, 2, "super_solution_value");
    require_eps(p.eps, "super_solution_value");
    return std::pow(p.eps, -p.n);
}

double sub_solution_value(const ConstructionParams& p, double r) {
    require_dimension(p.n, 2, "sub_solution_value");
    require_eps(p.eps, "sub_solution_value");
    require(r >= 0.0 && r <= 1.0, "sub_solution_value: r outside [0,1]");
    const double epsn = std::pow(p.eps, p.n);
    if (r <= p.eps) {
        // exponent lies in [-1,0] on this branch, no underflow possible
        return p.c2 / epsn * std::exp(-std::pow(r, p.n) / epsn);
    }
    return p.c2 / (kEulerE * std::pow(r, p.n));
}

RadialDerivatives sub_solution_derivatives(const ConstructionParams& p, double r) {
    if (r == p.eps)
        throw std::domain_error(
            "sub_solution_derivatives: v'' jumps at r = eps; pass an explicit Side");
    return sub_solution_derivatives(p, r, r < p.eps ? Side::below : Side::above);
}

RadialDerivatives sub_solution_derivatives(const ConstructionParams& p, double r, Side side) {
    require_dimension(p.n, 2, "sub_solution_derivatives");
    require_eps(p.eps, "sub_solution_derivatives");
    require(r >= 0.0 && r <= 1.0, "sub_solution_derivatives: r outside [0,1]");
    const int n = p.n;
    const double c2 = p.c2;
    const double epsn = std::pow(p.eps, n);
    RadialDerivatives d;
    if (side == Side::below) {
        require(r <= p.eps, "sub_solution_derivatives: Side::below requires r <= eps");
        const double rn = std::pow(r, n);
        const double expf = std::exp(-rn / epsn);
        d.v = c2 / epsn * expf;
        d.dv = -c2 * n * std::pow(r, n - 1) / (epsn * epsn) * expf;
        d.ddv = c2 * n * (n - 1) * std::pow(r, n - 2) / (epsn * epsn) *
                (n * rn / ((n - 1) * epsn) - 1.0) * expf;
    } else {
        require(r >= p.eps, "sub_solution_derivatives: Side::above requires r >= eps");
        const double rn = std::pow(r, n);
        d.v = c2 / (kEulerE * rn);
        d.dv = -c2 * n / (kEulerE * rn * r);
        d.ddv = c2 * n * (n + 1) / (kEulerE * rn * r * r);
    }
    return d;
}

std::array<double, 2> triangle_slacks(int n, double c1, double c2) {
    require_dimension(n, 2, "triangle_slacks");
    return {1.0 - 2.0 * c1 * n * (n - 1) - c2, 2.0 * c1 * n - c2 / kEulerE};
}

bool in_parameter_triangle(int n, double c1, double c2) {
    require_dimension(n, 2, "in_parameter_triangle");
    if (!(c1 > 0.0) || !(c2 > 0.0)) return false;
    const auto s = triangle_slacks(n, c1, c2);
    return s[0] >= -kTriangleSlackTol && s[1] >= -kTriangleSlackTol;
}

std::array<TrianglePoint, 3> triangle_vertices(int n) {
    require_dimension(n, 2, "triangle_vertices");
    const double e = kEulerE;
    return {TrianglePoint{0.0, 0.0},
            TrianglePoint{1.0 / (2.0 * n * (e + n - 1)), e / (e + n - 1)},
            TrianglePoint{1.0 / (2.0 * n * (n - 1)), 0.0}};
}

TrianglePoint interior_triangle_point(int n, double shrink) {
    require_dimension(n, 2, "interior_triangle_point");
    require(shrink > 0.0 && shrink <= 1.0, "interior_triangle_point: shrink must be in (0,1]");
    const auto v = triangle_vertices(n);
    // Scaling the centroid toward the origin vertex preserves strict
    // interiority for every shrink in (0,1].
    TrianglePoint p;
    p.c1 = shrink * (v[0].c1 + v[1].c1 + v[2].c1) / 3.0;
    p.c2 = shrink * (v[0].c2 + v[1].c2 + v[2].c2) / 3.0;
    return p;
}

double sub_solution_l1_norm(int n, double eps, double c2) {
    require_dimension(n, 2, "sub_solution_l1_norm");
    require_eps(eps, "sub_solution_l1_norm");
    require(c2 > 0.0, "sub_solution_l1_norm: c2 must be positive");
    const double abs_log_eps = -std::log(eps);
    return c2 * sphere_area(n) *
           ((1.0 - 1.0 / kEulerE) / n + abs_log_eps / kEulerE);
}

double ratio_lower_bound(int n, double eps, double c2) {
    require_dimension(n, 2, "ratio_lower_bound");
    require_eps(eps, "ratio_lower_bound");
    require(c2 > 0.0, "ratio_lower_bound: c2 must be positive");
    const double abs_log_eps = -std::log(eps);
    return c2 * (1.0 - 1.0 / kEulerE + n * abs_log_eps / kEulerE);
}

double resource_l1_norm(int n, const ResourceProfile& m) {
    require_dimension(n, 1, "resource_l1_norm");
    const double an = sphere_area(n);
    double total = 0.0;
    for (std::size_t k = 0; k < m.values.size(); ++k) {
        const double a = m.breakpoints[k];
        const double b = m.breakpoints[k + 1];
        total += m.values[k] * (std::pow(b, n) - std::pow(a, n)) / n;
    }
    return an * total;
}

double sphere_area(int n) {
    require_dimension(n, 1, "sphere_area");
    if (n == 1) return 1.0; // interval (0,1): radial weight absorbed
    return 2.0 * std::pow(M_PI, 0.5 * n) / gamma_half_integer(n);
}

double ball_volume(int n) { return sphere_area(n) / n; }

} // namespace ratiolab
