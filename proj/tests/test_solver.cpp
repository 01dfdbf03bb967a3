#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "ratiolab/core_math.hpp"
#include "ratiolab/grid.hpp"
#include "ratiolab/solver.hpp"

using namespace ratiolab;

namespace {

ResourceProfile constant_profile(double value) {
    ResourceProfile m;
    m.breakpoints = {0.0, 1.0};
    m.values = {value};
    return m;
}

double rel_inf_distance(const std::vector<double>& a, const std::vector<double>& b) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num = std::max(num, std::abs(a[i] - b[i]));
        den = std::max(den, std::abs(b[i]));
    }
    return num / den;
}

} // namespace

TEST_CASE("nodal resource values average across the jump") {
    const auto m = make_resource_profile(2, 0.1);
    const auto g = build_grid(2, m, 16, 48);
    const auto mv = nodal_resource_values(m, g);
    const auto at = g.find_node(0.1);
    REQUIRE(at.has_value());
    CHECK(mv[*at] == doctest::Approx(50.0));
    CHECK(mv.front() == doctest::Approx(100.0));
    CHECK(mv.back() == doctest::Approx(0.0));
    CHECK(mv[*at - 1] == doctest::Approx(100.0));
    CHECK(mv[*at + 1] == doctest::Approx(0.0));
}

TEST_CASE("constant states are exact discrete solutions") {
    for (double m0 : {0.5, 1.0, 7.0}) {
        const auto m = constant_profile(m0);
        for (int n : {1, 2, 3}) {
            const auto g = build_grid(n, m, 16, 48);
            std::vector<double> u(g.size(), m0);
            for (double f : discrete_residual(n, 0.7, m, g, u)) CHECK(std::abs(f) < 1e-13);
        }
    }
}

TEST_CASE("finite differences reproduce quadratics") {
    // Uniform mesh, n = 1: the scheme is exact on quadratics at interior
    // nodes, and at each end for the quadratic satisfying that end's
    // Neumann closure.
    ResourceProfile m = constant_profile(2.0);
    const auto g = build_grid(1, m, 16, 16);
    const double d = 0.3;

    auto check_against = [&](auto exact_u, auto exact_lap, std::size_t lo, std::size_t hi) {
        std::vector<double> u(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) u[i] = exact_u(g.nodes[i]);
        const auto f = discrete_residual(1, d, m, g, u);
        for (std::size_t i = lo; i <= hi; ++i) {
            const double expected = d * exact_lap(g.nodes[i]) + u[i] * (2.0 - u[i]);
            CHECK(f[i] == doctest::Approx(expected).epsilon(1e-10));
        }
    };

    // u'(0) = 0 branch: valid at r = 0 and all interior nodes.
    check_against([](double r) { return 1.5 + 2.0 * r * r; }, [](double) { return 4.0; }, 0,
                  g.size() - 2);
    // u'(1) = 0 branch: valid at r = 1 and all interior nodes.
    check_against([](double r) { return 1.5 + (1.0 - r) * (1.0 - r); }, [](double) { return 2.0; },
                  1, g.size() - 1);
}

TEST_CASE("constant resources give the constant state and unit ratio") {
    for (double m0 : {0.5, 1.0, 7.0}) {
        const auto m = constant_profile(m0);
        for (int n : {1, 2, 3}) {
            const auto g = build_grid(n, m, 16, 48);
            const auto sol = solve_steady(n, 0.4, m, g);
            CHECK(sol.converged);
            for (double v : sol.u) CHECK(v == doctest::Approx(m0).epsilon(1e-10));
            CHECK(ratio(sol, m) == doctest::Approx(1.0).epsilon(1e-10));
        }
    }
}

TEST_CASE("concentration solve lands between sub and super solutions") {
    const auto tp = interior_triangle_point(2, 0.9);
    ConstructionParams p{2, 0.1, tp.c1, tp.c2};
    const auto sol = solve_construction(p);
    REQUIRE(sol.converged);
    const double super = super_solution_value(p);
    for (std::size_t i = 0; i < sol.u.size(); ++i) {
        CHECK(sol.u[i] > 0.0);
        CHECK(sol.u[i] >= sub_solution_value(p, sol.grid.nodes[i]) - 1e-6 * super);
        CHECK(sol.u[i] <= super + 1e-6 * super);
    }
    const auto m = make_resource_profile(2, 0.1);
    CHECK(ratio(sol, m) >= ratio_lower_bound(2, 0.1, tp.c2));
}

TEST_CASE("sub-solution samples give a nonnegative residual away from the kink") {
    const auto tp = interior_triangle_point(2, 0.9);
    ConstructionParams p{2, 0.2, tp.c1, tp.c2};
    const auto m = make_resource_profile(2, 0.2);
    const auto g = construction_grid(2, 0.2);
    const double d = diffusion_rate(2, 0.2, tp.c1);

    std::vector<double> v(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) v[i] = sub_solution_value(p, g.nodes[i]);
    const auto f = discrete_residual(2, d, m, g, v);

    const double scale = tp.c2 * std::pow(0.2, -4);
    const auto at = *g.find_node(0.2);
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (i + 1 >= at && i <= at + 1) continue; // FD straddles the v'' jump there
        CHECK(f[i] >= -1e-4 * scale);
    }
}

TEST_CASE("quadrature of solution fields matches closed forms") {
    const auto m = constant_profile(1.0);
    const auto g = build_grid(2, m, 16, 48);
    SteadySolution s;
    s.grid = g;
    s.d = 1.0;
    s.converged = true;
    s.u.assign(g.size(), 1.0);
    CHECK(l1_norm(s) == doctest::Approx(M_PI).epsilon(1e-12));
    s.u.assign(g.size(), 3.5);
    CHECK(l1_norm(s) == doctest::Approx(3.5 * M_PI).epsilon(1e-12));

    // Sampled sub-solution integrates to the closed-form norm at grid accuracy.
    const auto tp = interior_triangle_point(2, 0.9);
    ConstructionParams p{2, 0.1, tp.c1, tp.c2};
    const auto gc = construction_grid(2, 0.1);
    SteadySolution ss;
    ss.grid = gc;
    ss.u.resize(gc.size());
    for (std::size_t i = 0; i < gc.size(); ++i) ss.u[i] = sub_solution_value(p, gc.nodes[i]);
    CHECK(l1_norm(ss) ==
          doctest::Approx(sub_solution_l1_norm(2, 0.1, tp.c2)).epsilon(1e-4));
}

TEST_CASE("marching settles to the same state from different starts") {
    const auto m = make_resource_profile(2, 0.1);
    const auto g = construction_grid(2, 0.1);
    const auto tp = interior_triangle_point(2, 0.9);
    const double d = diffusion_rate(2, 0.1, tp.c1);

    const auto newton = solve_steady(2, d, m, g,
                                     [&] {
                                         SolveOptions o;
                                         o.initial_guess = InitialGuess::sub_solution;
                                         o.construction = ConstructionParams{2, 0.1, tp.c1, tp.c2};
                                         return o;
                                     }());
    REQUIRE(newton.converged);

    std::vector<std::vector<double>> starts;
    starts.emplace_back(g.size(), m.sup_norm());
    starts.emplace_back(g.size(), 0.01);
    starts.emplace_back(g.size(), 1.0);

    std::vector<std::vector<double>> finals;
    for (const auto& u0 : starts) {
        const auto s = march_to_steady(2, d, m, g, u0, 5e-3, 400.0, 1e-10);
        CHECK(s.converged);
        finals.push_back(s.u);
    }
    for (const auto& ua : finals) {
        CHECK(rel_inf_distance(ua, finals[0]) < 1e-6);
        CHECK(rel_inf_distance(ua, newton.u) < 1e-6);
    }
}

TEST_CASE("marching on a constant profile reaches the constant state") {
    const auto m = constant_profile(1.0);
    const auto g = build_grid(2, m, 16, 48);
    std::vector<double> u0(g.size(), m.sup_norm());
    const auto s = march_to_steady(2, 0.4, m, g, u0, 0.05, 200.0, 1e-10);
    CHECK(s.converged);
    for (double v : s.u) CHECK(v == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("pointwise larger resources do not shrink the population") {
    const auto m = make_resource_profile(2, 0.2);
    ResourceProfile bigger = m;
    for (double& v : bigger.values) v *= 1.1;
    const auto g = build_grid(2, m, 32, 96);
    const auto tp = interior_triangle_point(2, 0.9);
    const double d = diffusion_rate(2, 0.2, tp.c1);

    SolveOptions o;
    o.initial_guess = InitialGuess::sub_solution;
    o.construction = ConstructionParams{2, 0.2, tp.c1, tp.c2};
    const auto base = solve_steady(2, d, m, g, o);
    const auto more = solve_steady(2, d, bigger, g, o);
    REQUIRE(base.converged);
    REQUIRE(more.converged);
    for (std::size_t i = 0; i < base.u.size(); ++i)
        CHECK(more.u[i] >= base.u[i] * (1.0 - 1e-8));
}

TEST_CASE("ratio never drops below one") {
    struct Case {
        int n;
        double eps;
    };
    for (const auto c : {Case{1, 0.3}, Case{2, 0.2}, Case{3, 0.25}}) {
        const auto tp = c.n >= 2 ? interior_triangle_point(c.n, 0.9) : TrianglePoint{0.0, 0.0};
        ConstructionParams p{c.n, c.eps, tp.c1, tp.c2};
        const auto sol = solve_construction(p);
        REQUIRE(sol.converged);
        CHECK(ratio(sol, make_resource_profile(c.n, c.eps)) >= 1.0 - 1e-6);
    }
}

TEST_CASE("one-dimensional concentration family approaches the known limits") {
    ConstructionParams p{1, 1e-4, 0.0, 0.0};
    const auto sol = solve_construction(p);
    REQUIRE(sol.converged);
    const double rat = ratio(sol, make_resource_profile(1, 1e-4));
    CHECK(rat > 2.5);
    CHECK(rat < 3.0);
    CHECK(std::sqrt(1e-4) * sol.u.front() == doctest::Approx(1.5).epsilon(0.1));
}

TEST_CASE("energy identity residual vanishes for constant states") {
    const auto m = constant_profile(1.0);
    const auto g = build_grid(2, m, 16, 48);
    const auto sol = solve_steady(2, 0.4, m, g);
    CHECK(energy_identity_residual(sol, m, 0.4) < 1e-12);
}

TEST_CASE("energy identity residual shrinks under refinement") {
    const auto m = make_resource_profile(2, 0.2);
    const auto tp = interior_triangle_point(2, 0.9);
    const double d = diffusion_rate(2, 0.2, tp.c1);
    SolveOptions o;
    o.initial_guess = InitialGuess::sub_solution;
    o.construction = ConstructionParams{2, 0.2, tp.c1, tp.c2};

    const auto g1 = construction_grid(2, 0.2);
    const auto g2 = refine_grid(g1);
    const double r1 = energy_identity_residual(solve_steady(2, d, m, g1, o), m, d);
    const double r2 = energy_identity_residual(solve_steady(2, d, m, g2, o), m, d);
    CHECK(r1 < 1e-2);
    CHECK(std::log2(r1 / r2) >= 1.0);
}

TEST_CASE("solution error decays with the expected orders") {
    SolveOptions o;

    // Mild two-level profile: near second order.
    ResourceProfile mild;
    mild.breakpoints = {0.0, 0.5, 1.0};
    mild.values = {2.0, 1.0};
    {
        const auto g1 = build_grid(2, mild, 16, 16);
        const auto g2 = refine_grid(g1);
        const auto ref_grid = refine_grid(refine_grid(g2));
        const auto u1 = solve_steady(2, 0.5, mild, g1, o).u;
        const auto u2 = solve_steady(2, 0.5, mild, g2, o).u;
        const auto ur = solve_steady(2, 0.5, mild, ref_grid, o).u;
        double e1 = 0.0, e2 = 0.0;
        for (std::size_t i = 0; i < u1.size(); ++i)
            e1 = std::max(e1, std::abs(u1[i] - ur[8 * i]));
        for (std::size_t i = 0; i < u2.size(); ++i)
            e2 = std::max(e2, std::abs(u2[i] - ur[4 * i]));
        CHECK(std::log2(e1 / e2) >= 1.8);
    }

    // Concentrated profile: at least first order.
    {
        const auto m = make_resource_profile(2, 0.2);
        const auto tp = interior_triangle_point(2, 0.9);
        const double d = diffusion_rate(2, 0.2, tp.c1);
        SolveOptions oc;
        oc.initial_guess = InitialGuess::sub_solution;
        oc.construction = ConstructionParams{2, 0.2, tp.c1, tp.c2};
        const auto g1 = build_grid(2, m, 16, 48);
        const auto g2 = refine_grid(g1);
        const auto ref_grid = refine_grid(refine_grid(g2));
        const auto u1 = solve_steady(2, d, m, g1, oc).u;
        const auto u2 = solve_steady(2, d, m, g2, oc).u;
        const auto ur = solve_steady(2, d, m, ref_grid, oc).u;
        double e1 = 0.0, e2 = 0.0;
        for (std::size_t i = 0; i < u1.size(); ++i)
            e1 = std::max(e1, std::abs(u1[i] - ur[8 * i]));
        for (std::size_t i = 0; i < u2.size(); ++i)
            e2 = std::max(e2, std::abs(u2[i] - ur[4 * i]));
        CHECK(std::log2(e1 / e2) >= 0.9);
    }
}

TEST_CASE("failure paths carry diagnostics") {
    const auto m = make_resource_profile(2, 0.1);
    const auto g = build_grid(2, m, 16, 48);

    SolveOptions strict;
    strict.max_newton = 1;
    strict.initial_guess = InitialGuess::supplied;
    strict.supplied_guess.assign(g.size(), 1000.0);
    bool threw = false;
    try {
        solve_steady(2, 0.05, m, g, strict);
    } catch (const NonConvergenceError& e) {
        threw = true;
        CHECK_FALSE(e.last_iterate().converged);
        CHECK(e.last_iterate().u.size() == g.size());
        CHECK(e.last_iterate().residual_inf > 0.0);
    }
    CHECK(threw);

    std::vector<double> bad(g.size(), -1.0);
    CHECK_THROWS_AS(march_to_steady(2, 0.05, m, g, bad, 0.1, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(solve_steady(2, -1.0, m, g), std::domain_error);
}

TEST_CASE("grid sizing rule tracks the concentration radius") {
    CHECK(default_grid_counts(0.1).inner == 64);
    CHECK(default_grid_counts(0.01).inner == 64);
    CHECK(default_grid_counts(1e-5).inner == 80);
    CHECK(default_grid_counts(1e-5).outer == 240);
    CHECK_THROWS_AS(default_grid_counts(0.0), std::domain_error);
}
