#include "ratiolab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ratiolab {

namespace {

// (q^M - 1)/(q - 1) evaluated stably near q = 1; q = 1 + d.
double geometric_sum(double d, int cells) {
    if (d == 0.0) return static_cast<double>(cells);
    return std::expm1(cells * std::log1p(d)) / d;
}

// Append `cells` nodes covering (a, b], geometrically graded so the first
// cell has width first_h when that still undershoots the segment; falls
// back to uniform spacing when first_h * cells already overshoots.
void append_graded_segment(std::vector<double>& nodes, double a, double b,
                           int cells, double first_h) {
    const double len = b - a;
    if (first_h * cells >= len) {
        for (int k = 1; k < cells; ++k) nodes.push_back(a + len * k / cells);
        nodes.push_back(b);
        return;
    }
    // Solve first_h * (q^M - 1)/(q - 1) = len for the growth ratio q > 1.
    double lo = 0.0, hi = 1.0;
    while (first_h * geometric_sum(hi, cells) < len) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (first_h * geometric_sum(mid, cells) < len ? lo : hi) = mid;
    }
    const double d = 0.5 * (lo + hi);
    for (int k = 1; k < cells; ++k) nodes.push_back(a + first_h * geometric_sum(d, k));
    nodes.push_back(b);
}

} // namespace

std::vector<double> radial_weights(int n, std::span<const double> nodes) {
    const double an = sphere_area(n);
    std::vector<double> w(nodes.size(), 0.0);
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        const double a = nodes[i];
        const double b = nodes[i + 1];
        // Exact moments of r^(n-1) against the two linear hat functions.
        const double m0 = (std::pow(b, n) - std::pow(a, n)) / n;
        const double m1 = (std::pow(b, n + 1) - std::pow(a, n + 1)) / (n + 1);
        w[i] += an * (b * m0 - m1) / (b - a);
        w[i + 1] += an * (m1 - a * m0) / (b - a);
    }
    return w;
}

double RadialGrid::integrate(std::span<const double> f) const {
    if (f.size() != weights.size())
        throw std::invalid_argument("RadialGrid::integrate: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += weights[i] * f[i];
    return s;
}

std::optional<std::size_t> RadialGrid::find_node(double r) const {
    const auto it = std::lower_bound(nodes.begin(), nodes.end(), r);
    if (it != nodes.end() && *it == r)
        return static_cast<std::size_t>(it - nodes.begin());
    return std::nullopt;
}

RadialGrid build_grid(int n, const ResourceProfile& profile, int inner_cells, int outer_cells) {
    profile.validate();
    if (n < 1) throw std::invalid_argument("build_grid: n must be >= 1");
    if (inner_cells < 8 || outer_cells < 8)
        throw std::invalid_argument("build_grid: cell counts must be >= 8");

    const auto& bp = profile.breakpoints;
    const std::size_t segments = bp.size() - 1;

    RadialGrid g;
    g.dim = n;
    g.nodes.reserve(inner_cells + outer_cells + 1);
    g.nodes.push_back(0.0);

    if (segments == 1) {
        const int cells = inner_cells + outer_cells;
        for (int k = 1; k < cells; ++k) g.nodes.push_back(static_cast<double>(k) / cells);
        g.nodes.push_back(1.0);
    } else {
        // First interval: uniform.
        const double b1 = bp[1];
        for (int k = 1; k < inner_cells; ++k) g.nodes.push_back(b1 * k / inner_cells);
        g.nodes.push_back(b1);
        double last_h = b1 / inner_cells;

        // Remaining intervals share outer_cells, at least 8 each, the rest
        // split in proportion to length.
        std::vector<int> alloc(segments - 1, 8);
        int budget = outer_cells - 8 * static_cast<int>(segments - 1);
        if (budget < 0)
            throw std::invalid_argument("build_grid: outer cell budget below 8 per interval");
        const double outer_len = 1.0 - b1;
        int assigned = 0;
        for (std::size_t s = 1; s < segments; ++s) {
            int extra = (s + 1 == segments)
                            ? budget - assigned
                            : static_cast<int>(budget * (bp[s + 1] - bp[s]) / outer_len);
            alloc[s - 1] += extra;
            assigned += extra;
        }

        for (std::size_t s = 1; s < segments; ++s) {
            const std::size_t before = g.nodes.size();
            append_graded_segment(g.nodes, bp[s], bp[s + 1], alloc[s - 1], last_h);
            last_h = g.nodes.back() - g.nodes[g.nodes.size() - 2];
            (void)before;
        }
    }

    for (std::size_t i = 0; i + 1 < g.nodes.size(); ++i)
        if (!(g.nodes[i] < g.nodes[i + 1]))
            throw std::runtime_error("build_grid: breakpoint snapping collapsed a cell");

    g.weights = radial_weights(n, g.nodes);
    return g;
}

RadialGrid refine_grid(const RadialGrid& g) {
    RadialGrid fine;
    fine.dim = g.dim;
    fine.nodes.reserve(2 * g.nodes.size() - 1);
    for (std::size_t i = 0; i + 1 < g.nodes.size(); ++i) {
        fine.nodes.push_back(g.nodes[i]);
        fine.nodes.push_back(0.5 * (g.nodes[i] + g.nodes[i + 1]));
    }
    fine.nodes.push_back(g.nodes.back());
    fine.weights = radial_weights(g.dim, fine.nodes);
    return fine;
}

} // namespace ratiolab
