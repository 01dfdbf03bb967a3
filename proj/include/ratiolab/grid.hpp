#pragma once

// Radial mesh on [0,1] with quadrature weights for integrals of the form
// A_n int f(r) r^(n-1) dr. Every breakpoint of the resource profile is a
// mesh node, so piecewise-constant data is never smeared across a jump.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "ratiolab/core_math.hpp"

namespace ratiolab {

struct RadialGrid {
    int dim = 1;                 ///< space dimension n the weights were built for
    std::vector<double> nodes;   ///< strictly increasing, nodes.front()==0, back()==1
    std::vector<double> weights; ///< nonnegative; sum to ball_volume(dim) on f==1

    std::size_t size() const { return nodes.size(); }

    /// Weighted sum approximating A_n int f r^(n-1) dr; f given nodewise.
    double integrate(std::span<const double> f) const;

    /// Index of the node exactly equal to r, if present.
    std::optional<std::size_t> find_node(double r) const;
};

/// Mesh for a piecewise-constant profile: uniform cells on the first
/// interval (inner_cells of them), geometrically graded cells on the rest
/// (outer_cells total, finest next to the first breakpoint, each segment's
/// first cell width matching the previous segment's last). All profile
/// breakpoints land exactly on nodes.
///
/// Throws std::invalid_argument for cell counts < 8 and std::runtime_error
/// if snapping would collapse a cell.
RadialGrid build_grid(int n, const ResourceProfile& profile, int inner_cells, int outer_cells);

/// Same mesh with every cell bisected; node k of the input is node 2k of
/// the result, so nodal errors can be compared across refinement levels.
RadialGrid refine_grid(const RadialGrid& g);

/// Quadrature weights for the node set: per cell, f is interpolated
/// linearly and f(r) r^(n-1) integrated exactly. Exact for constant and
/// linear f in every dimension.
std::vector<double> radial_weights(int n, std::span<const double> nodes);

} // namespace ratiolab
