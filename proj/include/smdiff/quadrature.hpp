#pragma once

#include "smdiff/mesh.hpp"

#include <array>
#include <vector>

namespace smd {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;
};

GaussLegendre gauss_legendre(int npoints);

/// Rule on the unit interval [0, 1], exact for polynomials up to `degree`.
struct LineQuadrature {
    int degree = 0;
    std::vector<double> points;
    std::vector<double> weights;
};

LineQuadrature line_quadrature(int degree);

/// Rule on the reference triangle {(s,t): s,t >= 0, s+t <= 1}.
///
/// Built as a collapsed (Duffy) tensor product of Gauss-Legendre rules, so all
/// weights are positive and they sum to the reference area 1/2.
struct TriangleQuadrature {
    int degree = 0;
    std::vector<Vec2> points;
    std::vector<double> weights;

    int size() const { return static_cast<int>(points.size()); }
    /// Barycentric coordinates (1-s-t, s, t) of point q.
    std::array<double, 3> barycentric(int q) const;
};

TriangleQuadrature triangle_quadrature(int degree);

}  // namespace smd
