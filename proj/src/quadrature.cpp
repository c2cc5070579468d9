#include "smdiff/quadrature.hpp"

#include "smdiff/errors.hpp"

#include <cmath>
#include <numbers>

namespace smd {

GaussLegendre gauss_legendre(int npoints)
{
    if (npoints < 1) throw InvalidArgument("gauss_legendre: need at least one point");
    const auto n = static_cast<unsigned>(npoints);
    GaussLegendre rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (unsigned i = 0; i < n; ++i) {
        // Tricomi initial guess, then Newton on P_n.
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 1.0;
        for (int it = 0; it < 100; ++it) {
            const double p = std::legendre(n, x);
            const double pm1 = (n > 1) ? std::legendre(n - 1, x) : 1.0;
            dp = n * (x * p - pm1) / (x * x - 1.0);
            const double dx = p / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        const double p = std::legendre(n, x);
        const double pm1 = (n > 1) ? std::legendre(n - 1, x) : 1.0;
        dp = n * (x * p - pm1) / (x * x - 1.0);
        rule.nodes[i] = x;
        rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

LineQuadrature line_quadrature(int degree)
{
    if (degree < 0) throw InvalidArgument("line_quadrature: negative degree");
    const int n = degree / 2 + 1;
    const GaussLegendre gl = gauss_legendre(n);
    LineQuadrature rule;
    rule.degree = degree;
    for (int i = 0; i < n; ++i) {
        rule.points.push_back(0.5 * (gl.nodes[static_cast<std::size_t>(i)] + 1.0));
        rule.weights.push_back(0.5 * gl.weights[static_cast<std::size_t>(i)]);
    }
    return rule;
}

std::array<double, 3> TriangleQuadrature::barycentric(int q) const
{
    const Vec2& p = points[static_cast<std::size_t>(q)];
    return {1.0 - p.x() - p.y(), p.x(), p.y()};
}

TriangleQuadrature triangle_quadrature(int degree)
{
    if (degree < 0) throw InvalidArgument("triangle_quadrature: negative degree");
    // The collapse s = a(1-b), t = b raises the degree in b by one (Jacobian 1-b).
    const int n = (degree + 2 + 1) / 2;
    const LineQuadrature line = line_quadrature(2 * n - 1);
    TriangleQuadrature rule;
    rule.degree = degree;
    for (int j = 0; j < n; ++j) {
        const double b = line.points[static_cast<std::size_t>(j)];
        const double wb = line.weights[static_cast<std::size_t>(j)];
        for (int i = 0; i < n; ++i) {
            const double a = line.points[static_cast<std::size_t>(i)];
            const double wa = line.weights[static_cast<std::size_t>(i)];
            rule.points.emplace_back(a * (1.0 - b), b);
            rule.weights.push_back(wa * wb * (1.0 - b));
        }
    }
    return rule;
}

}  // namespace smd
