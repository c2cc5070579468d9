#include "smdiff/errors.hpp"
#include "smdiff/fespace.hpp"

#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <random>

using namespace smd;

namespace {

constexpr double pi = std::numbers::pi;

std::shared_ptr<const TriMesh> square(int n, Diagonal d = Diagonal::Right)
{
    return std::make_shared<const TriMesh>(build_unit_square(n, d));
}

double factorial(int k) { return std::tgamma(k + 1.0); }

/// Relative L2 distance between grad c and its DG representation, by quadrature.
double inclusion_residual(const Field& c, const Field& g)
{
    const TriMesh& m = c.space->mesh();
    const TriangleQuadrature rule = triangle_quadrature(2 * c.space->order() + 2);
    double diff = 0.0, ref = 0.0;
    for (int k = 0; k < m.num_cells(); ++k) {
        const double det = cell_geometry(m, k).det;
        for (int q = 0; q < rule.size(); ++q) {
            const Vec2 gc = eval_gradient(c, k, rule.points[q]);
            const Vec2 gv = eval_vector(g, k, rule.points[q]);
            diff += rule.weights[q] * det * (gc - gv).squaredNorm();
            ref += rule.weights[q] * det * gc.squaredNorm();
        }
    }
    return std::sqrt(diff / ref);
}

}  // namespace

TEST(Quadrature, TriangleWeightsAndExactness)
{
    for (int q = 0; q <= 12; ++q) {
        const TriangleQuadrature rule = triangle_quadrature(q);
        double sum = 0.0;
        for (double w : rule.weights) {
            EXPECT_GT(w, 0.0);
            sum += w;
        }
        EXPECT_NEAR(sum, 0.5, 1e-15);
        for (int a = 0; a <= q; ++a) {
            for (int b = 0; a + b <= q; ++b) {
                double s = 0.0;
                for (int k = 0; k < rule.size(); ++k) {
                    s += rule.weights[k] * std::pow(rule.points[k].x(), a) * std::pow(rule.points[k].y(), b);
                }
                const double exact = factorial(a) * factorial(b) / factorial(a + b + 2);
                EXPECT_NEAR(s, exact, 1e-14) << "degree " << q << " monomial s^" << a << " t^" << b;
            }
        }
    }
}

TEST(Quadrature, LineExactness)
{
    for (int q = 0; q <= 10; ++q) {
        const LineQuadrature rule = line_quadrature(q);
        for (int a = 0; a <= q; ++a) {
            double s = 0.0;
            for (std::size_t k = 0; k < rule.points.size(); ++k) s += rule.weights[k] * std::pow(rule.points[k], a);
            EXPECT_NEAR(s, 1.0 / (a + 1), 1e-15);
        }
    }
}

TEST(FeSpace, DofCounts)
{
    for (int n : {1, 4, 9}) {
        auto m = square(n);
        EXPECT_EQ(FiniteSpace::cg_scalar(m, 1)->num_dofs(), (n + 1) * (n + 1));
        EXPECT_EQ(FiniteSpace::cg_scalar(m, 2)->num_dofs(), (2 * n + 1) * (2 * n + 1));
        EXPECT_EQ(FiniteSpace::dg_vector(m, 0)->num_dofs(), 2 * 2 * n * n);
        EXPECT_EQ(FiniteSpace::dg_vector(m, 1)->num_dofs(), 2 * 3 * 2 * n * n);
    }
}

TEST(FeSpace, CgMapIsConformingAndDgIsLocal)
{
    auto m = square(3);
    auto cg = FiniteSpace::cg_scalar(m, 1);
    for (int c = 0; c < m->num_cells(); ++c) {
        for (int a = 0; a < 3; ++a) EXPECT_EQ(cg->cell_nodes(c)[a], m->cell(c)[a]);
    }
    auto dg = FiniteSpace::dg_vector(m, 1);
    for (int c = 0; c < m->num_cells(); ++c) {
        for (int a = 0; a < 3; ++a) EXPECT_EQ(dg->cell_nodes(c)[a], 3 * c + a);
    }
}

TEST(FeSpace, InterpolateReproducesSpace)
{
    auto m = square(5);
    for (int order : {1, 2}) {
        auto cg = FiniteSpace::cg_scalar(m, order);
        const Field one = interpolate(cg, [](const Vec2&) { return 1.0; });
        EXPECT_TRUE(one.coeffs.isApproxToConstant(1.0, 1e-14));

        auto affine = [](const Vec2& x) { return x.x() + 2.0 * x.y(); };
        const Field f = interpolate(cg, affine);
        EXPECT_LT(l2_error(f, affine), 1e-14);
        EXPECT_LT(gradient_l2_error(f, [](const Vec2&) { return Vec2(1.0, 2.0); }), 1e-13);
    }
    auto quad = [](const Vec2& x) { return x.x() * x.x() - 3.0 * x.x() * x.y() + 0.5; };
    const Field f2 = interpolate(FiniteSpace::cg_scalar(m, 2), quad);
    EXPECT_LT(l2_error(f2, quad), 1e-14);
}

TEST(FeSpace, InterpolateRejectsNonFinite)
{
    auto cg = FiniteSpace::cg_scalar(square(2), 1);
    EXPECT_THROW(interpolate(cg, [](const Vec2& x) { return 1.0 / x.x(); }), InvalidArgument);
}

TEST(FeSpace, InterpolationIsLinear)
{
    auto cg = FiniteSpace::cg_scalar(square(6), 2);
    auto f = [](const Vec2& x) { return std::sin(3.0 * x.x()) * std::exp(x.y()); };
    auto g = [](const Vec2& x) { return std::cos(x.x() + x.y()); };
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int k = 0; k < 10; ++k) {
        const double a = u(rng), b = u(rng);
        const Field lhs = interpolate(cg, [&](const Vec2& x) { return a * f(x) + b * g(x); });
        const Eigen::VectorXd rhs = a * interpolate(cg, f).coeffs + b * interpolate(cg, g).coeffs;
        EXPECT_LT((lhs.coeffs - rhs).cwiseAbs().maxCoeff(), 1e-14 * (1.0 + rhs.cwiseAbs().maxCoeff()));
    }
}

TEST(FeSpace, H1InterpolationErrorHalves)
{
    auto f = [](const Vec2& x) { return std::sin(pi * x.x()) * std::sin(pi * x.y()); };
    auto grad = [](const Vec2& x) {
        return Vec2(pi * std::cos(pi * x.x()) * std::sin(pi * x.y()), pi * std::sin(pi * x.x()) * std::cos(pi * x.y()));
    };
    auto h1 = [&](int n) {
        const Field c = interpolate(FiniteSpace::cg_scalar(square(n), 1), f);
        return std::hypot(l2_error(c, f, 12), gradient_l2_error(c, grad, 12));
    };
    const double ratio = h1(8) / h1(16);
    EXPECT_GE(ratio, 1.8);
    EXPECT_LE(ratio, 2.2);
}

TEST(FeSpace, GradientOfConstantAndAffine)
{
    auto m = square(4, Diagonal::Left);
    auto cg = FiniteSpace::cg_scalar(m, 1);
    auto dg = FiniteSpace::dg_vector(m, 0);
    const Field z = gradient_field(interpolate(cg, [](const Vec2&) { return 3.0; }), dg);
    EXPECT_LT(z.coeffs.cwiseAbs().maxCoeff(), 1e-13);
    const Field g = gradient_field(interpolate(cg, [](const Vec2& x) { return x.x() + 2.0 * x.y(); }), dg);
    for (int c = 0; c < m->num_cells(); ++c) {
        const Vec2 v = eval_vector(g, c, Vec2(1.0 / 3, 1.0 / 3));
        EXPECT_NEAR(v.x(), 1.0, 1e-13);
        EXPECT_NEAR(v.y(), 2.0, 1e-13);
    }
}

TEST(FeSpace, GradientMatchesPerCellAffineSolve)
{
    auto m = square(5);
    auto cg = FiniteSpace::cg_scalar(m, 1);
    auto dg = FiniteSpace::dg_vector(m, 0);
    std::mt19937_64 rng(42);
    std::normal_distribution<double> nd;
    Eigen::VectorXd coeffs(cg->num_dofs());
    for (auto& x : coeffs) x = nd(rng);
    const Field g = gradient_field(Field(cg, coeffs), dg);
    for (int c = 0; c < m->num_cells(); ++c) {
        Eigen::Matrix3d a;
        Eigen::Vector3d rhs;
        for (int k = 0; k < 3; ++k) {
            const Vec2& p = m->vertex(m->cell(c)[k]);
            a.row(k) << 1.0, p.x(), p.y();
            rhs[k] = coeffs[m->cell(c)[k]];
        }
        const Eigen::Vector3d abc = a.fullPivLu().solve(rhs);
        const Vec2 v = eval_vector(g, c, Vec2(0.2, 0.3));
        EXPECT_NEAR(v.x(), abc[1], 1e-12 * (1.0 + std::abs(abc[1])));
        EXPECT_NEAR(v.y(), abc[2], 1e-12 * (1.0 + std::abs(abc[2])));
    }
}

TEST(FeSpace, GradientInclusionRandomFields)
{
    std::mt19937_64 rng(7);
    std::normal_distribution<double> nd;
    for (int order : {1, 2}) {
        auto m = square(6, order == 1 ? Diagonal::Right : Diagonal::Left);
        auto cg = FiniteSpace::cg_scalar(m, order);
        auto dg = FiniteSpace::dg_vector(m, order - 1);
        for (int k = 0; k < 10; ++k) {
            Eigen::VectorXd c(cg->num_dofs());
            for (auto& x : c) x = nd(rng);
            const Field f(cg, c);
            EXPECT_LE(inclusion_residual(f, gradient_field(f, dg)), 1e-13);
        }
    }
}

TEST(FeSpace, GradientSpaceMismatch)
{
    auto m = square(3);
    auto cg = FiniteSpace::cg_scalar(m, 2);
    const Field f = interpolate(cg, [](const Vec2& x) { return x.x(); });
    EXPECT_THROW(gradient_field(f, FiniteSpace::dg_vector(m, 0)), InvalidArgument);
    EXPECT_THROW(gradient_field(f, FiniteSpace::dg_vector(square(3), 1)), InvalidArgument);
}

TEST(FeSpace, ErrorNormsTrivialCases)
{
    auto m = square(4);
    auto cg = FiniteSpace::cg_scalar(m, 1);
    auto dg = FiniteSpace::dg_vector(m, 0);
    // c = 0 against c_h = 1.
    const std::vector<Field> ones{interpolate(cg, [](const Vec2&) { return 1.0; })};
    const std::vector<Field> zero_v{Field(dg)};
    const std::vector<ExactSpecies> zero{{[](const Vec2&) { return 0.0; }, [](const Vec2&) { return Vec2(0, 0); },
                                          [](const Vec2&) { return Vec2(0, 0); }}};
    const ErrorNorms e = error_norms(ones, zero_v, zero);
    EXPECT_NEAR(e.e1, 1.0, 1e-14);
    EXPECT_NEAR(e.e2, 0.0, 1e-14);
    EXPECT_NEAR(e.e3, 0.0, 1e-14);

    // Affine exact data against its own discrete representation.
    const std::vector<Field> cs{interpolate(cg, [](const Vec2& x) { return 2.0 - x.x() + x.y(); })};
    const std::vector<Field> vs{interpolate(dg, [](const Vec2&) { return Vec2(0.25, -1.0); })};
    const std::vector<ExactSpecies> ex{{[](const Vec2& x) { return 2.0 - x.x() + x.y(); },
                                        [](const Vec2&) { return Vec2(-1.0, 1.0); },
                                        [](const Vec2&) { return Vec2(0.25, -1.0); }}};
    const ErrorNorms z = error_norms(cs, vs, ex);
    EXPECT_LT(z.e1, 1e-14);
    EXPECT_LT(z.e2, 1e-13);
    EXPECT_LT(z.e3, 1e-14);
}

TEST(FeSpace, InterpolantL2ErrorIsSecondOrder)
{
    auto f = [](const Vec2& x) { return std::exp(x.x()) * std::sin(2.0 * x.y()); };
    auto e1 = [&](int n) { return l2_error(interpolate(FiniteSpace::cg_scalar(square(n), 1), f), f); };
    const double drop = e1(8) / e1(32);
    EXPECT_GT(drop, 14.0);
    EXPECT_LT(drop, 18.0);
}

TEST(FeSpace, MassFluxErrorTrivialCases)
{
    auto m = square(4);
    auto cg = FiniteSpace::cg_scalar(m, 1);
    auto dg = FiniteSpace::dg_vector(m, 0);
    const std::vector<Field> cs{interpolate(cg, [](const Vec2&) { return 1.0; }),
                                interpolate(cg, [](const Vec2&) { return 1.0; })};
    const std::vector<Field> zero{Field(dg), Field(dg)};
    auto u = [](const Vec2&) { return Vec2(0.0, 1.0); };
    EXPECT_NEAR(mass_flux_error(cs, zero, Eigen::Vector2d::Ones(), u), 1.0, 1e-14);
    const std::vector<Field> half{interpolate(dg, [](const Vec2&) { return Vec2(0.0, 0.5); }),
                                  interpolate(dg, [](const Vec2&) { return Vec2(0.0, 0.5); })};
    EXPECT_LT(mass_flux_error(cs, half, Eigen::Vector2d::Ones(), u), 1e-15);
}
