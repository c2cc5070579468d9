#include "smdiff/errors.hpp"
#include "smdiff/solver.hpp"
#include "smdiff/verify.hpp"

#include <gtest/gtest.h>

#include <json.hpp>

#include <Eigen/SparseCholesky>

#include <random>

using namespace smd;

namespace {

ScalarFunction constant(double v)
{
    return [v](const Vec2&) { return v; };
}

MixedSpaces unit_square_spaces(int n, int order = 1)
{
    return MixedSpaces::make(std::make_shared<const TriMesh>(build_unit_square(n)), order);
}

ProblemData uniform_two_species(const Vec2& u)
{
    ProblemData p;
    p.coeffs = TransportCoefficients::create(Eigen::MatrixXd::Ones(2, 2), Eigen::Vector2d::Ones());
    p.dirichlet[0] = {constant(0.5), constant(0.5)};
    p.total_concentration = 1.0;
    p.mass_flux = [u](const Vec2&) { return u; };
    p.mass_flux_divergence = constant(0.0);
    return p;
}

struct Solved {
    MixedSpaces spaces;
    ProblemData data;
    SolveResult result;
};

Solved solve_reference_case(int n, double gamma, double epsilon = 1e-13)
{
    static const ManufacturedCase mc = build_reference_case();
    Solved s{unit_square_spaces(n), mc.problem(gamma), {}};
    PicardSettings st;
    st.gamma = gamma;
    st.epsilon = epsilon;
    s.result = picard_iterate(s.spaces, s.data, apply_dirichlet_lifting(s.data, s.spaces.concentration), st);
    return s;
}

double distance(const std::vector<Field>& a, const std::vector<Field>& b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double e = l2_norm(Field(a[i].space, a[i].coeffs - b[i].coeffs));
        s += e * e;
    }
    return std::sqrt(s);
}

}  // namespace

TEST(Solver, IdentityBlockIsVelocityMassMatrix)
{
    const MixedSpaces sp = unit_square_spaces(3);
    ProblemData p = uniform_two_species(Vec2::Zero());
    const std::vector<Field> c{interpolate(sp.concentration, constant(1.0)), interpolate(sp.concentration, constant(1.0))};
    const std::vector<Field> lift{interpolate(sp.concentration, constant(0.5)), interpolate(sp.concentration, constant(0.5))};
    const SaddleSystem sys = assemble(sp, p, c, lift);

    // M^gamma = I pointwise, so A is the DG P0 vector mass matrix: cell area on the diagonal.
    SparseMatrix mass(sys.velocity_size(), sys.velocity_size());
    std::vector<Eigen::Triplet<double>> t;
    for (int i = 0; i < 2; ++i) {
        for (int cell = 0; cell < sp.mesh->num_cells(); ++cell) {
            for (int d = 0; d < 2; ++d) {
                const int k = i * sys.velocity_dofs + 2 * cell + d;
                t.emplace_back(k, k, sp.mesh->signed_area(cell));
            }
        }
    }
    mass.setFromTriplets(t.begin(), t.end());
    EXPECT_LE((Eigen::MatrixXd(sys.a) - Eigen::MatrixXd(mass)).cwiseAbs().maxCoeff(), 1e-15);

    std::mt19937_64 rng(42);
    std::normal_distribution<double> nd;
    Eigen::VectorXd e(sys.velocity_size());
    for (auto& x : e) x = nd(rng);
    Eigen::SimplicialLDLT<SparseMatrix> ldlt(sys.a);
    const Eigen::VectorXd x = ldlt.solve(mass * e);
    EXPECT_LE((x - e).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Solver, ZeroRightHandSideGivesZero)
{
    const MixedSpaces sp = unit_square_spaces(4);
    ProblemData p = uniform_two_species(Vec2::Zero());
    const std::vector<Field> c{interpolate(sp.concentration, constant(0.3)), interpolate(sp.concentration, constant(0.7))};
    SaddleSystem sys = assemble(sp, p, c, c);
    sys.rhs_velocity.setZero();
    sys.rhs_concentration.setZero();
    const LinearSolution sol = solve_linear(sys);
    EXPECT_EQ(sol.velocities.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(sol.correction.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Solver, LinearResidualContract)
{
    static const ManufacturedCase mc = build_reference_case();
    const MixedSpaces sp = unit_square_spaces(8);
    const ProblemData data = mc.problem(1.0);
    const auto lift = apply_dirichlet_lifting(data, sp.concentration);
    const SaddleSystem sys = assemble(sp, data, lift, lift);
    const LinearSolution sol = solve_linear(sys);
    const SparseMatrix k = sys.block_operator();
    Eigen::VectorXd x(sys.size());
    x << sol.velocities, sol.correction;
    const double r = (k * x - sys.rhs()).norm();
    EXPECT_LE(r, 1e-10 * (k.norm() * x.norm() + sys.rhs().norm()));
    EXPECT_NEAR(sol.residual, r, 1e-12 * (1.0 + r));
}

TEST(Solver, ManufacturedFixedPoint)
{
    const Solved s = solve_reference_case(8, 1.0);
    const SolveReport& r = s.result.report;
    ASSERT_TRUE(r.converged);
    EXPECT_EQ(static_cast<int>(r.increments.size()), r.iterations);
    EXPECT_EQ(static_cast<int>(r.gibbs_duhem_history.size()), r.iterations);
    EXPECT_LE(r.increments.back(), 1e-13);

    const NonlinearResidual res = nonlinear_residual(s.spaces, s.data, s.result.concentrations, s.result.velocities);
    EXPECT_LE(res.velocity_row, 1e-10);
    EXPECT_LE(res.concentration_row, 1e-10);
    EXPECT_LE(res.total(), 10 * 1e-13);
    EXPECT_DOUBLE_EQ(r.residual, res.total());

    for (double gd : r.gibbs_duhem_history) EXPECT_LE(gd, 1e-12);
    const std::size_t m = r.increments.size();
    ASSERT_GE(m, 3u);
    EXPECT_GE(r.increments[m - 3], r.increments[m - 2]);
    EXPECT_GE(r.increments[m - 2], r.increments[m - 1]);

    // Species sum equals C_T at every dof.
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(s.spaces.concentration->num_dofs());
    for (const auto& c : s.result.concentrations) sum += c.coeffs;
    EXPECT_LE((sum.array() - 4.0).abs().maxCoeff(), 1e-12);

    // Restarting from the converged solution stops after one step.
    PicardSettings st;
    const SolveResult again = picard_iterate(s.spaces, s.data, s.result.concentrations, st);
    EXPECT_TRUE(again.report.converged);
    EXPECT_EQ(again.report.iterations, 1);
    EXPECT_LE(distance(again.velocities, s.result.velocities), 1e-12);
}

TEST(Solver, GammaZeroIsSignaled)
{
    static const ManufacturedCase mc = build_reference_case();
    const MixedSpaces sp = unit_square_spaces(8);
    const ProblemData data = mc.problem(0.0);
    PicardSettings st;
    st.gamma = 0.0;
    try {
        const SolveResult r = picard_iterate(sp, data, apply_dirichlet_lifting(data, sp.concentration), st);
        EXPECT_FALSE(r.report.converged) << "gamma = 0 returned a converged solution";
    } catch (const SolveFailure& e) {
        EXPECT_EQ(e.kind(), SolveFailure::Kind::Linear);
        EXPECT_EQ(e.iterate(), 0);
        EXPECT_FALSE(e.report().failure.empty());
    }
}

TEST(Solver, GammaDependenceVanishesUnderRefinement)
{
    // The augmentation only vanishes where the mass-flux constraint holds exactly; the
    // discrete constraint holds to O(h), so solutions for different gamma differ by a
    // consistency error that must shrink at second order and stay below the
    // discretization error.
    static const ManufacturedCase mc = build_reference_case();
    const std::vector<ExactSpecies> exact = mc.exact();
    double previous[3] = {0.0, 0.0, 0.0};
    for (int n : {8, 16}) {
        const Solved a = solve_reference_case(n, 0.1);
        const Solved b = solve_reference_case(n, 1.0);
        const Solved c = solve_reference_case(n, 10.0);
        const Solved* s[] = {&a, &b, &c};
        const ErrorNorms err = error_norms(b.result.concentrations, b.result.velocities, exact);
        int pair = 0;
        for (int i = 0; i < 3; ++i) {
            ASSERT_TRUE(s[i]->result.report.converged);
            for (int j = i + 1; j < 3; ++j, ++pair) {
                const double d = distance(s[i]->result.concentrations, s[j]->result.concentrations) +
                                 distance(s[i]->result.velocities, s[j]->result.velocities);
                EXPECT_LT(d, err.e1 + err.e3) << "N " << n << ", gamma pair " << i << ", " << j;
                if (previous[pair] > 0.0) {
                    EXPECT_GT(previous[pair] / d, 3.0) << "gamma pair " << i << ", " << j;
                }
                previous[pair] = d;
            }
        }
    }
}

TEST(Solver, UniformMixtureCarriesMassFlux)
{
    const MixedSpaces sp = unit_square_spaces(6);
    for (const Vec2& u : {Vec2(0.0, 1.0), Vec2(0.3, -0.2)}) {
        const ProblemData p = uniform_two_species(u);
        PicardSettings st;
        const SolveResult r = picard_iterate(sp, p, apply_dirichlet_lifting(p, sp.concentration), st);
        ASSERT_TRUE(r.report.converged);
        EXPECT_LE(mass_flux_error(r.concentrations, r.velocities, p.coeffs.molar_mass, p.mass_flux), 1e-12);
        for (const auto& v : r.velocities) {
            EXPECT_LE(l2_error(v, VectorFunction([u](const Vec2&) { return u; })), 1e-12);
        }
    }
}

TEST(Solver, ReportsNonConvergence)
{
    PicardSettings st;
    st.max_iterations = 2;
    static const ManufacturedCase mc = build_reference_case();
    const MixedSpaces sp = unit_square_spaces(4);
    const ProblemData data = mc.problem(1.0);
    const SolveResult r = picard_iterate(sp, data, apply_dirichlet_lifting(data, sp.concentration), st);
    EXPECT_FALSE(r.report.converged);
    EXPECT_EQ(r.report.iterations, 2);
    EXPECT_EQ(r.report.increments.size(), 2u);
}

TEST(Solver, PositivityBreachCarriesReport)
{
    static const ManufacturedCase mc = build_reference_case();
    const MixedSpaces sp = unit_square_spaces(4);
    const ProblemData data = mc.problem(1.0);
    auto guess = apply_dirichlet_lifting(data, sp.concentration);
    guess[2].coeffs[12] = -0.5;
    try {
        picard_iterate(sp, data, guess, PicardSettings{});
        FAIL() << "expected SolveFailure";
    } catch (const SolveFailure& e) {
        EXPECT_EQ(e.kind(), SolveFailure::Kind::Positivity);
        EXPECT_EQ(e.iterate(), 0);
        const auto j = nlohmann::json::parse(e.report().to_json());
        EXPECT_TRUE(j.contains("failure"));
    }
}

TEST(Solver, InconsistentDataIsConsistencyFailure)
{
    const MixedSpaces sp = unit_square_spaces(4);
    ProblemData p = uniform_two_species(Vec2(0.0, 1.0));
    p.reactions = {constant(1.0), constant(0.0)};
    EXPECT_THROW(
        {
            try {
                picard_iterate(sp, p, apply_dirichlet_lifting(p, sp.concentration), PicardSettings{});
            } catch (const SolveFailure& e) {
                EXPECT_EQ(e.kind(), SolveFailure::Kind::Consistency);
                throw;
            }
        },
        SolveFailure);
}

TEST(Solver, SettingsValidation)
{
    PicardSettings s;
    s.epsilon = 0.0;
    EXPECT_THROW(s.validate(), InvalidArgument);
    s = {};
    s.max_iterations = 0;
    EXPECT_THROW(s.validate(), InvalidArgument);
    s = {};
    s.gamma = -1.0;
    EXPECT_THROW(s.validate(), InvalidArgument);
}

TEST(Solver, ReportJsonKeys)
{
    const Solved s = solve_reference_case(4, 1.0, 1e-10);
    const auto j = nlohmann::json::parse(s.result.report.to_json());
    for (const char* key : {"iterations", "increments", "gibbs_duhem_l2", "residual", "wall_time_s"}) {
        EXPECT_TRUE(j.contains(key)) << key;
    }
    EXPECT_EQ(j["iterations"].get<int>(), s.result.report.iterations);
    EXPECT_EQ(j["increments"].size(), s.result.report.increments.size());
}
