#include "smdiff/solver.hpp"

#include "smdiff/errors.hpp"

#include <Eigen/SparseLU>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <iostream>
#include <sstream>

namespace smd {

LinearSolution solve_linear(const SaddleSystem& system)
{
    const SparseMatrix k = system.block_operator();
    const Eigen::VectorXd b = system.rhs();
    Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
    lu.analyzePattern(k);
    lu.factorize(k);
    if (lu.info() != Eigen::Success) {
        throw SolverError("sparse LU factorization failed: " + lu.lastErrorMessage() +
                          " (the positivity or gamma > 0 hypotheses may be violated)");
    }
    Eigen::VectorXd x = lu.solve(b);
    // One step of iterative refinement.
    Eigen::VectorXd r = b - k * x;
    x += lu.solve(r);
    r = b - k * x;

    LinearSolution s;
    s.residual = r.norm();
    const double scale = k.norm() * x.norm() + b.norm();
    s.relative_residual = scale > 0.0 ? s.residual / scale : s.residual;
    if (!x.allFinite() || s.relative_residual > kLinearResidualTol) {
        std::ostringstream msg;
        msg << "linear solve inaccurate: relative residual " << s.relative_residual;
        throw SolverError(msg.str());
    }
    s.velocities = x.head(system.velocity_size());
    s.correction = x.tail(system.concentration_size());
    return s;
}

void PicardSettings::validate() const
{
    if (!(epsilon > 0.0)) throw InvalidArgument("PicardSettings: epsilon must be positive");
    if (max_iterations < 1) throw InvalidArgument("PicardSettings: max_iterations must be at least 1");
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw InvalidArgument("PicardSettings: gamma must be >= 0");
    if (!(kappa_min > 0.0)) throw InvalidArgument("PicardSettings: kappa_min must be positive");
}

std::string SolveReport::to_json() const
{
    nlohmann::ordered_json j;
    j["iterations"] = iterations;
    j["increments"] = increments;
    j["gibbs_duhem_l2"] = gibbs_duhem_l2;
    j["residual"] = residual;
    j["wall_time_s"] = wall_time_s;
    j["converged"] = converged;
    j["gibbs_duhem_history"] = gibbs_duhem_history;
    j["increment_norm"] = increment_norm;
    if (!failure.empty()) j["failure"] = failure;
    return j.dump(2);
}

NormOperators NormOperators::make(const MixedSpaces& spaces)
{
    const TriMesh& mesh = *spaces.mesh;
    const FiniteSpace& xs = *spaces.concentration;
    const FiniteSpace& qs = *spaces.velocity;
    const TriangleQuadrature rule = triangle_quadrature(2 * spaces.order);
    const BasisTable xt(xs.order(), rule);
    const BasisTable qt(qs.order(), rule);
    std::vector<Eigen::Triplet<double>> th, tm;
    for (int cell = 0; cell < mesh.num_cells(); ++cell) {
        const CellGeometry g = cell_geometry(mesh, cell);
        const double jac = std::abs(g.det);
        const auto xn = xs.cell_nodes(cell);
        const auto qn = qs.cell_nodes(cell);
        for (int a = 0; a < xt.nloc; ++a) {
            for (int b = 0; b < xt.nloc; ++b) {
                double v = 0.0;
                for (int q = 0; q < rule.size(); ++q) {
                    const double w = rule.weights[static_cast<std::size_t>(q)] * jac;
                    v += w * (xt.value(q, a) * xt.value(q, b) +
                              g.physical_gradient(xt.gradient(q, a)).dot(g.physical_gradient(xt.gradient(q, b))));
                }
                th.emplace_back(xn[static_cast<std::size_t>(a)], xn[static_cast<std::size_t>(b)], v);
            }
        }
        for (int a = 0; a < qt.nloc; ++a) {
            for (int b = 0; b < qt.nloc; ++b) {
                double v = 0.0;
                for (int q = 0; q < rule.size(); ++q) {
                    v += rule.weights[static_cast<std::size_t>(q)] * jac * qt.value(q, a) * qt.value(q, b);
                }
                for (int d = 0; d < 2; ++d) {
                    tm.emplace_back(2 * qn[static_cast<std::size_t>(a)] + d, 2 * qn[static_cast<std::size_t>(b)] + d, v);
                }
            }
        }
    }
    NormOperators ops;
    ops.h1.resize(xs.num_dofs(), xs.num_dofs());
    ops.h1.setFromTriplets(th.begin(), th.end());
    ops.mass.resize(qs.num_dofs(), qs.num_dofs());
    ops.mass.setFromTriplets(tm.begin(), tm.end());
    return ops;
}

namespace {

double product_norm(const SparseMatrix& gram, std::span<const Field> a, std::span<const Field> b)
{
    if (!b.empty() && a.size() != b.size()) throw InvalidArgument("norm: species count mismatch");
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const Eigen::VectorXd d = b.empty() ? a[i].coeffs : Eigen::VectorXd(a[i].coeffs - b[i].coeffs);
        if (d.size() != gram.rows()) throw InvalidArgument("norm: field does not match the space");
        sum += std::max(0.0, d.dot(gram * d));
    }
    return std::sqrt(sum);
}

}  // namespace

double NormOperators::x_norm(std::span<const Field> c) const { return product_norm(h1, c, {}); }
double NormOperators::q_norm(std::span<const Field> v) const { return product_norm(mass, v, {}); }
double NormOperators::x_distance(std::span<const Field> a, std::span<const Field> b) const
{
    return product_norm(h1, a, b);
}
double NormOperators::q_distance(std::span<const Field> a, std::span<const Field> b) const
{
    return product_norm(mass, a, b);
}

double gibbs_duhem_deviation(std::span<const Field> concentrations)
{
    if (concentrations.empty()) return 0.0;
    Field total(concentrations.front().space);
    for (const auto& c : concentrations) total.coeffs += c.coeffs;
    return gradient_l2_norm(total);
}

NonlinearResidual nonlinear_residual(const MixedSpaces& spaces, const ProblemData& data, std::span<const Field> c,
                                     std::span<const Field> v)
{
    const std::vector<Field> lift = apply_dirichlet_lifting(data, spaces.concentration);
    AssemblyOptions opts;
    opts.require_definite = false;
    const SaddleSystem sys = assemble(spaces, data, c, lift, opts);
    Eigen::VectorXd x(sys.size());
    for (int i = 0; i < sys.species; ++i) {
        x.segment(static_cast<Eigen::Index>(i) * sys.velocity_dofs, sys.velocity_dofs) = v[static_cast<std::size_t>(i)].coeffs;
        for (int k = 0; k < sys.num_free(); ++k) {
            const int dof = sys.free_dofs[static_cast<std::size_t>(k)];
            x[sys.velocity_size() + i * sys.num_free() + k] =
                c[static_cast<std::size_t>(i)].coeffs[dof] - lift[static_cast<std::size_t>(i)].coeffs[dof];
        }
    }
    const Eigen::VectorXd r = sys.block_operator() * x - sys.rhs();
    NonlinearResidual out;
    out.velocity_row = r.head(sys.velocity_size()).norm();
    out.concentration_row = r.tail(sys.concentration_size()).norm();
    return out;
}

SolveResult picard_iterate(const MixedSpaces& spaces, const ProblemData& data_in, std::span<const Field> initial_guess,
                           const PicardSettings& settings)
{
    settings.validate();
    const auto start = std::chrono::steady_clock::now();
    auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };

    ProblemData data = data_in;
    data.coeffs.gamma = settings.gamma;
    data.coeffs.kappa_min = settings.kappa_min;
    data.coeffs.validate();
    const int n = data.species();
    if (static_cast<int>(initial_guess.size()) != n) {
        throw InvalidArgument("picard_iterate: expected one initial concentration per species");
    }

    SolveReport report;
    auto fail = [&](const std::string& what, SolveFailure::Kind kind, int iterate) {
        report.failure = what;
        report.wall_time_s = elapsed();
        return SolveFailure(what, kind, iterate, report);
    };

    std::vector<Field> lifting;
    try {
        check_consistency(spaces, data, settings.strict_consistency);
        lifting = apply_dirichlet_lifting(data, spaces.concentration);
    } catch (const ConsistencyError& e) {
        throw fail(e.what(), SolveFailure::Kind::Consistency, 0);
    }

    const NormOperators norms = NormOperators::make(spaces);
    std::vector<Field> c(initial_guess.begin(), initial_guess.end());
    std::vector<Field> v;
    for (int i = 0; i < n; ++i) v.emplace_back(spaces.velocity);

    for (int k = 0; k < settings.max_iterations; ++k) {
        SaddleSystem sys;
        LinearSolution sol;
        try {
            sys = assemble(spaces, data, c, lifting);
            sol = solve_linear(sys);
        } catch (const PositivityError& e) {
            throw fail(std::string(e.what()) + " at Picard iterate " + std::to_string(k), SolveFailure::Kind::Positivity, k);
        } catch (const SolverError& e) {
            throw fail(std::string(e.what()) + " at Picard iterate " + std::to_string(k), SolveFailure::Kind::Linear, k);
        }
        std::vector<Field> c_next = combine_with_lifting(sys, sol.correction);
        std::vector<Field> v_next = split_velocities(sys, spaces.velocity, sol.velocities);

        // Only the concentration guess exists before the first step, so the first
        // increment measures concentrations alone.
        const double inc = norms.x_distance(c_next, c) + (k > 0 ? norms.q_distance(v_next, v) : 0.0);
        c = std::move(c_next);
        v = std::move(v_next);
        report.iterations = k + 1;
        report.increments.push_back(inc);
        report.gibbs_duhem_history.push_back(gibbs_duhem_deviation(c));

        if (settings.project_positivity) {
            for (int i = 0; i < n; ++i) {
                Eigen::VectorXd& ci = c[static_cast<std::size_t>(i)].coeffs;
                const int clipped = static_cast<int>((ci.array() < settings.kappa_min).count());
                if (clipped > 0) {
                    std::clog << "warning: projected " << clipped << " dofs of species " << i
                              << " onto the positivity floor at iterate " << k + 1 << '\n';
                    ci = ci.cwiseMax(settings.kappa_min);
                }
            }
        }
        if (inc <= settings.epsilon) {
            report.converged = true;
            break;
        }
    }

    report.gibbs_duhem_l2 = report.gibbs_duhem_history.empty() ? 0.0 : report.gibbs_duhem_history.back();
    try {
        report.residual = nonlinear_residual(spaces, data, c, v).total();
    } catch (const PositivityError& e) {
        throw fail(std::string(e.what()) + " at the final iterate", SolveFailure::Kind::Positivity, report.iterations);
    }
    report.wall_time_s = elapsed();
    return {std::move(c), std::move(v), std::move(report)};
}

}  // namespace smd
