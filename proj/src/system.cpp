#include "smdiff/system.hpp"

#include "smdiff/errors.hpp"
#include "smdiff/io.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <limits>
#include <sstream>

namespace smd {

SparseMatrix SaddleSystem::block_operator() const
{
    const int nv = velocity_size();
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(static_cast<std::size_t>(a.nonZeros() + b.nonZeros() + bc.nonZeros()));
    for (int k = 0; k < a.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(a, k); it; ++it) t.emplace_back(it.row(), it.col(), it.value());
    }
    for (int k = 0; k < b.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(b, k); it; ++it) t.emplace_back(it.row(), nv + it.col(), it.value());
    }
    for (int k = 0; k < bc.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(bc, k); it; ++it) t.emplace_back(nv + it.row(), it.col(), it.value());
    }
    SparseMatrix k(size(), size());
    k.setFromTriplets(t.begin(), t.end());
    return k;
}

Eigen::VectorXd SaddleSystem::rhs() const
{
    Eigen::VectorXd r(size());
    r << rhs_velocity, rhs_concentration;
    return r;
}

namespace {

void check_fields(std::span<const Field> fields, const SpacePtr& space, int n, const char* what)
{
    if (static_cast<int>(fields.size()) != n) {
        throw InvalidArgument(std::string("assemble: expected one ") + what + " field per species");
    }
    for (const auto& f : fields) {
        if (f.space.get() != space.get()) {
            throw InvalidArgument(std::string("assemble: ") + what + " fields must live in the concentration space");
        }
    }
}

/// Reference coordinates of a physical point in a cell.
Vec2 to_reference(const CellGeometry& g, const Vec2& x)
{
    return g.inverse_transpose.transpose() * (x - g.origin);
}

}  // namespace

SaddleSystem assemble(const MixedSpaces& spaces, const ProblemData& data, std::span<const Field> c_k,
                      std::span<const Field> lifting, const AssemblyOptions& options)
{
    const TriMesh& mesh = *spaces.mesh;
    const FiniteSpace& xs = *spaces.concentration;
    const FiniteSpace& qs = *spaces.velocity;
    const TransportCoefficients& co = data.coeffs;
    co.validate();
    const int n = co.n;
    check_fields(c_k, spaces.concentration, n, "iterate");
    check_fields(lifting, spaces.concentration, n, "lifting");

    SaddleSystem sys;
    sys.species = n;
    sys.velocity_dofs = qs.num_dofs();
    sys.free_index.assign(static_cast<std::size_t>(xs.num_dofs()), -1);
    for (int d = 0; d < xs.num_dofs(); ++d) {
        const auto& r = xs.dof_region(d);
        if (r && r->is_dirichlet()) continue;
        sys.free_index[static_cast<std::size_t>(d)] = static_cast<int>(sys.free_dofs.size());
        sys.free_dofs.push_back(d);
    }
    sys.lifting.assign(lifting.begin(), lifting.end());

    const int nv = sys.velocity_dofs;
    const int nf = sys.num_free();
    sys.rhs_velocity = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n) * nv);
    sys.rhs_concentration = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n) * nf);

    const TriangleQuadrature rule = triangle_quadrature(assembly_quadrature_degree(spaces.order));
    const BasisTable xt(xs.order(), rule);
    const BasisTable qt(qs.order(), rule);
    const int xl = xt.nloc;
    const int ql = qt.nloc;

    std::vector<Eigen::Triplet<double>> ta, tb, tbc;
    ta.reserve(static_cast<std::size_t>(mesh.num_cells()) * n * n * 2 * ql * ql);
    tb.reserve(static_cast<std::size_t>(mesh.num_cells()) * n * 2 * ql * xl);
    tbc.reserve(tb.capacity());

    Eigen::MatrixXd ca(n, rule.size());       // c^k_i at quadrature points
    std::vector<Eigen::MatrixXd> mg(static_cast<std::size_t>(rule.size()));
    std::vector<Vec2> xgrad(static_cast<std::size_t>(xl));
    // Cell-local blocks.
    Eigen::MatrixXd mass(ql, ql);
    std::vector<Eigen::MatrixXd> local_a(static_cast<std::size_t>(n * n));

    for (int cell = 0; cell < mesh.num_cells(); ++cell) {
        const CellGeometry g = cell_geometry(mesh, cell);
        const double jac = std::abs(g.det);
        const auto xnodes = xs.cell_nodes(cell);
        const auto qnodes = qs.cell_nodes(cell);

        for (int q = 0; q < rule.size(); ++q) {
            for (int i = 0; i < n; ++i) {
                const Eigen::VectorXd& ci = c_k[static_cast<std::size_t>(i)].coeffs;
                double v = 0.0;
                for (int a = 0; a < xl; ++a) v += ci[xnodes[static_cast<std::size_t>(a)]] * xt.value(q, a);
                if (!(v >= co.kappa_min)) {
                    std::ostringstream msg;
                    msg << "concentration of species " << i << " is " << v << " in cell " << cell
                        << ", below the positivity floor " << co.kappa_min;
                    throw PositivityError(msg.str(), cell, i, v);
                }
                ca(i, q) = v;
            }
            const PointState st = PointState::make(ca.col(q), co);
            Eigen::MatrixXd m = augmented_matrix(st, co) / co.rt;
            if (options.require_definite) {
                Eigen::LLT<Eigen::MatrixXd> llt(m);
                const double scale = m.diagonal().cwiseAbs().maxCoeff();
                const double pivot = llt.info() == Eigen::Success ? llt.matrixL().toDenseMatrix().diagonal().minCoeff() : 0.0;
                if (llt.info() != Eigen::Success || pivot * pivot <= 64 * std::numeric_limits<double>::epsilon() * scale) {
                    std::ostringstream msg;
                    msg << "augmented transport matrix is not positive definite in cell " << cell
                        << " (gamma = " << co.gamma << ")";
                    throw SolverError(msg.str());
                }
            }
            mg[static_cast<std::size_t>(q)] = std::move(m);
        }

        for (auto& la : local_a) la.setZero(ql, ql);
        for (int q = 0; q < rule.size(); ++q) {
            const double w = rule.weights[static_cast<std::size_t>(q)] * jac;
            const Eigen::MatrixXd& m = mg[static_cast<std::size_t>(q)];
            for (int a = 0; a < ql; ++a) {
                for (int b = 0; b < ql; ++b) mass(a, b) = w * qt.value(q, a) * qt.value(q, b);
            }
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < n; ++j) local_a[static_cast<std::size_t>(i * n + j)] += m(i, j) * mass;
            }
        }
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                const Eigen::MatrixXd& la = local_a[static_cast<std::size_t>(i * n + j)];
                for (int a = 0; a < ql; ++a) {
                    for (int b = 0; b < ql; ++b) {
                        for (int d = 0; d < 2; ++d) {
                            ta.emplace_back(i * nv + 2 * qnodes[static_cast<std::size_t>(a)] + d,
                                            j * nv + 2 * qnodes[static_cast<std::size_t>(b)] + d, la(a, b));
                        }
                    }
                }
            }
        }

        // b, b_c and right-hand sides.
        Eigen::MatrixXd lb = Eigen::MatrixXd::Zero(2 * ql, xl);
        std::vector<Eigen::MatrixXd> lbc(static_cast<std::size_t>(n), Eigen::MatrixXd::Zero(2 * ql, xl));
        for (int q = 0; q < rule.size(); ++q) {
            const double w = rule.weights[static_cast<std::size_t>(q)] * jac;
            const Vec2 x = g.map(rule.points[static_cast<std::size_t>(q)]);
            for (int p = 0; p < xl; ++p) xgrad[static_cast<std::size_t>(p)] = g.physical_gradient(xt.gradient(q, p));
            for (int a = 0; a < ql; ++a) {
                const double phi = qt.value(q, a);
                for (int p = 0; p < xl; ++p) {
                    for (int d = 0; d < 2; ++d) lb(2 * a + d, p) += w * phi * xgrad[static_cast<std::size_t>(p)][d];
                }
            }

            const double rho = co.molar_mass.dot(ca.col(q));
            const Vec2 u = data.u(x);
            for (int i = 0; i < n; ++i) {
                const Eigen::VectorXd& li = lifting[static_cast<std::size_t>(i)].coeffs;
                Vec2 glift = Vec2::Zero();
                for (int p = 0; p < xl; ++p) glift += li[xnodes[static_cast<std::size_t>(p)]] * xgrad[static_cast<std::size_t>(p)];
                const Vec2 src = co.gamma * ca(i, q) * co.molar_mass[i] / rho * u - glift;
                for (int a = 0; a < ql; ++a) {
                    const double phi = w * qt.value(q, a);
                    for (int d = 0; d < 2; ++d) sys.rhs_velocity[i * nv + 2 * qnodes[static_cast<std::size_t>(a)] + d] += phi * src[d];
                }
                const double r = data.reaction(i, x);
                if (r != 0.0) {
                    for (int p = 0; p < xl; ++p) {
                        const int k = sys.free_index[static_cast<std::size_t>(xnodes[static_cast<std::size_t>(p)])];
                        if (k >= 0) sys.rhs_concentration[i * nf + k] -= w * r * xt.value(q, p);
                    }
                }
                for (int a = 0; a < ql; ++a) {
                    const double phi = w * ca(i, q) * qt.value(q, a);
                    for (int p = 0; p < xl; ++p) {
                        for (int d = 0; d < 2; ++d) {
                            lbc[static_cast<std::size_t>(i)](2 * a + d, p) += phi * xgrad[static_cast<std::size_t>(p)][d];
                        }
                    }
                }
            }
        }
        for (int p = 0; p < xl; ++p) {
            const int k = sys.free_index[static_cast<std::size_t>(xnodes[static_cast<std::size_t>(p)])];
            if (k < 0) continue;
            for (int a = 0; a < ql; ++a) {
                for (int d = 0; d < 2; ++d) {
                    const int vd = 2 * qnodes[static_cast<std::size_t>(a)] + d;
                    for (int i = 0; i < n; ++i) {
                        tb.emplace_back(i * nv + vd, i * nf + k, lb(2 * a + d, p));
                        tbc.emplace_back(i * nf + k, i * nv + vd, lbc[static_cast<std::size_t>(i)](2 * a + d, p));
                    }
                }
            }
        }
    }

    // Neumann data (g_i, w)_{Gamma_N}.
    if (!data.neumann.empty()) {
        const LineQuadrature line = line_quadrature(facet_quadrature_degree(spaces.order));
        std::vector<double> vals(static_cast<std::size_t>(xl));
        for (int fi = 0; fi < static_cast<int>(mesh.boundary_facets().size()); ++fi) {
            const auto& f = mesh.boundary_facets()[static_cast<std::size_t>(fi)];
            if (f.tag.is_dirichlet()) continue;
            auto it = data.neumann.find(f.tag.id);
            if (it == data.neumann.end()) continue;
            const CellGeometry g = cell_geometry(mesh, f.cell);
            const auto xnodes = xs.cell_nodes(f.cell);
            const Vec2 a = mesh.vertex(f.vertices[0]);
            const Vec2 b = mesh.vertex(f.vertices[1]);
            const double len = (b - a).norm();
            for (std::size_t q = 0; q < line.points.size(); ++q) {
                const Vec2 x = a + line.points[q] * (b - a);
                lagrange::values(xs.order(), to_reference(g, x), vals);
                const double w = line.weights[q] * len;
                for (int i = 0; i < n; ++i) {
                    const double gi = it->second[static_cast<std::size_t>(i)](x);
                    for (int p = 0; p < xl; ++p) {
                        const int k = sys.free_index[static_cast<std::size_t>(xnodes[static_cast<std::size_t>(p)])];
                        if (k >= 0) sys.rhs_concentration[i * nf + k] += w * gi * vals[static_cast<std::size_t>(p)];
                    }
                }
            }
        }
    }

    sys.a.resize(n * nv, n * nv);
    sys.a.setFromTriplets(ta.begin(), ta.end());
    sys.b.resize(n * nv, n * nf);
    sys.b.setFromTriplets(tb.begin(), tb.end());
    sys.bc.resize(n * nf, n * nv);
    sys.bc.setFromTriplets(tbc.begin(), tbc.end());
    return sys;
}

std::vector<Field> apply_dirichlet_lifting(const ProblemData& data, const SpacePtr& space)
{
    if (space->kind() != SpaceKind::CgScalar) throw InvalidArgument("lifting: needs a CG scalar space");
    const int n = data.species();
    const double tol = kDirichletConsistencyTol * std::max(1.0, std::abs(data.total_concentration));
    std::vector<Field> out;
    for (int i = 0; i < n; ++i) out.emplace_back(space);

    std::vector<int> bdofs;
    for (int d = 0; d < space->num_dofs(); ++d) {
        const auto& r = space->dof_region(d);
        if (!r || !r->is_dirichlet()) continue;
        auto it = data.dirichlet.find(r->id);
        if (it == data.dirichlet.end() || static_cast<int>(it->second.size()) != n) {
            throw ConsistencyError("no Dirichlet data for every species on region " + r->str());
        }
        const Vec2& x = space->node_point(d);
        double sum = 0.0;
        for (int i = 0; i < n; ++i) {
            const double v = it->second[static_cast<std::size_t>(i)](x);
            out[static_cast<std::size_t>(i)].coeffs[d] = v;
            sum += v;
        }
        if (!(std::abs(sum - data.total_concentration) <= tol)) {
            std::ostringstream msg;
            msg << "Dirichlet data sum to " << sum << " instead of C_T = " << data.total_concentration << " at ("
                << x.x() << ", " << x.y() << ")";
            throw ConsistencyError(msg.str());
        }
        bdofs.push_back(d);
    }

    for (int d = 0; d < space->num_dofs(); ++d) {
        const auto& r = space->dof_region(d);
        if (r && r->is_dirichlet()) continue;
        const Vec2& x = space->node_point(d);
        if (bdofs.empty()) {
            for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)].coeffs[d] = data.total_concentration / n;
            continue;
        }
        Eigen::VectorXd acc = Eigen::VectorXd::Zero(n);
        double wsum = 0.0;
        for (int bd : bdofs) {
            const double dist2 = (space->node_point(bd) - x).squaredNorm();
            const double w = 1.0 / (dist2 * dist2);
            wsum += w;
            for (int i = 0; i < n; ++i) acc[i] += w * out[static_cast<std::size_t>(i)].coeffs[bd];
        }
        for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)].coeffs[d] = acc[i] / wsum;
    }
    return out;
}

std::vector<Field> combine_with_lifting(const SaddleSystem& system, const Eigen::VectorXd& correction)
{
    if (correction.size() != system.concentration_size()) {
        throw InvalidArgument("combine_with_lifting: correction has the wrong size");
    }
    std::vector<Field> out = system.lifting;
    const int nf = system.num_free();
    for (int i = 0; i < system.species; ++i) {
        for (int k = 0; k < nf; ++k) {
            out[static_cast<std::size_t>(i)].coeffs[system.free_dofs[static_cast<std::size_t>(k)]] += correction[i * nf + k];
        }
    }
    return out;
}

std::vector<Field> split_velocities(const SaddleSystem& system, const SpacePtr& velocity_space,
                                    const Eigen::VectorXd& velocities)
{
    if (velocities.size() != system.velocity_size() || velocity_space->num_dofs() != system.velocity_dofs) {
        throw InvalidArgument("split_velocities: size mismatch");
    }
    std::vector<Field> out;
    for (int i = 0; i < system.species; ++i) {
        out.emplace_back(velocity_space, velocities.segment(static_cast<Eigen::Index>(i) * system.velocity_dofs,
                                                            system.velocity_dofs));
    }
    return out;
}

void dump_matrix_market(const SaddleSystem& system, const std::string& prefix)
{
    io::write_matrix_market(prefix + "_A.mtx", system.a);
    io::write_matrix_market(prefix + "_B.mtx", system.b);
    io::write_matrix_market(prefix + "_Bc.mtx", system.bc);
    io::write_matrix_market(prefix + "_K.mtx", system.block_operator());
}

}  // namespace smd
