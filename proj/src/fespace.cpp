#include "smdiff/fespace.hpp"

#include "smdiff/errors.hpp"

#include <Eigen/LU>

#include <cmath>
#include <string>

namespace smd {

namespace lagrange {

int size(int order)
{
    switch (order) {
    case 0: return 1;
    case 1: return 3;
    case 2: return 6;
    default: throw InvalidArgument("lagrange: unsupported order " + std::to_string(order));
    }
}

std::vector<Vec2> nodes(int order)
{
    switch (order) {
    case 0: return {Vec2(1.0 / 3.0, 1.0 / 3.0)};
    case 1: return {Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)};
    case 2:
        return {Vec2(0, 0), Vec2(1, 0), Vec2(0, 1), Vec2(0.5, 0.5), Vec2(0, 0.5), Vec2(0.5, 0)};
    default: throw InvalidArgument("lagrange: unsupported order " + std::to_string(order));
    }
}

void values(int order, const Vec2& ref, std::span<double> out)
{
    const double l0 = 1.0 - ref.x() - ref.y();
    const double l1 = ref.x();
    const double l2 = ref.y();
    switch (order) {
    case 0: out[0] = 1.0; return;
    case 1:
        out[0] = l0;
        out[1] = l1;
        out[2] = l2;
        return;
    case 2:
        out[0] = l0 * (2.0 * l0 - 1.0);
        out[1] = l1 * (2.0 * l1 - 1.0);
        out[2] = l2 * (2.0 * l2 - 1.0);
        out[3] = 4.0 * l1 * l2;
        out[4] = 4.0 * l2 * l0;
        out[5] = 4.0 * l0 * l1;
        return;
    default: throw InvalidArgument("lagrange: unsupported order " + std::to_string(order));
    }
}

void gradients(int order, const Vec2& ref, std::span<Vec2> out)
{
    const double l0 = 1.0 - ref.x() - ref.y();
    const double l1 = ref.x();
    const double l2 = ref.y();
    const Vec2 g0(-1.0, -1.0), g1(1.0, 0.0), g2(0.0, 1.0);
    switch (order) {
    case 0: out[0] = Vec2::Zero(); return;
    case 1:
        out[0] = g0;
        out[1] = g1;
        out[2] = g2;
        return;
    case 2:
        out[0] = (4.0 * l0 - 1.0) * g0;
        out[1] = (4.0 * l1 - 1.0) * g1;
        out[2] = (4.0 * l2 - 1.0) * g2;
        out[3] = 4.0 * (l1 * g2 + l2 * g1);
        out[4] = 4.0 * (l2 * g0 + l0 * g2);
        out[5] = 4.0 * (l0 * g1 + l1 * g0);
        return;
    default: throw InvalidArgument("lagrange: unsupported order " + std::to_string(order));
    }
}

}  // namespace lagrange

CellGeometry cell_geometry(const TriMesh& mesh, int cell)
{
    const auto& vs = mesh.cell(cell);
    CellGeometry g;
    g.origin = mesh.vertex(vs[0]);
    g.jacobian.col(0) = mesh.vertex(vs[1]) - g.origin;
    g.jacobian.col(1) = mesh.vertex(vs[2]) - g.origin;
    g.det = g.jacobian.determinant();
    g.inverse_transpose = g.jacobian.inverse().transpose();
    return g;
}

FiniteSpace::FiniteSpace(std::shared_ptr<const TriMesh> mesh, SpaceKind kind, int order)
    : mesh_(std::move(mesh)), kind_(kind), order_(order), nloc_(lagrange::size(order))
{
    const TriMesh& m = *mesh_;
    const int ncells = m.num_cells();
    cell_nodes_.resize(static_cast<std::size_t>(ncells * nloc_));

    if (kind_ == SpaceKind::CgScalar) {
        const int nv = m.num_vertices();
        node_points_.assign(m.vertices().begin(), m.vertices().end());
        if (order_ == 2) {
            for (int e = 0; e < m.num_edges(); ++e) {
                const auto& ev = m.edge(e);
                node_points_.push_back(0.5 * (m.vertex(ev[0]) + m.vertex(ev[1])));
            }
        }
        for (int c = 0; c < ncells; ++c) {
            int* dst = cell_nodes_.data() + static_cast<std::ptrdiff_t>(c) * nloc_;
            for (int k = 0; k < 3; ++k) dst[k] = m.cell(c)[static_cast<std::size_t>(k)];
            if (order_ == 2) {
                for (int k = 0; k < 3; ++k) dst[3 + k] = nv + m.cell_edges(c)[static_cast<std::size_t>(k)];
            }
        }

        dof_region_.assign(node_points_.size(), std::nullopt);
        auto claim = [&](int dof, const RegionTag& tag) {
            auto& slot = dof_region_[static_cast<std::size_t>(dof)];
            if (!slot || (!slot->is_dirichlet() && tag.is_dirichlet())) slot = tag;
        };
        for (const auto& f : m.boundary_facets()) {
            claim(f.vertices[0], f.tag);
            claim(f.vertices[1], f.tag);
            if (order_ == 2) claim(nv + f.edge, f.tag);
        }
    } else {
        const auto ref_nodes = lagrange::nodes(order_);
        node_points_.reserve(static_cast<std::size_t>(ncells * nloc_));
        for (int c = 0; c < ncells; ++c) {
            const CellGeometry g = cell_geometry(m, c);
            for (int a = 0; a < nloc_; ++a) {
                cell_nodes_[static_cast<std::size_t>(c * nloc_ + a)] = c * nloc_ + a;
                node_points_.push_back(g.map(ref_nodes[static_cast<std::size_t>(a)]));
            }
        }
    }
}

std::shared_ptr<const FiniteSpace> FiniteSpace::cg_scalar(std::shared_ptr<const TriMesh> mesh, int order)
{
    if (!mesh) throw InvalidArgument("FiniteSpace::cg_scalar: null mesh");
    if (order < 1 || order > 2) {
        throw InvalidArgument("FiniteSpace::cg_scalar: order must be 1 or 2 (got " + std::to_string(order) + ")");
    }
    return std::shared_ptr<const FiniteSpace>(new FiniteSpace(std::move(mesh), SpaceKind::CgScalar, order));
}

std::shared_ptr<const FiniteSpace> FiniteSpace::dg_vector(std::shared_ptr<const TriMesh> mesh, int order)
{
    if (!mesh) throw InvalidArgument("FiniteSpace::dg_vector: null mesh");
    if (order < 0 || order > 1) {
        throw InvalidArgument("FiniteSpace::dg_vector: order must be 0 or 1 (got " + std::to_string(order) + ")");
    }
    return std::shared_ptr<const FiniteSpace>(new FiniteSpace(std::move(mesh), SpaceKind::DgVector, order));
}

std::vector<int> FiniteSpace::boundary_dofs(const RegionTag& tag) const
{
    std::vector<int> out;
    for (int d = 0; d < static_cast<int>(dof_region_.size()); ++d) {
        if (dof_region_[static_cast<std::size_t>(d)] == tag) out.push_back(d);
    }
    return out;
}

std::vector<int> FiniteSpace::dirichlet_dofs() const
{
    std::vector<int> out;
    for (int d = 0; d < static_cast<int>(dof_region_.size()); ++d) {
        const auto& r = dof_region_[static_cast<std::size_t>(d)];
        if (r && r->is_dirichlet()) out.push_back(d);
    }
    return out;
}

Field::Field(SpacePtr s) : space(std::move(s))
{
    if (!space) throw InvalidArgument("Field: null space");
    coeffs = Eigen::VectorXd::Zero(space->num_dofs());
}

Field::Field(SpacePtr s, Eigen::VectorXd c) : space(std::move(s)), coeffs(std::move(c))
{
    if (!space) throw InvalidArgument("Field: null space");
    if (coeffs.size() != space->num_dofs()) {
        throw InvalidArgument("Field: coefficient vector has length " + std::to_string(coeffs.size()) +
                              ", space has " + std::to_string(space->num_dofs()) + " dofs");
    }
}

BasisTable::BasisTable(int order_, const TriangleQuadrature& rule)
    : order(order_), nloc(lagrange::size(order_)), npoints(rule.size())
{
    values.resize(static_cast<std::size_t>(npoints * nloc));
    gradients.resize(static_cast<std::size_t>(npoints * nloc));
    for (int q = 0; q < npoints; ++q) {
        const Vec2& p = rule.points[static_cast<std::size_t>(q)];
        lagrange::values(order, p, std::span<double>(values).subspan(static_cast<std::size_t>(q * nloc), static_cast<std::size_t>(nloc)));
        lagrange::gradients(order, p, std::span<Vec2>(gradients).subspan(static_cast<std::size_t>(q * nloc), static_cast<std::size_t>(nloc)));
    }
}

namespace {

void require_kind(const Field& f, SpaceKind kind, const char* where)
{
    if (!f.space || f.space->kind() != kind) {
        throw InvalidArgument(std::string(where) + ": field lives in the wrong kind of space");
    }
}

// Polynomial order m of the discretization a space belongs to.
int discretization_order(const FiniteSpace& s)
{
    return s.kind() == SpaceKind::CgScalar ? s.order() : s.order() + 1;
}

int resolve_degree(int degree, const FiniteSpace& s)
{
    return degree >= 0 ? degree : error_quadrature_degree(discretization_order(s));
}

double finite_or_throw(double v, const Vec2& p)
{
    if (!std::isfinite(v)) {
        throw InvalidArgument("interpolate: non-finite value at (" + std::to_string(p.x()) + ", " +
                              std::to_string(p.y()) + ")");
    }
    return v;
}

// Reference gradient of a scalar field from nodal differences; the basis
// gradients sum to zero so subtracting the first nodal value is exact.
Vec2 reference_gradient_differenced(const Field& f, int cell, int q, const BasisTable& table)
{
    const auto nodes = f.space->cell_nodes(cell);
    const double base = f.coeffs[nodes[0]];
    Vec2 g = Vec2::Zero();
    for (int a = 1; a < table.nloc; ++a) g += (f.coeffs[nodes[static_cast<std::size_t>(a)]] - base) * table.gradient(q, a);
    return g;
}

}  // namespace

double eval_scalar(const Field& f, int cell, const Vec2& ref)
{
    require_kind(f, SpaceKind::CgScalar, "eval_scalar");
    double phi[6];
    const int nloc = f.space->nodes_per_cell();
    lagrange::values(f.space->order(), ref, std::span<double>(phi, static_cast<std::size_t>(nloc)));
    const auto nodes = f.space->cell_nodes(cell);
    double v = 0.0;
    for (int a = 0; a < nloc; ++a) v += f.coeffs[nodes[static_cast<std::size_t>(a)]] * phi[a];
    return v;
}

Vec2 eval_gradient(const Field& f, int cell, const Vec2& ref)
{
    require_kind(f, SpaceKind::CgScalar, "eval_gradient");
    Vec2 dphi[6];
    const int nloc = f.space->nodes_per_cell();
    lagrange::gradients(f.space->order(), ref, std::span<Vec2>(dphi, static_cast<std::size_t>(nloc)));
    const auto nodes = f.space->cell_nodes(cell);
    Vec2 g = Vec2::Zero();
    for (int a = 0; a < nloc; ++a) g += f.coeffs[nodes[static_cast<std::size_t>(a)]] * dphi[a];
    return cell_geometry(f.space->mesh(), cell).physical_gradient(g);
}

Vec2 eval_vector(const Field& f, int cell, const Vec2& ref)
{
    require_kind(f, SpaceKind::DgVector, "eval_vector");
    double phi[6];
    const int nloc = f.space->nodes_per_cell();
    lagrange::values(f.space->order(), ref, std::span<double>(phi, static_cast<std::size_t>(nloc)));
    const auto nodes = f.space->cell_nodes(cell);
    Vec2 v = Vec2::Zero();
    for (int a = 0; a < nloc; ++a) {
        const int node = nodes[static_cast<std::size_t>(a)];
        v += phi[a] * Vec2(f.coeffs[2 * node], f.coeffs[2 * node + 1]);
    }
    return v;
}

Field interpolate(const SpacePtr& space, const ScalarFunction& f)
{
    if (!space || space->kind() != SpaceKind::CgScalar) {
        throw InvalidArgument("interpolate: scalar functions interpolate into CG scalar spaces");
    }
    Field out(space);
    for (int n = 0; n < space->num_nodes(); ++n) {
        const Vec2& p = space->node_point(n);
        out.coeffs[n] = finite_or_throw(f(p), p);
    }
    return out;
}

Field interpolate(const SpacePtr& space, const VectorFunction& f)
{
    if (!space || space->kind() != SpaceKind::DgVector) {
        throw InvalidArgument("interpolate: vector functions interpolate into DG vector spaces");
    }
    Field out(space);
    for (int n = 0; n < space->num_nodes(); ++n) {
        const Vec2& p = space->node_point(n);
        const Vec2 v = f(p);
        out.coeffs[2 * n] = finite_or_throw(v.x(), p);
        out.coeffs[2 * n + 1] = finite_or_throw(v.y(), p);
    }
    return out;
}

Field gradient_field(const Field& c, const SpacePtr& dg)
{
    require_kind(c, SpaceKind::CgScalar, "gradient_field");
    if (!dg || dg->kind() != SpaceKind::DgVector || dg->order() != c.space->order() - 1 ||
        !dg->same_mesh(*c.space)) {
        throw InvalidArgument("gradient_field: target must be DG vector P^{m-1} on the same mesh");
    }
    const TriMesh& mesh = c.space->mesh();
    const int m = c.space->order();
    const int nloc = c.space->nodes_per_cell();
    const auto targets = lagrange::nodes(dg->order());
    Field out(dg);
    Vec2 dphi[6];
    for (int cell = 0; cell < mesh.num_cells(); ++cell) {
        const CellGeometry g = cell_geometry(mesh, cell);
        const auto cn = c.space->cell_nodes(cell);
        const auto dn = dg->cell_nodes(cell);
        for (std::size_t a = 0; a < targets.size(); ++a) {
            lagrange::gradients(m, targets[a], std::span<Vec2>(dphi, static_cast<std::size_t>(nloc)));
            Vec2 ref = Vec2::Zero();
            for (int b = 0; b < nloc; ++b) ref += c.coeffs[cn[static_cast<std::size_t>(b)]] * dphi[b];
            const Vec2 phys = g.physical_gradient(ref);
            out.coeffs[2 * dn[a]] = phys.x();
            out.coeffs[2 * dn[a] + 1] = phys.y();
        }
    }
    return out;
}

double l2_norm(const Field& f, int degree)
{
    if (f.space->kind() == SpaceKind::CgScalar) return l2_error(f, ScalarFunction([](const Vec2&) { return 0.0; }), degree);
    return l2_error(f, VectorFunction([](const Vec2&) { return Vec2::Zero(); }), degree);
}

double gradient_l2_norm(const Field& f, int degree)
{
    require_kind(f, SpaceKind::CgScalar, "gradient_l2_norm");
    const TriMesh& mesh = f.space->mesh();
    const TriangleQuadrature rule = triangle_quadrature(resolve_degree(degree, *f.space));
    const BasisTable table(f.space->order(), rule);
    double sum = 0.0;
    for (int cell = 0; cell < mesh.num_cells(); ++cell) {
        const CellGeometry g = cell_geometry(mesh, cell);
        for (int q = 0; q < rule.size(); ++q) {
            const Vec2 grad = g.physical_gradient(reference_gradient_differenced(f, cell, q, table));
            sum += rule.weights[static_cast<std::size_t>(q)] * std::abs(g.det) * grad.squaredNorm();
        }
    }
    return std::sqrt(sum);
}

double l2_error(const Field& f, const ScalarFunction& exact, int degree)
{
    require_kind(f, SpaceKind::CgScalar, "l2_error");
    const TriMesh& mesh = f.space->mesh();
    const TriangleQuadrature rule = triangle_quadrature(resolve_degree(degree, *f.space));
    const BasisTable table(f.space->order(), rule);
    double sum = 0.0;
    for (int cell = 0; cell < mesh.num_cells(); ++cell) {
        const CellGeometry g = cell_geometry(mesh, cell);
        const auto nodes = f.space->cell_nodes(cell);
        for (int q = 0; q < rule.size(); ++q) {
            double uh = 0.0;
            for (int a = 0; a < table.nloc; ++a) uh += f.coeffs[nodes[static_cast<std::size_t>(a)]] * table.value(q, a);
            const double diff = exact(g.map(rule.points[static_cast<std::size_t>(q)])) - uh;
            sum += rule.weights[static_cast<std::size_t>(q)] * std::abs(g.det) * diff * diff;
        }
    }
    return std::sqrt(sum);
}

double l2_error(const Field& f, const VectorFunction& exact, int degree)
{
    require_kind(f, SpaceKind::DgVector, "l2_error");
    const TriMesh& mesh = f.space->mesh();
    const TriangleQuadrature rule = triangle_quadrature(resolve_degree(degree, *f.space));
    const BasisTable table(f.space->order(), rule);
    double sum = 0.0;
    for (int cell = 0; cell < mesh.num_cells(); ++cell) {
        const CellGeometry g = cell_geometry(mesh, cell);
        const auto nodes = f.space->cell_nodes(cell);
        for (int q = 0; q < rule.size(); ++q) {
            Vec2 vh = Vec2::Zero();
            for (int a = 0; a < table.nloc; ++a) {
                const int n = nodes[static_cast<std::size_t>(a)];
                vh += table.value(q, a) * Vec2(f.coeffs[2 * n], f.coeffs[2 * n + 1]);
            }
            const Vec2 diff = exact(g.map(rule.points[static_cast<std::size_t>(q)])) - vh;
            sum += rule.weights[static_cast<std::size_t>(q)] * std::abs(g.det) * diff.squaredNorm();
        }
    }
    return std::sqrt(sum);
}

double gradient_l2_error(const Field& f, const VectorFunction& exact_gradient, int degree)
{
    require_kind(f, SpaceKind::CgScalar, "gradient_l2_error");
    const TriMesh& mesh = f.space->mesh();
    const TriangleQuadrature rule = triangle_quadrature(resolve_degree(degree, *f.space));
    const BasisTable table(f.space->order(), rule);
    double sum = 0.0;
    for (int cell = 0; cell < mesh.num_cells(); ++cell) {
        const CellGeometry g = cell_geometry(mesh, cell);
        const auto nodes = f.space->cell_nodes(cell);
        for (int q = 0; q < rule.size(); ++q) {
            Vec2 ref = Vec2::Zero();
            for (int a = 0; a < table.nloc; ++a) ref += f.coeffs[nodes[static_cast<std::size_t>(a)]] * table.gradient(q, a);
            const Vec2 diff = exact_gradient(g.map(rule.points[static_cast<std::size_t>(q)])) - g.physical_gradient(ref);
            sum += rule.weights[static_cast<std::size_t>(q)] * std::abs(g.det) * diff.squaredNorm();
        }
    }
    return std::sqrt(sum);
}

ErrorNorms error_norms(std::span<const Field> concentrations, std::span<const Field> velocities,
                       std::span<const ExactSpecies> exact, int degree)
{
    if (concentrations.size() != exact.size() || velocities.size() != exact.size()) {
        throw InvalidArgument("error_norms: species count mismatch");
    }
    ErrorNorms e;
    for (std::size_t i = 0; i < exact.size(); ++i) {
        const double a = l2_error(concentrations[i], exact[i].c, degree);
        const double b = gradient_l2_error(concentrations[i], exact[i].grad_c, degree);
        const double c = l2_error(velocities[i], exact[i].v, degree);
        e.e1 += a * a;
        e.e2 += b * b;
        e.e3 += c * c;
    }
    e.e1 = std::sqrt(e.e1);
    e.e2 = std::sqrt(e.e2);
    e.e3 = std::sqrt(e.e3);
    return e;
}

double mass_flux_error(std::span<const Field> concentrations, std::span<const Field> velocities,
                       const Eigen::VectorXd& molar_mass, const VectorFunction& u, int degree)
{
    const auto n = concentrations.size();
    if (n == 0 || velocities.size() != n || static_cast<std::size_t>(molar_mass.size()) != n) {
        throw InvalidArgument("mass_flux_error: species count mismatch");
    }
    const FiniteSpace& cs = *concentrations[0].space;
    const FiniteSpace& vs = *velocities[0].space;
    const TriMesh& mesh = cs.mesh();
    const TriangleQuadrature rule = triangle_quadrature(resolve_degree(degree, cs));
    const BasisTable ctab(cs.order(), rule);
    const BasisTable vtab(vs.order(), rule);
    double sum = 0.0;
    for (int cell = 0; cell < mesh.num_cells(); ++cell) {
        const CellGeometry g = cell_geometry(mesh, cell);
        const auto cn = cs.cell_nodes(cell);
        const auto vn = vs.cell_nodes(cell);
        for (int q = 0; q < rule.size(); ++q) {
            Vec2 flux = Vec2::Zero();
            for (std::size_t i = 0; i < n; ++i) {
                double ci = 0.0;
                for (int a = 0; a < ctab.nloc; ++a) ci += concentrations[i].coeffs[cn[static_cast<std::size_t>(a)]] * ctab.value(q, a);
                Vec2 vi = Vec2::Zero();
                for (int a = 0; a < vtab.nloc; ++a) {
                    const int node = vn[static_cast<std::size_t>(a)];
                    vi += vtab.value(q, a) * Vec2(velocities[i].coeffs[2 * node], velocities[i].coeffs[2 * node + 1]);
                }
                flux += molar_mass[static_cast<Eigen::Index>(i)] * ci * vi;
            }
            const Vec2 diff = flux - u(g.map(rule.points[static_cast<std::size_t>(q)]));
            sum += rule.weights[static_cast<std::size_t>(q)] * std::abs(g.det) * diff.squaredNorm();
        }
    }
    return std::sqrt(sum);
}

}  // namespace smd
