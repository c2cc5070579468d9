#pragma once

#include "smdiff/mesh.hpp"
#include "smdiff/quadrature.hpp"

#include <Eigen/Core>

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace smd {

using ScalarFunction = std::function<double(const Vec2&)>;
using VectorFunction = std::function<Vec2(const Vec2&)>;

/// Lagrange bases of order 0, 1, 2 on the reference triangle.
///
/// Node ordering: P0 is the centroid; P1 the vertices; P2 the vertices followed
/// by the midpoints of the local edges (edge k opposite vertex k).
namespace lagrange {

int size(int order);
std::vector<Vec2> nodes(int order);
void values(int order, const Vec2& ref, std::span<double> out);
void gradients(int order, const Vec2& ref, std::span<Vec2> out);

}  // namespace lagrange

/// Affine map from the reference triangle onto a mesh cell.
struct CellGeometry {
    Vec2 origin;
    Eigen::Matrix2d jacobian;
    Eigen::Matrix2d inverse_transpose;
    double det = 0.0;

    Vec2 map(const Vec2& ref) const { return origin + jacobian * ref; }
    Vec2 physical_gradient(const Vec2& ref_grad) const { return inverse_transpose * ref_grad; }
};

CellGeometry cell_geometry(const TriMesh& mesh, int cell);

enum class SpaceKind { CgScalar, DgVector };

/// Finite element space on a TriMesh.
///
/// CgScalar: continuous Lagrange P^m, m in {1, 2}. One dof per node; nodes are the
/// mesh vertices followed (for m = 2) by the edge midpoints.
///
/// DgVector: discontinuous Lagrange P^k vector fields, k in {0, 1}. Nodes are
/// cell-local (node = cell * nloc + a) and each node carries two dofs,
/// dof = 2 * node + component.
class FiniteSpace {
public:
    static std::shared_ptr<const FiniteSpace> cg_scalar(std::shared_ptr<const TriMesh> mesh, int order);
    static std::shared_ptr<const FiniteSpace> dg_vector(std::shared_ptr<const TriMesh> mesh, int order);

    SpaceKind kind() const { return kind_; }
    int order() const { return order_; }
    const TriMesh& mesh() const { return *mesh_; }
    const std::shared_ptr<const TriMesh>& mesh_ptr() const { return mesh_; }

    int components() const { return kind_ == SpaceKind::DgVector ? 2 : 1; }
    int num_nodes() const { return static_cast<int>(node_points_.size()); }
    int num_dofs() const { return num_nodes() * components(); }
    int nodes_per_cell() const { return nloc_; }

    std::span<const int> cell_nodes(int cell) const
    {
        return {cell_nodes_.data() + static_cast<std::ptrdiff_t>(cell) * nloc_, static_cast<std::size_t>(nloc_)};
    }
    const Vec2& node_point(int node) const { return node_points_[static_cast<std::size_t>(node)]; }

    /// Boundary region of each CG dof (nullopt for interior dofs). A dof touching
    /// both a Dirichlet and a Neumann facet belongs to the Dirichlet region; among
    /// several Dirichlet facets the first in facet order wins.
    const std::optional<RegionTag>& dof_region(int dof) const { return dof_region_[static_cast<std::size_t>(dof)]; }

    std::vector<int> boundary_dofs(const RegionTag& tag) const;
    std::vector<int> dirichlet_dofs() const;

    bool same_mesh(const FiniteSpace& other) const { return mesh_.get() == other.mesh_.get(); }

private:
    FiniteSpace(std::shared_ptr<const TriMesh> mesh, SpaceKind kind, int order);

    std::shared_ptr<const TriMesh> mesh_;
    SpaceKind kind_;
    int order_;
    int nloc_;
    std::vector<int> cell_nodes_;
    std::vector<Vec2> node_points_;
    std::vector<std::optional<RegionTag>> dof_region_;
};

using SpacePtr = std::shared_ptr<const FiniteSpace>;

/// Coefficient vector on a FiniteSpace.
struct Field {
    SpacePtr space;
    Eigen::VectorXd coeffs;

    Field() = default;
    explicit Field(SpacePtr s);
    Field(SpacePtr s, Eigen::VectorXd c);
};

/// Basis values and reference gradients tabulated at the points of a quadrature rule.
struct BasisTable {
    int order = 0;
    int nloc = 0;
    int npoints = 0;
    std::vector<double> values;   // [q * nloc + a]
    std::vector<Vec2> gradients;  // [q * nloc + a], reference coordinates

    BasisTable(int order, const TriangleQuadrature& rule);
    double value(int q, int a) const { return values[static_cast<std::size_t>(q * nloc + a)]; }
    const Vec2& gradient(int q, int a) const { return gradients[static_cast<std::size_t>(q * nloc + a)]; }
};

double eval_scalar(const Field& f, int cell, const Vec2& ref);
Vec2 eval_gradient(const Field& f, int cell, const Vec2& ref);
Vec2 eval_vector(const Field& f, int cell, const Vec2& ref);

/// Nodal interpolant of a scalar function into a CG space.
Field interpolate(const SpacePtr& space, const ScalarFunction& f);
/// Nodal interpolant of a vector function into a DG vector space.
Field interpolate(const SpacePtr& space, const VectorFunction& f);

/// Exact representation of the gradient of a CG P^m field in DG vector P^{m-1}.
Field gradient_field(const Field& c, const SpacePtr& dg);

/// Default quadrature degree for error norms of order-m discretizations.
inline int error_quadrature_degree(int m) { return 2 * m + 5; }

double l2_norm(const Field& f, int degree = -1);
/// L2 norm of the gradient of a CG field. Gradients are formed from nodal
/// differences so that nearly constant fields do not suffer cancellation.
double gradient_l2_norm(const Field& f, int degree = -1);

double l2_error(const Field& f, const ScalarFunction& exact, int degree = -1);
double l2_error(const Field& f, const VectorFunction& exact, int degree = -1);
double gradient_l2_error(const Field& f, const VectorFunction& exact_gradient, int degree = -1);

/// Exact per-species solution used by `error_norms`.
struct ExactSpecies {
    ScalarFunction c;
    VectorFunction grad_c;
    VectorFunction v;
};

struct ErrorNorms {
    double e1 = 0.0;  // concentrations, L2
    double e2 = 0.0;  // concentration gradients, L2
    double e3 = 0.0;  // velocities, L2
};

ErrorNorms error_norms(std::span<const Field> concentrations, std::span<const Field> velocities,
                       std::span<const ExactSpecies> exact, int degree = -1);

/// E4 = || sum_j M_j c_j v_j - u ||_L2 for discrete concentrations and velocities.
double mass_flux_error(std::span<const Field> concentrations, std::span<const Field> velocities,
                       const Eigen::VectorXd& molar_mass, const VectorFunction& u, int degree = -1);

}  // namespace smd
