#pragma once

#include <Eigen/Core>

#include <array>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace smd {

using Vec2 = Eigen::Vector2d;

/// Direction of the diagonal that splits each structured square into two triangles.
/// Right runs from the lower-left to the upper-right corner, Left from lower-right to upper-left.
enum class Diagonal { Left, Right };

enum class BoundaryKind { Dirichlet, Neumann };

struct RegionTag {
    BoundaryKind kind = BoundaryKind::Dirichlet;
    int id = 0;

    static RegionTag dirichlet(int id) { return {BoundaryKind::Dirichlet, id}; }
    static RegionTag neumann(int id) { return {BoundaryKind::Neumann, id}; }

    bool is_dirichlet() const { return kind == BoundaryKind::Dirichlet; }
    std::string str() const;

    friend bool operator==(const RegionTag&, const RegionTag&) = default;
};

struct BoundaryFacet {
    std::array<int, 2> vertices;  // counter-clockwise with respect to `cell`
    int cell = -1;
    int local_edge = -1;          // local edge k is opposite local vertex k
    int edge = -1;
    RegionTag tag;
};

struct BoundingBox {
    Vec2 lower;
    Vec2 upper;
    double area() const { return (upper - lower).prod(); }
};

/// Conforming triangulation of a polygonal 2D domain with tagged boundary facets.
///
/// Cells are stored counter-clockwise. Edges are numbered in order of first
/// appearance while sweeping cells; local edge k of a cell joins its vertices
/// k+1 and k+2 (mod 3). Immutable once constructed, apart from retagging through
/// `tag_boundary`, which returns a new mesh.
class TriMesh {
public:
    /// Builds topology from raw arrays. Every boundary facet starts tagged DIRICHLET(0).
    TriMesh(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> cells);

    int num_vertices() const { return static_cast<int>(vertices_.size()); }
    int num_cells() const { return static_cast<int>(cells_.size()); }
    int num_edges() const { return static_cast<int>(edges_.size()); }

    const Vec2& vertex(int v) const { return vertices_[static_cast<std::size_t>(v)]; }
    const std::array<int, 3>& cell(int c) const { return cells_[static_cast<std::size_t>(c)]; }
    const std::array<int, 3>& cell_edges(int c) const { return cell_edges_[static_cast<std::size_t>(c)]; }
    const std::array<int, 2>& edge(int e) const { return edges_[static_cast<std::size_t>(e)]; }
    /// Cells adjacent to edge `e`; the second entry is -1 on the boundary.
    const std::array<int, 2>& edge_cells(int e) const { return edge_cells_[static_cast<std::size_t>(e)]; }

    std::span<const Vec2> vertices() const { return vertices_; }
    std::span<const std::array<int, 3>> cells() const { return cells_; }
    std::span<const BoundaryFacet> boundary_facets() const { return facets_; }

    double signed_area(int c) const;
    double facet_length(int f) const;
    Vec2 facet_midpoint(int f) const;
    /// Outward unit normal of boundary facet `f`.
    Vec2 facet_normal(int f) const;

    BoundingBox bounding_box() const;

    /// Copy with boundary tags replaced; `tags` is indexed like `boundary_facets()`.
    TriMesh with_tags(std::span<const RegionTag> tags) const;

private:
    std::vector<Vec2> vertices_;
    std::vector<std::array<int, 3>> cells_;
    std::vector<std::array<int, 3>> cell_edges_;
    std::vector<std::array<int, 2>> edges_;
    std::vector<std::array<int, 2>> edge_cells_;
    std::vector<BoundaryFacet> facets_;
};

/// Structured triangulation of [x0,x1]x[y0,y1] with nx*ny squares, each split in two.
TriMesh build_rectangle(double x0, double y0, double x1, double y1, int nx, int ny,
                        Diagonal diag = Diagonal::Right);

/// N x N structured triangulation of the unit square.
TriMesh build_unit_square(int n, Diagonal diag = Diagonal::Right);

/// Longest cell edge.
double mesh_diameter(const TriMesh& mesh);

using FacetPredicate = std::function<bool(const Vec2& midpoint)>;

struct TagRule {
    FacetPredicate predicate;
    RegionTag tag;
};

/// Retags every boundary facet with the first rule whose predicate accepts the
/// facet midpoint. Throws InvalidArgument if some facet matches no rule.
TriMesh tag_boundary(const TriMesh& mesh, std::span<const TagRule> rules);

enum class Side { Left, Right, Bottom, Top };

/// Predicate selecting facets lying on one side of the mesh bounding box.
FacetPredicate on_side(const TriMesh& mesh, Side side);

/// Predicate accepting every facet.
FacetPredicate everywhere();

}  // namespace smd
