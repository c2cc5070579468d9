#include "smdiff/mesh.hpp"

#include "smdiff/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

namespace smd {

std::string RegionTag::str() const
{
    return (is_dirichlet() ? "DIRICHLET(" : "NEUMANN(") + std::to_string(id) + ")";
}

TriMesh::TriMesh(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> cells)
    : vertices_(std::move(vertices)), cells_(std::move(cells))
{
    const int nv = num_vertices();
    for (int c = 0; c < num_cells(); ++c) {
        for (int v : cell(c)) {
            if (v < 0 || v >= nv) {
                throw InvalidArgument("TriMesh: cell " + std::to_string(c) + " references vertex " +
                                      std::to_string(v) + " out of range");
            }
        }
        if (!(signed_area(c) > 0.0)) {
            throw InvalidArgument("TriMesh: cell " + std::to_string(c) +
                                  " is not counter-clockwise (non-positive signed area)");
        }
    }

    std::map<std::pair<int, int>, int> edge_ids;
    cell_edges_.resize(cells_.size());
    for (int c = 0; c < num_cells(); ++c) {
        const auto& vs = cell(c);
        for (int k = 0; k < 3; ++k) {
            const int a = vs[static_cast<std::size_t>((k + 1) % 3)];
            const int b = vs[static_cast<std::size_t>((k + 2) % 3)];
            const auto key = std::minmax(a, b);
            auto [it, inserted] = edge_ids.try_emplace({key.first, key.second}, num_edges());
            if (inserted) {
                edges_.push_back({key.first, key.second});
                edge_cells_.push_back({c, -1});
            } else {
                auto& adj = edge_cells_[static_cast<std::size_t>(it->second)];
                if (adj[1] != -1) {
                    throw InvalidArgument("TriMesh: edge shared by more than two cells");
                }
                adj[1] = c;
            }
            cell_edges_[static_cast<std::size_t>(c)][static_cast<std::size_t>(k)] = it->second;
        }
    }

    for (int e = 0; e < num_edges(); ++e) {
        const auto& adj = edge_cells(e);
        if (adj[1] != -1) continue;
        const int c = adj[0];
        const auto& ce = cell_edges(c);
        const int k = static_cast<int>(std::find(ce.begin(), ce.end(), e) - ce.begin());
        const auto& vs = cell(c);
        BoundaryFacet f;
        f.vertices = {vs[static_cast<std::size_t>((k + 1) % 3)], vs[static_cast<std::size_t>((k + 2) % 3)]};
        f.cell = c;
        f.local_edge = k;
        f.edge = e;
        f.tag = RegionTag::dirichlet(0);
        facets_.push_back(f);
    }
}

double TriMesh::signed_area(int c) const
{
    const auto& vs = cell(c);
    const Vec2 a = vertex(vs[1]) - vertex(vs[0]);
    const Vec2 b = vertex(vs[2]) - vertex(vs[0]);
    return 0.5 * (a.x() * b.y() - a.y() * b.x());
}

double TriMesh::facet_length(int f) const
{
    const auto& fv = facets_[static_cast<std::size_t>(f)].vertices;
    return (vertex(fv[1]) - vertex(fv[0])).norm();
}

Vec2 TriMesh::facet_midpoint(int f) const
{
    const auto& fv = facets_[static_cast<std::size_t>(f)].vertices;
    return 0.5 * (vertex(fv[0]) + vertex(fv[1]));
}

Vec2 TriMesh::facet_normal(int f) const
{
    // Facet vertices run counter-clockwise around the owning cell, so the
    // outward normal is the tangent rotated clockwise.
    const auto& fv = facets_[static_cast<std::size_t>(f)].vertices;
    const Vec2 t = vertex(fv[1]) - vertex(fv[0]);
    return Vec2(t.y(), -t.x()) / t.norm();
}

BoundingBox TriMesh::bounding_box() const
{
    BoundingBox box{vertices_.front(), vertices_.front()};
    for (const auto& p : vertices_) {
        box.lower = box.lower.cwiseMin(p);
        box.upper = box.upper.cwiseMax(p);
    }
    return box;
}

TriMesh TriMesh::with_tags(std::span<const RegionTag> tags) const
{
    if (tags.size() != facets_.size()) {
        throw InvalidArgument("TriMesh::with_tags: expected one tag per boundary facet");
    }
    TriMesh out = *this;
    for (std::size_t f = 0; f < tags.size(); ++f) out.facets_[f].tag = tags[f];
    return out;
}

TriMesh build_rectangle(double x0, double y0, double x1, double y1, int nx, int ny, Diagonal diag)
{
    if (nx < 1 || ny < 1) {
        throw InvalidArgument("build_rectangle: cell counts must be positive (got " +
                              std::to_string(nx) + "x" + std::to_string(ny) + ")");
    }
    if (!(x1 > x0) || !(y1 > y0)) {
        throw InvalidArgument("build_rectangle: degenerate extent");
    }

    std::vector<Vec2> vertices;
    vertices.reserve(static_cast<std::size_t>((nx + 1) * (ny + 1)));
    for (int j = 0; j <= ny; ++j) {
        // Interpolating from both ends keeps the outermost coordinates exact.
        const double ty = static_cast<double>(j) / ny;
        const double y = (j == ny) ? y1 : y0 + ty * (y1 - y0);
        for (int i = 0; i <= nx; ++i) {
            const double tx = static_cast<double>(i) / nx;
            const double x = (i == nx) ? x1 : x0 + tx * (x1 - x0);
            vertices.emplace_back(x, y);
        }
    }

    auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
    std::vector<std::array<int, 3>> cells;
    cells.reserve(static_cast<std::size_t>(2 * nx * ny));
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const int v00 = id(i, j), v10 = id(i + 1, j), v01 = id(i, j + 1), v11 = id(i + 1, j + 1);
            if (diag == Diagonal::Right) {
                cells.push_back({v00, v10, v11});
                cells.push_back({v00, v11, v01});
            } else {
                cells.push_back({v00, v10, v01});
                cells.push_back({v10, v11, v01});
            }
        }
    }
    return TriMesh(std::move(vertices), std::move(cells));
}

TriMesh build_unit_square(int n, Diagonal diag)
{
    if (n < 1) throw InvalidArgument("build_unit_square: N must be >= 1");
    return build_rectangle(0.0, 0.0, 1.0, 1.0, n, n, diag);
}

double mesh_diameter(const TriMesh& mesh)
{
    double h = 0.0;
    for (int e = 0; e < mesh.num_edges(); ++e) {
        const auto& ev = mesh.edge(e);
        h = std::max(h, (mesh.vertex(ev[1]) - mesh.vertex(ev[0])).norm());
    }
    return h;
}

TriMesh tag_boundary(const TriMesh& mesh, std::span<const TagRule> rules)
{
    const auto facets = mesh.boundary_facets();
    std::vector<RegionTag> tags(facets.size());
    for (std::size_t f = 0; f < facets.size(); ++f) {
        const Vec2 mid = mesh.facet_midpoint(static_cast<int>(f));
        auto rule = std::find_if(rules.begin(), rules.end(),
                                 [&](const TagRule& r) { return r.predicate(mid); });
        if (rule == rules.end()) {
            throw InvalidArgument("tag_boundary: boundary facet with midpoint (" + std::to_string(mid.x()) +
                                  ", " + std::to_string(mid.y()) + ") matches no rule");
        }
        tags[f] = rule->tag;
    }
    return mesh.with_tags(tags);
}

FacetPredicate on_side(const TriMesh& mesh, Side side)
{
    const BoundingBox box = mesh.bounding_box();
    const double tol = 1e-12 * std::max(1.0, (box.upper - box.lower).maxCoeff());
    switch (side) {
    case Side::Left: return [x = box.lower.x(), tol](const Vec2& p) { return std::abs(p.x() - x) <= tol; };
    case Side::Right: return [x = box.upper.x(), tol](const Vec2& p) { return std::abs(p.x() - x) <= tol; };
    case Side::Bottom: return [y = box.lower.y(), tol](const Vec2& p) { return std::abs(p.y() - y) <= tol; };
    case Side::Top: return [y = box.upper.y(), tol](const Vec2& p) { return std::abs(p.y() - y) <= tol; };
    }
    return {};
}

FacetPredicate everywhere()
{
    return [](const Vec2&) { return true; };
}

}  // namespace smd
