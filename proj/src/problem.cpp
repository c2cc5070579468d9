#include "smdiff/problem.hpp"

#include "smdiff/errors.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <sstream>

namespace smd {

MixedSpaces MixedSpaces::make(std::shared_ptr<const TriMesh> mesh, int order)
{
    if (order < 1 || order > 2) throw InvalidArgument("MixedSpaces: order m must be 1 or 2");
    MixedSpaces s;
    s.mesh = mesh;
    s.order = order;
    s.concentration = FiniteSpace::cg_scalar(mesh, order);
    s.velocity = FiniteSpace::dg_vector(mesh, order - 1);
    return s;
}

double ProblemData::reaction(int i, const Vec2& x) const
{
    if (reactions.empty()) return 0.0;
    const auto& r = reactions[static_cast<std::size_t>(i)];
    return r ? r(x) : 0.0;
}

double ProblemData::divergence_u(const Vec2& x) const
{
    if (!mass_flux) return 0.0;
    if (mass_flux_divergence) return mass_flux_divergence(x);
    const double h = 1e-5;
    const double dx = (mass_flux(x + Vec2(h, 0)).x() - mass_flux(x - Vec2(h, 0)).x()) / (2 * h);
    const double dy = (mass_flux(x + Vec2(0, h)).y() - mass_flux(x - Vec2(0, h)).y()) / (2 * h);
    return dx + dy;
}

ConsistencyReport check_consistency(const MixedSpaces& spaces, const ProblemData& data, bool strict)
{
    const TriMesh& mesh = *spaces.mesh;
    const int n = data.species();
    const int m = spaces.order;

    for (const auto& f : mesh.boundary_facets()) {
        const auto& table = f.tag.is_dirichlet() ? data.dirichlet : data.neumann;
        auto it = table.find(f.tag.id);
        if (f.tag.is_dirichlet() && it == table.end()) {
            throw ConsistencyError("no Dirichlet data for boundary region " + f.tag.str());
        }
        if (it != table.end() && static_cast<int>(it->second.size()) != n) {
            throw ConsistencyError("boundary region " + f.tag.str() + " needs one function per species");
        }
    }
    if (!data.reactions.empty() && static_cast<int>(data.reactions.size()) != n) {
        throw ConsistencyError("reactions must be empty or hold one function per species");
    }

    ConsistencyReport rep;
    const LineQuadrature line = line_quadrature(2 * m + 2);
    for (int fi = 0; fi < static_cast<int>(mesh.boundary_facets().size()); ++fi) {
        const auto& f = mesh.boundary_facets()[static_cast<std::size_t>(fi)];
        const Vec2 a = mesh.vertex(f.vertices[0]);
        const Vec2 b = mesh.vertex(f.vertices[1]);
        const Vec2 normal = mesh.facet_normal(fi);
        for (double s : line.points) {
            const Vec2 x = a + s * (b - a);
            if (f.tag.is_dirichlet()) {
                const auto& fs = data.dirichlet.at(f.tag.id);
                double sum = 0.0;
                for (int i = 0; i < n; ++i) sum += fs[static_cast<std::size_t>(i)](x);
                rep.dirichlet_sum = std::max(rep.dirichlet_sum, std::abs(sum - data.total_concentration));
            } else {
                auto it = data.neumann.find(f.tag.id);
                double sum = 0.0;
                if (it != data.neumann.end()) {
                    for (int i = 0; i < n; ++i) sum += data.coeffs.molar_mass[i] * it->second[static_cast<std::size_t>(i)](x);
                }
                rep.neumann_flux = std::max(rep.neumann_flux, std::abs(sum - data.u(x).dot(normal)));
            }
        }
    }

    const TriangleQuadrature rule = triangle_quadrature(3 * m + 2);
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const CellGeometry g = cell_geometry(mesh, c);
        for (const auto& p : rule.points) {
            const Vec2 x = g.map(p);
            double sum = 0.0;
            for (int i = 0; i < n; ++i) sum += data.coeffs.molar_mass[i] * data.reaction(i, x);
            rep.reaction_sum = std::max(rep.reaction_sum, std::abs(sum - data.divergence_u(x)));
        }
    }

    rep.ok = rep.dirichlet_sum <= kDirichletConsistencyTol && rep.neumann_flux <= kNeumannConsistencyTol &&
             rep.reaction_sum <= kReactionConsistencyTol;
    if (!rep.ok) {
        std::ostringstream msg;
        msg << "inconsistent problem data: max|sum f_i - C_T| = " << rep.dirichlet_sum
            << ", max|sum M_i g_i - u.n| = " << rep.neumann_flux << ", max|sum M_i r_i - div u| = " << rep.reaction_sum;
        if (strict) throw ConsistencyError(msg.str());
        std::clog << "warning: " << msg.str() << '\n';
    }
    return rep;
}

}  // namespace smd
