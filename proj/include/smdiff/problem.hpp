#pragma once

#include "smdiff/fespace.hpp"
#include "smdiff/mesh.hpp"
#include "smdiff/transport.hpp"

#include <map>
#include <memory>
#include <vector>

namespace smd {

/// Concentration space X_h (CG P^m) and velocity space Q_h (DG vector P^{m-1}) on one mesh.
struct MixedSpaces {
    std::shared_ptr<const TriMesh> mesh;
    SpacePtr concentration;
    SpacePtr velocity;
    int order = 1;

    static MixedSpaces make(std::shared_ptr<const TriMesh> mesh, int order);
};

/// Data of a steady Stefan-Maxwell diffusion problem.
///
/// Boundary functions are keyed by the region id of the matching DIRICHLET /
/// NEUMANN tag and hold one function per species. Empty reactions mean r_i = 0,
/// an empty mass flux means u = 0.
struct ProblemData {
    TransportCoefficients coeffs;
    std::map<int, std::vector<ScalarFunction>> dirichlet;
    std::map<int, std::vector<ScalarFunction>> neumann;
    std::vector<ScalarFunction> reactions;
    VectorFunction mass_flux;
    /// Analytic divergence of the mass flux; central differences are used when empty.
    ScalarFunction mass_flux_divergence;
    double total_concentration = 1.0;

    int species() const { return coeffs.n; }
    Vec2 u(const Vec2& x) const { return mass_flux ? mass_flux(x) : Vec2::Zero(); }
    double reaction(int i, const Vec2& x) const;
    double divergence_u(const Vec2& x) const;
};

struct ConsistencyReport {
    double dirichlet_sum = 0.0;  // max |sum_i f_i - C_T| on Dirichlet facets
    double neumann_flux = 0.0;   // max |sum_i M_i g_i - u.n| on Neumann facets
    double reaction_sum = 0.0;   // max |sum_i M_i r_i - div u| in cells
    bool ok = true;
};

inline constexpr double kDirichletConsistencyTol = 1e-12;
inline constexpr double kNeumannConsistencyTol = 1e-12;
inline constexpr double kReactionConsistencyTol = 1e-10;

/// Checks the compatibility conditions at facet and cell quadrature points.
/// With `strict` a violation throws ConsistencyError, otherwise a warning goes to std::clog.
/// Also verifies that every boundary region tag has data for every species.
ConsistencyReport check_consistency(const MixedSpaces& spaces, const ProblemData& data, bool strict);

}  // namespace smd
