#pragma once

#include "smdiff/fespace.hpp"
#include "smdiff/problem.hpp"

#include <Eigen/SparseCore>

#include <span>
#include <string>
#include <vector>

namespace smd {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Linearized saddle-point system for one Picard step.
///
/// Velocity unknowns are ordered species-major, index i * velocity_dofs + d.
/// Concentration unknowns are the free (non-Dirichlet) CG dofs, also species-major,
/// index i * free_dofs.size() + k; they form the correction on top of `lifting`.
struct SaddleSystem {
    int species = 0;
    int velocity_dofs = 0;
    std::vector<int> free_dofs;   // CG dof of each free index
    std::vector<int> free_index;  // free index of each CG dof, -1 on Dirichlet dofs

    SparseMatrix a;   // (n Q_h) x (n Q_h)
    SparseMatrix b;   // (n Q_h) x (n X_0), b(tau, w) = (tau, grad w)
    SparseMatrix bc;  // (n X_0) x (n Q_h), b_c(v, w) = (c_i v_i, grad w_i)
    Eigen::VectorXd rhs_velocity;
    Eigen::VectorXd rhs_concentration;
    std::vector<Field> lifting;

    int num_free() const { return static_cast<int>(free_dofs.size()); }
    int velocity_size() const { return species * velocity_dofs; }
    int concentration_size() const { return species * num_free(); }
    int size() const { return velocity_size() + concentration_size(); }

    SparseMatrix block_operator() const;
    Eigen::VectorXd rhs() const;
};

struct AssemblyOptions {
    /// Rejects iterates whose augmented transport matrix is not numerically
    /// positive definite at some quadrature point (e.g. gamma = 0).
    bool require_definite = true;
};

/// Quadrature degree used for the bilinear forms of an order-m discretization.
inline int assembly_quadrature_degree(int m) { return 3 * m + 2; }
/// Quadrature degree used for Neumann facet integrals.
inline int facet_quadrature_degree(int m) { return 2 * m + 2; }

/// Assembles the linearized system around the concentration iterate `c_k`.
/// Throws PositivityError if some c_k is below kappa_min at a quadrature point.
SaddleSystem assemble(const MixedSpaces& spaces, const ProblemData& data, std::span<const Field> c_k,
                      std::span<const Field> lifting, const AssemblyOptions& options = {});

/// Per-species CG fields that interpolate the Dirichlet data at Dirichlet dofs and
/// are extended inside by inverse-distance (Shepard) weighting, so the species sum
/// equals C_T at every dof. Throws ConsistencyError if the boundary data do not sum to C_T.
std::vector<Field> apply_dirichlet_lifting(const ProblemData& data, const SpacePtr& space);

/// Combines a lifting with a free-dof correction vector (species-major).
std::vector<Field> combine_with_lifting(const SaddleSystem& system, const Eigen::VectorXd& correction);

/// Splits a velocity vector (species-major) into per-species DG fields.
std::vector<Field> split_velocities(const SaddleSystem& system, const SpacePtr& velocity_space,
                                    const Eigen::VectorXd& velocities);

/// Writes A, B, B_c and the full operator as Matrix Market files <prefix>_{A,B,Bc,K}.mtx.
void dump_matrix_market(const SaddleSystem& system, const std::string& prefix);

}  // namespace smd
