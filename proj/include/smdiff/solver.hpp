#pragma once

#include "smdiff/errors.hpp"
#include "smdiff/system.hpp"

#include <Eigen/SparseCore>

#include <span>
#include <string>
#include <vector>

namespace smd {

struct LinearSolution {
    Eigen::VectorXd velocities;   // species-major, size n * dim Q_h
    Eigen::VectorXd correction;   // species-major free CG dofs
    double residual = 0.0;        // ||K x - b||_2
    double relative_residual = 0.0;  // residual / (||K||_F ||x|| + ||b||)
};

/// Relative residual bound enforced by `solve_linear`.
inline constexpr double kLinearResidualTol = 1e-10;

/// Sparse LU (COLAMD ordering, partial pivoting) of the full block operator.
/// Throws SolverError on a singular factorization or when the residual bound fails.
LinearSolution solve_linear(const SaddleSystem& system);

struct PicardSettings {
    double epsilon = 1e-13;
    int max_iterations = 50;
    double gamma = 1.0;
    double kappa_min = 1e-10;
    bool strict_consistency = true;
    /// Clip iterates below kappa_min back to kappa_min (with a warning) instead of aborting.
    bool project_positivity = false;

    void validate() const;
};

struct SolveReport {
    int iterations = 0;
    std::vector<double> increments;          // ||dc||_X + ||dv||_Q per iteration
    std::vector<double> gibbs_duhem_history;  // ||grad sum_i c_i|| after each iteration
    double gibbs_duhem_l2 = 0.0;
    double residual = 0.0;                    // nonlinear residual at the returned iterate
    double wall_time_s = 0.0;
    bool converged = false;
    std::string increment_norm = "H1 (concentrations) + L2 (velocities)";
    std::string failure;

    std::string to_json() const;
};

struct SolveResult {
    std::vector<Field> concentrations;
    std::vector<Field> velocities;
    SolveReport report;
};

/// Thrown when the iteration cannot continue; carries the report up to the failure.
class SolveFailure : public Error {
public:
    enum class Kind { Positivity, Linear, Consistency };

    SolveFailure(const std::string& what, Kind kind, int iterate, SolveReport report)
        : Error(what), kind_(kind), iterate_(iterate), report_(std::move(report)) {}
    Kind kind() const noexcept { return kind_; }
    int iterate() const noexcept { return iterate_; }
    const SolveReport& report() const noexcept { return report_; }

private:
    Kind kind_;
    int iterate_;
    SolveReport report_;
};

/// Gram matrices of the H1 inner product on X_h and the L2 inner product on Q_h.
struct NormOperators {
    SparseMatrix h1;
    SparseMatrix mass;

    static NormOperators make(const MixedSpaces& spaces);
    double x_norm(std::span<const Field> c) const;
    double q_norm(std::span<const Field> v) const;
    /// Product-space norms of a - b.
    double x_distance(std::span<const Field> a, std::span<const Field> b) const;
    double q_distance(std::span<const Field> a, std::span<const Field> b) const;
};

/// || grad (sum_i c_i) ||_L2.
double gibbs_duhem_deviation(std::span<const Field> concentrations);

struct NonlinearResidual {
    double velocity_row = 0.0;       // ||row 1||_2
    double concentration_row = 0.0;  // ||row 2||_2
    double total() const { return velocity_row + concentration_row; }
};

/// Block residuals of the system re-assembled at (c, v).
NonlinearResidual nonlinear_residual(const MixedSpaces& spaces, const ProblemData& data, std::span<const Field> c,
                                     std::span<const Field> v);

/// Picard iteration c^k -> (v^{k+1}, c^{k+1}) until the increment drops below epsilon.
/// Returns with report.converged = false when max_iterations is exhausted. Only the
/// concentration guess enters the iteration; the first increment therefore has no
/// velocity part.
SolveResult picard_iterate(const MixedSpaces& spaces, const ProblemData& data, std::span<const Field> initial_guess,
                           const PicardSettings& settings);

}  // namespace smd
