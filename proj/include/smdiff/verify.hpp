#pragma once

#include "smdiff/problem.hpp"
#include "smdiff/solver.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace smd {

/// Scalar field with analytic gradient and (optionally) Laplacian.
struct SmoothFunction {
    ScalarFunction value;
    VectorFunction gradient;
    ScalarFunction laplacian;  // may be empty; finite differences are used then
};

/// One structural reading of the closed-form velocity formulas of the four-species
/// manufactured family.
struct VelocityReading {
    enum class Coefficient {
        Literal,     // (2/RT)(K1/D12 + K1/D13) and (2/RT)(K2/D34 + K1/D13)
        Reciprocal,  // c_T / (2 (K1/D12 + K2/D13)) and c_T / (2 (K2/D34 + K1/D13))
    };
    enum class Convective {
        EverySpecies,  // v2 = -(c1/c2) w1 + u/c_T with w1 the diffusive part of v1
        ThroughFactor  // v2 = -(c1/c2) v1 + u/c_T
    };

    Coefficient coefficient = Coefficient::Reciprocal;
    int v3_sign = -1;  // sign in front of the v3 diffusive term
    Convective convective = Convective::EverySpecies;

    std::string name() const;
    friend bool operator==(const VelocityReading&, const VelocityReading&) = default;
};

std::vector<VelocityReading> enumerate_readings();

/// Four-species manufactured solution c1,2 = K1 +- k1, c3,4 = K2 +- k2 with
/// D13 = D14 = D23 = D24 and unit molar masses, on the unit square.
struct ManufacturedCase {
    SmoothFunction k1;
    SmoothFunction k2;
    double big_k1 = 1.0;
    double big_k2 = 1.0;
    Eigen::Matrix4d diffusivity;
    double rt = 1.0;
    VectorFunction u;
    ScalarFunction div_u;  // may be empty; finite differences are used then
    VelocityReading reading;
    /// Finite-difference step for divergences, as a fraction of the domain width.
    double fd_step = 1e-5;

    static constexpr int species = 4;

    double c_total() const { return 2.0 * (big_k1 + big_k2); }
    Eigen::Vector4d molar_mass() const { return Eigen::Vector4d::Ones(); }
    double coefficient(int i) const;

    double c(int i, const Vec2& x) const;
    Vec2 grad_c(int i, const Vec2& x) const;
    Vec2 v(int i, const Vec2& x) const;
    /// c_i v_i.
    Vec2 flux(int i, const Vec2& x) const;
    /// r_i = div(c_i v_i), analytic when closed forms are available.
    double reaction(int i, const Vec2& x) const;
    /// r_i by fourth-order finite differences of the flux (one-sided near the boundary).
    double reaction_fd(int i, const Vec2& x) const;
    double divergence_u(const Vec2& x) const;

    /// Throws InvalidArgument when the diffusivity pairing or the positivity bounds fail.
    void validate() const;

    TransportCoefficients transport(double gamma = 1.0) const;
    std::vector<ExactSpecies> exact() const;
    /// Problem with every boundary facet DIRICHLET(0) carrying the exact traces.
    ProblemData problem(double gamma = 1.0) const;
};

/// Reaction functions r_i of a case.
std::vector<ScalarFunction> reaction_rates(const ManufacturedCase& mc);

/// The reference four-species example with a given velocity reading:
/// k1 = exp(8xy(1-x)(1-y))/2, k2 = sin(pi x) sin(pi y)/2, K1 = K2 = 1, D12 = 2,
/// D34 = 3, other D = 1, RT = 1, u = (0, 1).
ManufacturedCase reference_case_with(const VelocityReading& reading);

struct OracleReport {
    double stefan_maxwell = 0.0;   // max_i,x |RT grad c_i + (M v)_i|
    double mass_flux = 0.0;        // max_x |sum M_i c_i v_i - u|
    double reaction_sum = 0.0;     // max_x |sum M_i r_i - div u|
    double reaction_fd_gap = 0.0;  // max_i,x |r_i analytic - r_i finite differences|
    int points = 0;

    bool passes() const;
};

inline constexpr double kStefanMaxwellOracleTol = 1e-9;
inline constexpr double kMassFluxOracleTol = 1e-10;
inline constexpr double kReactionOracleTol = 1e-8;

/// Pointwise residual oracles at `points` uniform random interior points.
OracleReport check_oracles(const ManufacturedCase& mc, int points = 50, std::uint64_t seed = 42);

/// Tries every velocity reading on `base` and returns the case with the unique reading
/// that passes the oracles. Throws Error unless exactly one reading passes.
ManufacturedCase resolve_reading(ManufacturedCase base, std::uint64_t seed = 42);

/// The reference case with its velocity reading resolved by the oracles.
ManufacturedCase build_reference_case(std::uint64_t seed = 42);

struct ConvergenceRow {
    int n = 0;
    double h = 0.0;
    double e1 = 0.0, e2 = 0.0, e3 = 0.0, e4 = 0.0;
    int iterations = 0;
    double gibbs_duhem_l2 = 0.0;      // at the returned iterate
    double gibbs_duhem_max = 0.0;     // over all iterates
    double wall_time_s = 0.0;
    SolveReport report;
};

struct ConvergenceStudy {
    int order = 1;
    std::vector<ConvergenceRow> rows;
    std::array<double, 4> slopes{};                // least squares of log E_j against log h
    std::vector<std::array<double, 4>> ratios;     // E_j(h) / E_j(h/2) for consecutive levels
    bool complete = false;
    std::string failure;

    std::string to_csv() const;
    std::string slopes_json() const;
};

inline constexpr const char* kConvergenceCsvHeader = "N,h,E1,E2,E3,E4,iterations,gibbs_duhem_l2,wall_time_s";

struct StudyOptions {
    Diagonal diagonal = Diagonal::Right;
    int threads = 1;
    /// Writes a VTK file per level into this directory when set.
    std::optional<std::string> vtk_directory;
};

/// Least-squares slope of log(y) against log(x).
double log_log_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Solves the case on unit-square meshes N x N and tabulates the errors. A level that
/// fails stops the study; rows of finished levels are kept and `complete` stays false.
ConvergenceStudy convergence_study(const ManufacturedCase& mc, const std::vector<int>& meshes, int order,
                                   const PicardSettings& settings, const StudyOptions& options = {});

struct DemoConfig {
    int n = 64;                 // cells along the unit length; the height gets n / 4
    int order = 1;
    double width = 1.0;
    double height = 0.25;
    Diagonal diagonal = Diagonal::Right;
    std::vector<std::string> names{"N2", "O2", "CO2", "H2O"};
    Eigen::MatrixXd diffusivity;  // mm^2/s
    Eigen::VectorXd molar_mass;   // g/mol
    Eigen::VectorXd left;         // mole fractions on the left edge
    Eigen::VectorXd right;        // mole fractions on the right edge
    double rt = 1.0;
    PicardSettings settings;
    /// Cells with centroid x below this fraction of the width enter the uphill diagnostic.
    double edge_band = 0.1;

    /// Humidified inspired air (left) against alveolar air (right).
    static DemoConfig lung_air();
};

struct DemoResult {
    std::shared_ptr<const TriMesh> mesh;
    MixedSpaces spaces;
    SolveResult solution;
    double max_sum_deviation = 0.0;  // max over dofs |sum_i y_i - 1|
    double min_fraction = 0.0;
    double max_fraction = 0.0;
    int tracked_species = 3;         // water vapour
    double edge_velocity_x = 0.0;    // mean x velocity of the tracked species near the left edge
    double edge_gradient_x = 0.0;    // mean d/dx of its mole fraction there
    bool uphill = false;             // flux c v aligned with the gradient

    std::string to_json() const;
};

DemoResult mixed_bc_demo(const DemoConfig& config);

}  // namespace smd
