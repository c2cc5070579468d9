#pragma once

#include <Eigen/Core>

namespace smd {

/// Material data of an n-species ideal mixture.
///
/// `diffusivity` is the symmetric Stefan-Maxwell table; its diagonal is never
/// read. Negative off-diagonal entries are admitted.
struct TransportCoefficients {
    int n = 0;
    Eigen::MatrixXd diffusivity;
    Eigen::VectorXd molar_mass;
    double rt = 1.0;
    double gamma = 1.0;
    /// Concentrations below this floor are rejected, never clamped.
    double kappa_min = 1e-10;

    static TransportCoefficients create(Eigen::MatrixXd diffusivity, Eigen::VectorXd molar_mass,
                                        double rt = 1.0, double gamma = 1.0);

    /// Throws InvalidArgument on asymmetric/zero/non-finite diffusivities,
    /// non-positive molar masses or RT, or negative gamma.
    void validate() const;
};

/// Concentrations at one point together with c_T and the density rho.
struct PointState {
    Eigen::VectorXd c;
    double c_total = 0.0;
    double rho = 0.0;

    static PointState make(const Eigen::VectorXd& c, const TransportCoefficients& coeffs);
};

/// Onsager transport matrix M of the Stefan-Maxwell relations.
/// The diagonal is the negated off-diagonal row sum, so M*(1,...,1) vanishes up to rounding.
Eigen::MatrixXd onsager_matrix(const PointState& state, const TransportCoefficients& coeffs);

/// Rank-one augmentation L_ij = RT M_i M_j c_i c_j / rho.
Eigen::MatrixXd augmentation_matrix(const PointState& state, const TransportCoefficients& coeffs);

/// M + gamma L.
Eigen::MatrixXd augmented_matrix(const PointState& state, const TransportCoefficients& coeffs);

/// Dissipation v^T M^gamma v for species velocities stored row-wise (n x d),
/// evaluated through the pairwise-drag form rather than the matrix:
/// 1/2 sum_{i != j} RT c_i c_j / (D_ij c_T) |v_j - v_i|^2 + gamma RT |sum_j M_j c_j v_j|^2 / rho.
double dissipation(const PointState& state, const TransportCoefficients& coeffs,
                   const Eigen::MatrixXd& velocities);

struct SpectralReport {
    Eigen::VectorXd onsager_eigenvalues;   // ascending
    double augmented_min_eigenvalue = 0.0;
    /// Lower bound on the smallest eigenvalue of M^gamma obtained from M >= lambda_2 P,
    /// with P the projector orthogonal to (1,...,1).
    double coercivity_bound = 0.0;
};

SpectralReport spectral_report(const PointState& state, const TransportCoefficients& coeffs);

/// Bound used by `spectral_report`, given lambda_2 of M.
double coercivity_lower_bound(const PointState& state, const TransportCoefficients& coeffs, double lambda2);

}  // namespace smd
