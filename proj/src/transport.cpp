#include "smdiff/transport.hpp"

#include "smdiff/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>

namespace smd {

TransportCoefficients TransportCoefficients::create(Eigen::MatrixXd diffusivity, Eigen::VectorXd molar_mass,
                                                    double rt, double gamma)
{
    TransportCoefficients t;
    t.n = static_cast<int>(molar_mass.size());
    t.diffusivity = std::move(diffusivity);
    t.molar_mass = std::move(molar_mass);
    t.rt = rt;
    t.gamma = gamma;
    t.validate();
    return t;
}

void TransportCoefficients::validate() const
{
    if (n < 2) throw InvalidArgument("TransportCoefficients: need at least two species");
    if (diffusivity.rows() != n || diffusivity.cols() != n) {
        throw InvalidArgument("TransportCoefficients: diffusivity table must be n x n");
    }
    if (molar_mass.size() != n) throw InvalidArgument("TransportCoefficients: need n molar masses");
    for (int i = 0; i < n; ++i) {
        if (!(molar_mass[i] > 0.0) || !std::isfinite(molar_mass[i])) {
            throw InvalidArgument("TransportCoefficients: molar mass of species " + std::to_string(i) +
                                  " must be positive");
        }
        for (int j = i + 1; j < n; ++j) {
            const double d = diffusivity(i, j);
            if (!std::isfinite(d) || d == 0.0) {
                throw InvalidArgument("TransportCoefficients: D(" + std::to_string(i) + "," + std::to_string(j) +
                                      ") must be finite and nonzero");
            }
            if (diffusivity(j, i) != d) {
                throw InvalidArgument("TransportCoefficients: D(" + std::to_string(i) + "," + std::to_string(j) +
                                      ") != D(" + std::to_string(j) + "," + std::to_string(i) + ")");
            }
        }
    }
    if (!(rt > 0.0) || !std::isfinite(rt)) throw InvalidArgument("TransportCoefficients: RT must be positive");
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw InvalidArgument("TransportCoefficients: gamma must be >= 0");
    if (!(kappa_min > 0.0)) throw InvalidArgument("TransportCoefficients: kappa_min must be positive");
}

PointState PointState::make(const Eigen::VectorXd& c, const TransportCoefficients& coeffs)
{
    if (c.size() != coeffs.n) throw InvalidArgument("PointState: expected one concentration per species");
    PointState s;
    s.c = c;
    s.c_total = c.sum();
    s.rho = coeffs.molar_mass.dot(c);
    return s;
}

namespace {

void require_positive(const PointState& state, const TransportCoefficients& coeffs)
{
    for (int i = 0; i < state.c.size(); ++i) {
        if (!(state.c[i] >= coeffs.kappa_min)) {
            throw DomainError("concentration of species " + std::to_string(i) + " is " + std::to_string(state.c[i]) +
                                  ", below the positivity floor " + std::to_string(coeffs.kappa_min),
                              i);
        }
    }
    if (!(state.c_total > 0.0)) throw DomainError("total concentration must be positive", -1);
}

}  // namespace

Eigen::MatrixXd onsager_matrix(const PointState& state, const TransportCoefficients& coeffs)
{
    require_positive(state, coeffs);
    const int n = coeffs.n;
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double v = -coeffs.rt * state.c[i] * state.c[j] / (coeffs.diffusivity(i, j) * state.c_total);
            m(i, j) = v;
            m(j, i) = v;
        }
    }
    for (int i = 0; i < n; ++i) {
        double off = 0.0;
        for (int j = 0; j < n; ++j) {
            if (j != i) off += m(i, j);
        }
        m(i, i) = -off;
    }
    return m;
}

Eigen::MatrixXd augmentation_matrix(const PointState& state, const TransportCoefficients& coeffs)
{
    if (!(state.rho > 0.0)) throw DomainError("density must be positive", -1);
    const Eigen::VectorXd mc = coeffs.molar_mass.cwiseProduct(state.c);
    const double scale = coeffs.rt / state.rho;
    Eigen::MatrixXd l(coeffs.n, coeffs.n);
    for (int i = 0; i < coeffs.n; ++i) {
        for (int j = 0; j < coeffs.n; ++j) l(i, j) = scale * (mc[i] * mc[j]);
    }
    return l;
}

Eigen::MatrixXd augmented_matrix(const PointState& state, const TransportCoefficients& coeffs)
{
    Eigen::MatrixXd m = onsager_matrix(state, coeffs);
    if (coeffs.gamma != 0.0) m += coeffs.gamma * augmentation_matrix(state, coeffs);
    return m;
}

double dissipation(const PointState& state, const TransportCoefficients& coeffs, const Eigen::MatrixXd& velocities)
{
    require_positive(state, coeffs);
    const int n = coeffs.n;
    if (velocities.rows() != n) throw InvalidArgument("dissipation: expected one velocity row per species");
    double drag = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            const double k = state.c[i] * state.c[j] * coeffs.rt / (coeffs.diffusivity(i, j) * state.c_total);
            drag += k * (velocities.row(j) - velocities.row(i)).squaredNorm();
        }
    }
    const Eigen::RowVectorXd flux = (coeffs.molar_mass.cwiseProduct(state.c)).transpose() * velocities;
    return 0.5 * drag + coeffs.gamma * coeffs.rt * flux.squaredNorm() / state.rho;
}

double coercivity_lower_bound(const PointState& state, const TransportCoefficients& coeffs, double lambda2)
{
    // In the orthonormal pair (e, w), e = 1/sqrt(n), w along the part of m = (M_i c_i)
    // orthogonal to e, the bound matrix lambda2 P + gamma L reduces to a 2x2 block;
    // every other direction sees lambda2.
    const int n = coeffs.n;
    const Eigen::VectorXd m = coeffs.molar_mass.cwiseProduct(state.c);
    const double p = m.sum() / std::sqrt(static_cast<double>(n));
    const double q = (m - Eigen::VectorXd::Constant(n, m.mean())).norm();
    const double g = coeffs.gamma * coeffs.rt / state.rho;
    const double a = g * p * p;
    const double b = g * p * q;
    const double d = lambda2 + g * q * q;
    const double small = 0.5 * ((a + d) - std::sqrt((a - d) * (a - d) + 4.0 * b * b));
    return n > 2 ? std::min(small, lambda2) : small;
}

SpectralReport spectral_report(const PointState& state, const TransportCoefficients& coeffs)
{
    const Eigen::MatrixXd m = onsager_matrix(state, coeffs);
    SpectralReport r;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> em(m, Eigen::EigenvaluesOnly);
    r.onsager_eigenvalues = em.eigenvalues();
    Eigen::MatrixXd mg = m;
    if (coeffs.gamma != 0.0) mg += coeffs.gamma * augmentation_matrix(state, coeffs);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eg(mg, Eigen::EigenvaluesOnly);
    r.augmented_min_eigenvalue = eg.eigenvalues()[0];
    r.coercivity_bound = coercivity_lower_bound(state, coeffs, r.onsager_eigenvalues[1]);
    return r;
}

}  // namespace smd
