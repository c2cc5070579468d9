#include "smdiff/errors.hpp"
#include "smdiff/transport.hpp"

#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <random>

using namespace smd;

namespace {

TransportCoefficients two_species(double d12, double gamma = 1.0)
{
    Eigen::MatrixXd d = Eigen::MatrixXd::Ones(2, 2);
    d(0, 1) = d(1, 0) = d12;
    return TransportCoefficients::create(d, Eigen::Vector2d::Ones(), 1.0, gamma);
}

struct RandomCase {
    TransportCoefficients coeffs;
    PointState state;
};

/// Positive diffusivities in [0.5, 5], molar masses in [1, 50], concentrations in [kappa, 1 + kappa].
RandomCase random_case(std::mt19937_64& rng, int n, double kappa = 0.1)
{
    std::uniform_real_distribution<double> ud(0.5, 5.0), um(1.0, 50.0), uc(kappa, 1.0 + kappa), ug(0.1, 10.0),
        urt(0.5, 3.0);
    Eigen::MatrixXd d = Eigen::MatrixXd::Ones(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) d(i, j) = d(j, i) = ud(rng);
    }
    Eigen::VectorXd m(n), c(n);
    for (int i = 0; i < n; ++i) {
        m[i] = um(rng);
        c[i] = uc(rng);
    }
    RandomCase r{TransportCoefficients::create(d, m, urt(rng), ug(rng)), {}};
    r.state = PointState::make(c, r.coeffs);
    return r;
}

}  // namespace

TEST(Transport, TwoSpeciesOnsagerExample)
{
    const auto co = two_species(2.0);
    const Eigen::MatrixXd m = onsager_matrix(PointState::make(Eigen::Vector2d(1, 1), co), co);
    Eigen::Matrix2d expected;
    expected << 0.25, -0.25, -0.25, 0.25;
    EXPECT_LT((m - expected).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Transport, ThreeSpeciesEntrywiseOracle)
{
    Eigen::Matrix3d d = Eigen::Matrix3d::Ones();
    d(0, 1) = d(1, 0) = 1.0;
    d(0, 2) = d(2, 0) = 2.0;
    d(1, 2) = d(2, 1) = 3.0;
    const auto co = TransportCoefficients::create(d, Eigen::Vector3d::Ones());
    const Eigen::Vector3d c(1, 2, 3);
    const Eigen::MatrixXd m = onsager_matrix(PointState::make(c, co), co);
    // Entrywise evaluation of -c_i c_j / (D_ij c_T) with c_T = 6; diagonal = minus the off-diagonal row sum.
    const double m01 = -2.0 / 6.0, m02 = -3.0 / 12.0, m12 = -6.0 / 18.0;
    Eigen::Matrix3d expected;
    expected << -(m01 + m02), m01, m02, m01, -(m01 + m12), m12, m02, m12, -(m02 + m12);
    EXPECT_LT((m - expected).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Transport, AugmentationExample)
{
    const auto co = two_species(1.0);
    const PointState s = PointState::make(Eigen::Vector2d(1, 1), co);
    EXPECT_DOUBLE_EQ(s.rho, 2.0);
    const Eigen::MatrixXd l = augmentation_matrix(s, co);
    EXPECT_TRUE(l.isApprox(Eigen::Matrix2d::Constant(0.5), 1e-15));
    EXPECT_TRUE((l * Eigen::Vector2d::Ones()).isApprox(Eigen::Vector2d::Ones(), 1e-15));
}

TEST(Transport, AugmentedIdentityExample)
{
    const auto co = two_species(1.0);
    const PointState s = PointState::make(Eigen::Vector2d(1, 1), co);
    Eigen::Matrix2d m;
    m << 0.5, -0.5, -0.5, 0.5;
    EXPECT_LT((onsager_matrix(s, co) - m).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LT((augmented_matrix(s, co) - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff(), 1e-15);
    const SpectralReport r = spectral_report(s, co);
    EXPECT_NEAR(r.onsager_eigenvalues[0], 0.0, 1e-15);
    EXPECT_NEAR(r.onsager_eigenvalues[1], 1.0, 1e-15);
    EXPECT_NEAR(r.augmented_min_eigenvalue, 1.0, 1e-15);
}

TEST(Transport, GammaZeroReturnsOnsagerExactly)
{
    std::mt19937_64 rng(42);
    RandomCase rc = random_case(rng, 4);
    rc.coeffs.gamma = 0.0;
    EXPECT_EQ(augmented_matrix(rc.state, rc.coeffs), onsager_matrix(rc.state, rc.coeffs));
}

TEST(Transport, RandomStateProperties)
{
    std::mt19937_64 rng(42);
    std::normal_distribution<double> nd;
    for (int n : {2, 3, 4, 6}) {
        for (int k = 0; k < 50; ++k) {
            const RandomCase rc = random_case(rng, n);
            const auto& co = rc.coeffs;
            const Eigen::MatrixXd m = onsager_matrix(rc.state, co);
            const Eigen::MatrixXd mg = augmented_matrix(rc.state, co);
            const Eigen::MatrixXd l = augmentation_matrix(rc.state, co);
            const double mmax = m.cwiseAbs().maxCoeff();

            EXPECT_LE((m * Eigen::VectorXd::Ones(n)).cwiseAbs().maxCoeff(), 1e-14 * mmax);
            EXPECT_EQ(m, m.transpose());
            EXPECT_EQ(mg, mg.transpose());

            Eigen::JacobiSVD<Eigen::MatrixXd> svd(l);
            EXPECT_LE(svd.singularValues()[1], 1e-13 * svd.singularValues()[0]);

            Eigen::MatrixXd v(n, 2);
            for (auto& x : v.reshaped()) x = nd(rng);
            const double quad = (v.transpose() * mg * v).trace();
            EXPECT_NEAR(dissipation(rc.state, co, v), quad, 1e-12 * std::abs(quad));

            const Eigen::MatrixXd shifted = v.rowwise() + Eigen::RowVector2d(nd(rng), nd(rng));
            EXPECT_LT((m * shifted - m * v).cwiseAbs().maxCoeff(), 1e-12 * (1.0 + (m * v).cwiseAbs().maxCoeff()));

            const double alpha = std::uniform_real_distribution<double>(0.1, 10.0)(rng);
            const Eigen::MatrixXd ma = onsager_matrix(PointState::make(alpha * rc.state.c, co), co);
            EXPECT_LE((ma - alpha * m).cwiseAbs().maxCoeff(), 1e-14 * alpha * mmax);

            const SpectralReport r = spectral_report(rc.state, co);
            const SpectralReport ra = spectral_report(PointState::make(alpha * rc.state.c, co), co);
            EXPECT_LT((ra.onsager_eigenvalues - alpha * r.onsager_eigenvalues).cwiseAbs().maxCoeff(),
                      1e-12 * alpha * r.onsager_eigenvalues[n - 1]);
            EXPECT_LE(std::abs(r.onsager_eigenvalues[0]), 1e-12 * r.onsager_eigenvalues[n - 1]);
            EXPECT_GT(r.onsager_eigenvalues[1], 0.0);
            EXPECT_GT(r.augmented_min_eigenvalue, 0.0);

            // Interlacing caps the smallest eigenvalue of M^gamma by lambda_2 and by the
            // Rayleigh quotient gamma RT rho / n along (1,...,1); the Loewner bound from
            // M >= lambda_2 P holds from below.
            const double lam2 = r.onsager_eigenvalues[1];
            EXPECT_LE(r.augmented_min_eigenvalue, lam2 * (1.0 + 1e-10));
            EXPECT_LE(r.augmented_min_eigenvalue, co.gamma * co.rt * rc.state.rho / n * (1.0 + 1e-10));
            EXPECT_GE(r.augmented_min_eigenvalue, r.coercivity_bound * (1.0 - 1e-10));
            EXPECT_GT(r.coercivity_bound, 0.0);
        }
    }
}

TEST(Transport, SecondEigenvaluePositiveAboveFloor)
{
    std::mt19937_64 rng(42);
    for (int k = 0; k < 100; ++k) {
        const RandomCase rc = random_case(rng, 2 + k % 5, 0.1);
        EXPECT_GT(spectral_report(rc.state, rc.coeffs).onsager_eigenvalues[1], 0.0);
    }
}

TEST(Transport, NegativeDiffusivityAdmitted)
{
    Eigen::Matrix3d d = Eigen::Matrix3d::Ones();
    d(0, 1) = d(1, 0) = -0.5;
    d(0, 2) = d(2, 0) = 1.0;
    d(1, 2) = d(2, 1) = 0.2;
    TransportCoefficients co;
    ASSERT_NO_THROW(co = TransportCoefficients::create(d, Eigen::Vector3d::Ones()));
    const SpectralReport r = spectral_report(PointState::make(Eigen::Vector3d(1, 1, 1), co), co);
    EXPECT_EQ(r.onsager_eigenvalues.size(), 3);
}

TEST(Transport, NonPositiveConcentrationNamesSpecies)
{
    const auto co = two_species(1.0);
    try {
        onsager_matrix(PointState::make(Eigen::Vector2d(1.0, -0.1), co), co);
        FAIL() << "expected DomainError";
    } catch (const DomainError& e) {
        EXPECT_EQ(e.species(), 1);
    }
    EXPECT_THROW(spectral_report(PointState::make(Eigen::Vector2d(0.0, 1.0), co), co), DomainError);
}

TEST(Transport, CoefficientValidation)
{
    Eigen::MatrixXd d = Eigen::MatrixXd::Ones(3, 3);
    EXPECT_THROW(TransportCoefficients::create(d, Eigen::Vector2d::Ones()), InvalidArgument);
    EXPECT_THROW(TransportCoefficients::create(d, Eigen::Vector3d(1, 0, 1)), InvalidArgument);
    Eigen::MatrixXd asym = d;
    asym(0, 1) = 2.0;
    EXPECT_THROW(TransportCoefficients::create(asym, Eigen::Vector3d::Ones()), InvalidArgument);
    Eigen::MatrixXd zero = d;
    zero(1, 2) = zero(2, 1) = 0.0;
    EXPECT_THROW(TransportCoefficients::create(zero, Eigen::Vector3d::Ones()), InvalidArgument);
    EXPECT_THROW(TransportCoefficients::create(d, Eigen::Vector3d::Ones(), -1.0), InvalidArgument);
    EXPECT_THROW(TransportCoefficients::create(d, Eigen::Vector3d::Ones(), 1.0, -0.5), InvalidArgument);
    // The diagonal is never read.
    Eigen::MatrixXd diag = d;
    diag(0, 0) = std::nan("");
    EXPECT_NO_THROW(TransportCoefficients::create(diag, Eigen::Vector3d::Ones()));
}
