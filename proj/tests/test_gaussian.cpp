#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "qinet/gaussian.hpp"

using namespace qinet;

TEST(Gaussian, VacuumAndThermal) {
    EXPECT_TRUE(vacuum(3).cov.isIdentity());
    const GaussianState t = thermal(0.7);
    EXPECT_TRUE(t.cov.isApprox(2.4 * Mat::Identity(2, 2)));
    EXPECT_TRUE(is_physical(t.cov).ok);
    EXPECT_FALSE(is_physical(0.5 * Mat::Identity(2, 2)).ok);
}

TEST(Gaussian, CoherentMeanIsTwiceTheAmplitude) {
    const GaussianState c = coherent(cplx(0.3, -1.2));
    EXPECT_DOUBLE_EQ(c.mean(0), 0.6);
    EXPECT_DOUBLE_EQ(c.mean(1), -2.4);
    EXPECT_TRUE(c.cov.isIdentity());
}

TEST(Gaussian, TmsvBlocks) {
    const double n = 0.4;
    const GaussianState s = tmsv(n);
    EXPECT_NEAR(s.cov(0, 0), 2 * n + 1, 1e-15);
    EXPECT_NEAR(std::abs(s.cov(0, 2)), 2 * std::sqrt(n * (n + 1)), 1e-15);
    EXPECT_NEAR(s.cov(0, 2), -s.cov(1, 3), 1e-15);
    const Vec nu = williamson_eigs(s.cov);
    EXPECT_NEAR(nu.maxCoeff(), 1.0, 1e-10);  // pure
}

TEST(Gaussian, OpsAreSymplectic) {
    EXPECT_TRUE(is_symplectic(beamsplitter(3, 0, 2, 0.3).S));
    EXPECT_TRUE(is_symplectic(pa(2, 0, 1, 2.5).S));
    EXPECT_TRUE(is_symplectic(phase(2, 1, 0.7).S));
    const Mat W = orthogonal_completion(Vec::Constant(3, 1 / std::sqrt(3.0)));
    EXPECT_TRUE(is_symplectic(interferometer(3, {0, 1, 2}, W).S));
    EXPECT_FALSE(is_symplectic(2 * Mat::Identity(2, 2)));
}

TEST(Gaussian, OrthogonalCompletion) {
    Vec u(4);
    u << 0.1, -0.5, 0.3, 0.2;
    u.normalize();
    const Mat Q = orthogonal_completion(u);
    EXPECT_TRUE((Q.transpose() * Q).isIdentity(1e-12));
    EXPECT_TRUE(Q.col(0).isApprox(u));
}

TEST(Gaussian, PhaseRotatesCoherentState) {
    const GaussianState c = apply(coherent(1.0), phase(1, 0, std::numbers::pi / 2));
    EXPECT_NEAR(c.mean(0), 0.0, 1e-15);
    EXPECT_NEAR(c.mean(1), 2.0, 1e-15);
}

TEST(Gaussian, BalancedBeamsplitterSplitsPhotons) {
    const GaussianState in = tensor(coherent(2.0), vacuum(1));
    const GaussianState out = apply(in, beamsplitter(2, 0, 1, 0.5));
    const PhotonMoments pm = photon_moments(out, {0, 1});
    EXPECT_NEAR(pm.mean(0), 2.0, 1e-12);
    EXPECT_NEAR(pm.mean(1), 2.0, 1e-12);
}

TEST(Gaussian, PhotonMomentsKnownDistributions) {
    // Bose-Einstein: var = n^2 + n; Poisson: var = mean.
    PhotonMoments t = photon_moments(thermal(1.3), {0});
    EXPECT_NEAR(t.mean(0), 1.3, 1e-14);
    EXPECT_NEAR(t.cov(0, 0), 1.3 * 1.3 + 1.3, 1e-13);
    PhotonMoments c = photon_moments(coherent(cplx(0.6, 0.8)), {0});
    EXPECT_NEAR(c.mean(0), 1.0, 1e-14);
    EXPECT_NEAR(c.cov(0, 0), 1.0, 1e-13);
    // TMSV photon numbers are perfectly correlated.
    PhotonMoments s = photon_moments(tmsv(0.5), {0, 1});
    EXPECT_NEAR(s.cov(0, 1), 0.75, 1e-13);
    EXPECT_NEAR(s.cov(0, 0), 0.75, 1e-13);
}

TEST(Gaussian, PaOnVacuumGivesTmsv) {
    const double g = 1.8;
    const GaussianState out = apply(vacuum(2), pa(2, 0, 1, g));
    const PhotonMoments pm = photon_moments(out, {0, 1});
    EXPECT_NEAR(pm.mean(0), g - 1, 1e-12);
    EXPECT_NEAR(pm.mean(1), g - 1, 1e-12);
}

TEST(Gaussian, HeterodyneDensityOfVacuum) {
    const Vec2 x(0.7, -1.1);
    const HeterodyneResult r = condition_heterodyne(tensor(vacuum(1), thermal(0.3)), 0, x);
    EXPECT_NEAR(r.density, std::exp(-x.squaredNorm() / 4) / (4 * std::numbers::pi), 1e-14);
    EXPECT_TRUE(r.state.cov.isApprox(thermal(0.3).cov));
}

TEST(Gaussian, HeterodyneOnTmsvDisplacesIdler) {
    const GaussianState s = tmsv(0.5);
    const HeterodyneResult r = condition_heterodyne(s, 0, Vec2(1.0, 0.0));
    // Conditional covariance of the idler after heterodyning the signal is vacuum-like times
    // (2N+1) - 4N(N+1)/(2N+2) = 1 for a pure TMSV.
    EXPECT_NEAR(r.state.cov(0, 0), 1.0, 1e-12);
    EXPECT_GT(std::abs(r.state.mean(0)), 0.0);
}

TEST(Gaussian, MarginalQuadrature) {
    const GaussianState c = coherent(cplx(1.0, 0.5));
    const double phi = 0.3;
    const GaussianOutcome o = marginal_quadrature(c, {{0, phi}});
    EXPECT_NEAR(o.mean(0), 2 * std::cos(phi) + std::sin(phi), 1e-14);
    EXPECT_NEAR(o.cov(0, 0), 1.0, 1e-14);
}

TEST(Gaussian, PartialTraceKeepsOrder) {
    const GaussianState s = tensor(tensor(thermal(0.1), thermal(0.2)), thermal(0.3));
    const GaussianState r = partial_trace(s, {2, 0});
    EXPECT_NEAR(r.cov(0, 0), 1.6, 1e-15);
    EXPECT_NEAR(r.cov(2, 2), 1.2, 1e-15);
}

TEST(Gaussian, WilliamsonOfThermalProduct) {
    const GaussianState s = tensor(thermal(0.5), thermal(2.0));
    Vec nu = williamson_eigs(s.cov);
    std::sort(nu.data(), nu.data() + nu.size());
    EXPECT_NEAR(nu(0), 2.0, 1e-12);
    EXPECT_NEAR(nu(1), 5.0, 1e-12);
    // Invariant under symplectic transformations.
    const GaussianState t = apply(s, compose(pa(2, 0, 1, 1.5), beamsplitter(2, 0, 1, 0.3)));
    Vec mu = williamson_eigs(t.cov);
    std::sort(mu.data(), mu.data() + mu.size());
    EXPECT_NEAR(mu(0), 2.0, 1e-10);
    EXPECT_NEAR(mu(1), 5.0, 1e-10);
}
