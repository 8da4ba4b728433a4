#include <gtest/gtest.h>

#include <random>

#include "qinet/network.hpp"

using namespace qinet;

namespace {

NetworkConfig random_config(std::mt19937_64& rng, int m, int m_re) {
    std::uniform_real_distribution<double> u(0, 1);
    NetworkConfig c = make_config(m, m_re, 0.05 + u(rng), 0.1 + 3 * u(rng), 0.5, 0.0, 1.0);
    for (int j = 0; j < m; ++j) {
        c.eta(j) = 0.05 + 0.9 * u(rng);
        c.theta(j) = 6 * u(rng) - 3;
    }
    return c;
}

}  // namespace

TEST(Network, NbPrimeConventions) {
    const NetworkConfig ma = make_config(3, 5, 0.4, 2.0, 0.5, 0.0, 1.0);
    EXPECT_NEAR(ma.nb_prime(), 3.0 / 5 * (0.5 * 0.4 + 2.0), 1e-15);
    const NetworkConfig mt = make_config(3, 5, 0.4, 2.0, 0.5, 0.0, 1.0, NbPrime::MainText);
    EXPECT_NEAR(mt.nb_prime(), 2.0 + 0.5 * 0.4, 1e-15);
    EXPECT_EQ(nb_prime_from_string(to_string(NbPrime::MainText)), NbPrime::MainText);
    EXPECT_EQ(nb_prime_from_string("MultipleAccess"), NbPrime::MultipleAccess);
    EXPECT_THROW(nb_prime_from_string("bogus"), DomainError);
}

TEST(Network, ValidateRejectsBadInputs) {
    NetworkConfig c = make_config(2, 3, 0.1, 1.0, 0.5, 0.0, 1.0);
    EXPECT_NO_THROW(c.validate());
    NetworkConfig bad = c;
    bad.eta(0) = 1.2;
    EXPECT_THROW(bad.validate(), DomainError);
    bad = c;
    bad.m_re = 1;
    EXPECT_THROW(bad.validate(), DomainError);
    bad = c;
    bad.nu = 0.5;
    EXPECT_THROW(bad.validate(), DomainError);
    bad = c;
    bad.theta = Vec::Zero(3);
    EXPECT_THROW(bad.validate(), DomainError);
    bad = c;
    bad.n_s = -1;
    EXPECT_THROW(bad.validate(), DomainError);
}

TEST(Network, ThermalLossOfVacuumGivesBackground) {
    const GaussianState out = thermal_loss(vacuum(1), 0, 0.3, 0.0, 0.8);
    EXPECT_TRUE(out.cov.isApprox(thermal(0.8).cov, 1e-14));
}

TEST(Network, ClosedFormMatchesPipeline) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const int m = 1 + trial % 5;
        const NetworkConfig c = random_config(rng, m, m + trial % 3);
        const OutputState a = closed_form_output(c), b = pipeline_output(c);
        EXPECT_LT((a.state.cov - b.state.cov).cwiseAbs().maxCoeff(), 1e-12) << "trial " << trial;
        EXPECT_LT(a.state.mean.cwiseAbs().maxCoeff(), 1e-15);
        EXPECT_TRUE(is_physical(a.state.cov).ok);
    }
}

TEST(Network, ReturnModeCarriesNbPrime) {
    std::mt19937_64 rng(5);
    const NetworkConfig c = random_config(rng, 4, 6);
    const OutputState o = build_output_state(c);
    const PhotonMoments pm = photon_moments(o.state, {0});
    EXPECT_NEAR(pm.mean(0), c.nb_prime(), 1e-12);
    EXPECT_NEAR(received_photon_number(c), c.nb_prime(), 1e-12);
    EXPECT_NEAR(o.nb_prime, c.nb_prime(), 1e-15);
}

TEST(Network, IdlersStayThermal) {
    const NetworkConfig c = make_config(3, 4, 0.7, 1.0, 0.5, 0.2, 1.0);
    const OutputState o = closed_form_output(c);
    for (int j = 1; j <= 3; ++j) EXPECT_TRUE(o.state.block(j, j).isApprox(thermal(0.7).cov, 1e-14));
    // Distinct idlers are uncorrelated.
    EXPECT_LT(o.state.block(1, 2).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Network, MultipleAccessMatchesExplicitInterferometer) {
    Vec w(3);
    w << 0.3, 0.4, 0.5;
    const Mat W = multiple_access_matrix(w, 4);
    EXPECT_TRUE((W * W.transpose()).isIdentity(1e-12));
    EXPECT_TRUE(W.row(W.rows() - 1).head(3).transpose().isApprox(w));

    const GaussianState in = tensor(tensor(thermal(0.2), coherent(1.0)), thermal(0.9));
    const GaussianState ma = multiple_access(in, {0, 1, 2}, w);
    // The accessible mode has photon number sum_j w_j^2 n_j plus |sum w_j alpha_j|^2.
    const PhotonMoments pm = photon_moments(ma, {0});
    EXPECT_NEAR(pm.mean(0), 0.09 * 0.2 + 0.16 * 1.0 + 0.25 * 0.9, 1e-12);
}

TEST(Network, SBlockDependsOnPhase) {
    const NetworkConfig c = make_config(1, 1, 0.5, 1.0, 0.4, 0.0, 1.0);
    NetworkConfig d = c;
    d.theta(0) = 0.9;
    const Mat2 s0 = s_block(c, 0), s1 = s_block(d, 0);
    EXPECT_NEAR(s0.norm(), s1.norm(), 1e-14);
    EXPECT_GT((s0 - s1).norm(), 1e-3);
}
