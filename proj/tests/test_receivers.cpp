#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "qinet/receivers.hpp"

using namespace qinet;

namespace {

NetworkConfig three_targets() {
    NetworkConfig c = make_config(3, 5, 0.4, 2.0, 0.6, 0.0, 1.0);
    c.theta << 0.3, -1.1, 2.0;
    c.eta << 0.5, 0.2, 0.9;
    return c;
}

NetworkConfig standard_point() {
    NetworkConfig c = make_config(2, 4, 0.1, 1.0, 0.5, 0.0, 1e4);
    c.theta << 0.1, -0.2;
    return c;
}

}  // namespace

TEST(Receivers, KindNames) {
    for (auto k : {ReceiverKind::pPCR, ReceiverKind::sPCR, ReceiverKind::CtoD})
        EXPECT_EQ(receiver_from_string(to_string(k)), k);
    EXPECT_EQ(receiver_from_string("ppcr"), ReceiverKind::pPCR);
    EXPECT_THROW(receiver_from_string("homodyne"), DomainError);
}

TEST(Receivers, StatisticsMatchChainSimulation) {
    const NetworkConfig c = three_targets();
    for (auto k : {ReceiverKind::pPCR, ReceiverKind::sPCR})
        for (double alpha : {0.0, kQuadratureReference, 0.7}) {
            const ChainMoments ch = pa_chain_moments(c, k, 2.5, alpha);
            const CountStatistics st = pa_statistics(c, k, 2.5, alpha);
            EXPECT_LT((ch.mu - st.mu).cwiseAbs().maxCoeff(), 1e-11);
            EXPECT_LT((ch.sigma - st.sigma).cwiseAbs().maxCoeff(), 1e-11);
            EXPECT_TRUE(is_physical(ch.final_state.cov).ok);
        }
}

TEST(Receivers, TextbookFormExactAtZeroPhase) {
    NetworkConfig c = three_targets();
    c.theta << 0.0, std::numbers::pi, 0.0;
    for (auto k : {ReceiverKind::pPCR, ReceiverKind::sPCR}) {
        const CountStatistics a = pa_statistics_textbook(c, k, 1.7), b = pa_statistics(c, k, 1.7, 0.0);
        EXPECT_LT((a.sigma - b.sigma).cwiseAbs().maxCoeff(), 1e-12);
    }
    // Off those phases the textbook covariance is not the exact one.
    c.theta << 0.5, 0.5, 0.5;
    EXPECT_GT((pa_statistics_textbook(c, ReceiverKind::pPCR, 1.7).sigma - pa_statistics(c, ReceiverKind::pPCR, 1.7, 0.0).sigma)
                  .cwiseAbs()
                  .maxCoeff(),
              1e-3);
}

TEST(Receivers, CoefficientsScaleWithGain) {
    const NetworkConfig c = three_targets();
    const PaCoefficients s = pa_coefficients(c, ReceiverKind::sPCR, 2.0);
    EXPECT_DOUBLE_EQ(s.f(0), 1.0);
    EXPECT_DOUBLE_EQ(s.f(2), 4.0);
    const PaCoefficients p = pa_coefficients(c, ReceiverKind::pPCR, 2.0);
    EXPECT_DOUBLE_EQ(p.f(1), 1.0 / 3);
    EXPECT_THROW(pa_coefficients(c, ReceiverKind::sPCR, 1e300), NumericalError);
}

TEST(Receivers, FastFimMatchesGenericCfim) {
    const NetworkConfig c = three_targets();
    for (auto k : {ReceiverKind::pPCR, ReceiverKind::sPCR})
        for (double alpha : {0.0, kQuadratureReference, 0.7}) {
            const ReceiverSpec s{k, 2.5, alpha};
            const FisherMatrix a = pa_fim(c, s), b = pa_fim_generic(c, s);
            EXPECT_LT((a.F - b.F).cwiseAbs().maxCoeff(), 1e-10 * a.F.cwiseAbs().maxCoeff());
            EXPECT_NO_THROW(a.check());
        }
}

TEST(Receivers, UnidentifiablePhase) {
    NetworkConfig c = three_targets();
    c.theta(1) = std::numbers::pi / 2;  // sin(theta + alpha) = 0 at the quadrature reference
    try {
        pa_rwmse_leading(c, {ReceiverKind::pPCR, 2.0});
        FAIL() << "expected UnidentifiableError";
    } catch (const UnidentifiableError& e) {
        EXPECT_EQ(e.index, 1);
    }
    c = three_targets();
    c.eta(2) = 0;
    EXPECT_THROW(ctod_rwmse(c), UnidentifiableError);
}

TEST(Receivers, BoundImprovesWithGain) {
    NetworkConfig c = three_targets();
    c.nu = 1e4;
    c.theta.setZero();
    for (auto k : {ReceiverKind::pPCR, ReceiverKind::sPCR}) {
        double prev = INFINITY;
        for (double g : {1.01, 1.1, 1.5, 3.0, 10.0, 30.0}) {
            const double r = pa_rwmse(c, {k, g}).full;
            EXPECT_LT(r, prev);
            prev = r;
        }
    }
}

TEST(Receivers, GainOptimizerBeatsDenseGrid) {
    NetworkConfig c = three_targets();
    c.nu = 1e4;
    c.theta.setZero();
    const GainOptimum o = optimize_gain(c, ReceiverKind::sPCR, 1.001, 30.0);
    double best = INFINITY;
    for (int i = 0; i <= 2000; ++i) {
        const double g = 1.001 + (30.0 - 1.001) * i / 2000;
        best = std::min(best, pa_rwmse(c, {ReceiverKind::sPCR, g}).full);
    }
    EXPECT_LE(o.rwmse, best * (1 + 1e-9));
    // The bound keeps improving with gain, so the optimum sits at the top of the range.
    EXPECT_TRUE(o.at_boundary);
    EXPECT_NEAR(o.g, 30.0, 1e-6);
}

TEST(Receivers, StandardPointFrozenValues) {
    const NetworkConfig c = standard_point();
    const GainOptimum o = optimize_gain(c, ReceiverKind::pPCR);
    EXPECT_TRUE(o.at_boundary);
    EXPECT_NEAR(o.g, 20.0, 1e-6);
    EXPECT_NEAR(o.rwmse, 0.058166041993830783, 1e-9);
    const CtodRwmse r = ctod_rwmse(c);
    EXPECT_NEAR(r.exact, 0.05724746917788355, 1e-11);
    EXPECT_NEAR(r.leading, 0.057682516651692016, 1e-11);
}

TEST(Receivers, CtodClosedFormConcentrationMatchesPipeline) {
    const NetworkConfig c = three_targets();
    const std::vector<Vec2> xs{Vec2(1, 2), Vec2(-0.5, 0.3), Vec2(0.2, -2)};
    const Concentrated a = ctod_concentrate(c, xs), b = ctod_concentrate_pipeline(c, xs);
    EXPECT_LT((a.state.mean - b.state.mean).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((a.state.cov - b.state.cov).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NEAR(a.xbar, std::sqrt(5 + 0.34 + 4.04), 1e-14);
    EXPECT_TRUE(is_physical(a.state.cov).ok);
}

TEST(Receivers, CtodCfimMatchesNumericalCfimAtMeanRecord) {
    // The CFIM is linear in xbar^2, so the outcome average is the CFIM at
    // E[xbar^2] = 4 nu (N_B' + 1).
    NetworkConfig c = three_targets();
    const double xbar = std::sqrt(4 * (c.nb_prime() + 1));
    const DistributionFamily fam = ctod_record_family(c, xbar, Vec2(1, 0), ctod_quadratures(c, Vec2(1, 0)));
    const FisherMatrix num = cfim_gaussian_distribution(fam, c.theta);
    const FisherMatrix cf = ctod_cfim(c);
    EXPECT_LT((num.F - cf.F).cwiseAbs().maxCoeff(), 1e-8 * cf.F.cwiseAbs().maxCoeff());
}

TEST(Receivers, CtodCramerRaoChain) {
    const NetworkConfig c = standard_point();
    const FisherMatrix cf = ctod_cfim(c), q = ctod_average_qfim(c);
    EXPECT_NO_THROW(cf.check());
    EXPECT_NO_THROW(q.check());
    const FisherMatrix gap{cf.labels, q.F - cf.F};
    EXPECT_GE(gap.min_eig(), -1e-8);
}

TEST(Receivers, WeakSignalConvergence) {
    const NetworkConfig c = make_config(50, 120, 32e-4, 32, 0.5, 0.0, 5000, NbPrime::MainText);
    const double q = ctod_rwmse(c).exact;
    EXPECT_NEAR(optimize_gain(c, ReceiverKind::pPCR).rwmse / q, 1.0, 1e-3);
    EXPECT_NEAR(optimize_gain(c, ReceiverKind::sPCR).rwmse / q, 1.0, 1e-3);
}
