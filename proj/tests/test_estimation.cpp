#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "qinet/estimation.hpp"

using namespace qinet;

namespace {

StateFamily rotated(cplx alpha, double n) {
    StateFamily f;
    f.evaluate = [=](const Vec& th) { return apply(displaced_thermal(alpha, n), phase(1, 0, th(0))); };
    f.labels = {"theta"};
    f.near_pure = n == 0;
    return f;
}

}  // namespace

TEST(Estimation, FdStep) {
    const double h = std::cbrt(std::numeric_limits<double>::epsilon());
    EXPECT_DOUBLE_EQ(fd_step(0.2), h);
    EXPECT_DOUBLE_EQ(fd_step(-3.0), 3 * h);
}

TEST(Estimation, FisherCheckRejectsAsymmetricAndIndefinite) {
    FisherMatrix f{{"a", "b"}, Mat(2, 2)};
    f.F << 1, 0.5, 0.4, 1;
    EXPECT_THROW(f.check(), NumericalError);
    f.F << 1, 2, 2, 1;
    EXPECT_THROW(f.check(), NumericalError);
    f.F << 2, 1, 1, 2;
    EXPECT_NO_THROW(f.check());
    EXPECT_NEAR(f.min_eig(), 1.0, 1e-14);
}

TEST(Estimation, CoherentPhaseQfi) {
    const cplx a(0.8, 0.3);
    const FisherMatrix q = qfim_gaussian(rotated(a, 0.0), Vec::Zero(1));
    EXPECT_NEAR(q.F(0, 0), 4 * std::norm(a), 1e-6);
}

TEST(Estimation, DisplacedThermalPhaseQfi) {
    const cplx a(1.1, -0.4);
    const double n = 0.6;
    const FisherMatrix q = qfim_gaussian(rotated(a, n), Vec::Constant(1, 0.3));
    EXPECT_NEAR(q.F(0, 0), 4 * std::norm(a) / (2 * n + 1), 1e-6);
}

TEST(Estimation, OneDimensionalCfim) {
    // N(mu(t), s2(t)): F = mu'^2 / s2 + s2'^2 / (2 s2^2).
    DistributionFamily d;
    d.evaluate = [](const Vec& t) {
        return GaussianOutcome{Vec::Constant(1, 3 * t(0)), Mat::Constant(1, 1, 2 + t(0) * t(0))};
    };
    d.labels = {"t"};
    const double t = 0.7, s2 = 2 + t * t;
    const FisherMatrix f = cfim_gaussian_distribution(d, Vec::Constant(1, t));
    EXPECT_NEAR(f.F(0, 0), 9 / s2 + (2 * t) * (2 * t) / (2 * s2 * s2), 1e-7);
}

TEST(Estimation, AnalyticDerivativesMatchFiniteDifferences) {
    NetworkConfig c = make_config(2, 3, 0.3, 0.8, 0.5, 0.0, 1.0);
    c.theta << 0.4, -0.9;
    c.eta << 0.3, 0.7;
    StateFamily exact = network_theta_family(c);
    StateFamily fd = exact;
    fd.derivative = nullptr;
    const FisherMatrix a = qfim_gaussian(exact, c.theta), b = qfim_gaussian(fd, c.theta);
    EXPECT_LT((a.F - b.F).cwiseAbs().maxCoeff(), 1e-6 * a.F.cwiseAbs().maxCoeff());
    EXPECT_NO_THROW(a.check());
}

TEST(Estimation, EtaFamilyQfimIsPsd) {
    NetworkConfig c = make_config(2, 2, 0.3, 0.8, 0.5, 0.2, 1.0);
    const FisherMatrix q = qfim_gaussian(network_eta_family(c), c.eta);
    EXPECT_NO_THROW(q.check());
    EXPECT_GT(q.min_eig(), 0);
}

TEST(Estimation, RwmseAndReparameterize) {
    FisherMatrix f{theta_labels(2), Mat(2, 2)};
    f.F << 4, 0, 0, 16;
    EXPECT_NEAR(rwmse_from_fim(f), std::sqrt((0.25 + 0.0625) / 2), 1e-15);
    Vec w(2);
    w << 1, 0;
    EXPECT_NEAR(rwmse_from_fim(f, w), 0.5, 1e-15);

    Mat J(2, 1);
    J << 1, 1;
    const FisherMatrix g = reparameterize(f, J, {"sum"});
    EXPECT_NEAR(g.F(0, 0), 20, 1e-14);
    EXPECT_EQ(g.labels.front(), "sum");
}

TEST(Estimation, AveragePhaseScalings) {
    const NetworkConfig a = make_config(10, 120, 0.5, 32, 0.5, 0.0, 1000, NbPrime::MainText);
    NetworkConfig b = make_config(20, 120, 0.5, 32, 0.5, 0.0, 1000, NbPrime::MainText);
    const AveragePhaseErrors ea = average_phase_errors_degenerate(a), eb = average_phase_errors_degenerate(b);
    EXPECT_NEAR(ea.qi / eb.qi, std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(ea.ci / eb.ci, 2.0, 1e-12);
    b = make_config(10, 120, 0.5, 32, 0.5, 0.0, 4000, NbPrime::MainText);
    const AveragePhaseErrors ec = average_phase_errors_degenerate(b);
    EXPECT_NEAR(ea.qi / ec.qi, 2.0, 1e-12);
    EXPECT_NEAR(ea.ci / ec.ci, 2.0, 1e-12);
}
