#include <gtest/gtest.h>

#include <cmath>

#include "qinet/fock.hpp"
#include "qinet/network.hpp"

using namespace qinet;

TEST(Fock, DisplacementIsUnitaryOnLowBlock) {
    const CMat D = fock::displacement_matrix(cplx(1.5, -0.7), 200, 100);
    EXPECT_LT((D.adjoint() * D - CMat::Identity(100, 100)).cwiseAbs().maxCoeff(), 1e-12);
    // <0|D(a)|0> = exp(-|a|^2 / 2)
    EXPECT_NEAR(std::abs(D(0, 0)), std::exp(-0.5 * std::norm(cplx(1.5, -0.7))), 1e-15);
}

TEST(Fock, SingleModeMomentsMatchGaussian) {
    const fock::FockState s = fock::displaced_thermal(cplx(0.7, -0.4), 0.3, 40);
    const fock::Moments m = fock::moments(s);
    const GaussianState g = displaced_thermal(cplx(0.7, -0.4), 0.3);
    EXPECT_LT((m.mean - g.mean).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LT((m.cov - g.cov).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_LT(s.leakage, fock::kLeakageBudget);
}

TEST(Fock, ThermalPopulationsAreGeometric) {
    const double n = 0.8;
    const fock::FockState t = fock::thermal(n, 60);
    for (int k = 0; k < 5; ++k) EXPECT_NEAR(t.rho(k, k).real(), std::pow(n, k) / std::pow(n + 1, k + 1), 1e-15);
}

TEST(Fock, TmsvReducesToThermal) {
    const fock::FockState s = fock::tmsv(0.4, 40);
    const fock::FockState idler = fock::partial_trace(s, {1});
    const fock::FockState ref = fock::thermal(0.4, 40);
    EXPECT_LT((idler.rho - ref.rho).cwiseAbs().maxCoeff(), 1e-12);
    const fock::Moments m = fock::moments(s);
    EXPECT_LT((m.cov - tmsv(0.4).cov).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Fock, ThermalLossMatchesNetworkOutput) {
    const NetworkConfig c = make_config(1, 1, 0.1, 0.5, 0.3, 0.4, 1.0);
    const fock::FockState out = fock::thermal_loss(fock::tmsv(0.1, 30), 0, 0.3, 0.4, 0.5);
    const fock::Moments m = fock::moments(out);
    EXPECT_LT((m.cov - closed_form_output(c).state.cov).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_NEAR(out.rho.trace().real(), 1.0, 1e-8);
}

TEST(Fock, ThermalLossSerialAndParallelAgree) {
    const fock::FockState in = fock::tmsv(0.2, 20);
    const fock::FockState a = fock::thermal_loss(in, 0, 0.4, 0.1, 0.3, fock::kLeakageBudget, false);
    const fock::FockState b = fock::thermal_loss(in, 0, 0.4, 0.1, 0.3, fock::kLeakageBudget, true);
    EXPECT_LT((a.rho - b.rho).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Fock, PureLossAtUnitTransmissionIsAPhase) {
    const fock::FockState in = fock::coherent(cplx(0.5, 0.2), 20);
    const fock::FockState a = fock::thermal_loss(in, 0, 1.0, 0.3, 0.0);
    const fock::FockState b = fock::phase(in, 0, 0.3);
    EXPECT_LT((a.rho - b.rho).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Fock, CoherentPhaseQfi) {
    const cplx a(0.9, 0.2);
    const fock::FockState s = fock::coherent(a, 30);
    const double f = fock::qfi([&](double th) { return fock::phase(s, 0, th); }, 0.0);
    EXPECT_NEAR(f, 4 * std::norm(a), 1e-5);
}

TEST(Fock, PureStateDistances) {
    const cplx a(0.4, 0.1), b(-0.3, 0.5);
    const double ov = std::exp(-std::norm(a - b));  // |<a|b>|^2
    const fock::FockState s0 = fock::coherent(a, 30), s1 = fock::coherent(b, 30);
    EXPECT_NEAR(fock::fidelity(s0.rho, s1.rho), ov, 1e-8);
    EXPECT_NEAR(fock::overlap(s0.rho, s1.rho, 0.3), ov, 1e-8);
    EXPECT_NEAR(fock::helstrom_error(s0.rho, s1.rho), 0.5 * (1 - std::sqrt(1 - ov)), 1e-8);
    EXPECT_NEAR(fock::overlap(s0.rho, s0.rho, 0.5), 1.0, 1e-8);
}

TEST(Fock, BlockEigenOfProductOfDiagonals) {
    const fock::FockState t = fock::tensor(fock::thermal(0.3, 20, 1e-3), fock::thermal(0.6, 20, 1e-3));
    const fock::BlockEigen be = fock::block_eigen(t.rho);
    EXPECT_EQ(be.blocks.size(), std::size_t(t.dim()));
    double sum = 0;
    for (const auto& v : be.values) sum += v.sum();
    EXPECT_NEAR(sum, t.rho.trace().real(), 1e-14);
}

TEST(Fock, ApplyLeftRightOnSecondMode) {
    const int d = 14;
    const fock::FockState s = fock::tensor(fock::coherent(0.3, d), fock::coherent(0.5, d));
    CMat a = CMat::Zero(d, d);
    for (int k = 1; k < d; ++k) a(k - 1, k) = std::sqrt(double(k));
    // Tr[a_1 rho] ~ alpha_1 up to truncation.
    const CMat r = fock::apply_left(s.rho, a, 2, d, 1);
    EXPECT_NEAR(r.trace().real(), 0.5, 1e-8);
    const CMat l = fock::apply_right_dagger(s.rho, a, 2, d, 0);
    EXPECT_NEAR(l.trace().real(), 0.3, 1e-8);
}

TEST(Fock, LossyTmsvQfiEqualsGaussian) {
    const fock::FockState out = fock::thermal_loss(fock::tmsv(0.1, 40), 0, 0.3, 0.0, 0.5);
    const double f = fock::qfi([&](double th) { return fock::phase(out, 0, th); }, 0.0);
    const double h = fock::qfi_fidelity([&](double th) { return fock::phase(out, 0, th); }, 0.0, 1e-3);
    EXPECT_NEAR(f, 0.079041916, 1e-6);
    EXPECT_NEAR(h, f, 1e-6);
}
