#include "qinet/hypothesis.hpp"

#include <cmath>

namespace qinet {

void HypothesisPair::validate(int m) const {
    if (eta0.size() != m || eta1.size() != m) throw DomainError("hypothesis reflectivities need one entry per transmitter");
    for (int j = 0; j < m; ++j)
        if (!(eta0(j) >= 0 && eta0(j) <= 1 && eta1(j) >= 0 && eta1(j) <= 1))
            throw DomainError("hypothesis reflectivity outside [0,1]");
}

ChernoffAux chernoff_aux(double mu, double p) {
    if (!(p > 0 && p <= 1)) throw DomainError("Chernoff power outside (0,1]");
    if (!(mu >= 1 - 1e-9)) throw DomainError("symplectic eigenvalue below 1");
    mu = std::max(mu, 1.0);
    const double a = std::pow(mu + 1, p), b = std::pow(mu - 1, p);
    return {std::pow(2.0, p) / (a - b), (a + b) / (a - b)};
}

Mat chernoff_covariance(const Mat& cov, double p) {
    const int n = static_cast<int>(cov.rows() / 2);
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (cov + cov.transpose()));
    if (es.eigenvalues().minCoeff() <= 0) throw DomainError("covariance is not positive definite");
    const Mat w = es.operatorSqrt();
    // i W Omega W has eigenvalues +-mu_k; Lambda_p(mu)/mu through its
    // eigenbasis turns W^2 = V into S diag(Lambda_p(mu)) S^T.
    const CMat h = cplx(0, 1) * (w * omega(n) * w).cast<cplx>();
    Eigen::SelfAdjointEigenSolver<CMat> hs(h);
    Vec g(hs.eigenvalues().size());
    for (Eigen::Index i = 0; i < g.size(); ++i) {
        const double mu = std::abs(hs.eigenvalues()(i));
        g(i) = chernoff_aux(mu, p).Lambda / std::max(mu, 1.0);
    }
    const Mat gh = (hs.eigenvectors() * g.cast<cplx>().asDiagonal() * hs.eigenvectors().adjoint()).real();
    Mat out = w * gh * w;
    return 0.5 * (out + out.transpose());
}

double chernoff_overlap_gaussian(const GaussianState& s0, const GaussianState& s1, double s) {
    if (s0.modes() != s1.modes()) throw DomainError("Chernoff overlap needs equal mode counts");
    if (!(s >= 0 && s <= 1)) throw DomainError("Chernoff parameter outside [0,1]");
    for (const auto* st : {&s0, &s1})
        if (!is_physical(st->cov).ok) throw DomainError("Chernoff overlap of an unphysical state");
    if (s == 0 || s == 1) return 1.0;  // Tr rho for full-rank Gaussian states

    const int n = s0.modes();
    const Vec mu0 = williamson_eigs(s0.cov), mu1 = williamson_eigs(s1.cov);
    double pre = std::pow(2.0, n);
    for (int k = 0; k < n; ++k) pre *= chernoff_aux(mu0(k), s).G * chernoff_aux(mu1(k), 1 - s).G;
    const Mat sum = chernoff_covariance(s0.cov, s) + chernoff_covariance(s1.cov, 1 - s);
    Eigen::LLT<Mat> llt(sum);
    if (llt.info() != Eigen::Success) throw NumericalError("degenerate Chernoff covariance sum");
    const double det = std::pow(llt.matrixL().toDenseMatrix().diagonal().prod(), 2);
    const Vec d = s0.mean - s1.mean;
    return pre / std::sqrt(det) * std::exp(-0.5 * d.dot(llt.solve(d)));
}

namespace {

double lambda_half(double n) {
    const double r = std::sqrt(n + 1) + std::sqrt(n);
    return r * r;
}

struct Sums {
    double sq = 0;   // sum omega d^2
    double lin = 0;  // sum sqrt(omega) d
};

Sums pair_sums(const NetworkConfig& cfg, const HypothesisPair& pair) {
    pair.validate(cfg.m);
    Sums s;
    for (int j = 0; j < cfg.m; ++j) {
        const double d = std::sqrt(pair.eta0(j)) - std::sqrt(pair.eta1(j));
        s.sq += cfg.weight(j) * d * d;
        s.lin += std::sqrt(cfg.weight(j)) * d;
    }
    return s;
}

double qi_exponent(const NetworkConfig& cfg, const HypothesisPair& pair) {
    const Sums s = pair_sums(cfg, pair);
    NetworkConfig c = cfg;
    c.eta = 0.5 * (pair.eta0 + pair.eta1);
    c.validate();
    const double ns = cfg.n_s;
    return ns * (ns + 1) * s.sq / ((c.nb_prime() + 1) * lambda_half(ns));
}

}  // namespace

QiError p_qi(const NetworkConfig& cfg, const HypothesisPair& pair) {
    const double x = qi_exponent(cfg, pair);
    return {0.5 * std::exp(-cfg.nu * x), 0.5 * std::exp(-cfg.nu * std::log1p(x)), x};
}

double ci_exponent(const NetworkConfig& cfg, const HypothesisPair& pair) {
    const Sums s = pair_sums(cfg, pair);
    return cfg.n_s * s.lin * s.lin / lambda_half(cfg.n_b);
}

double p_ci(const NetworkConfig& cfg, const HypothesisPair& pair) {
    return 0.5 * std::exp(-cfg.nu * ci_exponent(cfg, pair));
}

ExponentRatio exponent_ratio(const NetworkConfig& cfg, const HypothesisPair& pair) {
    const double y = ci_exponent(cfg, pair);
    if (!(y > 0)) throw DomainError("classical exponent zero; ratio undefined");
    const double x = qi_exponent(cfg, pair);
    const Sums s = pair_sums(cfg, pair);
    ExponentRatio r;
    r.exact = x / y;
    r.exact_average = std::log1p(x) / y;
    r.approx = 4 * s.sq / (s.lin * s.lin);
    r.db = 10 * std::log10(r.exact);
    return r;
}

}  // namespace qinet
