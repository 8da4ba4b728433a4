#include "qinet/estimation.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>
#include <limits>

namespace qinet {

namespace {

Eigen::Map<const Vec> vec_of(const Mat& a) { return {a.data(), a.size()}; }

}  // namespace

void FisherMatrix::check() const {
    if (F.rows() != F.cols()) throw NumericalError("Fisher matrix is not square");
    const double scale = std::max(1.0, F.cwiseAbs().maxCoeff());
    if ((F - F.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
        throw NumericalError("Fisher matrix is not symmetric");
    if (min_eig() < -1e-9 * scale) throw NumericalError("Fisher matrix is not positive semidefinite");
}

double FisherMatrix::min_eig() const {
    if (F.size() == 0) return 0;
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (F + F.transpose()), Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

std::vector<std::string> theta_labels(int m) {
    std::vector<std::string> out;
    for (int j = 0; j < m; ++j) out.push_back("theta_" + std::to_string(j));
    return out;
}

double fd_step(double x) {
    return std::max(1.0, std::abs(x)) * std::cbrt(std::numeric_limits<double>::epsilon());
}

FisherMatrix qfim_gaussian(const GaussianState& state, const std::vector<GaussianState>& derivs,
                           std::vector<std::string> labels, bool near_pure) {
    const int n = state.modes();
    const auto k = static_cast<Eigen::Index>(derivs.size());
    const Mat w = omega(n);
    Mat R = Eigen::kroneckerProduct(state.cov, state.cov).eval();
    R -= Eigen::kroneckerProduct(w, w).eval();
    R = 0.5 * (R + R.transpose()).eval();

    Eigen::SelfAdjointEigenSolver<Mat> es(R);
    Vec lam = es.eigenvalues();
    const double top = lam.cwiseAbs().maxCoeff();
    if (lam.minCoeff() < 1e-10 * top) {
        if (!near_pure) throw NumericalError("R matrix is singular (pure or near-pure state)");
        lam.array() += 1e-10 * top;
    }

    Eigen::LLT<Mat> v_llt(state.cov);
    if (v_llt.info() != Eigen::Success) throw NumericalError("covariance is not positive definite");

    // Columns: R^-1 vec(dV_i) via the eigenbasis.
    Mat dv(R.rows(), k);
    for (Eigen::Index i = 0; i < k; ++i) dv.col(i) = vec_of(derivs[i].cov);
    const Mat proj = es.eigenvectors().transpose() * dv;
    const Mat solved = es.eigenvectors() * (lam.cwiseInverse().asDiagonal() * proj);

    FisherMatrix out{std::move(labels), Mat(k, k)};
    for (Eigen::Index i = 0; i < k; ++i) {
        const Vec vi = v_llt.solve(derivs[i].mean);
        for (Eigen::Index j = 0; j <= i; ++j) {
            const double f = 0.5 * dv.col(j).dot(solved.col(i)) + derivs[j].mean.dot(vi);
            out.F(i, j) = out.F(j, i) = f;
        }
    }
    out.F = 0.5 * (out.F + out.F.transpose()).eval();
    return out;
}

FisherMatrix qfim_gaussian(const StateFamily& family, const Vec& params) {
    const GaussianState s = family.evaluate(params);
    std::vector<GaussianState> d;
    for (Eigen::Index i = 0; i < params.size(); ++i) {
        if (family.derivative) {
            d.push_back(family.derivative(params, static_cast<int>(i)));
            continue;
        }
        const double h = fd_step(params(i));
        Vec p = params, q = params;
        p(i) += h;
        q(i) -= h;
        const GaussianState a = family.evaluate(p), b = family.evaluate(q);
        d.push_back({(a.mean - b.mean) / (2 * h), (a.cov - b.cov) / (2 * h)});
    }
    return qfim_gaussian(s, d, family.labels, family.near_pure);
}

FisherMatrix cfim_gaussian_distribution(const GaussianOutcome& dist,
                                        const std::vector<GaussianOutcome>& derivs,
                                        std::vector<std::string> labels) {
    const auto k = static_cast<Eigen::Index>(derivs.size());
    // Rescale by the fixed standard deviations: the information is invariant
    // and the solve stays well conditioned when variances span many decades.
    const Vec sd = dist.cov.diagonal().cwiseSqrt();
    if (!(sd.minCoeff() > 0)) throw NumericalError("outcome covariance has a zero variance");
    const Vec inv = sd.cwiseInverse();
    const Mat sigma = inv.asDiagonal() * dist.cov * inv.asDiagonal();
    Eigen::LLT<Mat> llt(sigma);
    if (llt.info() != Eigen::Success) throw NumericalError("outcome covariance is singular");

    std::vector<Mat> a(k);  // Sigma^-1 dSigma_i
    Mat dmu(sigma.rows(), k);
    for (Eigen::Index i = 0; i < k; ++i) {
        a[i] = llt.solve(inv.asDiagonal() * derivs[i].cov * inv.asDiagonal());
        dmu.col(i) = inv.asDiagonal() * derivs[i].mean;
    }
    const Mat sdmu = llt.solve(dmu);

    FisherMatrix out{std::move(labels), Mat(k, k)};
    for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = 0; j <= i; ++j) {
            const double tr = (a[i].array() * a[j].transpose().array()).sum();
            out.F(i, j) = out.F(j, i) = 0.5 * tr + dmu.col(j).dot(sdmu.col(i));
        }
    return out;
}

FisherMatrix cfim_gaussian_distribution(const DistributionFamily& family, const Vec& params) {
    const GaussianOutcome s = family.evaluate(params);
    std::vector<GaussianOutcome> d;
    for (Eigen::Index i = 0; i < params.size(); ++i) {
        if (family.derivative) {
            d.push_back(family.derivative(params, static_cast<int>(i)));
            continue;
        }
        const double h = fd_step(params(i));
        Vec p = params, q = params;
        p(i) += h;
        q(i) -= h;
        const GaussianOutcome a = family.evaluate(p), b = family.evaluate(q);
        d.push_back({(a.mean - b.mean) / (2 * h), (a.cov - b.cov) / (2 * h)});
    }
    return cfim_gaussian_distribution(s, d, family.labels);
}

double rwmse_from_fim(const FisherMatrix& fim, const std::optional<Vec>& weights) {
    const auto m = fim.F.rows();
    if (m == 0) throw DomainError("empty Fisher matrix");
    const Vec w = weights ? *weights : Vec::Constant(m, 1.0 / m);
    if (w.size() != m) throw DomainError("one weight per parameter");

    // Scale to unit diagonal first so the singularity test is relative.
    const Vec diag = fim.F.diagonal();
    for (Eigen::Index j = 0; j < m; ++j)
        if (!(diag(j) > 0)) {
            const std::string name = j < static_cast<Eigen::Index>(fim.labels.size()) ? fim.labels[j]
                                                                                     : std::to_string(j);
            throw UnidentifiableError("parameter " + name + " is unidentifiable at this operating point",
                                      static_cast<int>(j), Vec::Unit(m, j));
        }
    const Vec s = diag.cwiseSqrt().cwiseInverse();
    const Mat c = s.asDiagonal() * fim.F * s.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (c + c.transpose()));
    if (es.eigenvalues()(0) < 1e-12 * es.eigenvalues().maxCoeff()) {
        Vec dir = s.asDiagonal() * es.eigenvectors().col(0);
        dir.normalize();
        Eigen::Index idx;
        const double peak = dir.cwiseAbs().maxCoeff(&idx);
        throw UnidentifiableError("Fisher matrix is singular; unidentifiable parameter combination",
                                  peak > 0.99 ? static_cast<int>(idx) : -1, dir);
    }
    const Mat cinv = es.eigenvectors() * es.eigenvalues().cwiseInverse().asDiagonal() *
                     es.eigenvectors().transpose();
    double acc = 0;
    for (Eigen::Index j = 0; j < m; ++j) acc += w(j) * cinv(j, j) * s(j) * s(j);
    return std::sqrt(acc);
}

FisherMatrix reparameterize(const FisherMatrix& fim, const Mat& jacobian,
                            std::vector<std::string> labels) {
    if (jacobian.rows() != fim.F.rows()) throw DomainError("Jacobian rows must match the Fisher matrix");
    Eigen::FullPivLU<Mat> lu(jacobian);
    if (lu.rank() < std::min(jacobian.rows(), jacobian.cols())) throw DomainError("Jacobian is rank deficient");
    if (labels.size() != static_cast<std::size_t>(jacobian.cols())) throw DomainError("one label per new parameter");
    return {std::move(labels), jacobian.transpose() * fim.F * jacobian};
}

StateFamily network_theta_family(const NetworkConfig& cfg) {
    StateFamily f;
    f.labels = theta_labels(cfg.m);
    f.evaluate = [cfg](const Vec& theta) {
        NetworkConfig c = cfg;
        c.theta = theta;
        return closed_form_output(c).state;
    };
    f.derivative = [cfg](const Vec& theta, int i) {
        const int n = cfg.m + 1;
        GaussianState d{Vec::Zero(2 * n), Mat::Zero(2 * n, 2 * n)};
        const double c = 2 * std::sqrt(cfg.weight(i) * cfg.eta(i) * cfg.n_s * (cfg.n_s + 1));
        const double cs = std::cos(theta(i)), sn = std::sin(theta(i));
        Mat2 drt;  // d/dtheta of R(theta)^T
        drt << -sn, cs, -cs, -sn;
        const Mat2 ds = c * pauli_z() * drt;
        d.cov.block<2, 2>(2 * (i + 1), 0) = ds;
        d.cov.block<2, 2>(0, 2 * (i + 1)) = ds.transpose();
        return d;
    };
    return f;
}

StateFamily network_eta_family(const NetworkConfig& cfg) {
    StateFamily f;
    for (int j = 0; j < cfg.m; ++j) f.labels.push_back("eta_" + std::to_string(j));
    f.evaluate = [cfg](const Vec& eta) {
        NetworkConfig c = cfg;
        c.eta = eta;
        return closed_form_output(c).state;
    };
    f.derivative = [cfg](const Vec& eta, int i) {
        if (!(eta(i) > 0)) throw DomainError("eta derivative undefined at eta = 0");
        NetworkConfig c = cfg;
        c.eta = eta;
        const int n = cfg.m + 1;
        GaussianState d{Vec::Zero(2 * n), Mat::Zero(2 * n, 2 * n)};
        const Mat2 ds = s_block(c, i) / (2 * eta(i));
        d.cov.block<2, 2>(2 * (i + 1), 0) = ds;
        d.cov.block<2, 2>(0, 2 * (i + 1)) = ds.transpose();
        const double dnb = cfg.convention == NbPrime::MainText ? cfg.n_s / cfg.m : cfg.weight(i) * cfg.n_s;
        d.cov.topLeftCorner<2, 2>() = 2 * dnb * Mat2::Identity();
        return d;
    };
    return f;
}

AveragePhaseErrors average_phase_errors_degenerate(const NetworkConfig& cfg) {
    cfg.validate();
    const double ns = cfg.n_s, nbp = cfg.nb_prime();
    if (!(ns > 0)) throw DomainError("average-phase errors need N_S > 0");
    AveragePhaseErrors e{};
    e.qi = std::sqrt((nbp + 1) * (2 * ns + 1) / (4 * cfg.m * cfg.nu * ns * (ns + 1)));
    e.ci = std::sqrt((2 * cfg.n_b + 1) / (4.0 * cfg.m * cfg.m * cfg.nu * ns));
    const double corr = cfg.n_b > 0 ? std::sqrt(cfg.m * ns / (double(cfg.m_re) * cfg.m_re * cfg.nu * cfg.n_b))
                                    : INFINITY;
    e.correction_large = corr > 1e-2 * e.qi;
    return e;
}

}  // namespace qinet
