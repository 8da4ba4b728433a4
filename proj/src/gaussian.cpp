#include "qinet/gaussian.hpp"

#include <algorithm>
#include <cmath>

namespace qinet {

namespace {

void check_mode(int n, int j) {
    if (j < 0 || j >= n) throw DomainError("mode index out of range");
}

void embed(SymplecticOp& op, const std::vector<int>& modes, const Mat& local) {
    for (std::size_t a = 0; a < modes.size(); ++a)
        for (std::size_t b = 0; b < modes.size(); ++b)
            op.S.block<2, 2>(2 * modes[a], 2 * modes[b]) = local.block<2, 2>(2 * a, 2 * b);
}

std::vector<int> quad_index(const std::vector<int>& modes) {
    std::vector<int> idx;
    idx.reserve(2 * modes.size());
    for (int j : modes) {
        idx.push_back(2 * j);
        idx.push_back(2 * j + 1);
    }
    return idx;
}

}  // namespace

Mat omega(int n) {
    Mat w = Mat::Zero(2 * n, 2 * n);
    for (int j = 0; j < n; ++j) {
        w(2 * j, 2 * j + 1) = 1.0;
        w(2 * j + 1, 2 * j) = -1.0;
    }
    return w;
}

Mat2 rotation(double theta) {
    const double c = std::cos(theta), s = std::sin(theta);
    Mat2 r;
    r << c, -s, s, c;
    return r;
}

Mat2 pauli_z() { return Vec2(1.0, -1.0).asDiagonal(); }

GaussianState vacuum(int n) {
    if (n < 1) throw DomainError("vacuum needs at least one mode");
    return {Vec::Zero(2 * n), Mat::Identity(2 * n, 2 * n)};
}

GaussianState thermal(double n_mean) {
    if (n_mean < 0) throw DomainError("thermal photon number must be nonnegative");
    return {Vec::Zero(2), (2 * n_mean + 1) * Mat::Identity(2, 2)};
}

GaussianState coherent(cplx alpha) { return displaced_thermal(alpha, 0.0); }

GaussianState displaced_thermal(cplx alpha, double n_mean) {
    GaussianState s = thermal(n_mean);
    s.mean << 2 * alpha.real(), 2 * alpha.imag();
    return s;
}

GaussianState tmsv(double n_s) {
    if (n_s < 0) throw DomainError("TMSV photon number must be nonnegative");
    GaussianState s = vacuum(2);
    const double c = 2 * std::sqrt(n_s * (n_s + 1));
    s.cov.block<2, 2>(0, 0) *= 2 * n_s + 1;
    s.cov.block<2, 2>(2, 2) *= 2 * n_s + 1;
    s.cov.block<2, 2>(0, 2) = c * pauli_z();
    s.cov.block<2, 2>(2, 0) = c * pauli_z();
    return s;
}

GaussianState tensor(const GaussianState& a, const GaussianState& b) {
    const auto na = a.mean.size(), nb = b.mean.size();
    GaussianState s{Vec(na + nb), Mat::Zero(na + nb, na + nb)};
    s.mean << a.mean, b.mean;
    s.cov.topLeftCorner(na, na) = a.cov;
    s.cov.bottomRightCorner(nb, nb) = b.cov;
    return s;
}

SymplecticOp identity_op(int n) { return {Mat::Identity(2 * n, 2 * n), Vec::Zero(2 * n)}; }

SymplecticOp beamsplitter(int n, int a, int b, double tau) {
    check_mode(n, a);
    check_mode(n, b);
    if (a == b) throw DomainError("beamsplitter needs two distinct modes");
    if (!(tau >= 0 && tau <= 1)) throw DomainError("beamsplitter transmissivity outside [0,1]");
    const double t = std::sqrt(tau), r = std::sqrt(1 - tau);
    Mat local(4, 4);
    local << t, 0, r, 0,
             0, t, 0, r,
             -r, 0, t, 0,
             0, -r, 0, t;
    SymplecticOp op = identity_op(n);
    embed(op, {a, b}, local);
    return op;
}

SymplecticOp phase(int n, int mode, double theta) {
    check_mode(n, mode);
    SymplecticOp op = identity_op(n);
    op.S.block<2, 2>(2 * mode, 2 * mode) = rotation(theta);
    return op;
}

SymplecticOp pa(int n, int a, int b, double g) {
    check_mode(n, a);
    check_mode(n, b);
    if (a == b) throw DomainError("PA needs two distinct modes");
    if (!(g >= 1)) throw DomainError("PA gain must be >= 1");
    // Port a leaves as the phase conjugate sqrt(g) b + sqrt(g-1) a^dagger,
    // port b as the amplified sqrt(g) a + sqrt(g-1) b^dagger.
    const double u = std::sqrt(g - 1), v = std::sqrt(g);
    Mat local(4, 4);
    local << u, 0, v, 0,
             0, -u, 0, v,
             v, 0, u, 0,
             0, v, 0, -u;
    SymplecticOp op = identity_op(n);
    embed(op, {a, b}, local);
    return op;
}

SymplecticOp interferometer(int n, const std::vector<int>& modes, const Mat& W) {
    const auto k = static_cast<Eigen::Index>(modes.size());
    if (W.rows() != k || W.cols() != k) throw DomainError("interferometer size mismatch");
    if (!(W * W.transpose()).isIdentity(1e-10)) throw DomainError("interferometer matrix is not orthogonal");
    for (int j : modes) check_mode(n, j);
    Mat local = Mat::Zero(2 * k, 2 * k);
    for (Eigen::Index a = 0; a < k; ++a)
        for (Eigen::Index b = 0; b < k; ++b)
            local.block<2, 2>(2 * a, 2 * b) = W(a, b) * Mat2::Identity();
    SymplecticOp op = identity_op(n);
    embed(op, modes, local);
    return op;
}

SymplecticOp displacement(int n, int mode, const Vec2& d) {
    check_mode(n, mode);
    SymplecticOp op = identity_op(n);
    op.d.segment<2>(2 * mode) = d;
    return op;
}

SymplecticOp compose(const SymplecticOp& second, const SymplecticOp& first) {
    if (second.S.rows() != first.S.rows()) throw DomainError("composing ops of different size");
    return {second.S * first.S, second.S * first.d + second.d};
}

bool is_symplectic(const Mat& S, double tol) {
    if (S.rows() != S.cols() || S.rows() % 2) return false;
    const Mat w = omega(static_cast<int>(S.rows() / 2));
    return (S * w * S.transpose() - w).cwiseAbs().maxCoeff() <= tol;
}

GaussianState apply(const GaussianState& state, const SymplecticOp& op) {
    if (op.S.rows() != state.mean.size()) throw DomainError("op and state dimensions differ");
    return {op.S * state.mean + op.d, op.S * state.cov * op.S.transpose()};
}

GaussianState partial_trace(const GaussianState& state, const std::vector<int>& keep) {
    if (keep.empty()) throw DomainError("partial trace must keep at least one mode");
    for (int j : keep) check_mode(state.modes(), j);
    const auto idx = quad_index(keep);
    return {state.mean(idx), state.cov(idx, idx)};
}

HeterodyneResult condition_heterodyne(const GaussianState& state, int mode, const Vec2& x) {
    const int n = state.modes();
    check_mode(n, mode);
    if (n < 2) throw DomainError("heterodyne conditioning needs a second mode to keep");
    std::vector<int> rest;
    for (int j = 0; j < n; ++j)
        if (j != mode) rest.push_back(j);
    const auto ia = quad_index(rest);
    const auto ib = quad_index({mode});

    const Mat2 sb = state.cov(ib, ib) + Mat2::Identity();
    const Mat sab = state.cov(ia, ib);
    Eigen::LLT<Mat2> llt(sb);
    if (llt.info() != Eigen::Success) throw DomainError("heterodyne on a non-physical mode");
    const Vec2 r = x - state.mean(ib);
    const Mat gain = llt.solve(sab.transpose()).transpose();

    HeterodyneResult out;
    out.state.mean = state.mean(ia) + gain * r;
    out.state.cov = state.cov(ia, ia) - gain * sab.transpose();
    out.state.cov = 0.5 * (out.state.cov + out.state.cov.transpose()).eval();
    const double q = r.dot(llt.solve(r));
    out.density = std::exp(-0.5 * q) / (2 * M_PI * std::sqrt(sb.determinant()));
    return out;
}

GaussianOutcome marginal_quadrature(const GaussianState& state,
                                    const std::vector<Quadrature>& selection) {
    const auto k = static_cast<Eigen::Index>(selection.size());
    Mat U = Mat::Zero(k, state.mean.size());
    for (Eigen::Index a = 0; a < k; ++a) {
        check_mode(state.modes(), selection[a].mode);
        U(a, 2 * selection[a].mode) = std::cos(selection[a].phi);
        U(a, 2 * selection[a].mode + 1) = std::sin(selection[a].phi);
    }
    return {U * state.mean, U * state.cov * U.transpose()};
}

Vec williamson_eigs(const Mat& cov) {
    if (cov.rows() != cov.cols() || cov.rows() % 2) throw DomainError("covariance must be square and even");
    const int n = static_cast<int>(cov.rows() / 2);
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (cov + cov.transpose()));
    if (es.eigenvalues().minCoeff() <= 0) throw DomainError("covariance is not positive definite");
    const Mat w = es.operatorSqrt();
    // i W Omega W is Hermitian and similar to i Omega V; spectrum is +-mu_k.
    const CMat h = cplx(0, 1) * (w * omega(n) * w).cast<cplx>();
    Eigen::SelfAdjointEigenSolver<CMat> hs(h, Eigen::EigenvaluesOnly);
    Vec mu = hs.eigenvalues().tail(n);
    std::sort(mu.data(), mu.data() + n);
    return mu;
}

PhotonMoments photon_moments(const GaussianState& state, const std::vector<int>& modes) {
    const auto k = static_cast<Eigen::Index>(modes.size());
    PhotonMoments pm{Vec(k), Mat(k, k)};
    for (Eigen::Index a = 0; a < k; ++a) {
        check_mode(state.modes(), modes[a]);
        const Vec2 xa = state.mode_mean(modes[a]);
        pm.mean(a) = (state.block(modes[a], modes[a]).trace() + xa.squaredNorm() - 2) / 4;
        for (Eigen::Index b = 0; b < k; ++b) {
            const Mat2 v = state.block(modes[a], modes[b]);
            const double delta = modes[a] == modes[b] ? 1.0 : 0.0;
            pm.cov(a, b) = ((v * v.transpose()).trace() + 2 * xa.dot(v * state.mode_mean(modes[b])) -
                            2 * delta) / 8;
        }
    }
    return pm;
}

Physicality is_physical(const Mat& cov, double tol) {
    if (cov.rows() != cov.cols() || cov.rows() % 2) return {false, -INFINITY};
    const double scale = std::max(1.0, cov.cwiseAbs().maxCoeff());
    if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) return {false, -INFINITY};
    const int n = static_cast<int>(cov.rows() / 2);
    const CMat h = cov.cast<cplx>() + cplx(0, 1) * omega(n).cast<cplx>();
    Eigen::SelfAdjointEigenSolver<CMat> es(h, Eigen::EigenvaluesOnly);
    // Tolerance scales with the largest entry: amplified chains reach 1e10+.
    const double lo = es.eigenvalues().minCoeff();
    return {lo >= -tol * scale, lo};
}

Mat orthogonal_completion(const Vec& u) {
    const double nu = u.norm();
    if (!(nu > 0)) throw DomainError("cannot complete a zero vector");
    Eigen::HouseholderQR<Mat> qr(u / nu);
    Mat q = qr.householderQ();
    if (q.col(0).dot(u) < 0) q.col(0) *= -1.0;
    return q;
}

}  // namespace qinet
