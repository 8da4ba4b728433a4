#pragma once

#include <vector>

#include "qinet/types.hpp"

// Gaussian bosonic states in the interleaved (q0,p0,q1,p1,...) ordering,
// hbar = 2 so the vacuum covariance is the identity.
namespace qinet {

struct GaussianState {
    Vec mean;
    Mat cov;

    int modes() const { return static_cast<int>(mean.size() / 2); }
    Vec2 mode_mean(int j) const { return mean.segment<2>(2 * j); }
    Mat2 block(int j, int k) const { return cov.block<2, 2>(2 * j, 2 * k); }
};

struct SymplecticOp {
    Mat S;
    Vec d;

    int modes() const { return static_cast<int>(S.rows() / 2); }
};

Mat omega(int n);
Mat2 rotation(double theta);  // a -> e^{i theta} a
Mat2 pauli_z();

GaussianState vacuum(int n);
GaussianState thermal(double n_mean);
GaussianState coherent(cplx alpha);
GaussianState displaced_thermal(cplx alpha, double n_mean);
GaussianState tmsv(double n_s);
GaussianState tensor(const GaussianState& a, const GaussianState& b);

// Each factory returns an op on `n` modes acting on the listed modes.
SymplecticOp identity_op(int n);
SymplecticOp beamsplitter(int n, int a, int b, double tau);
SymplecticOp phase(int n, int mode, double theta);
SymplecticOp pa(int n, int a, int b, double g);
// Passive network: output k = sum_l W(k,l) input l over `modes`.
SymplecticOp interferometer(int n, const std::vector<int>& modes, const Mat& W);
SymplecticOp displacement(int n, int mode, const Vec2& d);
SymplecticOp compose(const SymplecticOp& second, const SymplecticOp& first);

bool is_symplectic(const Mat& S, double tol = 1e-10);

GaussianState apply(const GaussianState& state, const SymplecticOp& op);
GaussianState partial_trace(const GaussianState& state, const std::vector<int>& keep);

struct HeterodyneResult {
    GaussianState state;  // remaining modes in their original order
    double density;       // outcome density w.r.t. d^2x
};

// x = 2(Re chi, Im chi); density integrates to one over R^2.
HeterodyneResult condition_heterodyne(const GaussianState& state, int mode, const Vec2& x);

// Rotated quadrature cos(phi) q + sin(phi) p of one mode.
struct Quadrature {
    int mode;
    double phi;
};

struct GaussianOutcome {
    Vec mean;
    Mat cov;
};

GaussianOutcome marginal_quadrature(const GaussianState& state,
                                    const std::vector<Quadrature>& selection);

Vec williamson_eigs(const Mat& cov);

struct PhotonMoments {
    Vec mean;
    Mat cov;
};

PhotonMoments photon_moments(const GaussianState& state, const std::vector<int>& modes);

struct Physicality {
    bool ok;
    double min_eig;  // smallest eigenvalue of cov + i Omega
};

Physicality is_physical(const Mat& cov, double tol = 1e-9);

// Unit vector u, orthogonal Q with Q.col(0) = u.
Mat orthogonal_completion(const Vec& u);

}  // namespace qinet
