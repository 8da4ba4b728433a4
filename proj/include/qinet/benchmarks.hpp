#pragma once

#include "qinet/network.hpp"

namespace qinet {

// sqrt((2N_B+1) / (4 nu N_S max_j omega_j eta_j)); for uniform omega this is
// sqrt(m_re (2N_B+1) / (4 nu N_S max eta)).
double classical_asymptotic_rwmse(const NetworkConfig& cfg);

struct Achievable {
    double value;
    bool valid;  // m even and nu a multiple of m/2
};

// Two-mode pairing protocol: sqrt((2N_B+1) sum_j (omega_j eta_j)^-1 / (4 m nu N_S)).
Achievable classical_achievable_rwmse(const NetworkConfig& cfg);

struct AveragePhaseRmse {
    double spread;        // sqrt((2N_B+1)/(4 m nu N_S))
    double concentrated;  // sqrt((2N_B+1)/(4 m^2 nu N_S))
};

AveragePhaseRmse classical_average_phase_rmse(const NetworkConfig& cfg);

// Single-shot MSE of the arccos homodyne estimator for a coherent amplitude c
// (mean c cos(theta) in the q quadrature), uniform theta, out-of-range
// outcomes guessed as 3 pi / 2. Outer theta integral split into panels.
double homodyne_mse(double c, double n_b, bool parallel = true);

// Bayesian variance for rho(theta) = D(a + b e^{-i theta}) rho_th D^dagger,
// theta uniform on [0, 2 pi). The Fourier coefficients of rho(theta) come
// from `grid` periodic samples; grid = 0 takes them without aliasing.
struct BayesResult {
    double mse;
    double leakage;
};

BayesResult bayes_mse(cplx fixed, cplx rotating, double n_b, int cutoff = 300, int grid = 512,
                      double budget = 1e-6);

// Per-component amplitude of the concentrated classical probe,
// sqrt(omega eta m N_S / 2), for transmitter 0.
double concentrated_probe_amplitude(const NetworkConfig& cfg);

struct NonAsymPlan {
    long nu_prime = 0;
    long J = 0;
    double value = 0;
};

struct NonAsymBounds {
    NonAsymPlan lower;
    NonAsymPlan upper;
    bool strict;  // nu < ceil(m/2), where the construction applies literally
};

inline constexpr double kGuessVariance = 3.289868133696453;  // pi^2 / 3

// Exhaustive search over nu' in {1..nu}; J = min(floor(2 nu / nu'), m) for
// the lower bound, J' = min(floor(nu / nu'), m) for the upper, and the
// all-guess plan J = 0. Ties go to the smaller J.
NonAsymBounds nonasym_bounds(int m, long nu, double e_baye, double e_homo);

}  // namespace qinet
