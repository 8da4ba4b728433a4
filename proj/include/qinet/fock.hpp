#pragma once

#include <functional>
#include <vector>

#include "qinet/types.hpp"

// Truncated Fock-space density matrices for a few modes. Multi-indices put
// mode 0 most significant: index = sum_j n_j d^(modes-1-j).
namespace qinet::fock {

struct FockState {
    int modes = 1;
    int cutoff = 1;
    CMat rho;
    double leakage = 0;  // 1 - trace, accumulated over construction steps

    int dim() const { return static_cast<int>(rho.rows()); }
};

inline constexpr double kLeakageBudget = 1e-8;

// <m|D(alpha)|n> for m < rows, n < cols, from the associated-Laguerre form.
CMat displacement_matrix(cplx alpha, int rows, int cols);

FockState vacuum(int modes, int cutoff);
FockState thermal(double n, int cutoff, double budget = kLeakageBudget);
FockState coherent(cplx alpha, int cutoff, double budget = kLeakageBudget);
FockState displaced_thermal(cplx alpha, double n, int cutoff, double budget = kLeakageBudget);
// Mode 0 signal, mode 1 idler; Schmidt coefficients N^k/(N+1)^(k+1).
FockState tmsv(double n_s, int cutoff, double budget = kLeakageBudget);
FockState tensor(const FockState& a, const FockState& b);

// a -> e^{i theta}(sqrt(eta) a + sqrt(1-eta) e), e thermal with N_B/(1-eta),
// by Kraus operators of the beamsplitter dilation.
FockState thermal_loss(const FockState& s, int mode, double eta, double theta, double n_b,
                       double budget = kLeakageBudget, bool parallel = true);
FockState phase(const FockState& s, int mode, double theta);
FockState partial_trace(const FockState& s, const std::vector<int>& keep);

// (I x op x I) rho and rho (I x op x I)^dagger for a single-mode operator.
CMat apply_left(const CMat& rho, const CMat& op, int modes, int cutoff, int mode);
CMat apply_right_dagger(const CMat& rho, const CMat& op, int modes, int cutoff, int mode);

// Quadrature moments, hbar = 2, interleaved (q, p).
struct Moments {
    Vec mean;
    Mat cov;
};

Moments moments(const FockState& s);

// Tr[rho L^2] with L rho + rho L = 2 drho.
double qfi_sld(const CMat& rho, const CMat& drho);
// Central difference on a one-parameter family.
double qfi(const std::function<FockState(double)>& family, double x);
// 8 (1 - sqrt F) / h^2 with F the Uhlmann fidelity between x +- h/2.
double qfi_fidelity(const std::function<FockState(double)>& family, double x, double h);

double fidelity(const CMat& a, const CMat& b);  // (Tr sqrt(sqrt a b sqrt a))^2

// Tr[rho0^s rho1^(1-s)]; negative eigenvalues are clipped to zero and
// counted in `clipped` when given.
double overlap(const CMat& rho0, const CMat& rho1, double s, int* clipped = nullptr);

// Minimum error of a single-copy discrimination, 1/2 (1 - ||rho0 - rho1||_1 / 2).
double helstrom_error(const CMat& rho0, const CMat& rho1);

// Eigendecomposition through the connected components of the sparsity
// pattern of `rho` (and `extra`, when given).
struct BlockEigen {
    std::vector<std::vector<int>> blocks;
    std::vector<Vec> values;
    std::vector<CMat> vectors;
};

BlockEigen block_eigen(const CMat& rho, const CMat* extra = nullptr);

}  // namespace qinet::fock
