#pragma once

#include <string>
#include <vector>

#include "qinet/estimation.hpp"
#include "qinet/network.hpp"

namespace qinet {

enum class ReceiverKind { pPCR, sPCR, CtoD };

const char* to_string(ReceiverKind k);
ReceiverKind receiver_from_string(const std::string& s);

// Idler rotation before the balanced beamsplitters. With -pi/2 the photon
// difference reads the quadrature whose mean moves linearly in theta_j at
// theta_j = 0; with 0 the chain is the bare one and the mean goes like cos.
inline constexpr double kQuadratureReference = -1.5707963267948966;

struct ReceiverSpec {
    ReceiverKind kind = ReceiverKind::pPCR;
    double gain = 2.0;
    double reference_phase = kQuadratureReference;
};

// nu-round totals of the photon-number differences (CLT Gaussian).
struct CountStatistics {
    Vec mu;
    Mat sigma;
    double nu;
};

struct PaCoefficients {
    Vec f;  // 1/m (pPCR) or g^j (sPCR)
    Vec a;  // f_j (g-1)(N_B'+1)(2N_S+1) + N_S
    Vec B;  // sqrt(2 f_j (g-1) N_S (N_S+1) omega_j eta_j)
};

PaCoefficients pa_coefficients(const NetworkConfig& cfg, ReceiverKind kind, double g);

// Exact moments: mu_j = nu sqrt2 B_j cos psi_j,
// Sigma_jk = nu [a_j delta_jk + B_j B_k cos(psi_j + psi_k)], psi_j = theta_j + alpha.
CountStatistics pa_statistics(const NetworkConfig& cfg, ReceiverKind kind, double g, double alpha);
CountStatistics ppcr_statistics(const NetworkConfig& cfg, double g, double alpha = 0.0);
CountStatistics spcr_statistics(const NetworkConfig& cfg, double g, double alpha = 0.0);
GaussianOutcome pa_statistics_derivative(const NetworkConfig& cfg, ReceiverKind kind, double g,
                                         double alpha, int i);

// The covariance as usually quoted, nu (diag(a) + b b^T) with b = B cos(theta),
// exact only when every theta_j is 0 or pi.
CountStatistics pa_statistics_textbook(const NetworkConfig& cfg, ReceiverKind kind, double g);

// Gaussian simulation of the receiver chain; per-round moments of N_D.
struct ChainMoments {
    Vec mu;
    Mat sigma;
    GaussianState final_state;
};

ChainMoments pa_chain_moments(const NetworkConfig& cfg, ReceiverKind kind, double g, double alpha);

FisherMatrix pa_fim(const NetworkConfig& cfg, const ReceiverSpec& spec);
// Same quantity through the generic Gaussian CFIM; slower, used for checks.
FisherMatrix pa_fim_generic(const NetworkConfig& cfg, const ReceiverSpec& spec);
// Rank-one closed form 2 nu db_j db_k [a_j^-1 delta_jk - ...] at the reference phase.
FisherMatrix pa_fim_rank_one(const NetworkConfig& cfg, const ReceiverSpec& spec);

struct PaRwmse {
    double full = NAN;     // inverse of the full CFIM (NaN when skipped)
    double leading = NAN;  // sqrt(sum_j a_j / (2 m nu (db_j)^2))
};

// Full CFIM inversion is skipped above `full_limit` transmitters.
PaRwmse pa_rwmse(const NetworkConfig& cfg, const ReceiverSpec& spec, int full_limit = 400);
double pa_rwmse_leading(const NetworkConfig& cfg, const ReceiverSpec& spec);

struct GainOptimum {
    double g;
    double rwmse;
    bool at_boundary;
};

enum class GainObjective { Full, Leading };

GainOptimum optimize_gain(const NetworkConfig& cfg, ReceiverKind kind, double g_lo, double g_hi,
                          double alpha = kQuadratureReference, GainObjective obj = GainObjective::Full);
GainOptimum optimize_gain(const NetworkConfig& cfg, ReceiverKind kind);  // (1+1e-6, 10 m]

// CtoD. Outcomes x_n are heterodyne records of the return mode.
struct Concentrated {
    GaussianState state;  // m idlers
    double xbar;          // sqrt(sum_n |x_n|^2)
    Vec2 direction;       // unit reference direction (that of x_0)
};

Concentrated ctod_concentrate(const NetworkConfig& cfg, const std::vector<Vec2>& outcomes);
Concentrated ctod_concentrate_pipeline(const NetworkConfig& cfg, const std::vector<Vec2>& outcomes);

// Homodyne quadratures along d(mean_j)/d(theta_j) at the configured theta.
std::vector<Quadrature> ctod_quadratures(const NetworkConfig& cfg, const Vec2& direction);

// Homodyne record distribution as a function of theta for fixed receiver settings.
DistributionFamily ctod_record_family(const NetworkConfig& cfg, double xbar, const Vec2& direction,
                                      const std::vector<Quadrature>& quads);

FisherMatrix ctod_cfim(const NetworkConfig& cfg);            // outcome-averaged, nu rounds
FisherMatrix ctod_average_qfim(const NetworkConfig& cfg);    // nu E_x[QFIM(rho_x)]

struct CtodRwmse {
    double exact;
    double leading;
};

CtodRwmse ctod_rwmse(const NetworkConfig& cfg);

}  // namespace qinet
