#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qinet/gaussian.hpp"
#include "qinet/network.hpp"

namespace qinet {

struct FisherMatrix {
    std::vector<std::string> labels;
    Mat F;

    // Throws NumericalError when F is not symmetric PSD to tolerance.
    void check() const;
    double min_eig() const;
};

std::vector<std::string> theta_labels(int m);

// Central-difference step for a parameter at value x.
double fd_step(double x);

// A parameterized Gaussian state. `derivative`, when set, returns the exact
// (d mean, d cov) with respect to parameter i; otherwise central differences.
struct StateFamily {
    std::function<GaussianState(const Vec&)> evaluate;
    std::function<GaussianState(const Vec&, int)> derivative;
    std::vector<std::string> labels;
    bool near_pure = false;
};

// A parameterized Gaussian outcome distribution N(mu, Sigma).
struct DistributionFamily {
    std::function<GaussianOutcome(const Vec&)> evaluate;
    std::function<GaussianOutcome(const Vec&, int)> derivative;
    std::vector<std::string> labels;
};

FisherMatrix qfim_gaussian(const StateFamily& family, const Vec& params);

// Same, but from precomputed moments and derivatives.
FisherMatrix qfim_gaussian(const GaussianState& state, const std::vector<GaussianState>& derivs,
                           std::vector<std::string> labels, bool near_pure = false);

FisherMatrix cfim_gaussian_distribution(const DistributionFamily& family, const Vec& params);
FisherMatrix cfim_gaussian_distribution(const GaussianOutcome& dist,
                                        const std::vector<GaussianOutcome>& derivs,
                                        std::vector<std::string> labels);

// sqrt(sum_j w_j (F^-1)_jj), default weights 1/m.
double rwmse_from_fim(const FisherMatrix& fim, const std::optional<Vec>& weights = std::nullopt);

// J^T F J. Labels name the new parameters.
FisherMatrix reparameterize(const FisherMatrix& fim, const Mat& jacobian,
                            std::vector<std::string> labels);

// The network output as a function of theta, with analytic derivatives.
StateFamily network_theta_family(const NetworkConfig& cfg);
// ... and of eta.
StateFamily network_eta_family(const NetworkConfig& cfg);

struct AveragePhaseErrors {
    double qi;
    double ci;
    // Set when the leading-order correction for eps_qi is not small
    // (m N_S / (m_re^2 nu N_B) relative term above 1e-2).
    bool correction_large;
};

// Degenerate case (phase differences known).
AveragePhaseErrors average_phase_errors_degenerate(const NetworkConfig& cfg);

}  // namespace qinet
