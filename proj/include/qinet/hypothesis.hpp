#pragma once

#include "qinet/gaussian.hpp"
#include "qinet/network.hpp"

namespace qinet {

struct HypothesisPair {
    Vec eta0;
    Vec eta1;

    void validate(int m) const;
};

struct ChernoffAux {
    double G;
    double Lambda;
};

// G_p(mu) = 2^p / ((mu+1)^p - (mu-1)^p),
// Lambda_p(mu) = ((mu+1)^p + (mu-1)^p) / ((mu+1)^p - (mu-1)^p).
ChernoffAux chernoff_aux(double mu, double p);

// Tr[rho0^s rho1^(1-s)] for Gaussian states.
double chernoff_overlap_gaussian(const GaussianState& s0, const GaussianState& s1, double s);

// V_p: the covariance with every symplectic eigenvalue mu replaced by Lambda_p(mu).
Mat chernoff_covariance(const Mat& cov, double p);

struct QiError {
    double closed_form;    // 1/2 exp(-nu X)
    double exact_average;  // 1/2 (1 + X)^-nu
    double exponent;       // X per round
};

// The background N_B' is evaluated at the mean reflectivity of the pair.
// Phases are taken as corrected to zero; cfg.eta and cfg.theta are ignored.
QiError p_qi(const NetworkConfig& cfg, const HypothesisPair& pair);

double p_ci(const NetworkConfig& cfg, const HypothesisPair& pair);
double ci_exponent(const NetworkConfig& cfg, const HypothesisPair& pair);  // per round

struct ExponentRatio {
    double exact;          // ln(2 p_qi) / ln(2 p_ci), closed forms
    double exact_average;  // same with the averaged p_qi
    double approx;         // 4 sum omega d^2 / (sum sqrt(omega) d)^2, d = sqrt(eta0) - sqrt(eta1)
    double db;             // 10 log10(exact)
};

// Throws DomainError when the classical exponent vanishes.
ExponentRatio exponent_ratio(const NetworkConfig& cfg, const HypothesisPair& pair);

}  // namespace qinet
