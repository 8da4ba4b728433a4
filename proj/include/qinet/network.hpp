#pragma once

#include <vector>

#include "qinet/gaussian.hpp"

namespace qinet {

// How the single received mode's background photon number is computed.
//   MultipleAccess: sum_j omega_j (eta_j N_S + N_B), what the channel model gives.
//   MainText:       N_B + sum_j eta_j N_S / m.
enum class NbPrime { MultipleAccess, MainText };

const char* to_string(NbPrime c);
NbPrime nb_prime_from_string(const std::string& s);

struct NetworkConfig {
    int m = 1;
    int m_re = 1;
    double n_s = 0.0;
    double n_b = 0.0;
    Vec eta;
    Vec theta;
    double nu = 1.0;
    NbPrime convention = NbPrime::MultipleAccess;
    Vec omega;  // empty means uniform 1/m_re

    void validate() const;
    double weight(int j) const { return omega.size() ? omega(j) : 1.0 / m_re; }
    double nb_prime() const;
};

// Uniform-parameter helper used all over the tests and the CLI.
NetworkConfig make_config(int m, int m_re, double n_s, double n_b, double eta, double theta,
                          double nu, NbPrime conv = NbPrime::MultipleAccess);

struct OutputState {
    GaussianState state;          // return mode first, then m idlers
    std::vector<Mat2> s_blocks;   // idler-row / return-column correlation blocks
    double nb_prime;
};

// a -> e^{i theta}(sqrt(eta) a + sqrt(1-eta) a_env), env thermal with N_B/(1-eta).
GaussianState thermal_loss(const GaussianState& state, int mode, double eta, double theta, double n_b);

// Replaces `returns` by the single accessible output sum_j w_j a_j (+ vacuum
// padding to unit norm), placed first; other modes keep their order.
GaussianState multiple_access(const GaussianState& state, const std::vector<int>& returns,
                              const Vec& weights);

// The full orthogonal W whose last row carries `weights` padded with vacuum
// entries; used to check multiple_access against an explicit interferometer.
Mat multiple_access_matrix(const Vec& weights, int m_re);

Mat2 s_block(const NetworkConfig& cfg, int j);
OutputState closed_form_output(const NetworkConfig& cfg);
OutputState pipeline_output(const NetworkConfig& cfg);

// Closed form, cross-checked against the pipeline when m <= verify_limit.
OutputState build_output_state(const NetworkConfig& cfg, int verify_limit = 64);

double received_photon_number(const NetworkConfig& cfg);

}  // namespace qinet
