#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qinet/network.hpp"
#include "qinet/receivers.hpp"

namespace qinet::cli {

using nlohmann::json;

// Anything wrong with the config document; maps to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct NetworkSection {
    int m = 1;
    int m_re = 1;
    double n_s = 0.1;
    double n_b = 1.0;
    std::vector<double> eta{0.5};  // one entry broadcasts
    std::vector<double> theta{0.0};
    double nu = 1.0;
    NbPrime convention = NbPrime::MultipleAccess;
    std::vector<double> omega;

    NetworkConfig resolve(int m_override = 0) const;
};

struct ReceiverSection {
    ReceiverKind kind = ReceiverKind::pPCR;
    bool optimize = true;
    double gain = 2.0;
    double gain_lo = 1 + 1e-6;
    double gain_hi = 0;  // 0: 10 m
    double reference_phase = kQuadratureReference;
    int scan_points = 1;  // > 1: minimum over a common theta in [scan_min, scan_max]
    double scan_min = 0;
    double scan_max = 0;
};

struct SweepSection {
    bool present = false;
    std::string variable;
    std::vector<double> values;
    std::vector<double> panels_nb;  // fig4 panels; empty = the configured N_B only
};

struct HypothesisSection {
    bool present = false;
    std::vector<double> eta0;
    std::vector<double> eta1;
};

struct MonteCarloSection {
    int trials = 200;
    std::uint64_t seed = 1;
};

struct OutputSection {
    std::string path;
    std::string format = "csv";
};

struct BayesSection {
    int cutoff = 300;
    int grid = 512;
};

struct ExperimentConfig {
    std::string command;
    NetworkSection network;
    ReceiverSection receiver;
    SweepSection sweep;
    HypothesisSection hypothesis;
    MonteCarloSection montecarlo;
    OutputSection output;
    BayesSection bayes;
};

// Parses, fills command defaults (sweep grids, panels) and validates.
ExperimentConfig parse_config(const json& doc, const std::string& command);
ExperimentConfig load_config(const std::string& path, const std::string& command);

// The resolved document; feeding it back reproduces the run.
json to_json(const ExperimentConfig& cfg);

std::vector<double> logspace(double lo, double hi, int points);

}  // namespace qinet::cli
