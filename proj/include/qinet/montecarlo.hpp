#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "qinet/receivers.hpp"

namespace qinet {

using Rng = std::mt19937_64;

// Independent stream for one trial: mt19937_64 seeded by a splitmix64 hash
// of (seed, trial), so results never depend on scheduling.
Rng trial_rng(std::uint64_t seed, std::uint64_t trial);

struct RunSpec {
    NetworkConfig cfg;
    ReceiverSpec receiver;
    int trials = 200;
    std::uint64_t seed = 1;
};

// nu iid heterodyne outcomes of the return mode, N(0, 2(N_B'+1) I).
std::vector<Vec2> sample_heterodyne(const NetworkConfig& cfg, long nu, Rng& rng);

struct CtodRecord {
    double xbar;
    Vec2 direction;
    std::vector<Quadrature> quads;  // set at the configured theta
    Vec y;                          // homodyne outcomes of the concentrated idlers
};

CtodRecord sample_ctod_record(const NetworkConfig& cfg, long nu, Rng& rng);

Vec sample_gaussian(const Vec& mean, const Mat& cov, Rng& rng);
Vec sample_pa_counts(const CountStatistics& stats, Rng& rng);

struct MleResult {
    Vec estimate;
    bool converged;
    int iterations;
    double neg_loglik;
};

// Maximum likelihood over theta inside center +- pi/2 (open box), from
// eight deterministic starts; the best converged start wins.
MleResult mle_ctod(const CtodRecord& rec, const NetworkConfig& cfg);
MleResult mle_pa(const Vec& counts, const NetworkConfig& cfg, const ReceiverSpec& spec);

struct TrialResult {
    int trial;
    bool converged;
    Vec estimate;
    double sq_error;  // (1/m) sum_j (estimate_j - theta_j)^2
};

struct RunResult {
    std::vector<TrialResult> trials;
    int discarded = 0;
    double rwmse = NAN;     // sqrt of the mean squared error over kept trials
    double rwmse_se = NAN;  // delta-method standard error
    Vec bias;
    Vec bias_se;
    double crb = NAN;       // CtoD exact or PA full-CFIM prediction
};

RunResult run(const RunSpec& spec, bool parallel = true);

}  // namespace qinet
