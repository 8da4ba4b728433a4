#include "qinet/montecarlo.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>

#include "qinet/kernels.hpp"

namespace qinet {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double gaussian_nll(const Vec& x, const GaussianOutcome& d) {
    Eigen::LLT<Mat> llt(d.cov);
    if (llt.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
    const Vec r = x - d.mean;
    const double logdet = 2 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    return 0.5 * (r.dot(llt.solve(r)) + logdet);
}

struct Objective {
    std::function<double(const Vec&)> nll;
    Vec center;
};

double gsl_objective(const gsl_vector* u, void* p) {
    const auto* o = static_cast<const Objective*>(p);
    Vec theta(o->center.size());
    for (Eigen::Index j = 0; j < theta.size(); ++j)
        theta(j) = o->center(j) + 0.5 * std::numbers::pi * std::tanh(gsl_vector_get(u, j));
    const double v = o->nll(theta);
    return std::isfinite(v) ? v : 1e300;
}

// Nelder-Mead (GSL nmsimplex2) in u, theta = center + (pi/2) tanh(u).
MleResult minimize(const Objective& obj) {
    static const gsl_error_handler_t* previous = gsl_set_error_handler_off();
    (void)previous;
    const auto m = static_cast<std::size_t>(obj.center.size());
    gsl_multimin_function f{&gsl_objective, m, const_cast<Objective*>(&obj)};
    std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> x(gsl_vector_alloc(m), gsl_vector_free);
    std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> step(gsl_vector_alloc(m), gsl_vector_free);
    std::unique_ptr<gsl_multimin_fminimizer, decltype(&gsl_multimin_fminimizer_free)> s(
        gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, m), gsl_multimin_fminimizer_free);

    MleResult best{obj.center, false, 0, std::numeric_limits<double>::infinity()};
    constexpr int kStarts = 8;
    for (int k = 0; k < kStarts; ++k) {
        // Start 0 at the center, the rest on a fixed scrambled pattern.
        for (std::size_t j = 0; j < m; ++j) {
            const double frac = k == 0 ? 0.0 : std::fmod(0.5 + k * (0.6180339887498949 + 0.41421356 * j), 1.0) * 2 - 1;
            gsl_vector_set(x.get(), j, 0.9 * frac);
            gsl_vector_set(step.get(), j, 0.1);
        }
        gsl_multimin_fminimizer_set(s.get(), &f, x.get(), step.get());
        int it = 0, status = GSL_CONTINUE;
        while (status == GSL_CONTINUE && it < 500) {
            ++it;
            if (gsl_multimin_fminimizer_iterate(s.get())) break;
            status = gsl_multimin_test_size(gsl_multimin_fminimizer_size(s.get()), 1e-8);
        }
        const double v = s->fval;
        if (status == GSL_SUCCESS && v < best.neg_loglik) {
            Vec theta(m);
            for (std::size_t j = 0; j < m; ++j)
                theta(j) = obj.center(j) + 0.5 * std::numbers::pi * std::tanh(gsl_vector_get(s->x, j));
            best = {theta, true, it, v};
        } else if (!best.converged && it > best.iterations) {
            best.iterations = it;
        }
    }
    return best;
}

}  // namespace

Rng trial_rng(std::uint64_t seed, std::uint64_t trial) {
    return Rng(splitmix64(splitmix64(seed) ^ trial));
}

std::vector<Vec2> sample_heterodyne(const NetworkConfig& cfg, long nu, Rng& rng) {
    cfg.validate();
    if (nu < 1) throw DomainError("need at least one round");
    std::normal_distribution<double> n(0.0, std::sqrt(2 * (cfg.nb_prime() + 1)));
    std::vector<Vec2> out(static_cast<std::size_t>(nu));
    for (auto& x : out) {
        x(0) = n(rng);
        x(1) = n(rng);
    }
    return out;
}

Vec sample_gaussian(const Vec& mean, const Mat& cov, Rng& rng) {
    Eigen::LLT<Mat> llt(cov);
    if (llt.info() != Eigen::Success) throw NumericalError("sampling covariance is not positive definite");
    std::normal_distribution<double> n;
    Vec z(mean.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = n(rng);
    return mean + llt.matrixL() * z;
}

Vec sample_pa_counts(const CountStatistics& stats, Rng& rng) { return sample_gaussian(stats.mu, stats.sigma, rng); }

CtodRecord sample_ctod_record(const NetworkConfig& cfg, long nu, Rng& rng) {
    const Concentrated c = ctod_concentrate(cfg, sample_heterodyne(cfg, nu, rng));
    CtodRecord r{c.xbar, c.direction, ctod_quadratures(cfg, c.direction), Vec()};
    const GaussianOutcome d = marginal_quadrature(c.state, r.quads);
    r.y = sample_gaussian(d.mean, d.cov, rng);
    return r;
}

MleResult mle_ctod(const CtodRecord& rec, const NetworkConfig& cfg) {
    const DistributionFamily fam = ctod_record_family(cfg, rec.xbar, rec.direction, rec.quads);
    Objective o{[&](const Vec& th) { return gaussian_nll(rec.y, fam.evaluate(th)); }, cfg.theta};
    return minimize(o);
}

MleResult mle_pa(const Vec& counts, const NetworkConfig& cfg, const ReceiverSpec& spec) {
    // mean ~ cos(theta + alpha) is monotone for theta + alpha in (-pi, 0).
    Objective o{[&](const Vec& th) {
                    NetworkConfig c = cfg;
                    c.theta = th;
                    const CountStatistics s = pa_statistics(c, spec.kind, spec.gain, spec.reference_phase);
                    return gaussian_nll(counts, {s.mu, s.sigma});
                },
                Vec::Constant(cfg.m, -spec.reference_phase - 0.5 * std::numbers::pi)};
    return minimize(o);
}

RunResult run(const RunSpec& spec, bool parallel) {
    const NetworkConfig& cfg = spec.cfg;
    cfg.validate();
    if (spec.trials < 1) throw DomainError("need at least one trial");
    if (cfg.nu < 1 || cfg.nu != std::floor(cfg.nu)) throw DomainError("Monte Carlo needs an integer nu >= 1");
    const long nu = static_cast<long>(cfg.nu);
    const bool ctod = spec.receiver.kind == ReceiverKind::CtoD;

    std::optional<CountStatistics> stats;
    if (!ctod) stats = pa_statistics(cfg, spec.receiver.kind, spec.receiver.gain, spec.receiver.reference_phase);

    auto trial = [&](std::size_t t) {
        Rng rng = trial_rng(spec.seed, t);
        const MleResult r = ctod ? mle_ctod(sample_ctod_record(cfg, nu, rng), cfg)
                                 : mle_pa(sample_pa_counts(*stats, rng), cfg, spec.receiver);
        TrialResult out{static_cast<int>(t), r.converged, r.estimate, NAN};
        if (r.converged) out.sq_error = (r.estimate - cfg.theta).squaredNorm() / cfg.m;
        return out;
    };
    const auto n = static_cast<std::size_t>(spec.trials);
    RunResult res;
    res.trials = parallel ? kernels::map_parallel(n, trial) : kernels::map_serial(n, trial);

    std::vector<const TrialResult*> kept;
    for (const auto& t : res.trials)
        if (t.converged) kept.push_back(&t);
    res.discarded = spec.trials - static_cast<int>(kept.size());
    res.crb = ctod ? ctod_rwmse(cfg).exact : pa_rwmse(cfg, spec.receiver).full;
    const auto k = static_cast<double>(kept.size());
    if (kept.size() < 2) return res;

    double mse = 0;
    res.bias = Vec::Zero(cfg.m);
    for (const auto* t : kept) {
        mse += t->sq_error;
        res.bias += t->estimate - cfg.theta;
    }
    mse /= k;
    res.bias /= k;
    double var = 0;
    Vec bvar = Vec::Zero(cfg.m);
    for (const auto* t : kept) {
        var += (t->sq_error - mse) * (t->sq_error - mse);
        bvar += (t->estimate - cfg.theta - res.bias).cwiseAbs2();
    }
    var /= k - 1;
    bvar /= k - 1;
    res.rwmse = std::sqrt(mse);
    res.rwmse_se = std::sqrt(var / k) / (2 * res.rwmse);
    res.bias_se = (bvar / k).cwiseSqrt();
    return res;
}

}  // namespace qinet
