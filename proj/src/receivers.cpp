#include "qinet/receivers.hpp"

#include <cmath>
#include <limits>

#include "qinet/kernels.hpp"

namespace qinet {

const char* to_string(ReceiverKind k) {
    switch (k) {
        case ReceiverKind::pPCR: return "pPCR";
        case ReceiverKind::sPCR: return "sPCR";
        case ReceiverKind::CtoD: return "CtoD";
    }
    return "?";
}

ReceiverKind receiver_from_string(const std::string& s) {
    if (s == "pPCR" || s == "ppcr") return ReceiverKind::pPCR;
    if (s == "sPCR" || s == "spcr") return ReceiverKind::sPCR;
    if (s == "CtoD" || s == "ctod") return ReceiverKind::CtoD;
    throw DomainError("unknown receiver kind '" + s + "'");
}

namespace {

void check_pa(const NetworkConfig& cfg, ReceiverKind kind, double g) {
    cfg.validate();
    if (kind == ReceiverKind::CtoD) throw DomainError("CtoD is not a PA receiver");
    if (!(g >= 1) || !std::isfinite(g)) throw DomainError("PA gain must be finite and >= 1");
}

// a_j / B_j^2 without forming g^j, which overflows for long sPCR chains.
double a_over_b2(const NetworkConfig& cfg, ReceiverKind kind, double g, int j) {
    const double ns = cfg.n_s, nbp = cfg.nb_prime();
    const double we = cfg.weight(j) * cfg.eta(j);
    const double inv_f = kind == ReceiverKind::pPCR ? cfg.m : std::pow(g, -j);
    return ((g - 1) * (nbp + 1) * (2 * ns + 1) + ns * inv_f) / (2 * (g - 1) * ns * (ns + 1) * we);
}

}  // namespace

PaCoefficients pa_coefficients(const NetworkConfig& cfg, ReceiverKind kind, double g) {
    check_pa(cfg, kind, g);
    const int m = cfg.m;
    const double ns = cfg.n_s, nbp = cfg.nb_prime();
    PaCoefficients c{Vec(m), Vec(m), Vec(m)};
    for (int j = 0; j < m; ++j) {
        c.f(j) = kind == ReceiverKind::pPCR ? 1.0 / m : std::pow(g, j);
        c.a(j) = c.f(j) * (g - 1) * (nbp + 1) * (2 * ns + 1) + ns;
        c.B(j) = std::sqrt(2 * c.f(j) * (g - 1) * ns * (ns + 1) * cfg.weight(j) * cfg.eta(j));
    }
    if (!c.a.allFinite()) throw NumericalError("sPCR chain gain overflows; reduce g or m");
    return c;
}

CountStatistics pa_statistics(const NetworkConfig& cfg, ReceiverKind kind, double g, double alpha) {
    const PaCoefficients c = pa_coefficients(cfg, kind, g);
    const int m = cfg.m;
    const Vec psi = cfg.theta.array() + alpha;
    CountStatistics s{Vec(m), Mat(m, m), cfg.nu};
    for (int j = 0; j < m; ++j) {
        s.mu(j) = cfg.nu * std::sqrt(2.0) * c.B(j) * std::cos(psi(j));
        for (int k = 0; k < m; ++k)
            s.sigma(j, k) = cfg.nu * ((j == k ? c.a(j) : 0.0) + c.B(j) * c.B(k) * std::cos(psi(j) + psi(k)));
    }
    return s;
}

CountStatistics ppcr_statistics(const NetworkConfig& cfg, double g, double alpha) {
    return pa_statistics(cfg, ReceiverKind::pPCR, g, alpha);
}

CountStatistics spcr_statistics(const NetworkConfig& cfg, double g, double alpha) {
    return pa_statistics(cfg, ReceiverKind::sPCR, g, alpha);
}

GaussianOutcome pa_statistics_derivative(const NetworkConfig& cfg, ReceiverKind kind, double g,
                                         double alpha, int i) {
    const PaCoefficients c = pa_coefficients(cfg, kind, g);
    const int m = cfg.m;
    if (i < 0 || i >= m) throw DomainError("parameter index out of range");
    const Vec psi = cfg.theta.array() + alpha;
    GaussianOutcome d{Vec::Zero(m), Mat::Zero(m, m)};
    d.mean(i) = -cfg.nu * std::sqrt(2.0) * c.B(i) * std::sin(psi(i));
    for (int k = 0; k < m; ++k) {
        const double v = -cfg.nu * c.B(i) * c.B(k) * std::sin(psi(i) + psi(k));
        d.cov(i, k) += v;
        d.cov(k, i) += v;
    }
    return d;
}

CountStatistics pa_statistics_textbook(const NetworkConfig& cfg, ReceiverKind kind, double g) {
    const PaCoefficients c = pa_coefficients(cfg, kind, g);
    const Vec b = c.B.array() * cfg.theta.array().cos();
    Mat sigma = c.a.asDiagonal();
    sigma += b * b.transpose();
    return {cfg.nu * std::sqrt(2.0) * b, cfg.nu * sigma, cfg.nu};
}

ChainMoments pa_chain_moments(const NetworkConfig& cfg, ReceiverKind kind, double g, double alpha) {
    check_pa(cfg, kind, g);
    const int m = cfg.m;
    const int n = 2 * m + 1;
    const GaussianState out = closed_form_output(cfg).state;
    GaussianState st = tensor(out, vacuum(m));

    // stored[j] ends up holding the phase-conjugate copy paired with idler j.
    std::vector<int> stored(m);
    if (kind == ReceiverKind::pPCR) {
        // 0 return, 1..m idlers, m+1 PA vacuum, m+2..2m multiport vacua.
        st = apply(st, pa(n, 0, m + 1, g));
        std::vector<int> ports{0};
        for (int k = m + 2; k <= 2 * m; ++k) ports.push_back(k);
        const Mat W = orthogonal_completion(Vec::Constant(m, 1.0 / std::sqrt(double(m))));
        st = apply(st, interferometer(n, ports, W));
        stored = ports;
    } else {
        // 0 return, 1..m idlers, m+1..2m one fresh vacuum per stage.
        int carrier = 0;
        for (int j = 0; j < m; ++j) {
            const int fresh = m + 1 + j;
            st = apply(st, pa(n, carrier, fresh, g));
            stored[j] = carrier;
            carrier = fresh;
        }
    }
    for (int j = 0; j < m; ++j) {
        if (alpha != 0) st = apply(st, phase(n, 1 + j, alpha));
        st = apply(st, beamsplitter(n, stored[j], 1 + j, 0.5));
    }

    std::vector<int> modes = stored;
    for (int j = 0; j < m; ++j) modes.push_back(1 + j);
    const PhotonMoments pm = photon_moments(st, modes);
    Mat T(m, 2 * m);
    T << Mat::Identity(m, m), -Mat::Identity(m, m);
    return {T * pm.mean, T * pm.cov * T.transpose(), std::move(st)};
}

FisherMatrix pa_fim(const NetworkConfig& cfg, const ReceiverSpec& spec) {
    const PaCoefficients c = pa_coefficients(cfg, spec.kind, spec.gain);
    const CountStatistics s = pa_statistics(cfg, spec.kind, spec.gain, spec.reference_phase);
    const int m = cfg.m;
    const double nu = cfg.nu;
    const Vec psi = cfg.theta.array() + spec.reference_phase;

    // dSigma_i = e_i c_i^T + c_i e_i^T, so the trace term needs only
    // X = C^T P E, Y = C^T P C, Z = E^T P E in the variance-scaled frame:
    // F = X o X^T + Y o Z + (g g^T) o P.
    const Vec sd = s.sigma.diagonal().cwiseSqrt();
    if (!(sd.minCoeff() > 0)) throw NumericalError("count covariance has a zero variance");
    const Vec inv = sd.cwiseInverse();
    const Mat sigma = inv.asDiagonal() * s.sigma * inv.asDiagonal();
    Eigen::LLT<Mat> llt(sigma);
    if (llt.info() != Eigen::Success) throw NumericalError("count covariance is singular");
    const Mat P = llt.solve(Mat::Identity(m, m));

    Mat C(m, m);
    Vec gvec(m);
    for (int i = 0; i < m; ++i) {
        for (int k = 0; k < m; ++k) {
            const double v = k == i ? -nu * c.B(i) * c.B(i) * std::sin(2 * psi(i))
                                    : -nu * c.B(i) * c.B(k) * std::sin(psi(i) + psi(k));
            C(k, i) = v * inv(k);
        }
        gvec(i) = -std::sqrt(2.0) * nu * c.B(i) * std::sin(psi(i)) * inv(i);
    }
    const Mat PE = P * inv.asDiagonal();
    const Mat X = C.transpose() * PE;
    const Mat Y = C.transpose() * P * C;
    const Mat Z = inv.asDiagonal() * PE;

    FisherMatrix out{theta_labels(m), Mat(m, m)};
    out.F = X.cwiseProduct(X.transpose()) + Y.cwiseProduct(Z) + (gvec * gvec.transpose()).cwiseProduct(P);
    out.F = 0.5 * (out.F + out.F.transpose()).eval();
    return out;
}

FisherMatrix pa_fim_generic(const NetworkConfig& cfg, const ReceiverSpec& spec) {
    const CountStatistics s = pa_statistics(cfg, spec.kind, spec.gain, spec.reference_phase);
    std::vector<GaussianOutcome> d;
    for (int i = 0; i < cfg.m; ++i)
        d.push_back(pa_statistics_derivative(cfg, spec.kind, spec.gain, spec.reference_phase, i));
    return cfim_gaussian_distribution(GaussianOutcome{s.mu, s.sigma}, d, theta_labels(cfg.m));
}

FisherMatrix pa_fim_rank_one(const NetworkConfig& cfg, const ReceiverSpec& spec) {
    const PaCoefficients c = pa_coefficients(cfg, spec.kind, spec.gain);
    const Vec psi = cfg.theta.array() + spec.reference_phase;
    const Vec b = c.B.array() * psi.array().cos();
    const Vec db = -(c.B.array() * psi.array().sin());
    const Vec ba = b.cwiseQuotient(c.a);
    const double denom = 1 + b.dot(ba);
    Mat M = c.a.cwiseInverse().asDiagonal();
    M -= ba * ba.transpose() / denom;
    return {theta_labels(cfg.m), 2 * cfg.nu * db.asDiagonal() * M * db.asDiagonal()};
}

double pa_rwmse_leading(const NetworkConfig& cfg, const ReceiverSpec& spec) {
    check_pa(cfg, spec.kind, spec.gain);
    if (!(spec.gain > 1)) throw DomainError("leading-order rWMSE needs g > 1");
    double acc = 0;
    for (int j = 0; j < cfg.m; ++j) {
        const double sn = std::sin(cfg.theta(j) + spec.reference_phase);
        if (std::abs(sn) < 1e-9 || !(cfg.eta(j) > 0))
            throw UnidentifiableError("theta_" + std::to_string(j) + " is unidentifiable at this operating point",
                                      j, Vec::Unit(cfg.m, j));
        acc += a_over_b2(cfg, spec.kind, spec.gain, j) / (sn * sn);
    }
    return std::sqrt(acc / (2.0 * cfg.m * cfg.nu));
}

PaRwmse pa_rwmse(const NetworkConfig& cfg, const ReceiverSpec& spec, int full_limit) {
    PaRwmse r;
    r.leading = pa_rwmse_leading(cfg, spec);
    if (cfg.m <= full_limit) {
        FisherMatrix f = pa_fim(cfg, spec);
        f.check();
        r.full = rwmse_from_fim(f);
    }
    return r;
}

GainOptimum optimize_gain(const NetworkConfig& cfg, ReceiverKind kind, double g_lo, double g_hi,
                          double alpha, GainObjective obj) {
    if (!(g_lo > 1) || !(g_hi > g_lo)) throw DomainError("gain range must satisfy 1 < g_lo < g_hi");
    const bool full = obj == GainObjective::Full && cfg.m <= 400;
    auto objective = [&](double g) {
        try {
            const ReceiverSpec spec{kind, g, alpha};
            return full ? pa_rwmse(cfg, spec).full : pa_rwmse_leading(cfg, spec);
        } catch (const UnidentifiableError&) {
            throw;
        } catch (const NumericalError&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    // Coarse log grid in (g - 1), then golden section around the best point.
    constexpr int kGrid = 64;
    const double lo = std::log(g_lo - 1), hi = std::log(g_hi - 1);
    auto gain_at = [&](double t) { return 1 + std::exp(t); };
    const std::vector<double> vals =
        kernels::map_parallel(kGrid, [&](std::size_t i) { return objective(gain_at(lo + (hi - lo) * i / (kGrid - 1))); });
    int best = 0;
    for (int i = 1; i < kGrid; ++i)
        if (vals[i] < vals[best]) best = i;
    if (!std::isfinite(vals[best])) throw NumericalError("rWMSE is not finite anywhere on the gain range");

    const double step = (hi - lo) / (kGrid - 1);
    double a = lo + step * std::max(0, best - 1), b = lo + step * std::min(kGrid - 1, best + 1);
    const double r = 0.5 * (std::sqrt(5.0) - 1);
    double x1 = b - r * (b - a), x2 = a + r * (b - a);
    double f1 = objective(gain_at(x1)), f2 = objective(gain_at(x2));
    while (b - a > 1e-9 * std::max(1.0, std::abs(a))) {
        if (f1 < f2) {
            b = x2; x2 = x1; f2 = f1;
            x1 = b - r * (b - a);
            f1 = objective(gain_at(x1));
        } else {
            a = x1; x1 = x2; f1 = f2;
            x2 = a + r * (b - a);
            f2 = objective(gain_at(x2));
        }
    }
    double t = 0.5 * (a + b), f = objective(gain_at(t));
    if (vals[best] < f) {
        t = lo + step * best;
        f = vals[best];
    }
    const bool boundary = (best == 0 || best == kGrid - 1) && std::min(t - lo, hi - t) < 1e-6 * (hi - lo) + step * 1e-3;
    return {gain_at(t), f, boundary};
}

GainOptimum optimize_gain(const NetworkConfig& cfg, ReceiverKind kind) {
    return optimize_gain(cfg, kind, 1 + 1e-6, 10.0 * cfg.m);
}

// ---- CtoD ----

namespace {

Vec2 reference_direction(const std::vector<Vec2>& xs, double& xbar) {
    double s = 0;
    for (const auto& x : xs) s += x.squaredNorm();
    xbar = std::sqrt(s);
    for (const auto& x : xs)
        if (x.norm() > 0) return x.normalized();
    return Vec2(1, 0);
}

GaussianState conditional_idlers(const NetworkConfig& cfg, const Vec2& x) {
    return condition_heterodyne(closed_form_output(cfg).state, 0, x).state;
}

}  // namespace

Concentrated ctod_concentrate(const NetworkConfig& cfg, const std::vector<Vec2>& outcomes) {
    cfg.validate();
    if (outcomes.empty()) throw DomainError("CtoD needs at least one outcome");
    double xbar;
    const Vec2 dir = reference_direction(outcomes, xbar);
    return {conditional_idlers(cfg, xbar * dir), xbar, dir};
}

Concentrated ctod_concentrate_pipeline(const NetworkConfig& cfg, const std::vector<Vec2>& outcomes) {
    cfg.validate();
    const int m = cfg.m;
    const int rounds = static_cast<int>(outcomes.size());
    if (rounds == 0) throw DomainError("CtoD needs at least one outcome");
    double xbar;
    const Vec2 dir = reference_direction(outcomes, xbar);
    const double phi0 = std::atan2(dir(1), dir(0));

    // Round n's idler bank, rotated by (phi_n - phi_0), so its conditional
    // mean points the way round 0's would.
    GaussianState all;
    for (int n = 0; n < rounds; ++n) {
        GaussianState c = conditional_idlers(cfg, outcomes[n]);
        const double beta = outcomes[n].norm() > 0 ? std::atan2(outcomes[n](1), outcomes[n](0)) - phi0 : 0.0;
        for (int j = 0; j < m; ++j) c = apply(c, phase(m, j, beta));
        all = n == 0 ? c : tensor(all, c);
    }
    if (xbar > 0 && rounds > 1) {
        Vec u(rounds);
        for (int n = 0; n < rounds; ++n) u(n) = outcomes[n].norm() / xbar;
        const Mat W = orthogonal_completion(u).transpose();
        const int total = m * rounds;
        for (int j = 0; j < m; ++j) {
            std::vector<int> modes;
            for (int n = 0; n < rounds; ++n) modes.push_back(n * m + j);
            all = apply(all, interferometer(total, modes, W));
        }
    }
    std::vector<int> keep;
    for (int j = 0; j < m; ++j) keep.push_back(j);
    return {partial_trace(all, keep), xbar, dir};
}

std::vector<Quadrature> ctod_quadratures(const NetworkConfig& cfg, const Vec2& direction) {
    std::vector<Quadrature> q;
    for (int j = 0; j < cfg.m; ++j) {
        const double cs = std::cos(cfg.theta(j)), sn = std::sin(cfg.theta(j));
        Mat2 drt;
        drt << -sn, cs, -cs, -sn;
        const Vec2 d = pauli_z() * drt * direction;
        q.push_back({j, std::atan2(d(1), d(0))});
    }
    return q;
}

DistributionFamily ctod_record_family(const NetworkConfig& cfg, double xbar, const Vec2& direction,
                                      const std::vector<Quadrature>& quads) {
    DistributionFamily f;
    f.labels = theta_labels(cfg.m);
    f.evaluate = [cfg, xbar, direction, quads](const Vec& theta) {
        NetworkConfig c = cfg;
        c.theta = theta;
        return marginal_quadrature(conditional_idlers(c, xbar * direction), quads);
    };
    return f;
}

namespace {

void check_ctod(const NetworkConfig& cfg) {
    cfg.validate();
    if (!(cfg.n_s > 0)) throw DomainError("CtoD needs N_S > 0");
    for (int j = 0; j < cfg.m; ++j)
        if (!(cfg.eta(j) > 0))
            throw UnidentifiableError("theta_" + std::to_string(j) + " is unidentifiable: eta_" +
                                          std::to_string(j) + " = 0",
                                      j, Vec::Unit(cfg.m, j));
}

}  // namespace

FisherMatrix ctod_cfim(const NetworkConfig& cfg) {
    check_ctod(cfg);
    const int m = cfg.m;
    const double ns = cfg.n_s, nbp = cfg.nb_prime();
    // Homodyne record along d(mean)/d(theta): Sigma = (2N_S+1) I - c c^T / (2(N_B'+1)),
    // mean gradient c_j xbar / (2(N_B'+1)), and E[xbar^2] = 4 nu (N_B'+1).
    Vec c(m);
    for (int j = 0; j < m; ++j) c(j) = 2 * std::sqrt(cfg.weight(j) * cfg.eta(j) * ns * (ns + 1));
    Mat sigma = (2 * ns + 1) * Mat::Identity(m, m);
    sigma -= c * c.transpose() / (2 * (nbp + 1));
    const Mat P = sigma.llt().solve(Mat::Identity(m, m));
    return {theta_labels(m), cfg.nu / (nbp + 1) * c.asDiagonal() * P * c.asDiagonal()};
}

FisherMatrix ctod_average_qfim(const NetworkConfig& cfg) {
    check_ctod(cfg);
    // The mean is linear in x and E[x x^T] = 2(N_B'+1) I, so the average over
    // x is Q(x1) + Q(x2) - Q(0) with x1, x2 along the axes.
    const double r = std::sqrt(2 * (cfg.nb_prime() + 1));
    auto q_at = [&](const Vec2& x) {
        StateFamily f;
        f.labels = theta_labels(cfg.m);
        f.evaluate = [cfg, x](const Vec& theta) {
            NetworkConfig c = cfg;
            c.theta = theta;
            return conditional_idlers(c, x);
        };
        return qfim_gaussian(f, cfg.theta).F;
    };
    const Mat F = q_at(Vec2(r, 0)) + q_at(Vec2(0, r)) - q_at(Vec2::Zero());
    return {theta_labels(cfg.m), cfg.nu * F};
}

CtodRwmse ctod_rwmse(const NetworkConfig& cfg) {
    check_ctod(cfg);
    const double ns = cfg.n_s, nbp = cfg.nb_prime();
    const int m = cfg.m;
    double inv_sum = 0;
    for (int j = 0; j < m; ++j) inv_sum += 1 / (cfg.weight(j) * cfg.eta(j));
    const double pre = (nbp + 1) / (4 * cfg.nu * ns * (ns + 1));
    const double cc = 2 * ns * (ns + 1) / (nbp + 1);
    CtodRwmse r;
    r.exact = std::sqrt(pre * ((2 * ns + 1) * inv_sum - cc * m) / m);
    r.leading = std::sqrt(pre * (2 * ns + 1) * inv_sum / m);
    return r;
}

}  // namespace qinet
