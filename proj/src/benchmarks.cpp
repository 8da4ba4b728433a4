#include "qinet/benchmarks.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/erf.hpp>

#include <cmath>
#include <numbers>

#include "qinet/fock.hpp"
#include "qinet/kernels.hpp"

namespace qinet {

using std::numbers::pi;

double classical_asymptotic_rwmse(const NetworkConfig& cfg) {
    cfg.validate();
    if (!(cfg.n_s > 0)) throw DomainError("classical bound needs N_S > 0");
    double best = 0;
    for (int j = 0; j < cfg.m; ++j) best = std::max(best, cfg.weight(j) * cfg.eta(j));
    if (!(best > 0)) throw DomainError("all reflectivities are zero");
    return std::sqrt((2 * cfg.n_b + 1) / (4 * cfg.nu * cfg.n_s * best));
}

Achievable classical_achievable_rwmse(const NetworkConfig& cfg) {
    cfg.validate();
    if (!(cfg.n_s > 0)) throw DomainError("classical bound needs N_S > 0");
    double inv = 0;
    for (int j = 0; j < cfg.m; ++j) {
        if (!(cfg.eta(j) > 0)) throw DomainError("eta_" + std::to_string(j) + " = 0");
        inv += 1 / (cfg.weight(j) * cfg.eta(j));
    }
    const double two_nu = 2 * cfg.nu;
    const bool valid = cfg.m % 2 == 0 && two_nu == std::floor(two_nu) && std::fmod(two_nu, cfg.m) == 0;
    return {std::sqrt((2 * cfg.n_b + 1) * inv / (4 * cfg.m * cfg.nu * cfg.n_s)), valid};
}

AveragePhaseRmse classical_average_phase_rmse(const NetworkConfig& cfg) {
    cfg.validate();
    if (!(cfg.n_s > 0)) throw DomainError("classical bound needs N_S > 0");
    const double base = (2 * cfg.n_b + 1) / (4 * cfg.nu * cfg.n_s);
    return {std::sqrt(base / cfg.m), std::sqrt(base / (double(cfg.m) * cfg.m))};
}

double homodyne_mse(double c, double n_b, bool parallel) {
    if (!(c > 0)) throw DomainError("homodyne amplitude must be positive");
    if (!(n_b >= 0)) throw DomainError("N_B must be >= 0");
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    const double s2 = 2 * n_b + 1;
    const double norm = 1 / std::sqrt(2 * pi * s2), rs = std::sqrt(2 * s2);
    constexpr double kTol = 1e-10;

    auto inner = [&](double th) {
        const double mu = c * std::cos(th);
        auto f = [&](double q) {
            const double e = std::acos(std::clamp(q / c, -1.0, 1.0)) - th;
            return norm * std::exp(-(q - mu) * (q - mu) / (2 * s2)) * e * e;
        };
        // arccos has square-root endpoints at +-c; tanh-sinh absorbs them.
        thread_local boost::math::quadrature::tanh_sinh<double> ts;
        double ab = 0;
        for (auto [lo, hi] : {std::pair{-c, mu}, std::pair{mu, c}}) {
            if (!(hi > lo)) continue;
            double err = 0;
            ab += ts.integrate(f, lo, hi, 1e-10, &err);
            if (err > 1e-7 * std::max(1.0, std::abs(ab))) throw NumericalError("homodyne inner quadrature did not converge");
        }
        const double out = 0.5 * (2 - std::erf(c * (1 - std::cos(th)) / rs) - std::erf(c * (1 + std::cos(th)) / rs));
        const double g = 1.5 * pi - th;
        return ab + out * g * g;
    };

    constexpr std::size_t kPanels = 64;
    auto panel = [&](std::size_t k) {
        const double lo = 2 * pi * k / kPanels, hi = 2 * pi * (k + 1) / kPanels;
        double err = 0;
        const double v = GK::integrate(inner, lo, hi, 15, kTol, &err);
        if (err > 1e-7 * std::max(1.0, std::abs(v))) throw NumericalError("homodyne outer quadrature did not converge");
        return v;
    };
    const double total = parallel ? kernels::reduce_parallel(kPanels, 0.0, panel)
                                  : kernels::reduce_serial(kPanels, 0.0, panel);
    return total / (2 * pi);
}

BayesResult bayes_mse(cplx fixed, cplx rotating, double n_b, int cutoff, int grid, double budget) {
    if (cutoff < 2) throw DomainError("Bayes cutoff must be >= 2");
    if (grid != 0 && grid < 128) throw DomainError("Bayes theta grid needs at least 128 points");
    if (!(n_b >= 0)) throw DomainError("N_B must be >= 0");

    // rho(theta) = D(a) U_theta sigma U_theta^dagger D(a)^dagger with
    // sigma = D(b) rho_th D(b)^dagger and U_theta = exp(-i theta n), so the
    // prior averages only reweight sigma_jk by functions of j - k.
    const fock::FockState sigma = fock::displaced_thermal(rotating, n_b, cutoff, 1.0);
    const int d = cutoff;
    // rho(theta) is a trigonometric polynomial in theta; its Fourier
    // coefficients are taken from the periodic grid (aliased into
    // (-grid/2, grid/2]) and the theta weight is integrated exactly against
    // them: int dtheta/2pi e^{-i theta delta} = [delta = 0] and
    // int dtheta/2pi theta e^{-i theta delta} = i/delta (pi at delta = 0).
    auto alias = [&](int delta) {
        if (grid == 0) return delta;
        int r = ((delta % grid) + grid) % grid;
        return r > grid / 2 ? r - grid : r;
    };
    auto w0 = [&](int delta) -> cplx { return alias(delta) == 0 ? 1.0 : 0.0; };
    auto w1 = [&](int delta) -> cplx {
        const int k = alias(delta);
        return k == 0 ? cplx(pi) : cplx(0, 1.0 / k);
    };
    CMat x0(d, d), x1(d, d);
    for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k) {
            x0(j, k) = sigma.rho(j, k) * w0(j - k);
            x1(j, k) = sigma.rho(j, k) * w1(j - k);
        }
    const CMat da = fock::displacement_matrix(fixed, d, d);
    const CMat rho_bar = da * x0 * da.adjoint();
    const CMat c = da * x1 * da.adjoint();

    BayesResult r{};
    r.leakage = std::max(0.0, 1 - rho_bar.trace().real());
    if (r.leakage > budget)
        throw NumericalError("Bayes cutoff " + std::to_string(cutoff) + " leaks " + std::to_string(r.leakage));

    Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (rho_bar + rho_bar.adjoint()));
    const Vec& lam = es.eigenvalues();
    const CMat ct = es.eigenvectors().adjoint() * c * es.eigenvectors();
    const double top = lam.maxCoeff();
    double acc = 0;
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) {
            const double den = lam(a) + lam(b);
            if (den > 1e-14 * top) acc += 2 * std::norm(ct(a, b)) / den;
        }
    const double e2 = 4 * pi * pi / 3;
    r.mse = e2 - acc;
    return r;
}

double concentrated_probe_amplitude(const NetworkConfig& cfg) {
    cfg.validate();
    return std::sqrt(cfg.weight(0) * cfg.eta(0) * cfg.m * cfg.n_s / 2);
}

NonAsymBounds nonasym_bounds(int m, long nu, double e_baye, double e_homo) {
    if (m < 1) throw DomainError("m must be >= 1");
    if (nu < 0) throw DomainError("nu must be >= 0");
    auto value = [&](long J, long nup, double e) {
        const double f = double(J) / m;
        return std::sqrt(f * e / double(nup) + (1 - f) * kGuessVariance);
    };
    NonAsymBounds out;
    out.lower = {0, 0, std::sqrt(kGuessVariance)};
    out.upper = out.lower;
    for (long nup = 1; nup <= nu; ++nup) {
        const long jl = std::min<long>(2 * nu / nup, m), ju = std::min<long>(nu / nup, m);
        const double vl = value(jl, nup, e_baye), vu = value(ju, nup, e_homo);
        if (jl > 0 && (vl < out.lower.value || (vl == out.lower.value && jl < out.lower.J))) out.lower = {nup, jl, vl};
        if (ju > 0 && (vu < out.upper.value || (vu == out.upper.value && ju < out.upper.J))) out.upper = {nup, ju, vu};
    }
    out.strict = nu < (m + 1) / 2;
    return out;
}

}  // namespace qinet
