#include "qinet/fock.hpp"

#include <boost/math/special_functions/laguerre.hpp>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <numeric>

#include "qinet/estimation.hpp"

namespace qinet::fock {

namespace {

int ipow(int b, int e) {
    int r = 1;
    while (e-- > 0) r *= b;
    return r;
}

void check_mode(const FockState& s, int mode) {
    if (mode < 0 || mode >= s.modes) throw DomainError("Fock mode index out of range");
}

double real_trace(const CMat& m) { return m.trace().real(); }

void finish(FockState& s, double budget) {
    s.leakage = std::max(0.0, 1 - real_trace(s.rho));
    if (s.leakage > budget)
        throw NumericalError("Fock cutoff " + std::to_string(s.cutoff) + " leaks " + std::to_string(s.leakage) +
                             " of the trace");
}

// Smallest dimension whose geometric tail (ratio r) is below tol.
int geometric_cutoff(double n, double tol) {
    if (n <= 0) return 1;
    const double r = n / (n + 1);
    return static_cast<int>(std::ceil(std::log(tol) / std::log(r))) + 1;
}

CMat thermal_diag(double n, int dim) {
    CMat t = CMat::Zero(dim, dim);
    if (n <= 0) {
        t(0, 0) = 1;
        return t;
    }
    const double r = n / (n + 1);
    for (int k = 0; k < dim; ++k) t(k, k) = std::pow(r, k) / (n + 1);
    return t;
}

// Function of a Hermitian matrix through its block eigendecomposition.
template <class F>
CMat matrix_function(const BlockEigen& be, int dim, F&& f) {
    CMat out = CMat::Zero(dim, dim);
    for (std::size_t b = 0; b < be.blocks.size(); ++b) {
        const auto& idx = be.blocks[b];
        const Vec fv = be.values[b].unaryExpr(f);
        const CMat sub = be.vectors[b] * fv.asDiagonal() * be.vectors[b].adjoint();
        for (std::size_t i = 0; i < idx.size(); ++i)
            for (std::size_t j = 0; j < idx.size(); ++j) out(idx[i], idx[j]) = sub(i, j);
    }
    return out;
}

}  // namespace

CMat displacement_matrix(cplx alpha, int rows, int cols) {
    if (rows < 1 || cols < 1) throw DomainError("displacement matrix needs positive dimensions");
    CMat d = CMat::Zero(rows, cols);
    const double x = std::norm(alpha);
    if (x == 0) {
        for (int k = 0; k < std::min(rows, cols); ++k) d(k, k) = 1;
        return d;
    }
    const double la = 0.5 * std::log(x), phi = std::arg(alpha);
    for (int m = 0; m < rows; ++m)
        for (int n = 0; n < cols; ++n) {
            const int lo = std::min(m, n), k = std::abs(m - n);
            double lag;
            try {
                lag = boost::math::laguerre(static_cast<unsigned>(lo), static_cast<unsigned>(k), x);
            } catch (const std::overflow_error&) {
                throw NumericalError("Laguerre overflow in displacement matrix; cutoff too large");
            }
            if (lag == 0) continue;
            const double lm = 0.5 * (std::lgamma(lo + 1.0) - std::lgamma(lo + k + 1.0)) + k * la - 0.5 * x +
                              std::log(std::abs(lag));
            const double sign = (lag < 0 ? -1.0 : 1.0) * (m < n && (k % 2) ? -1.0 : 1.0);
            const double ph = (m >= n ? 1.0 : -1.0) * k * phi;
            d(m, n) = sign * std::exp(lm) * cplx(std::cos(ph), std::sin(ph));
        }
    return d;
}

FockState vacuum(int modes, int cutoff) {
    if (modes < 1 || cutoff < 1) throw DomainError("vacuum needs modes >= 1 and cutoff >= 1");
    const int dim = ipow(cutoff, modes);
    FockState s{modes, cutoff, CMat::Zero(dim, dim), 0};
    s.rho(0, 0) = 1;
    return s;
}

FockState thermal(double n, int cutoff, double budget) {
    if (!(n >= 0)) throw DomainError("thermal photon number must be >= 0");
    FockState s{1, cutoff, thermal_diag(n, cutoff), 0};
    finish(s, budget);
    return s;
}

FockState coherent(cplx alpha, int cutoff, double budget) { return displaced_thermal(alpha, 0, cutoff, budget); }

FockState displaced_thermal(cplx alpha, double n, int cutoff, double budget) {
    if (!(n >= 0)) throw DomainError("thermal photon number must be >= 0");
    if (cutoff < 1) throw DomainError("cutoff must be >= 1");
    const int inner = std::max(1, geometric_cutoff(n, 1e-18));
    const CMat d = displacement_matrix(alpha, cutoff, inner);
    FockState s{1, cutoff, d * thermal_diag(n, inner) * d.adjoint(), 0};
    finish(s, budget);
    return s;
}

FockState tmsv(double n_s, int cutoff, double budget) {
    if (!(n_s >= 0)) throw DomainError("TMSV photon number must be >= 0");
    const int dim = cutoff * cutoff;
    CVec psi = CVec::Zero(dim);
    for (int k = 0; k < cutoff; ++k)
        psi(k * cutoff + k) = n_s > 0 ? std::sqrt(std::pow(n_s / (n_s + 1), k) / (n_s + 1)) : (k == 0 ? 1.0 : 0.0);
    FockState s{2, cutoff, psi * psi.adjoint(), 0};
    finish(s, budget);
    return s;
}

FockState tensor(const FockState& a, const FockState& b) {
    if (a.cutoff != b.cutoff) throw DomainError("tensor product needs a shared cutoff");
    const int da = a.dim(), db = b.dim();
    CMat r(da * db, da * db);
    for (int i = 0; i < da; ++i)
        for (int j = 0; j < da; ++j) r.block(i * db, j * db, db, db) = a.rho(i, j) * b.rho;
    FockState s{a.modes + b.modes, a.cutoff, std::move(r), 0};
    s.leakage = std::max(0.0, 1 - real_trace(s.rho));
    return s;
}

CMat apply_left(const CMat& rho, const CMat& op, int modes, int cutoff, int mode) {
    const int d = cutoff;
    const int post = ipow(d, modes - 1 - mode), pre = ipow(d, mode);
    CMat out(rho.rows(), rho.cols());
    const CMat opt = op.transpose();
    for (Eigen::Index c = 0; c < rho.cols(); ++c)
        for (int I = 0; I < pre; ++I) {
            const Eigen::Index off = static_cast<Eigen::Index>(I) * d * post;
            Eigen::Map<const CMat> in(rho.col(c).data() + off, post, d);
            Eigen::Map<CMat> res(out.col(c).data() + off, post, d);
            res.noalias() = in * opt;
        }
    return out;
}

CMat apply_right_dagger(const CMat& rho, const CMat& op, int modes, int cutoff, int mode) {
    return apply_left(rho.adjoint(), op, modes, cutoff, mode).adjoint();
}

FockState phase(const FockState& s, int mode, double theta) {
    check_mode(s, mode);
    const int d = s.cutoff, post = ipow(d, s.modes - 1 - mode);
    FockState out = s;
    for (Eigen::Index j = 0; j < s.rho.cols(); ++j) {
        const int nj = static_cast<int>(j / post % d);
        for (Eigen::Index i = 0; i < s.rho.rows(); ++i) {
            const int ni = static_cast<int>(i / post % d);
            out.rho(i, j) *= std::polar(1.0, theta * (ni - nj));
        }
    }
    return out;
}

FockState thermal_loss(const FockState& s, int mode, double eta, double theta, double n_b, double budget,
                       bool parallel) {
    check_mode(s, mode);
    if (!(eta >= 0 && eta <= 1)) throw DomainError("eta outside [0,1]");
    if (!(n_b >= 0)) throw DomainError("N_B must be >= 0");
    if (eta == 1) {
        if (n_b > 0) throw DomainError("eta = 1 with N_B > 0 has no thermal dilation");
        return phase(s, mode, theta);
    }
    const int d = s.cutoff;
    const double n_env = n_b / (1 - eta);
    const int de = d + static_cast<int>(std::ceil(10 * std::sqrt(n_env)));
    const double phi = std::acos(std::sqrt(eta));

    std::vector<double> p(de);
    for (int k = 0; k < de; ++k) p[k] = n_env > 0 ? std::pow(n_env / (n_env + 1), k) / (n_env + 1) : (k == 0);

    // Beamsplitter in each total-number sector N: basis |n, N-n>, n = 0..N.
    const int nmax = d - 1 + de - 1;
    std::vector<Mat> U(nmax + 1);
    for (int N = 0; N <= nmax; ++N) {
        Mat G = Mat::Zero(N + 1, N + 1);
        for (int n = 0; n < N; ++n) {
            const double v = std::sqrt((n + 1.0) * (N - n));
            G(n + 1, n) = v;
            G(n, n + 1) = -v;
        }
        U[N] = (phi * G).exp();
    }

    // Kraus K_lk maps |n> to |n + s>, s = k - l. Summing over (k, l) at fixed
    // shift gives rho'(n', m') = sum_s T_s(n', m') rho(n' - s, m' - s).
    const int smin = -(d - 1), smax = de - 1;
    const int ns = smax - smin + 1;
    std::vector<Mat> T(ns, Mat::Zero(d, d));
    for (int k = 0; k < de; ++k) {
        if (p[k] < 1e-300) continue;
        for (int sh = std::max(smin, k - nmax); sh <= std::min(smax, k); ++sh) {
            Vec v = Vec::Zero(d);
            for (int np = std::max(0, sh); np < d && np - sh < d; ++np) {
                const int n = np - sh, N = n + k;
                if (N > nmax) continue;
                v(np) = U[N](np, n);
            }
            if (p[k] * v.squaredNorm() < 1e-300) continue;
            T[sh - smin] += p[k] * v * v.transpose();
        }
    }

    const int post = ipow(d, s.modes - 1 - mode);
    const Eigen::Index dim = s.rho.rows();
    FockState out{s.modes, d, CMat::Zero(dim, dim), 0};
    auto column = [&](Eigen::Index c) {
        const int mp = static_cast<int>(c / post % d);
        for (int si = 0; si < ns; ++si) {
            const int sh = si + smin;
            if (mp - sh < 0 || mp - sh >= d) continue;
            const Eigen::Index cs = c - static_cast<Eigen::Index>(sh) * post;
            const Mat& t = T[si];
            for (Eigen::Index r = 0; r < dim; ++r) {
                const int np = static_cast<int>(r / post % d);
                if (np - sh < 0 || np - sh >= d) continue;
                const double w = t(np, mp);
                if (w != 0) out.rho(r, c) += w * s.rho(r - static_cast<Eigen::Index>(sh) * post, cs);
            }
        }
    };
    if (parallel) {
#pragma omp parallel for schedule(dynamic)
        for (Eigen::Index c = 0; c < dim; ++c) column(c);
    } else {
        for (Eigen::Index c = 0; c < dim; ++c) column(c);
    }
    out = phase(out, mode, theta);
    out.leakage = std::max(0.0, 1 - real_trace(out.rho));
    if (out.leakage > budget + s.leakage)
        throw NumericalError("thermal loss leaks " + std::to_string(out.leakage) + " of the trace");
    return out;
}

FockState partial_trace(const FockState& s, const std::vector<int>& keep) {
    const int d = s.cutoff, n = s.modes;
    std::vector<bool> kept(n, false);
    for (int k : keep) {
        check_mode(s, k);
        kept[k] = true;
    }
    const int nk = static_cast<int>(keep.size());
    const int dk = ipow(d, nk);
    CMat r = CMat::Zero(dk, dk);
    std::vector<int> digits_i(n), digits_j(n);
    auto digits = [&](Eigen::Index idx, std::vector<int>& out) {
        for (int m = n - 1; m >= 0; --m) {
            out[m] = static_cast<int>(idx % d);
            idx /= d;
        }
    };
    for (Eigen::Index i = 0; i < s.rho.rows(); ++i) {
        digits(i, digits_i);
        for (Eigen::Index j = 0; j < s.rho.cols(); ++j) {
            digits(j, digits_j);
            bool match = true;
            for (int m = 0; m < n && match; ++m)
                if (!kept[m] && digits_i[m] != digits_j[m]) match = false;
            if (!match) continue;
            int a = 0, b = 0;
            for (int k : keep) {
                a = a * d + digits_i[k];
                b = b * d + digits_j[k];
            }
            r(a, b) += s.rho(i, j);
        }
    }
    return {nk, d, std::move(r), s.leakage};
}

Moments moments(const FockState& s) {
    const int d = s.cutoff, n = s.modes;
    CMat a = CMat::Zero(d, d);
    for (int k = 1; k < d; ++k) a(k - 1, k) = std::sqrt(double(k));
    const CMat q = a + a.adjoint();
    const CMat p = cplx(0, -1) * (a - a.adjoint());
    std::vector<CMat> x;  // x_i rho
    for (int m = 0; m < n; ++m) {
        x.push_back(apply_left(s.rho, q, n, d, m));
        x.push_back(apply_left(s.rho, p, n, d, m));
    }
    Moments out{Vec(2 * n), Mat(2 * n, 2 * n)};
    for (int i = 0; i < 2 * n; ++i) out.mean(i) = real_trace(x[i]);
    for (int i = 0; i < 2 * n; ++i)
        for (int j = 0; j <= i; ++j) {
            const CMat& op = (i % 2 == 0) ? q : p;
            const double second = real_trace(apply_left(x[j], op, n, d, i / 2));
            out.cov(i, j) = out.cov(j, i) = second - out.mean(i) * out.mean(j);
        }
    return out;
}

BlockEigen block_eigen(const CMat& rho, const CMat* extra) {
    const int dim = static_cast<int>(rho.rows());
    std::vector<int> parent(dim);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (int j = 0; j < dim; ++j)
        for (int i = 0; i < j; ++i)
            if (rho(i, j) != 0.0 || (extra && (*extra)(i, j) != 0.0)) parent[find(i)] = find(j);
    std::vector<int> label(dim, -1);
    BlockEigen be;
    for (int i = 0; i < dim; ++i) {
        const int r = find(i);
        if (label[r] < 0) {
            label[r] = static_cast<int>(be.blocks.size());
            be.blocks.emplace_back();
        }
        be.blocks[label[r]].push_back(i);
    }
    for (const auto& idx : be.blocks) {
        const int k = static_cast<int>(idx.size());
        CMat sub(k, k);
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) sub(i, j) = rho(idx[i], idx[j]);
        Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (sub + sub.adjoint()));
        be.values.push_back(es.eigenvalues());
        be.vectors.push_back(es.eigenvectors());
    }
    return be;
}

double qfi_sld(const CMat& rho, const CMat& drho) {
    const BlockEigen be = block_eigen(rho, &drho);
    double top = 0;
    for (const auto& v : be.values) top = std::max(top, v.maxCoeff());
    double acc = 0;
    for (std::size_t b = 0; b < be.blocks.size(); ++b) {
        const auto& idx = be.blocks[b];
        const int k = static_cast<int>(idx.size());
        CMat sub(k, k);
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) sub(i, j) = drho(idx[i], idx[j]);
        const CMat t = be.vectors[b].adjoint() * sub * be.vectors[b];
        const Vec& l = be.values[b];
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) {
                const double den = l(i) + l(j);
                if (den > 1e-14 * top) acc += 2 * std::norm(t(i, j)) / den;
            }
    }
    return acc;
}

double qfi(const std::function<FockState(double)>& family, double x) {
    const double h = fd_step(x);
    const CMat rho = family(x).rho;
    const CMat d = (family(x + h).rho - family(x - h).rho) / (2 * h);
    return qfi_sld(rho, d);
}

double fidelity(const CMat& a, const CMat& b) {
    const CMat sa = matrix_function(block_eigen(a), static_cast<int>(a.rows()),
                                    [](double l) { return l > 0 ? std::sqrt(l) : 0.0; });
    const CMat m = sa * b * sa;
    const BlockEigen be = block_eigen(m);
    double tr = 0;
    for (const auto& v : be.values)
        for (Eigen::Index i = 0; i < v.size(); ++i) tr += v(i) > 0 ? std::sqrt(v(i)) : 0.0;
    return tr * tr;
}

double qfi_fidelity(const std::function<FockState(double)>& family, double x, double h) {
    const double f = fidelity(family(x - h / 2).rho, family(x + h / 2).rho);
    return 8 * (1 - std::sqrt(f)) / (h * h);
}

double overlap(const CMat& rho0, const CMat& rho1, double s, int* clipped) {
    if (!(s >= 0 && s <= 1)) throw DomainError("Chernoff parameter outside [0,1]");
    if (rho0.rows() != rho1.rows()) throw DomainError("overlap needs a shared dimension");
    int clip = 0;
    // Rounding-level eigenvalues of (nearly) pure states would otherwise
    // survive small fractional powers.
    auto power = [&](double e, double floor) {
        return [&clip, e, floor](double l) {
            if (l < -1e-10) ++clip;
            if (l <= floor) return 0.0;
            return std::pow(l, e);
        };
    };
    auto top = [](const BlockEigen& be) {
        double t = 0;
        for (const auto& v : be.values) t = std::max(t, v.maxCoeff());
        return t;
    };
    const int dim = static_cast<int>(rho0.rows());
    const BlockEigen e0 = block_eigen(rho0), e1 = block_eigen(rho1);
    const CMat a = matrix_function(e0, dim, power(s, 1e-14 * top(e0)));
    const CMat b = matrix_function(e1, dim, power(1 - s, 1e-14 * top(e1)));
    if (clipped) *clipped = clip;
    return (a.array() * b.transpose().array()).sum().real();
}

double helstrom_error(const CMat& rho0, const CMat& rho1) {
    if (rho0.rows() != rho1.rows()) throw DomainError("Helstrom error needs a shared dimension");
    const CMat diff = rho0 - rho1;
    const BlockEigen be = block_eigen(diff);
    double norm1 = 0;
    for (const auto& v : be.values) norm1 += v.cwiseAbs().sum();
    return 0.5 * (1 - 0.5 * norm1);
}

}  // namespace qinet::fock
