#include "qinet/network.hpp"

#include <cmath>
#include <string>

namespace qinet {

const char* to_string(NbPrime c) {
    return c == NbPrime::MainText ? "MainText" : "MultipleAccess";
}

NbPrime nb_prime_from_string(const std::string& s) {
    if (s == "MultipleAccess") return NbPrime::MultipleAccess;
    if (s == "MainText") return NbPrime::MainText;
    throw DomainError("unknown N_B' convention '" + s + "'");
}

void NetworkConfig::validate() const {
    if (m < 1) throw DomainError("m must be >= 1");
    if (m_re < m) throw DomainError("m_re must be >= m");
    if (!(n_s >= 0)) throw DomainError("N_S must be >= 0");
    if (!(n_b >= 0)) throw DomainError("N_B must be >= 0");
    if (!(nu >= 1)) throw DomainError("nu must be >= 1");
    if (eta.size() != m) throw DomainError("eta must have m entries");
    if (theta.size() != m) throw DomainError("theta must have m entries");
    for (int j = 0; j < m; ++j) {
        if (!(eta(j) >= 0 && eta(j) <= 1)) throw DomainError("eta_" + std::to_string(j) + " outside [0,1]");
        if (eta(j) == 1 && n_b > 0)
            throw DomainError("eta_" + std::to_string(j) + " = 1 with N_B > 0: environment photon number diverges");
        if (!std::isfinite(theta(j))) throw DomainError("theta must be finite");
    }
    if (omega.size()) {
        if (omega.size() != m) throw DomainError("omega must have m entries");
        if (omega.minCoeff() <= 0) throw DomainError("omega entries must be positive");
        if (omega.sum() > 1 + 1e-12) throw DomainError("omega entries must sum to at most 1");
    }
}

double NetworkConfig::nb_prime() const {
    double s = 0;
    if (convention == NbPrime::MainText) {
        for (int j = 0; j < m; ++j) s += eta(j) * n_s;
        return n_b + s / m;
    }
    for (int j = 0; j < m; ++j) s += weight(j) * (eta(j) * n_s + n_b);
    return s;
}

NetworkConfig make_config(int m, int m_re, double n_s, double n_b, double eta, double theta,
                          double nu, NbPrime conv) {
    NetworkConfig c;
    c.m = m;
    c.m_re = m_re;
    c.n_s = n_s;
    c.n_b = n_b;
    c.eta = Vec::Constant(m, eta);
    c.theta = Vec::Constant(m, theta);
    c.nu = nu;
    c.convention = conv;
    return c;
}

GaussianState thermal_loss(const GaussianState& state, int mode, double eta, double theta, double n_b) {
    if (!(eta >= 0 && eta <= 1)) throw DomainError("reflectivity outside [0,1]");
    if (n_b < 0) throw DomainError("N_B must be >= 0");
    if (eta == 1 && n_b > 0) throw DomainError("eta = 1 with N_B > 0 is undefined");
    const int n = state.modes();
    const double n_env = eta == 1 ? 0.0 : n_b / (1 - eta);
    GaussianState s = tensor(state, thermal(n_env));
    s = apply(s, beamsplitter(n + 1, mode, n, eta));
    s = apply(s, phase(n + 1, mode, theta));
    std::vector<int> keep(n);
    for (int j = 0; j < n; ++j) keep[j] = j;
    return partial_trace(s, keep);
}

GaussianState multiple_access(const GaussianState& state, const std::vector<int>& returns,
                              const Vec& weights) {
    const int n = state.modes();
    const auto k = static_cast<Eigen::Index>(returns.size());
    if (weights.size() != k) throw DomainError("one weight per return mode");
    const double w2 = weights.squaredNorm();
    if (w2 > 1 + 1e-12) throw DomainError("multiple-access weights exceed unit norm");

    std::vector<char> is_return(n, 0);
    for (int r : returns) {
        if (r < 0 || r >= n) throw DomainError("return mode out of range");
        is_return[r] = 1;
    }
    std::vector<int> others;
    for (int j = 0; j < n; ++j)
        if (!is_return[j]) others.push_back(j);

    // Linear map: row block 0 combines the returns, the rest copy the others.
    const int out_n = 1 + static_cast<int>(others.size());
    Mat L = Mat::Zero(2 * out_n, 2 * n);
    for (Eigen::Index a = 0; a < k; ++a) L.block<2, 2>(0, 2 * returns[a]) = weights(a) * Mat2::Identity();
    for (int b = 0; b < static_cast<int>(others.size()); ++b)
        L.block<2, 2>(2 * (b + 1), 2 * others[b]) = Mat2::Identity();

    GaussianState out{L * state.mean, L * state.cov * L.transpose()};
    out.cov.topLeftCorner<2, 2>() += std::max(0.0, 1 - w2) * Mat2::Identity();
    return out;
}

Mat multiple_access_matrix(const Vec& weights, int m_re) {
    const auto m = weights.size();
    if (m > m_re) throw DomainError("more weights than spatial modes");
    Vec row = Vec::Zero(m_re);
    row.head(m) = weights;
    const double rest = 1 - weights.squaredNorm();
    if (m < m_re) {
        if (rest < -1e-12) throw DomainError("multiple-access weights exceed unit norm");
        row.tail(m_re - m).setConstant(std::sqrt(std::max(0.0, rest) / double(m_re - m)));
    } else if (std::abs(rest) > 1e-12) {
        throw DomainError("weights must have unit norm when m = m_re");
    }
    const Mat q = orthogonal_completion(row);
    Mat W(m_re, m_re);
    W.topRows(m_re - 1) = q.rightCols(m_re - 1).transpose();
    W.row(m_re - 1) = q.col(0).transpose();
    return W;
}

Mat2 s_block(const NetworkConfig& cfg, int j) {
    const double c = 2 * std::sqrt(cfg.weight(j) * cfg.eta(j) * cfg.n_s * (cfg.n_s + 1));
    return c * pauli_z() * rotation(cfg.theta(j)).transpose();
}

OutputState closed_form_output(const NetworkConfig& cfg) {
    cfg.validate();
    const int n = cfg.m + 1;
    OutputState out;
    out.nb_prime = cfg.nb_prime();
    out.state = vacuum(n);
    out.state.cov.topLeftCorner<2, 2>() *= 2 * out.nb_prime + 1;
    for (int j = 0; j < cfg.m; ++j) {
        const Mat2 s = s_block(cfg, j);
        out.s_blocks.push_back(s);
        out.state.cov.block<2, 2>(2 * (j + 1), 2 * (j + 1)) *= 2 * cfg.n_s + 1;
        out.state.cov.block<2, 2>(2 * (j + 1), 0) = s;
        out.state.cov.block<2, 2>(0, 2 * (j + 1)) = s.transpose();
    }
    return out;
}

OutputState pipeline_output(const NetworkConfig& cfg) {
    cfg.validate();
    GaussianState s = tmsv(cfg.n_s);
    for (int j = 1; j < cfg.m; ++j) s = tensor(s, tmsv(cfg.n_s));
    std::vector<int> returns(cfg.m);
    Vec w(cfg.m);
    for (int j = 0; j < cfg.m; ++j) {
        s = thermal_loss(s, 2 * j, cfg.eta(j), cfg.theta(j), cfg.n_b);
        returns[j] = 2 * j;
        w(j) = std::sqrt(cfg.weight(j));
    }
    s = multiple_access(s, returns, w);

    OutputState out;
    out.nb_prime = cfg.nb_prime();
    // The channel alone yields the MultipleAccess value; the main-text
    // convention is reached by additive Gaussian noise on the return mode.
    const double realized = (s.block(0, 0).trace() / 2 - 1) / 2;
    const double top_up = out.nb_prime - realized;
    if (top_up < -1e-12) throw DomainError("N_B' convention requires removing noise from the return mode");
    s.cov.topLeftCorner<2, 2>() += 2 * std::max(0.0, top_up) * Mat2::Identity();
    out.state = s;
    for (int j = 0; j < cfg.m; ++j) out.s_blocks.push_back(s.block(j + 1, 0));
    return out;
}

OutputState build_output_state(const NetworkConfig& cfg, int verify_limit) {
    OutputState out = closed_form_output(cfg);
    if (cfg.m <= verify_limit) {
        const OutputState alt = pipeline_output(cfg);
        const double scale = std::max(1.0, out.state.cov.cwiseAbs().maxCoeff());
        if ((alt.state.cov - out.state.cov).cwiseAbs().maxCoeff() > 1e-10 * scale ||
            (alt.state.mean - out.state.mean).cwiseAbs().maxCoeff() > 1e-10 * scale)
            throw NumericalError("closed-form and compositional network states disagree");
    }
    return out;
}

double received_photon_number(const NetworkConfig& cfg) {
    double s = 0;
    for (int j = 0; j < cfg.m; ++j) s += cfg.weight(j) * (cfg.eta(j) * cfg.n_s + cfg.n_b);
    return s;
}

}  // namespace qinet
