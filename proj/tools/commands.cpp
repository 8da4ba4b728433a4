#include "commands.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>

#include "qinet/benchmarks.hpp"
#include "qinet/estimation.hpp"
#include "qinet/hypothesis.hpp"
#include "qinet/kernels.hpp"
#include "qinet/montecarlo.hpp"
#include "qinet/receivers.hpp"

namespace qinet::cli {

std::string num(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr int kQfimLimit = 64;   // (2m+2)-dimensional state QFIM above this is skipped
constexpr int kPaFullLimit = 400;

std::vector<std::string> nums(std::initializer_list<double> xs) {
    std::vector<std::string> out;
    for (double x : xs) out.push_back(num(x));
    return out;
}

Vec broadcast(const std::vector<double>& v, int m) {
    return v.size() == 1 ? Vec::Constant(m, v[0]) : Vec(Eigen::Map<const Vec>(v.data(), m));
}

// The network with the sweep variable set to x.
NetworkConfig at_point(const ExperimentConfig& e, double x) {
    NetworkConfig c = e.network.resolve();
    const std::string& v = e.sweep.variable;
    if (v == "nu") c.nu = x;
    else if (v == "n_s") c.n_s = x;
    else if (v == "n_b") c.n_b = x;
    else if (v == "eta") c.eta.setConstant(x);
    else if (v == "theta") c.theta.setConstant(x);
    c.validate();
    return c;
}

std::vector<double> points(const ExperimentConfig& e) {
    return e.sweep.present ? e.sweep.values : std::vector<double>{kNaN};
}

struct PaPoint {
    double g;
    double rwmse;
    bool boundary;
};

PaPoint pa_at(const NetworkConfig& c, ReceiverKind kind, const ReceiverSection& r) {
    if (r.optimize) {
        const auto obj = c.m > kPaFullLimit ? GainObjective::Leading : GainObjective::Full;
        const GainOptimum o = optimize_gain(c, kind, r.gain_lo, r.gain_hi, r.reference_phase, obj);
        return {o.g, o.rwmse, o.at_boundary};
    }
    const PaRwmse p = pa_rwmse(c, {kind, r.gain, r.reference_phase}, kPaFullLimit);
    return {r.gain, std::isnan(p.full) ? p.leading : p.full, false};
}

// PA receivers need sin(theta + alpha) away from zero; an optional scan
// over a common theta reports the best operating point instead.
PaPoint pa_point(NetworkConfig c, ReceiverKind kind, const ReceiverSection& r) {
    if (r.scan_points <= 1 && r.scan_max <= r.scan_min) return pa_at(c, kind, r);
    std::optional<PaPoint> best;
    std::optional<UnidentifiableError> last;
    for (int i = 0; i < r.scan_points; ++i) {
        const double th = r.scan_points == 1 ? r.scan_min
                                             : r.scan_min + (r.scan_max - r.scan_min) * i / (r.scan_points - 1);
        c.theta.setConstant(th);
        try {
            const PaPoint p = pa_at(c, kind, r);
            if (!best || p.rwmse < best->rwmse) best = p;
        } catch (const UnidentifiableError& e) {
            last = e;
        }
    }
    if (!best) throw *last;
    return *best;
}

template <class F>
std::vector<std::vector<std::string>> sweep_rows(std::size_t n, F&& f) {
    return kernels::map_parallel(n, f);
}

Table fig1(const ExperimentConfig& e) {
    Table t{{"m", "eps_qi", "eps_ci"}, {}, {}};
    const auto& ms = e.sweep.values;
    std::vector<AveragePhaseErrors> errs = kernels::map_parallel(
        ms.size(), [&](std::size_t i) { return average_phase_errors_degenerate(e.network.resolve(int(ms[i]))); });
    std::vector<std::string> flagged;
    for (std::size_t i = 0; i < ms.size(); ++i) {
        t.rows.push_back(nums({ms[i], errs[i].qi, errs[i].ci}));
        if (errs[i].correction_large) flagged.push_back(num(ms[i]));
        if (int(ms[i]) == e.network.m_re)
            t.notes.push_back("saturation at m = m_re = " + num(ms[i]) + ": eps_qi = " + num(errs[i].qi) +
                              ", eps_ci = " + num(errs[i].ci));
    }
    if (!flagged.empty())
        t.notes.push_back("leading-order correction not small for " + std::to_string(flagged.size()) +
                          " values of m, from m = " + flagged.front() + " to m = " + flagged.back());
    return t;
}

Table fig4(const ExperimentConfig& e) {
    Table t{{"n_b", "ns_over_nb", "ratio_ppcr", "ratio_spcr", "ratio_ctod"}, {}, {}};
    const auto& xs = e.sweep.values;
    const auto& panels = e.sweep.panels_nb;
    const std::size_t n = panels.size() * xs.size();
    std::vector<std::vector<double>> raw = kernels::map_parallel(n, [&](std::size_t k) {
        NetworkConfig c = e.network.resolve();
        c.n_b = panels[k / xs.size()];
        c.n_s = xs[k % xs.size()] * c.n_b;
        c.validate();
        const double cl = classical_asymptotic_rwmse(c);
        const PaPoint p = pa_point(c, ReceiverKind::pPCR, e.receiver);
        const PaPoint s = pa_point(c, ReceiverKind::sPCR, e.receiver);
        return std::vector<double>{c.n_b, xs[k % xs.size()], p.rwmse / cl, s.rwmse / cl, ctod_rwmse(c).exact / cl,
                                   double(p.boundary), double(s.boundary)};
    });
    int boundary = 0;
    for (const auto& r : raw) {
        t.rows.push_back(nums({r[0], r[1], r[2], r[3], r[4]}));
        boundary += int(r[5]) + int(r[6]);
    }
    if (e.receiver.optimize && boundary)
        t.notes.push_back("optimal gain at the gain_range edge for " + std::to_string(boundary) + " PA points");
    return t;
}

Table fig5(const ExperimentConfig& e) {
    Table t{{"g", "rwmse_ppcr", "rwmse_spcr"}, {}, {}};
    const NetworkConfig c = e.network.resolve();
    const auto& gs = e.sweep.values;
    ReceiverSection r = e.receiver;
    r.optimize = false;
    std::vector<std::array<double, 2>> vals = kernels::map_parallel(gs.size(), [&](std::size_t i) {
        ReceiverSection ri = r;
        ri.gain = gs[i];
        return std::array<double, 2>{pa_point(c, ReceiverKind::pPCR, ri).rwmse, pa_point(c, ReceiverKind::sPCR, ri).rwmse};
    });
    for (std::size_t i = 0; i < gs.size(); ++i) t.rows.push_back(nums({gs[i], vals[i][0], vals[i][1]}));
    for (int k = 0; k < 2; ++k) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < gs.size(); ++i)
            if (vals[i][k] < vals[best][k]) best = i;
        t.notes.push_back(std::string("grid minimum ") + (k ? "sPCR" : "pPCR") + ": g = " + num(gs[best]) +
                          ", rwmse = " + num(vals[best][k]));
        const GainOptimum o = optimize_gain(c, k ? ReceiverKind::sPCR : ReceiverKind::pPCR, e.receiver.gain_lo,
                                            e.receiver.gain_hi, e.receiver.reference_phase,
                                            c.m > kPaFullLimit ? GainObjective::Leading : GainObjective::Full);
        t.notes.push_back(std::string("optimum ") + (k ? "sPCR" : "pPCR") + ": g = " + num(o.g) + ", rwmse = " +
                          num(o.rwmse) + (o.at_boundary ? " (at gain_range edge)" : ""));
    }
    return t;
}

Table fig6(const ExperimentConfig& e) {
    Table t{{"nu", "classical_lower", "classical_upper", "qi_pa_crb"}, {}, {}};
    if (e.receiver.kind == ReceiverKind::CtoD) throw ConfigError("fig6 needs a PA receiver kind");
    const NetworkConfig base = e.network.resolve();
    const double amp = concentrated_probe_amplitude(base);
    const double e_homo = homodyne_mse(std::sqrt(2.0) * amp, base.n_b);
    const BayesResult bayes = bayes_mse(amp, amp, base.n_b, e.bayes.cutoff, e.bayes.grid);
    t.notes.push_back("probe amplitude per component = " + num(amp));
    t.notes.push_back("e_homo = " + num(e_homo));
    t.notes.push_back("e_baye = " + num(bayes.mse) + " (Fock leakage " + num(bayes.leakage) + ")");

    const auto& nus = e.sweep.values;
    t.rows = sweep_rows(nus.size(), [&](std::size_t i) {
        NetworkConfig c = base;
        c.nu = nus[i];
        const NonAsymBounds b = nonasym_bounds(c.m, static_cast<long>(nus[i]), bayes.mse, e_homo);
        return nums({nus[i], b.lower.value, b.upper.value, pa_point(c, e.receiver.kind, e.receiver).rwmse});
    });
    for (const auto& r : t.rows)
        if (std::stod(r[3]) < std::stod(r[1])) {
            t.notes.push_back("qi_pa_crb below classical_lower from nu = " + r[0]);
            break;
        }
    return t;
}

Table classify(const ExperimentConfig& e) {
    Table t{{}, {}, {}};
    if (e.sweep.present) t.header.push_back(e.sweep.variable);
    for (const char* h : {"p_qi", "p_qi_exact", "p_ci", "ratio", "ratio_approx", "ratio_db"}) t.header.push_back(h);
    const int m = e.network.m;
    const HypothesisPair pair{broadcast(e.hypothesis.eta0, m), broadcast(e.hypothesis.eta1, m)};
    const auto xs = points(e);
    bool balanced = false;
    t.rows = sweep_rows(xs.size(), [&](std::size_t i) {
        const NetworkConfig c = at_point(e, xs[i]);
        const QiError q = p_qi(c, pair);
        ExponentRatio r{kNaN, kNaN, kNaN, kNaN};
        if (ci_exponent(c, pair) > 0) r = exponent_ratio(c, pair);
        std::vector<std::string> row;
        if (e.sweep.present) row.push_back(num(xs[i]));
        for (double v : {q.closed_form, q.exact_average, p_ci(c, pair), r.exact, r.approx, r.db}) row.push_back(num(v));
        return row;
    });
    for (const auto& row : t.rows)
        if (row.back() == "nan") balanced = true;
    if (balanced) t.notes.push_back("classical exponent zero (balanced pattern): ratio columns are nan");
    return t;
}

Table qfim(const ExperimentConfig& e) {
    Table t{{}, {}, {}};
    if (e.sweep.present) t.header.push_back(e.sweep.variable);
    for (const char* h : {"quantity", "row", "col", "value"}) t.header.push_back(h);
    const auto xs = points(e);
    const std::string pa = std::string(to_string(e.receiver.kind == ReceiverKind::CtoD ? ReceiverKind::pPCR : e.receiver.kind));
    const ReceiverKind pa_kind = e.receiver.kind == ReceiverKind::CtoD ? ReceiverKind::pPCR : e.receiver.kind;

    auto blocks = kernels::map_parallel(xs.size(), [&](std::size_t i) {
        const NetworkConfig c = at_point(e, xs[i]);
        std::vector<std::vector<std::string>> rows;
        auto lead = [&] {
            std::vector<std::string> r;
            if (e.sweep.present) r.push_back(num(xs[i]));
            return r;
        };
        auto matrix = [&](const std::string& name, const Mat& f) {
            for (Eigen::Index a = 0; a < f.rows(); ++a)
                for (Eigen::Index b = 0; b < f.cols(); ++b) {
                    auto r = lead();
                    for (auto s : {name, std::to_string(a), std::to_string(b), num(f(a, b))}) r.push_back(s);
                    rows.push_back(r);
                }
        };
        auto scalar = [&](const std::string& name, double v) {
            auto r = lead();
            for (auto s : {name, std::string(), std::string(), num(v)}) r.push_back(s);
            rows.push_back(r);
        };
        if (c.m <= kQfimLimit) {
            FisherMatrix q = qfim_gaussian(network_theta_family(c), c.theta);
            q.F *= c.nu;
            matrix("qfim", q.F);
            scalar("rwmse_qcrb", rwmse_from_fim(q));
        }
        const FisherMatrix cf = ctod_cfim(c);
        matrix("cfim_ctod", cf.F);
        const CtodRwmse cr = ctod_rwmse(c);
        scalar("rwmse_ctod", cr.exact);
        scalar("rwmse_ctod_leading", cr.leading);

        const PaPoint p = pa_point(c, pa_kind, e.receiver);
        scalar("gain_" + pa, p.g);
        if (c.m <= kPaFullLimit) matrix("cfim_" + pa, pa_fim(c, {pa_kind, p.g, e.receiver.reference_phase}).F);
        const PaRwmse pr = pa_rwmse(c, {pa_kind, p.g, e.receiver.reference_phase}, kPaFullLimit);
        scalar("rwmse_" + pa, pr.full);
        scalar("rwmse_" + pa + "_leading", pr.leading);
        return rows;
    });
    for (auto& b : blocks)
        for (auto& r : b) t.rows.push_back(std::move(r));
    t.notes.push_back("all information matrices are for nu rounds");
    if (e.network.m > kQfimLimit) t.notes.push_back("state QFIM skipped above m = " + std::to_string(kQfimLimit));
    return t;
}

Table montecarlo(const ExperimentConfig& e) {
    const NetworkConfig c = e.network.resolve();
    ReceiverSpec spec{e.receiver.kind, e.receiver.gain, e.receiver.reference_phase};
    if (spec.kind != ReceiverKind::CtoD && e.receiver.optimize) spec.gain = pa_at(c, spec.kind, e.receiver).g;
    const RunResult r = run({c, spec, e.montecarlo.trials, e.montecarlo.seed});

    Table t{{"trial", "converged", "sq_error"}, {}, {}};
    for (int j = 0; j < c.m; ++j) t.header.push_back("estimate_" + std::to_string(j));
    for (const auto& tr : r.trials) {
        std::vector<std::string> row{std::to_string(tr.trial), tr.converged ? "1" : "0", num(tr.sq_error)};
        for (int j = 0; j < c.m; ++j) row.push_back(num(tr.estimate(j)));
        t.rows.push_back(row);
    }
    t.notes.push_back(std::string("receiver = ") + to_string(spec.kind) +
                      (spec.kind == ReceiverKind::CtoD ? "" : ", gain = " + num(spec.gain)));
    t.notes.push_back("rwmse = " + num(r.rwmse) + " +- " + num(r.rwmse_se));
    t.notes.push_back("crb = " + num(r.crb));
    t.notes.push_back("z = " + num((r.rwmse - r.crb) / r.rwmse_se));
    t.notes.push_back("discarded = " + std::to_string(r.discarded));
    if (r.bias.size()) {
        std::string b = "bias =";
        for (int j = 0; j < c.m; ++j) b += " " + num(r.bias(j)) + " +- " + num(r.bias_se(j));
        t.notes.push_back(b);
    }
    return t;
}

}  // namespace

Table run_command(const ExperimentConfig& e) {
    if (e.command == "fig1") return fig1(e);
    if (e.command == "fig4") return fig4(e);
    if (e.command == "fig5") return fig5(e);
    if (e.command == "fig6") return fig6(e);
    if (e.command == "classify") return classify(e);
    if (e.command == "qfim") return qfim(e);
    if (e.command == "montecarlo") return montecarlo(e);
    throw ConfigError("unknown command '" + e.command + "'");
}

std::vector<std::string> describe_grid(const ExperimentConfig& e) {
    std::vector<std::string> out;
    if (e.command == "montecarlo") {
        out.push_back("trials = " + std::to_string(e.montecarlo.trials) + ", seed = " + std::to_string(e.montecarlo.seed));
        return out;
    }
    if (!e.sweep.present) {
        out.push_back("single point");
        return out;
    }
    const std::vector<double> panels = e.sweep.panels_nb.empty() ? std::vector<double>{kNaN} : e.sweep.panels_nb;
    for (double p : panels)
        for (double x : e.sweep.values)
            out.push_back((std::isnan(p) ? "" : "n_b = " + num(p) + ", ") + e.sweep.variable + " = " + num(x));
    return out;
}

}  // namespace qinet::cli
