#include "config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <set>

namespace qinet::cli {

namespace {

void only_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw ConfigError(where + " must be an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [k, v] : obj.items())
        if (!ok.count(k)) throw ConfigError("unknown key '" + k + "' in " + where);
}

double number(const json& v, const std::string& where) {
    if (!v.is_number()) throw ConfigError(where + " must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(where + " must be finite");
    return x;
}

int integer(const json& v, const std::string& where) {
    if (!v.is_number_integer()) throw ConfigError(where + " must be an integer");
    return v.get<int>();
}

std::vector<double> scalar_or_vector(const json& v, const std::string& where) {
    if (v.is_number()) return {number(v, where)};
    if (!v.is_array() || v.empty()) throw ConfigError(where + " must be a number or a non-empty array");
    std::vector<double> out;
    for (const auto& x : v) out.push_back(number(x, where));
    return out;
}

Vec broadcast(const std::vector<double>& v, int m, const std::string& where) {
    if (v.size() == 1) return Vec::Constant(m, v[0]);
    if (static_cast<int>(v.size()) != m) throw ConfigError(where + " needs 1 or m = " + std::to_string(m) + " entries");
    return Eigen::Map<const Vec>(v.data(), m);
}

std::vector<double> values_spec(const json& s, const std::string& where) {
    if (s.contains("values") == s.contains("logspace"))
        throw ConfigError(where + " needs exactly one of 'values' or 'logspace'");
    if (s.contains("values")) {
        if (!s["values"].is_array() || s["values"].empty()) throw ConfigError(where + ".values must be a non-empty array");
        std::vector<double> out;
        for (const auto& x : s["values"]) out.push_back(number(x, where + ".values"));
        return out;
    }
    const json& l = s["logspace"];
    only_keys(l, where + ".logspace", {"min", "max", "points"});
    for (const char* k : {"min", "max", "points"})
        if (!l.contains(k)) throw ConfigError(where + ".logspace needs '" + k + "'");
    const double lo = number(l["min"], "logspace.min"), hi = number(l["max"], "logspace.max");
    const int n = integer(l["points"], "logspace.points");
    if (!(lo > 0 && hi >= lo) || n < 1) throw ConfigError(where + ".logspace needs 0 < min <= max and points >= 1");
    return logspace(lo, hi, n);
}

const std::set<std::string>& sweep_variables(const std::string& command) {
    static const std::map<std::string, std::set<std::string>> table{
        {"fig1", {"m"}},
        {"fig4", {"ns_over_nb"}},
        {"fig5", {"g"}},
        {"fig6", {"nu"}},
        {"classify", {"nu", "n_s", "n_b"}},
        {"qfim", {"nu", "n_s", "n_b", "eta", "theta"}},
        {"montecarlo", {}},
    };
    const auto it = table.find(command);
    if (it == table.end()) throw ConfigError("unknown command '" + command + "'");
    return it->second;
}

void default_sweep(ExperimentConfig& c) {
    SweepSection& s = c.sweep;
    if (c.command == "fig1") {
        s.variable = "m";
        for (int m = 1; m <= c.network.m_re; ++m) s.values.push_back(m);
    } else if (c.command == "fig4") {
        s.variable = "ns_over_nb";
        s.values = logspace(1e-4, 10, 41);
        if (s.panels_nb.empty()) s.panels_nb = {32, 0.6};
    } else if (c.command == "fig5") {
        s.variable = "g";
        s.values = logspace(1 + 1e-3, 10.0 * c.network.m, 60);
    } else if (c.command == "fig6") {
        s.variable = "nu";
        for (double v : logspace(1, c.network.m, 40)) {
            const double r = std::round(v);
            if (s.values.empty() || r != s.values.back()) s.values.push_back(r);
        }
    } else {
        return;
    }
    s.present = true;
}

}  // namespace

std::vector<double> logspace(double lo, double hi, int points) {
    if (points == 1) return {lo};
    const double a = std::log10(lo), b = std::log10(hi);
    std::vector<double> out;
    for (int i = 0; i < points; ++i) out.push_back(std::pow(10.0, a + (b - a) * i / (points - 1)));
    out.front() = lo;
    out.back() = hi;
    return out;
}

NetworkConfig NetworkSection::resolve(int m_override) const {
    const int mm = m_override > 0 ? m_override : m;
    NetworkConfig c;
    c.m = mm;
    c.m_re = m_re;
    c.n_s = n_s;
    c.n_b = n_b;
    c.nu = nu;
    c.convention = convention;
    c.eta = broadcast(eta, mm, "network.eta");
    c.theta = broadcast(theta, mm, "network.theta");
    if (!omega.empty()) c.omega = broadcast(omega, mm, "network.omega");
    return c;
}

ExperimentConfig parse_config(const json& doc, const std::string& command) {
    ExperimentConfig c;
    c.command = command;
    sweep_variables(command);
    only_keys(doc, "config", {"network", "receiver", "sweep", "hypothesis", "montecarlo", "output", "bayes"});
    if (!doc.contains("network")) throw ConfigError("config needs a 'network' section");

    const json& n = doc["network"];
    only_keys(n, "network", {"m", "m_re", "n_s", "n_b", "eta", "theta", "nu", "nb_prime_convention", "omega"});
    for (const char* k : {"m", "m_re", "n_s", "n_b", "eta", "nu"})
        if (!n.contains(k)) throw ConfigError(std::string("network needs '") + k + "'");
    NetworkSection& net = c.network;
    net.m = integer(n["m"], "network.m");
    net.m_re = integer(n["m_re"], "network.m_re");
    net.n_s = number(n["n_s"], "network.n_s");
    net.n_b = number(n["n_b"], "network.n_b");
    net.nu = number(n["nu"], "network.nu");
    net.eta = scalar_or_vector(n["eta"], "network.eta");
    if (n.contains("theta")) net.theta = scalar_or_vector(n["theta"], "network.theta");
    if (n.contains("omega")) net.omega = scalar_or_vector(n["omega"], "network.omega");
    if (n.contains("nb_prime_convention")) {
        if (!n["nb_prime_convention"].is_string()) throw ConfigError("network.nb_prime_convention must be a string");
        try {
            net.convention = nb_prime_from_string(n["nb_prime_convention"].get<std::string>());
        } catch (const DomainError& e) {
            throw ConfigError(e.what());
        }
    }

    if (doc.contains("receiver")) {
        const json& r = doc["receiver"];
        only_keys(r, "receiver", {"kind", "gain", "gain_range", "reference_phase", "theta_scan"});
        ReceiverSection& rs = c.receiver;
        if (r.contains("kind")) {
            if (!r["kind"].is_string()) throw ConfigError("receiver.kind must be a string");
            try {
                rs.kind = receiver_from_string(r["kind"].get<std::string>());
            } catch (const DomainError& e) {
                throw ConfigError(e.what());
            }
        }
        if (r.contains("gain")) {
            if (r["gain"].is_string()) {
                if (r["gain"].get<std::string>() != "optimize") throw ConfigError("receiver.gain must be a number or \"optimize\"");
                rs.optimize = true;
            } else {
                rs.gain = number(r["gain"], "receiver.gain");
                rs.optimize = false;
                if (!(rs.gain >= 1)) throw ConfigError("receiver.gain must be >= 1");
            }
        }
        if (r.contains("gain_range")) {
            const auto g = scalar_or_vector(r["gain_range"], "receiver.gain_range");
            if (g.size() != 2 || !(g[0] > 1) || !(g[1] > g[0]))
                throw ConfigError("receiver.gain_range must be [lo, hi] with 1 < lo < hi");
            rs.gain_lo = g[0];
            rs.gain_hi = g[1];
        }
        if (r.contains("reference_phase")) rs.reference_phase = number(r["reference_phase"], "receiver.reference_phase");
        if (r.contains("theta_scan")) {
            const json& t = r["theta_scan"];
            only_keys(t, "receiver.theta_scan", {"min", "max", "points"});
            for (const char* k : {"min", "max", "points"})
                if (!t.contains(k)) throw ConfigError(std::string("receiver.theta_scan needs '") + k + "'");
            rs.scan_min = number(t["min"], "theta_scan.min");
            rs.scan_max = number(t["max"], "theta_scan.max");
            rs.scan_points = integer(t["points"], "theta_scan.points");
            if (rs.scan_points < 1 || rs.scan_max < rs.scan_min) throw ConfigError("theta_scan needs points >= 1 and min <= max");
        }
    }
    if (c.receiver.gain_hi == 0) c.receiver.gain_hi = 10.0 * net.m;

    if (doc.contains("sweep")) {
        const json& s = doc["sweep"];
        only_keys(s, "sweep", {"variable", "values", "logspace", "panels"});
        if (!s.contains("variable") || !s["variable"].is_string()) throw ConfigError("sweep needs a string 'variable'");
        c.sweep.variable = s["variable"].get<std::string>();
        if (!sweep_variables(command).count(c.sweep.variable))
            throw ConfigError("sweep variable '" + c.sweep.variable + "' is not supported by " + command);
        c.sweep.values = values_spec(s, "sweep");
        c.sweep.present = true;
        if (s.contains("panels")) {
            if (command != "fig4") throw ConfigError("sweep.panels is only used by fig4");
            const json& p = s["panels"];
            if (!p.is_array() || p.empty()) throw ConfigError("sweep.panels must be a non-empty array");
            for (const auto& e : p) {
                only_keys(e, "sweep.panels[]", {"n_b"});
                if (!e.contains("n_b")) throw ConfigError("sweep.panels[] needs 'n_b'");
                c.sweep.panels_nb.push_back(number(e["n_b"], "sweep.panels[].n_b"));
            }
        }
    } else {
        default_sweep(c);
    }
    if (c.sweep.present && c.command == "fig4" && c.sweep.panels_nb.empty()) c.sweep.panels_nb = {32, 0.6};

    if (doc.contains("hypothesis")) {
        const json& h = doc["hypothesis"];
        only_keys(h, "hypothesis", {"eta0", "eta1"});
        if (!h.contains("eta0") || !h.contains("eta1")) throw ConfigError("hypothesis needs 'eta0' and 'eta1'");
        c.hypothesis.present = true;
        c.hypothesis.eta0 = scalar_or_vector(h["eta0"], "hypothesis.eta0");
        c.hypothesis.eta1 = scalar_or_vector(h["eta1"], "hypothesis.eta1");
    }
    if (command == "classify" && !c.hypothesis.present) throw ConfigError("classify needs a 'hypothesis' section");

    if (doc.contains("montecarlo")) {
        const json& m = doc["montecarlo"];
        only_keys(m, "montecarlo", {"trials", "seed"});
        if (m.contains("trials")) c.montecarlo.trials = integer(m["trials"], "montecarlo.trials");
        if (m.contains("seed")) {
            if (!m["seed"].is_number_unsigned() && !m["seed"].is_number_integer())
                throw ConfigError("montecarlo.seed must be a non-negative integer");
            c.montecarlo.seed = m["seed"].get<std::uint64_t>();
        }
        if (c.montecarlo.trials < 1) throw ConfigError("montecarlo.trials must be >= 1");
    }

    if (doc.contains("output")) {
        const json& o = doc["output"];
        only_keys(o, "output", {"path", "format"});
        if (o.contains("path")) {
            if (!o["path"].is_string()) throw ConfigError("output.path must be a string");
            c.output.path = o["path"].get<std::string>();
        }
        if (o.contains("format")) {
            if (!o["format"].is_string() || o["format"].get<std::string>() != "csv")
                throw ConfigError("output.format must be \"csv\"");
        }
    }

    if (doc.contains("bayes")) {
        const json& b = doc["bayes"];
        only_keys(b, "bayes", {"cutoff", "grid"});
        if (b.contains("cutoff")) c.bayes.cutoff = integer(b["cutoff"], "bayes.cutoff");
        if (b.contains("grid")) c.bayes.grid = integer(b["grid"], "bayes.grid");
        if (c.bayes.cutoff < 2 || c.bayes.cutoff > 400) throw ConfigError("bayes.cutoff must be in [2, 400]");
        if (c.bayes.grid != 0 && c.bayes.grid < 128) throw ConfigError("bayes.grid must be 0 or >= 128");
    }

    // Validate the network at every m the run will touch.
    try {
        if (command == "fig1") {
            if (net.eta.size() != 1 || net.theta.size() != 1)
                throw ConfigError("fig1 varies m, so network.eta and network.theta must be scalars");
            for (double v : c.sweep.values) {
                if (v != std::floor(v) || v < 1 || v > net.m_re) throw ConfigError("fig1 m values must be integers in [1, m_re]");
                net.resolve(static_cast<int>(v)).validate();
            }
        } else {
            net.resolve().validate();
        }
        if (c.hypothesis.present) {
            broadcast(c.hypothesis.eta0, net.m, "hypothesis.eta0");
            broadcast(c.hypothesis.eta1, net.m, "hypothesis.eta1");
        }
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    if (command == "montecarlo" && net.nu != std::floor(net.nu)) throw ConfigError("montecarlo needs an integer network.nu");
    if (command == "fig6")
        for (double v : c.sweep.values)
            if (v != std::floor(v) || v < 1) throw ConfigError("fig6 nu values must be integers >= 1");
    return c;
}

ExperimentConfig load_config(const std::string& path, const std::string& command) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(doc, command);
}

json to_json(const ExperimentConfig& c) {
    json doc;
    const NetworkSection& n = c.network;
    doc["network"] = {{"m", n.m},     {"m_re", n.m_re},   {"n_s", n.n_s},
                      {"n_b", n.n_b}, {"eta", n.eta},     {"theta", n.theta},
                      {"nu", n.nu},   {"nb_prime_convention", to_string(n.convention)}};
    if (!n.omega.empty()) doc["network"]["omega"] = n.omega;
    const ReceiverSection& r = c.receiver;
    doc["receiver"] = {{"kind", to_string(r.kind)},
                       {"gain_range", {r.gain_lo, r.gain_hi}},
                       {"reference_phase", r.reference_phase}};
    doc["receiver"]["gain"] = r.optimize ? json("optimize") : json(r.gain);
    if (r.scan_points > 1 || r.scan_max > r.scan_min)
        doc["receiver"]["theta_scan"] = {{"min", r.scan_min}, {"max", r.scan_max}, {"points", r.scan_points}};
    if (c.sweep.present) {
        doc["sweep"] = {{"variable", c.sweep.variable}, {"values", c.sweep.values}};
        if (!c.sweep.panels_nb.empty()) {
            json p = json::array();
            for (double v : c.sweep.panels_nb) p.push_back({{"n_b", v}});
            doc["sweep"]["panels"] = p;
        }
    }
    if (c.hypothesis.present) doc["hypothesis"] = {{"eta0", c.hypothesis.eta0}, {"eta1", c.hypothesis.eta1}};
    doc["montecarlo"] = {{"trials", c.montecarlo.trials}, {"seed", c.montecarlo.seed}};
    doc["output"] = {{"format", c.output.format}};
    if (!c.output.path.empty()) doc["output"]["path"] = c.output.path;
    doc["bayes"] = {{"cutoff", c.bayes.cutoff}, {"grid", c.bayes.grid}};
    return doc;
}

}  // namespace qinet::cli
