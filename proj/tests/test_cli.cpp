#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "config.hpp"

using namespace qinet;
using namespace qinet::cli;
namespace fs = std::filesystem;

namespace {

json base_doc() {
    return json::parse(R"({"network": {"m": 2, "m_re": 3, "n_s": 0.01, "n_b": 10, "eta": 0.3, "theta": 0.0, "nu": 1000},
                           "hypothesis": {"eta0": 0.3, "eta1": 0.1}})");
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("qinet_cli_" + std::to_string(::getpid()) + "_" +
                                            ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    fs::path write(const std::string& name, const json& doc) const {
        std::ofstream(path / name) << doc.dump(2);
        return path / name;
    }
};

int run_cli(const std::string& args) {
    const std::string cmd = std::string(QINET_EXE) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Config, ParsesAndBroadcasts) {
    const ExperimentConfig c = parse_config(base_doc(), "classify");
    const NetworkConfig n = c.network.resolve();
    EXPECT_EQ(n.eta.size(), 2);
    EXPECT_DOUBLE_EQ(n.eta(1), 0.3);
    EXPECT_EQ(n.convention, NbPrime::MultipleAccess);
    EXPECT_FALSE(c.sweep.present);
}

TEST(Config, RejectsUnknownKeys) {
    json d = base_doc();
    d["network"]["colour"] = 1;
    EXPECT_THROW(parse_config(d, "classify"), ConfigError);
    d = base_doc();
    d["extras"] = json::object();
    EXPECT_THROW(parse_config(d, "classify"), ConfigError);
}

TEST(Config, RejectsBadValues) {
    json d = base_doc();
    d["network"]["eta"] = {0.1, 0.2, 0.3};
    EXPECT_THROW(parse_config(d, "classify"), ConfigError);
    d = base_doc();
    d["network"]["eta"] = 1.5;
    EXPECT_THROW(parse_config(d, "classify"), ConfigError);
    d = base_doc();
    d["network"].erase("nu");
    EXPECT_THROW(parse_config(d, "classify"), ConfigError);
    d = base_doc();
    d["receiver"] = {{"gain", "big"}};
    EXPECT_THROW(parse_config(d, "qfim"), ConfigError);
    d = base_doc();
    d["sweep"] = {{"variable", "g"}, {"values", {1, 2}}};
    EXPECT_THROW(parse_config(d, "classify"), ConfigError);
    d = base_doc();
    d.erase("hypothesis");
    EXPECT_THROW(parse_config(d, "classify"), ConfigError);
    EXPECT_THROW(parse_config(base_doc(), "fig9"), ConfigError);
}

TEST(Config, LogspaceEndpointsExact) {
    const auto v = logspace(1e-4, 10, 41);
    ASSERT_EQ(v.size(), 41u);
    EXPECT_EQ(v.front(), 1e-4);
    EXPECT_EQ(v.back(), 10.0);
    EXPECT_NEAR(v[8], 1e-3, 1e-15);
}

TEST(Config, CommandDefaults) {
    json d = base_doc();
    d["network"]["m_re"] = 5;
    const ExperimentConfig f1 = parse_config(d, "fig1");
    EXPECT_EQ(f1.sweep.values.size(), 5u);
    const ExperimentConfig f4 = parse_config(d, "fig4");
    EXPECT_EQ(f4.sweep.panels_nb, (std::vector<double>{32, 0.6}));
    EXPECT_TRUE(parse_config(d, "fig5").receiver.optimize);
}

TEST(Config, RoundTrip) {
    json d = base_doc();
    d["sweep"] = {{"variable", "nu"}, {"logspace", {{"min", 10}, {"max", 1000}, {"points", 3}}}};
    d["receiver"] = {{"kind", "sPCR"}, {"gain", 3.5}};
    const ExperimentConfig a = parse_config(d, "classify");
    const json once = to_json(a);
    const json twice = to_json(parse_config(once, "classify"));
    EXPECT_EQ(once, twice);
    EXPECT_EQ(once["receiver"]["kind"], "sPCR");
}

TEST(Commands, ClassifyTable) {
    json d = base_doc();
    d["sweep"] = {{"variable", "nu"}, {"values", {1e3, 1e4}}};
    const Table t = run_command(parse_config(d, "classify"));
    EXPECT_EQ(t.header, (std::vector<std::string>{"nu", "p_qi", "p_qi_exact", "p_ci", "ratio", "ratio_approx", "ratio_db"}));
    ASSERT_EQ(t.rows.size(), 2u);
    EXPECT_EQ(t.rows[0][0], "1000");
    EXPECT_LT(std::stod(t.rows[1][1]), std::stod(t.rows[0][1]));
}

TEST(Commands, Fig1HeaderAndMonotone) {
    json d = base_doc();
    d["network"] = {{"m", 1}, {"m_re", 12}, {"n_s", 0.5}, {"n_b", 32}, {"eta", 0.5}, {"nu", 1000}};
    const Table t = run_command(parse_config(d, "fig1"));
    EXPECT_EQ(t.header, (std::vector<std::string>{"m", "eps_qi", "eps_ci"}));
    ASSERT_EQ(t.rows.size(), 12u);
    for (std::size_t i = 1; i < t.rows.size(); ++i) {
        EXPECT_LE(std::stod(t.rows[i][1]), std::stod(t.rows[i - 1][1]));
        EXPECT_LE(std::stod(t.rows[i][2]), std::stod(t.rows[i - 1][2]));
    }
    bool saturation = false;
    for (const auto& n : t.notes) saturation |= n.rfind("saturation at m = m_re = 12", 0) == 0;
    EXPECT_TRUE(saturation);
}

TEST(Commands, Fig4Asymptotes) {
    json d;
    d["network"] = {{"m", 50}, {"m_re", 120}, {"n_s", 0.0032}, {"n_b", 32}, {"eta", 0.5},
                    {"nu", 5000}, {"nb_prime_convention", "MainText"}};
    d["sweep"] = {{"variable", "ns_over_nb"}, {"values", {1e-4}}};
    const Table t = run_command(parse_config(d, "fig4"));
    ASSERT_EQ(t.rows.size(), 2u);  // two panels
    EXPECT_EQ(t.rows[0][0], "32");
    EXPECT_NEAR(std::stod(t.rows[0][4]), 1 / std::sqrt(2.0), 0.01);
    EXPECT_NEAR(std::stod(t.rows[0][2]), std::stod(t.rows[0][4]), 1e-3);
}

TEST(Commands, Num) {
    EXPECT_EQ(num(0.1), "0.10000000000000001");
    EXPECT_EQ(num(2.0), "2");
}

TEST(Cli, ExitCodes) {
    TempDir tmp;
    const fs::path good = tmp.write("good.json", base_doc());
    json bad = base_doc();
    bad["network"]["m"] = 7;  // m > m_re
    const fs::path badp = tmp.write("bad.json", bad);
    json overflow = base_doc();
    overflow["receiver"] = {{"kind", "sPCR"}, {"gain", 1e300}};
    const fs::path ovp = tmp.write("overflow.json", overflow);

    EXPECT_EQ(run_cli("classify --config " + good.string() + " --out " + (tmp.path / "a.csv").string()), 0);
    EXPECT_EQ(run_cli("classify --config " + badp.string()), 2);
    EXPECT_EQ(run_cli("classify --config " + (tmp.path / "missing.json").string()), 2);
    EXPECT_EQ(run_cli("classify"), 2);
    EXPECT_EQ(run_cli("qfim --config " + ovp.string()), 3);
    EXPECT_EQ(run_cli("classify --config " + good.string() + " --dry-run"), 0);
}

TEST(Cli, DeterministicOutputAndSidecar) {
    TempDir tmp;
    json d;
    d["network"] = {{"m", 4}, {"m_re", 6}, {"n_s", 0.01}, {"n_b", 5}, {"eta", 0.4}, {"nu", 100}};
    d["sweep"] = {{"variable", "ns_over_nb"}, {"logspace", {{"min", 1e-3}, {"max", 1}, {"points", 4}}}, {"panels", {{{"n_b", 5}}}}};
    const fs::path cfg = tmp.write("fig4.json", d);
    const fs::path a = tmp.path / "a.csv", b = tmp.path / "b.csv", c = tmp.path / "c.csv";
    ASSERT_EQ(run_cli("fig4 --config " + cfg.string() + " --threads 1 --out " + a.string()), 0);
    ASSERT_EQ(run_cli("fig4 --config " + cfg.string() + " --threads 3 --out " + b.string()), 0);
    EXPECT_EQ(slurp(a), slurp(b));

    const std::string csv = slurp(a);
    EXPECT_EQ(csv.rfind("# qinet ", 0), 0u);
    EXPECT_NE(csv.find("# config_sha256: "), std::string::npos);
    EXPECT_NE(csv.find("# nb_prime_convention: MultipleAccess"), std::string::npos);
    EXPECT_NE(csv.find("\nn_b,ns_over_nb,ratio_ppcr,ratio_spcr,ratio_ctod\n"), std::string::npos);

    // The sidecar reproduces the run, metadata included.
    json side = json::parse(slurp(a.string() + ".config.json"));
    side["output"]["path"] = c.string();
    const fs::path again = tmp.write("again.json", side);
    ASSERT_EQ(run_cli("fig4 --config " + again.string()), 0);
    EXPECT_EQ(slurp(c), csv);
}

TEST(Cli, ShippedConfigsValidate) {
    for (const char* name : {"fig1", "fig4", "fig5", "fig6", "classify", "qfim", "montecarlo"}) {
        const fs::path p = fs::path(QINET_CONFIGS) / (std::string(name) + ".json");
        EXPECT_NO_THROW(load_config(p.string(), name)) << name;
        EXPECT_EQ(run_cli(std::string(name) + " --dry-run --config " + p.string()), 0) << name;
    }
}

TEST(Cli, ThreadsEnvironmentFallback) {
    TempDir tmp;
    const fs::path good = tmp.write("good.json", base_doc());
    ASSERT_EQ(setenv("QINET_THREADS", "zero", 1), 0);
    EXPECT_EQ(run_cli("classify --config " + good.string()), 2);
    ASSERT_EQ(setenv("QINET_THREADS", "2", 1), 0);
    EXPECT_EQ(run_cli("classify --config " + good.string()), 0);
    unsetenv("QINET_THREADS");
}
