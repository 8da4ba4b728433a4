#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <openssl/evp.h>

#include <CLI11/CLI11.hpp>

#include "commands.hpp"
#include "config.hpp"
#include "qinet/kernels.hpp"
#include "qinet/types.hpp"

#ifndef QINET_VERSION
#define QINET_VERSION "unknown"
#endif

using namespace qinet;
using namespace qinet::cli;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr);
    std::string out;
    char buf[3];
    for (unsigned int i = 0; i < len; ++i) {
        std::snprintf(buf, sizeof buf, "%02x", md[i]);
        out += buf;
    }
    return out;
}

// The hash covers everything that affects the numbers, so not the output section.
std::string config_hash(const ExperimentConfig& cfg) {
    json doc = to_json(cfg);
    doc.erase("output");
    return sha256_hex(doc.dump());
}

void write_csv(std::ostream& os, const ExperimentConfig& cfg, const Table& t) {
    os << "# qinet " << QINET_VERSION << "\n";
    os << "# command: " << cfg.command << "\n";
    os << "# config_sha256: " << config_hash(cfg) << "\n";
    os << "# nb_prime_convention: " << to_string(cfg.network.convention) << "\n";
    for (const auto& n : t.notes) os << "# " << n << "\n";
    for (std::size_t i = 0; i < t.header.size(); ++i) os << (i ? "," : "") << t.header[i];
    os << "\n";
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
        os << "\n";
    }
}

int threads_from_env() {
    const char* s = std::getenv("QINET_THREADS");
    if (!s || !*s) return 0;
    char* end = nullptr;
    const long n = std::strtol(s, &end, 10);
    if (*end || n < 1) throw ConfigError("QINET_THREADS must be a positive integer");
    return static_cast<int>(n);
}

int execute(const std::string& command, const std::string& config_path, std::string out, int threads, bool dry_run) {
    ExperimentConfig cfg = load_config(config_path, command);
    if (!out.empty()) cfg.output.path = out;
    if (threads == 0) threads = threads_from_env();
    if (threads > 0) kernels::set_threads(threads);

    const std::string resolved = to_json(cfg).dump(2);
    if (dry_run) {
        std::cout << resolved << "\n";
        for (const auto& line : describe_grid(cfg)) std::cout << line << "\n";
        return 0;
    }

    const Table t = run_command(cfg);
    if (cfg.output.path.empty()) {
        write_csv(std::cout, cfg, t);
        return 0;
    }
    std::ofstream os(cfg.output.path);
    if (!os) throw ConfigError("cannot write '" + cfg.output.path + "'");
    write_csv(os, cfg, t);
    std::ofstream side(cfg.output.path + ".config.json");
    if (!side) throw ConfigError("cannot write '" + cfg.output.path + ".config.json'");
    side << resolved << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantum-illumination network simulator"};
    app.set_version_flag("--version", QINET_VERSION);
    app.require_subcommand(1);

    std::string config, out;
    int threads = 0;
    bool dry_run = false;
    const std::pair<const char*, const char*> commands[] = {
        {"fig1", "average-phase errors against the number of transmitters"},
        {"fig4", "quantum over classical rWMSE ratio against N_S/N_B"},
        {"fig5", "PA receiver rWMSE against amplifier gain"},
        {"fig6", "non-asymptotic classical bounds and the PA receiver bound against rounds"},
        {"classify", "error probabilities for a pair of reflectivity hypotheses"},
        {"qfim", "Fisher information matrices and rWMSE bounds"},
        {"montecarlo", "maximum-likelihood trials against the Cramer-Rao bound"},
    };
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out, "CSV output path (default: stdout)");
        sub->add_option("--threads", threads, "worker threads (default: QINET_THREADS, then OpenMP)")
            ->check(CLI::PositiveNumber);
        sub->add_flag("--dry-run", dry_run, "print the resolved config and grid, compute nothing");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        return execute(app.get_subcommands().front()->get_name(), config, out, threads, dry_run);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const DomainError& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kExitNumerical;
    }
}
