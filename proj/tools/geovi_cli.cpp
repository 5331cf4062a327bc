#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "geovi/diffmap.hpp"
#include "geovi/errors.hpp"
#include "geovi/examples.hpp"
#include "geovi/experiment.hpp"
#include "geovi/rng.hpp"

using namespace geovi;

namespace {

int usage(std::FILE* to) {
    std::fprintf(to,
                 "usage: geovi <command> [options]\n"
                 "\n"
                 "commands:\n"
                 "  run            run one experiment and write its artifacts\n"
                 "  list-examples  print the example catalog, one name per line\n"
                 "  check          self-test the catalog (derivatives, regeneration)\n"
                 "  compare A B    join kl_table.csv from two run directories\n"
                 "\n"
                 "run options (a config file loads first, then flags, left to right):\n"
                 "  --config FILE   'key = value' lines, '#' comments (repeatable)\n"
                 "  --example NAME  example to run (see list-examples)\n"
                 "  --method M      geovi | mgvi | direct | hmc  [geovi]\n"
                 "  --seed N        experiment seed  [1]\n"
                 "  --size N        field-example axis size (0 = example default)\n"
                 "  --samples N     posterior sample count  [100]\n"
                 "  --threads N     worker threads (0 = all hardware threads)\n"
                 "  --out DIR       output directory  [geovi-run]\n"
                 "  --KEY VALUE     any config key, e.g. --vi.pairs 8\n"
                 "\n"
                 "exit status: 0 ok, 1 runtime failure, 2 usage error\n");
    return to == stdout ? 0 : 2;
}

bool is_usage_error(const std::exception& e) {
    return dynamic_cast<const ConfigError*>(&e) != nullptr ||
           dynamic_cast<const UnknownExample*>(&e) != nullptr;
}

const char* error_kind(const std::exception& e) {
    if (dynamic_cast<const UnknownExample*>(&e)) return "UnknownExample";
    if (dynamic_cast<const ConfigError*>(&e)) return "ConfigError";
    if (dynamic_cast<const DomainError*>(&e)) return "DomainError";
    if (dynamic_cast<const DimensionMismatch*>(&e)) return "DimensionMismatch";
    if (dynamic_cast<const NotPositiveDefinite*>(&e)) return "NotPositiveDefinite";
    if (dynamic_cast<const DimensionTooLarge*>(&e)) return "DimensionTooLarge";
    if (dynamic_cast<const NonFiniteValue*>(&e)) return "NonFiniteValue";
    if (dynamic_cast<const BadShape*>(&e)) return "BadShape";
    if (dynamic_cast<const NonNormalizable*>(&e)) return "NonNormalizable";
    if (dynamic_cast<const GridMismatch*>(&e)) return "GridMismatch";
    if (dynamic_cast<const Error*>(&e)) return "Error";
    return "exception";
}

int run_cmd(int argc, char** argv) {
    ExperimentConfig cfg;
    try {
        std::vector<std::pair<std::string, std::string>> flags;
        for (int i = 2; i < argc; ++i) {
            std::string a = argv[i];
            if (a.rfind("--", 0) != 0 || a.size() == 2) {
                std::fprintf(stderr, "geovi run: unexpected argument '%s'\n", a.c_str());
                return 2;
            }
            if (i + 1 >= argc) {
                std::fprintf(stderr, "geovi run: %s needs a value\n", a.c_str());
                return 2;
            }
            std::string v = argv[++i];
            if (a == "--config") load_config_file(cfg, v);
            else flags.emplace_back(a.substr(2), v);
        }
        for (const auto& [k, v] : flags) set_config_key(cfg, k, v);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "geovi run: %s\n", e.what());
        return 2;
    }

    try {
        const std::vector<std::string> files = run_experiment(cfg);
        for (const std::string& f : files)
            std::printf("%s/%s\n", cfg.out_dir.c_str(), f.c_str());
        return 0;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "geovi run: %s\n", e.what());
        try {
            std::filesystem::create_directories(cfg.out_dir);
            std::ofstream f(cfg.out_dir + "/error.txt", std::ios::binary);
            f << "error = " << error_kind(e) << "\n"
              << "message = " << e.what() << "\n";
        } catch (...) {
            // the error record is best effort; the exit status carries the result
        }
        return is_usage_error(e) ? 2 : 1;
    }
}

int check_cmd() {
    int failures = 0;
    for (const std::string& name : example_names()) {
        bool ok = true;
        std::string note;
        try {
            const ExampleBundle a = make_example(name, 16, 5);
            const ExampleBundle b = make_example(name, 16, 5);
            if (a.data != b.data || a.truth_latent != b.truth_latent) {
                ok = false;
                note = "regeneration is not bit-exact";
            }
            Rng rng(17);
            Vec x = rng.normal_vec(a.model.dim);
            for (double& v : x) v *= 0.5;
            const FdReport rep = fd_check(a.model.forward, x, rng);
            if (ok && !rep.pass) {
                ok = false;
                note = "derivative mismatch in " + rep.map_name;
            }
            if (ok && !std::isfinite(a.model.full_hamiltonian(x))) {
                ok = false;
                note = "non-finite hamiltonian";
            }
        } catch (const std::exception& e) {
            ok = false;
            note = e.what();
        }
        std::printf("%s %s%s%s\n", ok ? "PASS" : "FAIL", name.c_str(),
                    note.empty() ? "" : ": ", note.c_str());
        if (!ok) ++failures;
    }
    return failures == 0 ? 0 : 1;
}

struct KlTable {
    std::string stamp;  // first line of the file
    std::vector<std::pair<std::string, std::pair<double, double>>> rows;
};

// Reads label,kl_pq,kl_qp rows; comment and header lines are skipped.
bool read_kl_table(const std::string& dir, KlTable& t, std::string& err) {
    const std::string path = dir + "/kl_table.csv";
    std::ifstream f(path);
    if (!f) {
        err = "cannot open " + path;
        return false;
    }
    std::string line;
    bool first = true;
    while (std::getline(f, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (first) {
            t.stamp = line;
            first = false;
            continue;
        }
        if (line.empty() || line[0] == '#' || line.rfind("label,", 0) == 0) continue;
        const auto c1 = line.find(',');
        const auto c2 = c1 == std::string::npos ? c1 : line.find(',', c1 + 1);
        if (c2 == std::string::npos) {
            err = path + ": malformed row '" + line + "'";
            return false;
        }
        try {
            const double pq = std::stod(line.substr(c1 + 1, c2 - c1 - 1));
            const double qp = std::stod(line.substr(c2 + 1));
            t.rows.emplace_back(line.substr(0, c1), std::make_pair(pq, qp));
        } catch (const std::exception&) {
            err = path + ": malformed row '" + line + "'";
            return false;
        }
    }
    if (t.rows.empty()) {
        err = path + ": no KL rows";
        return false;
    }
    return true;
}

int compare_cmd(int argc, char** argv) {
    if (argc != 4) {
        std::fprintf(stderr, "usage: geovi compare <run-dir-a> <run-dir-b>\n");
        return 2;
    }
    KlTable a, b;
    std::string err;
    if (!read_kl_table(argv[2], a, err)) {
        std::fprintf(stderr, "geovi compare: %s\n", err.c_str());
        return std::filesystem::exists(std::string(argv[2]) + "/kl_table.csv") ? 1 : 2;
    }
    if (!read_kl_table(argv[3], b, err)) {
        std::fprintf(stderr, "geovi compare: %s\n", err.c_str());
        return std::filesystem::exists(std::string(argv[3]) + "/kl_table.csv") ? 1 : 2;
    }
    std::printf("# a: %s\n# b: %s\n", a.stamp.c_str(), b.stamp.c_str());
    std::printf("label,kl_pq_a,kl_qp_a,kl_pq_b,kl_qp_b,delta_pq\n");
    std::size_t joined = 0;
    for (const auto& [label, va] : a.rows) {
        for (const auto& [lb, vb] : b.rows) {
            if (lb != label) continue;
            std::printf("%s,%.17g,%.17g,%.17g,%.17g,%.17g\n", label.c_str(), va.first,
                        va.second, vb.first, vb.second, vb.first - va.first);
            ++joined;
            break;
        }
    }
    if (joined == 0) {
        std::fprintf(stderr, "geovi compare: the tables share no labels\n");
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) return usage(stderr);
    const std::string cmd = argv[1];
    if (cmd == "--help" || cmd == "-h" || cmd == "help") return usage(stdout);
    try {
        if (cmd == "run") return run_cmd(argc, argv);
        if (cmd == "list-examples") {
            for (const std::string& n : example_names()) std::printf("%s\n", n.c_str());
            return 0;
        }
        if (cmd == "check") return check_cmd();
        if (cmd == "compare") return compare_cmd(argc, argv);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "geovi %s: %s\n", cmd.c_str(), e.what());
        return is_usage_error(e) ? 2 : 1;
    }
    std::fprintf(stderr, "geovi: unknown command '%s'\n", cmd.c_str());
    return 2;
}
