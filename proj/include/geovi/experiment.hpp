#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "geovi/hmc.hpp"
#include "geovi/inference.hpp"

namespace geovi {

// Fully resolved experiment description.  Struct defaults are the runtime
// defaults; a config file and then command-line flags override them.
struct ExperimentConfig {
    std::string example;
    std::string method = "geovi";  // geovi | mgvi | direct | hmc
    std::uint64_t seed = 1;
    std::size_t size = 0;      // field-example axis size (0 = example default)
    std::size_t samples = 100;  // posterior sample count
    int threads = 0;            // worker count (0 = all hardware threads)
    std::string out_dir = "geovi-run";

    GeoViConfig vi;                      // geovi/mgvi driver and final-draw tuning
    HmcConfig hmc;                       // reference-sampler tuning
    std::size_t oracle_cells_1d = 4096;  // grid-oracle resolution (1D examples)
    std::size_t oracle_cells_2d = 512;   // per axis (2D examples)
};

// Set one dotted key on the config.  Unknown keys or unparseable values
// throw ConfigError.
void set_config_key(ExperimentConfig& cfg, const std::string& key, const std::string& value);

// Strict `key = value` file: '#' comments and blank lines allowed; every
// other line must parse and every key must be known.
void load_config_file(ExperimentConfig& cfg, const std::string& path);

// Run the experiment and write its artifacts into cfg.out_dir.  Returns the
// artifact file names (relative to out_dir).  Throws on any failure:
// UnknownExample/ConfigError for invalid requests, other errors for
// numerical trouble.  Identical configs rewrite identical bytes, whatever
// the thread count.
std::vector<std::string> run_experiment(const ExperimentConfig& cfg);

}  // namespace geovi
