#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "geovi/cfmodel.hpp"
#include "geovi/grid.hpp"
#include "geovi/model.hpp"

namespace geovi {

// A ready-to-run inference problem: the model, its data, and how the data
// came to be.  Scalar textbook problems carry fixed data; the field problems
// synthesize data from a seeded ground truth and regenerate it bit-exactly
// for the same (name, size, seed).
struct ExampleBundle {
    std::string name;
    Model model;
    std::uint64_t seed = 1;

    bool synthesized = false;  // data drawn from truth_latent (else fixed constants)
    Vec truth_latent;          // empty when the data is fixed
    Vec data;

    // Per-axis bounds for the brute-force grid oracles (1D/2D examples).
    double oracle_lo = -6.0;
    double oracle_hi = 6.0;

    // Field examples: the periodic pixel grid and the observed pixel subset
    // (all pixels when empty).
    std::shared_ptr<const Grid> field_grid;
    std::vector<std::size_t> observed;

    // Named views of the latent vector (signal, spectrum, noise level, ...)
    // for reporting; each maps the full latent to the derived quantity.
    std::vector<std::pair<std::string, DiffMap>> derived;
};

// Names accepted by make_example, in presentation order.
const std::vector<std::string>& example_names();

// Build a named example.  `size` is the per-axis grid size for the field
// examples (0 picks the default; ignored by the scalar examples); `seed`
// drives truth and data synthesis.  Throws UnknownExample for other names.
ExampleBundle make_example(const std::string& name, std::size_t size = 0,
                           std::uint64_t seed = 1);

}  // namespace geovi
