#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "simma/kernels.hpp"
#include "simma/levy_measure.hpp"
#include "simma/series_sim.hpp"

namespace simma {

// Parsed instance description. The on-disk format is flat sectioned text:
//
//     [driver]
//     family = tempered_stable
//     alpha = 1.5
//     lambda = 1
//
// one "key = value" per line, '#' or ';' comments, sections [process],
// [driver], [kernel], [marks], [simulation], [analysis], [table]. Unknown
// sections, unknown keys, duplicate keys, and malformed values are hard
// errors; every ConfigError message names the line and the dotted key.

struct DriverConfig {
    std::string family = "stable"; // stable | tempered_stable | compound_poisson
    double alpha = 1.5;            // stability index (stable-like families)
    double lambda = 1.0;           // tempering rate (tempered_stable)
    double scale = 1.0;            // density constant c
    std::vector<Atom> atoms;       // compound_poisson jumps (size:weight)
    double drift = 0.0;
    double sigma2 = 0.0;           // Gaussian variance; simulation refuses > 0
    // declared exponents, cross-checked against the family at load
    std::optional<double> origin_exponent;
    std::optional<double> tail_exponent;

    bool operator==(const DriverConfig&) const = default;
};

struct KernelConfig {
    std::string family = "fractional"; // fractional | exponential_ou | step
    double gamma = 0.5;                // fractional exponent
    std::string f0 = "";               // "" family default, else same | zero

    bool operator==(const KernelConfig&) const = default;
};

struct MarksConfig {
    std::string type = "single"; // single | discrete
    double value = 0.0;          // single: the mark
    std::vector<MarkAtom> atoms; // discrete: mark:weight list

    bool operator==(const MarksConfig&) const = default;
};

struct SimulationConfig {
    double horizon = 1.0;
    double window = 1.0;
    int n_terms = 1000;
    int grid = 256; // uniform cells on [0, horizon]
    std::uint64_t seed = 0;
    int paths = 1;
    int centering = 0;            // asymmetric drivers: centering depth
    std::string symmetric = "auto"; // auto (derive from driver) | true | false

    bool operator==(const SimulationConfig&) const = default;
};

struct AnalysisConfig {
    std::vector<std::size_t> grids = {256, 512, 1024}; // nested refinement levels
    std::vector<std::string> tests = {"variation", "jumps"};
    std::size_t k_jumps = 20; // how many largest jumps to match

    bool operator==(const AnalysisConfig&) const = default;
};

// Parameter ranges for the verdict-table sweep. The sweep grid is the product
// of the lists the driver family uses; an empty used list yields an empty
// table.
struct TableConfig {
    std::vector<double> alphas;
    std::vector<double> gammas;
    std::vector<double> lambdas;

    bool operator==(const TableConfig&) const = default;
};

struct InstanceConfig {
    std::string name; // [process] name, echoed in outputs
    DriverConfig driver;
    KernelConfig kernel;
    MarksConfig marks;
    SimulationConfig simulation;
    AnalysisConfig analysis;
    TableConfig table;
    // which blocks the source text actually contained; commands refuse to run
    // off implicit defaults for the blocks they need
    bool has_driver = false;
    bool has_kernel = false;
    bool has_marks = false;
    bool has_simulation = false;
    bool has_analysis = false;
    bool has_table = false;

    bool operator==(const InstanceConfig&) const = default;
};

// Parse and cross-validate the sectioned text. Throws ConfigError naming the
// line and key for structural problems, enum violations, compound-Poisson
// blocks without atoms, mark blocks a kernel family requires, and declared
// exponents that contradict the driver family.
InstanceConfig parse_config(const std::string& text);

// Read a file and parse it; IoError when the file cannot be read.
InstanceConfig load_config(const std::string& path);

// Canonical text form; parse_config(serialize_config(c)) == c. Keys equal to
// their defaults are omitted, numbers are written with full precision.
std::string serialize_config(const InstanceConfig& c);

// The serialized config, every line '#'-prefixed, bracketed by
// "# config-begin" / "# config-end"; prepended to the CSV outputs.
std::string config_echo(const InstanceConfig& c);

// Recover a config from text that contains an echo block (e.g. a CSV file
// written by the tool). ConfigError when no complete block is present.
InstanceConfig parse_echo(const std::string& text);

// ---- bridge into the domain types -------------------------------------------

// Driver + marks blocks as an independently scattered driver. Requires the
// driver block; propagates DomainError from the measure factories.
RandomMeasure build_random_measure(const InstanceConfig& c);

// Kernel block as a shift-kernel family. Requires the kernel block.
KernelSpec build_kernel(const InstanceConfig& c);

// Simulation block as a series configuration with the uniform grid realized;
// symmetric = auto resolves against the driver block. Validated on the way
// out, so a returned SeriesConfig is ready to sample.
SeriesConfig build_series(const InstanceConfig& c);

} // namespace simma
