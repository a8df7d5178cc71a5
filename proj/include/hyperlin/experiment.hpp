#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "hyperlin/geometry.hpp"
#include "hyperlin/maps.hpp"
#include "hyperlin/spectral.hpp"

namespace hyperlin::experiment {

// Flat dotted-key configuration ("a.b = 1.5", '#' comments).
using KeyValues = std::map<std::string, std::string>;

KeyValues parse_config_text(const std::string& text);
KeyValues parse_config_file(const std::string& path);

enum class MapFamily { Linear, AxisBump, PoincareCounterexample, SiegelCounterexample };

struct ExperimentConfig {
    std::string experiment;
    MapFamily family = MapFamily::AxisBump;
    spectral::SpectralParams params{0.25, 0.5, 1.0};
    bool inverted_for_contraction = false;  // expansion input normalized
    maps::BumpProfile bump;
    GridSpec grid{0.05, 101};
    double tol = 1e-10;
    int max_iter = 200;
    std::uint64_t seed = 1;
    int threads = 1;
    // sharpness experiment knobs
    double xi = 0.0;     // 0 = default inner_radius/2
    double omega = 0.0;  // 0 = default inner_radius/4
    int level_min_k = 6;
    int level_max_k = 16;
    double beta_probe_delta = 0.1;
    // holder knobs
    double quantile = 0.95;
    long pairs_per_bin = 10000;
    // curves knobs
    int figure = 0;  // 0 = derive from params
    double alpha_min = 0.05, alpha_max = 1.0;
    int alpha_count = 96;
    // funceq knobs
    double axis_radius = 0.1;
    int axis_nodes = 1025;
    bool synthetic_coefficients = false;
    double perturbation = 0.1;

    KeyValues echo;  // normalized key-value image of this config
};

// Fills defaults, validates every invariant (each violation names its field),
// and applies the expansion-to-contraction normalization.
ExperimentConfig validate_config(const KeyValues& raw);

struct Table {
    std::string name;
    std::string provenance;  // module operation that produced the numbers
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

struct ResultBundle {
    ExperimentConfig config;
    std::vector<Table> tables;
    std::map<std::string, double> scalars;
    std::map<std::string, std::string> notes;
    double wall_seconds = 0.0;
    std::string artifact_version = "0.1.0";
};

ResultBundle run(const ExperimentConfig& cfg);

maps::PlanarMap build_map(const ExperimentConfig& cfg);

// Writes <out_dir>/<table>.csv for each table plus summary.json and
// config-echo.txt; float formatting is shortest round-trip.
void write_bundle(const ResultBundle& bundle, const std::string& out_dir);

std::string format_double(double v);

const std::vector<std::string>& known_experiments();

}  // namespace hyperlin::experiment
