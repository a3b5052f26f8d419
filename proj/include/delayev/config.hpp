#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "delayev/certify.hpp"
#include "delayev/models.hpp"

namespace delayev {

struct SolverConfig {
    double horizon = 10.0;
    double dt = 1e-3;
    double tol = 1e-10;
    int max_iter = 64;
};

/// One run as configured by a single JSON document. Parsing is strict:
/// unknown keys are errors.
struct RunConfig {
    unsigned seed = 0;
    std::string model_type;
    ScalarParams scalar;
    DampedWaveParams damped_wave;
    WaveMemoryParams wave_memory;
    PlateParams plate;
    SolverConfig solver;
    QuadConfig quad;
    std::string output_dir = "out";
    nlohmann::json raw; // the original document (sweeps edit a copy)
};

RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::filesystem::path& path);

BuiltModel build_from_config(const RunConfig& cfg);

} // namespace delayev
