#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nhspec/dynamics.hpp"
#include "nhspec/models.hpp"
#include "nhspec/spectroscopy.hpp"

namespace nhspec {

/// Value of the mandatory "units" key.
inline constexpr const char* kUnitsTag = "rad_per_us";

struct DeltaGrid {
    double min = -0.6;
    double max = 0.6;
    int points = 61;

    std::vector<double> values() const { return uniform_grid(min, max, points); }
    double step() const { return points > 1 ? (max - min) / (points - 1) : 0.0; }
};

struct NoiseSettings {
    int shots = 1000;
    int reps = 20;
    double gamma_fluct = 0.2;
    std::optional<double> dephasing_t2;
};

struct SixLevelSettings {
    double jl = 4.76;
    double gamma_e = kDefaultGammaE;
    std::array<double, 3> branching{kDefaultGammaE / 3.0, kDefaultGammaE / 3.0,
                                    kDefaultGammaE / 3.0};
    double dt = kDefaultMasterDt;
};

struct FitSettings {
    int starts = 5;
    bool weighted = false;
};

struct RunConfig {
    ModelDescriptor model = MrmParams{};
    ProbeConfig probe;          // delta is ignored; the grid supplies it
    double k = 0.0;             // momentum for single-line commands
    DeltaGrid delta_grid;
    int k_points = 21;
    std::optional<NoiseSettings> noise;
    std::optional<cplx> eb;
    std::optional<SixLevelSettings> six_level;
    FitSettings fit;
    std::string output_dir = "out";
    std::uint64_t seed = 0;

    std::vector<double> k_grid() const { return uniform_k_grid(k_points); }
    /// Full noise model for this run (seed included), or nullopt when noiseless.
    std::optional<NoiseModel> noise_model() const;
    /// Six-level configuration of the model at momentum k with the given probe.
    SixLevelConfig six_level_at(double k) const;
};

/// Parses and validates; unknown keys and a missing/foreign "units" tag are rejected.
RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& c);
RunConfig load_config(const std::string& path);

std::vector<std::string> preset_names();
RunConfig preset(const std::string& name);

}  // namespace nhspec
