#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nhspec/dynamics.hpp"
#include "nhspec/models.hpp"

namespace nhspec {

struct LineMeta {
    double t = 0.0;
    double omega = 0.0;
    double n0 = 1.0;
    int shots = 0;  // 0 for noiseless lines
    int reps = 0;
    std::uint64_t seed = 0;
    std::string model;  // "mrm", "lk", "generic" or "six-level"
    double k = 0.0;
    std::string gamma_distribution = "none";
    double gamma_fluct = 0.0;
    std::optional<double> dephasing_t2;
};

/// Auxiliary-level population against probe detuning.
struct SpectralLine {
    std::vector<double> deltas;
    std::vector<double> na_mean;
    std::vector<double> na_std;
    /// Per-repetition estimates, repetitions[r][i] at deltas[i]; empty when noiseless.
    std::vector<std::vector<double>> repetitions;
    LineMeta meta;

    std::size_t size() const { return deltas.size(); }
    void check() const;

    /// Repetition r as a standalone line with zero spread.
    SpectralLine repetition(std::size_t r) const;
};

struct NoiseModel {
    int shots = 1000;
    int reps = 20;
    double gamma_fluct = 0.2;
    std::optional<double> dephasing_t2;
    std::uint64_t seed = 0;
    double gamma_e = kDefaultGammaE;  // only used when dephasing_t2 is set
    double master_dt = kDefaultMasterDt;

    void check() const;
};

/// `points` uniform values on [lo, hi], endpoints included.
std::vector<double> uniform_grid(double lo, double hi, int points);

/// Uniform momentum grid on [0, 2pi] with the closure point.
std::vector<double> uniform_k_grid(int points);

SpectralLine line_noiseless(const TwoBandParams& p, const ProbeConfig& probe_template,
                            std::span<const double> deltas);

/// Repetition r draws a loss scale uniformly in [1 - f, 1 + f] (applied to Im d),
/// evaluates the exact probability at every detuning and samples
/// Binomial(shots, q) / shots. Reproducible from noise.seed.
SpectralLine line_noisy(const TwoBandParams& p, const ProbeConfig& probe_template,
                        std::span<const double> deltas, const NoiseModel& noise);

/// Noise seed used for the k point with index `k_index`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t k_index);

std::vector<SpectralLine> sweep_k(const ModelDescriptor& model, std::span<const double> k_grid,
                                  const ProbeConfig& probe_template,
                                  std::span<const double> deltas,
                                  const std::optional<NoiseModel>& noise);

}  // namespace nhspec
