#pragma once

#include <optional>
#include <vector>

#include <json.hpp>

#include "nhspec/config.hpp"
#include "nhspec/fitting.hpp"
#include "nhspec/io.hpp"
#include "nhspec/spectroscopy.hpp"
#include "nhspec/topology.hpp"

namespace nhspec {

struct SweepResult {
    std::vector<SpectralLine> lines;
    std::vector<FitResult> fits;
    std::vector<EnergyRow> rows;

    bool all_converged() const;
};

/// Lines over the configured k grid, one fit per line, and repetition-based
/// error bars when the run is noisy and `uncertainty` is set. Rows for fits
/// that did not converge (or whose error bars failed) carry converged = 0.
SweepResult run_sweep(const RunConfig& cfg, bool uncertainty = true);

/// Line at cfg.k only (noisy when cfg.noise is set).
SpectralLine run_spectrum(const RunConfig& cfg);

/// Exact energies on the configured k grid.
std::vector<EnergyRow> closed_form_rows(const RunConfig& cfg);

/// Throws InvalidInput if any row is flagged as not converged.
BandSet bands_from_rows(const std::vector<EnergyRow>& rows);
TopologyReport topology_from_rows(const std::vector<EnergyRow>& rows,
                                  const std::optional<cplx>& eb = std::nullopt);

/// Number of k points after refining a closed grid of `points` by `factor`.
int refined_points(int points, int factor);

struct ValidationReport {
    nlohmann::json json;
    bool passed = false;
};

/// Six-level checks at cfg.k: loss relation, elimination error, the J_L = 0
/// limit, Gamma_e scaling at fixed loss, and the dephasing sweep.
ValidationReport run_validation(const RunConfig& cfg);

/// Absolute tolerance on the master/effective agreement.
inline constexpr double kEliminationTolerance = 0.01;

}  // namespace nhspec
