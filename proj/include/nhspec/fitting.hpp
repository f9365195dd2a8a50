#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "nhspec/models.hpp"
#include "nhspec/spectroscopy.hpp"

namespace nhspec {

struct Dip {
    double center = 0.0;
    double half_width = 0.0;
    double depth = 0.0;
};

/// Up to two absorption dips of a spectral line, sorted by center.
/// A dip at detuning x corresponds to an eigenvalue with real part -x.
std::vector<Dip> detect_dips(const SpectralLine& line);

struct FitResult {
    double c = 0.0;
    double d_re = 0.0;
    double d_im = 0.0;
    double n0 = 1.0;
    double residual = 0.0;  // root-mean-square of the (weighted) residuals
    bool converged = false;
    int iterations = 0;
    int evaluations = 0;
    /// Objective (sum of squares) after every accepted step of the winning start.
    std::vector<double> objective_trace;

    TwoBandParams two_band() const { return {c, cplx(d_re, d_im), 0.0}; }
};

struct FitOptions {
    int starts = 5;
    bool weighted = false;
    int max_evaluations = 10000;  // per start
    double param_tol = 1e-6;
    double rel_tol = 1e-9;
    std::uint64_t jitter_seed = 0x6a09e667f3bcc908ULL;
};

/// Least-squares fit of N0 |<a|exp(-i H_f t)|a>|^2 to the line over (c, Re d, Im d, N0)
/// with c >= 0, Im d <= 0 and N0 in [0, 1]. Omega and t are taken as exact.
FitResult fit_line(const SpectralLine& line, double t, double omega,
                   const std::optional<FitResult>& init = std::nullopt,
                   const FitOptions& options = {});

struct EnergyEstimate {
    cplx e{0.0, 0.0};
    double err_re = 0.0;
    double err_im = 0.0;
};

using EnergyPair = std::pair<EnergyEstimate, EnergyEstimate>;

/// Closed-form energies of a converged fit, with zero spread.
EnergyPair energies_from_fit(const FitResult& fr);

/// Fits every resample and reports per-band means with standard deviations.
/// Resample energies are paired to `reference` (or to the first converged
/// resample) by nearest-neighbour matching before averaging.
EnergyPair fit_uncertainty(std::span<const SpectralLine> resamples, double t, double omega,
                           const std::optional<FitResult>& reference = std::nullopt,
                           const FitOptions& options = {.starts = 1});

/// Orders (a, b) so that it best matches (ref_a, ref_b).
std::pair<cplx, cplx> match_pair(std::pair<cplx, cplx> values, std::pair<cplx, cplx> reference);

}  // namespace nhspec
