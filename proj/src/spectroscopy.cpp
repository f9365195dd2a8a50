#include "nhspec/spectroscopy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace nhspec {

void SpectralLine::check() const {
    const auto n = deltas.size();
    if (n == 0) {
        throw InvalidInput("spectral line is empty");
    }
    if (na_mean.size() != n || na_std.size() != n) {
        throw InvalidInput("spectral line arrays differ in length");
    }
    if (!std::is_sorted(deltas.begin(), deltas.end())) {
        throw InvalidInput("spectral line detunings must be sorted");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(deltas[i]) || !std::isfinite(na_mean[i]) || !std::isfinite(na_std[i]) ||
            na_std[i] < 0.0) {
            throw InvalidInput("spectral line holds invalid values");
        }
    }
    for (const auto& rep : repetitions) {
        if (rep.size() != n) {
            throw InvalidInput("spectral line repetition has the wrong length");
        }
    }
}

SpectralLine SpectralLine::repetition(std::size_t r) const {
    if (r >= repetitions.size()) {
        throw InvalidInput("repetition index out of range");
    }
    SpectralLine out;
    out.deltas = deltas;
    out.na_mean = repetitions[r];
    out.na_std.assign(deltas.size(), 0.0);
    out.meta = meta;
    out.meta.reps = 1;
    return out;
}

void NoiseModel::check() const {
    if (shots < 1) throw InvalidInput("noise: shots must be >= 1");
    if (reps < 1) throw InvalidInput("noise: reps must be >= 1");
    if (!(gamma_fluct >= 0.0 && gamma_fluct < 1.0)) {
        throw InvalidInput("noise: gamma_fluct must lie in [0, 1)");
    }
    if (dephasing_t2 && !(*dephasing_t2 > 0.0 && std::isfinite(*dephasing_t2))) {
        throw InvalidInput("noise: dephasing t2 must be positive");
    }
    if (!(gamma_e > 0.0)) throw InvalidInput("noise: gamma_e must be positive");
}

std::vector<double> uniform_grid(double lo, double hi, int points) {
    if (points < 1 || !std::isfinite(lo) || !std::isfinite(hi) || hi < lo) {
        throw InvalidInput("uniform_grid: invalid range or point count");
    }
    std::vector<double> g(static_cast<std::size_t>(points));
    if (points == 1) {
        g[0] = lo;
        return g;
    }
    const double step = (hi - lo) / (points - 1);
    for (int i = 0; i < points; ++i) {
        g[static_cast<std::size_t>(i)] = lo + step * i;
    }
    g.back() = hi;
    return g;
}

std::vector<double> uniform_k_grid(int points) {
    return uniform_grid(0.0, 2.0 * std::numbers::pi, points);
}

namespace {

void check_grid(std::span<const double> deltas) {
    if (deltas.empty()) {
        throw InvalidInput("detuning grid is empty");
    }
    if (!std::is_sorted(deltas.begin(), deltas.end())) {
        throw InvalidInput("detuning grid must be sorted");
    }
}

LineMeta base_meta(const TwoBandParams& p, const ProbeConfig& probe) {
    LineMeta m;
    m.t = probe.t;
    m.omega = probe.omega;
    m.n0 = probe.n0;
    m.model = "generic";
    m.k = p.k;
    return m;
}

}  // namespace

SpectralLine line_noiseless(const TwoBandParams& p, const ProbeConfig& probe_template,
                            std::span<const double> deltas) {
    check_grid(deltas);
    validate(probe_template);
    SpectralLine line;
    line.deltas.assign(deltas.begin(), deltas.end());
    line.na_mean.reserve(deltas.size());
    ProbeConfig probe = probe_template;
    for (double d : deltas) {
        probe.delta = d;
        line.na_mean.push_back(na_effective(p, probe));
    }
    line.na_std.assign(deltas.size(), 0.0);
    line.meta = base_meta(p, probe_template);
    return line;
}

SpectralLine line_noisy(const TwoBandParams& p, const ProbeConfig& probe_template,
                        std::span<const double> deltas, const NoiseModel& noise) {
    check_grid(deltas);
    validate(probe_template);
    noise.check();

    const std::size_t n = deltas.size();
    std::mt19937_64 rng(noise.seed);
    std::uniform_real_distribution<double> scale_dist(1.0 - noise.gamma_fluct,
                                                      1.0 + noise.gamma_fluct);

    SpectralLine line;
    line.deltas.assign(deltas.begin(), deltas.end());
    line.repetitions.assign(static_cast<std::size_t>(noise.reps), std::vector<double>(n));

    ProbeConfig probe = probe_template;
    for (int r = 0; r < noise.reps; ++r) {
        const double scale = noise.gamma_fluct > 0.0 ? scale_dist(rng) : 1.0;
        TwoBandParams pr = p;
        pr.d = cplx(p.d.real(), p.d.imag() * scale);
        std::optional<SixLevelConfig> six;
        if (noise.dephasing_t2) {
            six = six_level_for(pr, noise.gamma_e);
            six->dephasing_rate = 1.0 / *noise.dephasing_t2;
        }
        for (std::size_t i = 0; i < n; ++i) {
            probe.delta = deltas[i];
            double q = six ? na_master(*six, probe, noise.master_dt) : na_effective(pr, probe);
            if (q < -1e-9 || q > 1.0 + 1e-9 || !std::isfinite(q)) {
                throw ConsistencyError("line_noisy: probability outside [0, 1]");
            }
            q = std::clamp(q, 0.0, 1.0);
            std::binomial_distribution<int> shots(noise.shots, q);
            line.repetitions[static_cast<std::size_t>(r)][i] =
                static_cast<double>(shots(rng)) / noise.shots;
        }
    }

    line.na_mean.assign(n, 0.0);
    line.na_std.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        for (const auto& rep : line.repetitions) sum += rep[i];
        const double mean = sum / noise.reps;
        double ss = 0.0;
        for (const auto& rep : line.repetitions) ss += (rep[i] - mean) * (rep[i] - mean);
        line.na_mean[i] = mean;
        line.na_std[i] = noise.reps > 1 ? std::sqrt(ss / (noise.reps - 1)) : 0.0;
    }

    line.meta = base_meta(p, probe_template);
    line.meta.shots = noise.shots;
    line.meta.reps = noise.reps;
    line.meta.seed = noise.seed;
    line.meta.gamma_fluct = noise.gamma_fluct;
    line.meta.gamma_distribution = noise.gamma_fluct > 0.0 ? "uniform" : "none";
    line.meta.dephasing_t2 = noise.dephasing_t2;
    return line;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t k_index) {
    // splitmix64 finalizer of the index
    std::uint64_t z = k_index + 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return seed ^ z;
}

std::vector<SpectralLine> sweep_k(const ModelDescriptor& model, std::span<const double> k_grid,
                                  const ProbeConfig& probe_template,
                                  std::span<const double> deltas,
                                  const std::optional<NoiseModel>& noise) {
    std::vector<SpectralLine> lines;
    lines.reserve(k_grid.size());
    for (std::size_t j = 0; j < k_grid.size(); ++j) {
        const TwoBandParams p = model_at_k(model, k_grid[j]);
        SpectralLine line;
        if (noise) {
            NoiseModel nm = *noise;
            nm.seed = derive_seed(noise->seed, j);
            line = line_noisy(p, probe_template, deltas, nm);
        } else {
            line = line_noiseless(p, probe_template, deltas);
        }
        line.meta.model = model_kind(model);
        line.meta.k = k_grid[j];
        lines.push_back(std::move(line));
    }
    return lines;
}

}  // namespace nhspec
