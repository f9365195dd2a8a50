#include "nhspec/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "nhspec/dynamics.hpp"
#include "nhspec/errors.hpp"

namespace nhspec {

using nlohmann::json;

bool SweepResult::all_converged() const {
    return std::all_of(rows.begin(), rows.end(),
                       [](const EnergyRow& r) { return r.converged1 && r.converged2; });
}

namespace {

FitOptions fit_options(const RunConfig& cfg) {
    FitOptions o;
    o.starts = cfg.fit.starts;
    o.weighted = cfg.fit.weighted;
    return o;
}

ProbeConfig probe_template(const RunConfig& cfg) {
    ProbeConfig p = cfg.probe;
    p.delta = 0.0;
    return p;
}

}  // namespace

SweepResult run_sweep(const RunConfig& cfg, bool uncertainty) {
    SweepResult out;
    const auto ks = cfg.k_grid();
    const auto deltas = cfg.delta_grid.values();
    out.lines = sweep_k(cfg.model, ks, probe_template(cfg), deltas, cfg.noise_model());
    const FitOptions opts = fit_options(cfg);
    FitOptions rep_opts = opts;
    rep_opts.starts = 1;

    for (std::size_t i = 0; i < ks.size(); ++i) {
        const SpectralLine& line = out.lines[i];
        const FitResult fr = fit_line(line, cfg.probe.t, cfg.probe.omega, std::nullopt, opts);
        out.fits.push_back(fr);

        EnergyRow row;
        row.k = ks[i];
        const auto [e1, e2] = closed_form_energies(fr.two_band());
        row.e1.e = e1;
        row.e2.e = e2;
        row.converged1 = row.converged2 = fr.converged;
        if (fr.converged && uncertainty && !line.repetitions.empty()) {
            std::vector<SpectralLine> reps;
            for (std::size_t r = 0; r < line.repetitions.size(); ++r) reps.push_back(line.repetition(r));
            try {
                const auto [u1, u2] = fit_uncertainty(reps, cfg.probe.t, cfg.probe.omega, fr, rep_opts);
                row.e1.err_re = u1.err_re;
                row.e1.err_im = u1.err_im;
                row.e2.err_re = u2.err_re;
                row.e2.err_im = u2.err_im;
            } catch (const UncertaintyUnavailable&) {
                row.converged1 = row.converged2 = false;
            }
        }
        out.rows.push_back(row);
    }
    return out;
}

SpectralLine run_spectrum(const RunConfig& cfg) {
    const auto deltas = cfg.delta_grid.values();
    const TwoBandParams p = model_at_k(cfg.model, cfg.k);
    SpectralLine line = cfg.noise ? line_noisy(p, probe_template(cfg), deltas, *cfg.noise_model())
                                  : line_noiseless(p, probe_template(cfg), deltas);
    line.meta.model = model_kind(cfg.model);
    line.meta.k = cfg.k;
    return line;
}

std::vector<EnergyRow> closed_form_rows(const RunConfig& cfg) {
    std::vector<EnergyRow> rows;
    for (double k : cfg.k_grid()) {
        const auto [e1, e2] = closed_form_energies(model_at_k(cfg.model, k));
        EnergyRow r;
        r.k = k;
        r.e1.e = e1;
        r.e2.e = e2;
        rows.push_back(r);
    }
    return rows;
}

BandSet bands_from_rows(const std::vector<EnergyRow>& rows) {
    std::vector<double> ks;
    std::vector<std::pair<cplx, cplx>> pairs;
    for (const auto& r : rows) {
        if (!r.converged1 || !r.converged2) {
            throw InvalidInput("energies at k = " + std::to_string(r.k) +
                               " come from a fit that did not converge");
        }
        ks.push_back(r.k);
        pairs.emplace_back(r.e1.e, r.e2.e);
    }
    BandSet bs = track_bands(ks, pairs);
    // tracking only reorders each pair, so the error bars follow by identity
    for (std::size_t i = 0; i < bs.size(); ++i) {
        const EnergyRow& r = rows[i];
        const bool same = bs.bands[0][i] == r.e1.e;
        const EnergyEstimate& a = same ? r.e1 : r.e2;
        const EnergyEstimate& b = same ? r.e2 : r.e1;
        bs.errors[0].push_back({a.err_re, a.err_im});
        bs.errors[1].push_back({b.err_re, b.err_im});
    }
    return bs;
}

TopologyReport topology_from_rows(const std::vector<EnergyRow>& rows, const std::optional<cplx>& eb) {
    return classify(bands_from_rows(rows), eb);
}

int refined_points(int points, int factor) {
    if (factor < 1) throw InvalidInput("grid refinement factor must be >= 1");
    if (points < 2) return points;
    return (points - 1) * factor + 1;
}

namespace {

struct Dip1 {
    double depth = 0.0;
    double center = 0.0;
};

// Global minimum of a curve, refined by a parabola through its neighbours.
Dip1 global_dip(const std::vector<double>& x, const std::vector<double>& y) {
    const auto it = std::min_element(y.begin(), y.end());
    const std::size_t i = static_cast<std::size_t>(it - y.begin());
    Dip1 d{1.0 - *it, x[i]};
    if (i > 0 && i + 1 < y.size()) {
        const double a = y[i - 1], b = y[i], c = y[i + 1];
        const double den = a - 2.0 * b + c;
        if (den > 0.0) {
            const double off = 0.5 * (a - c) / den;
            d.center = x[i] + off * (x[i + 1] - x[i]);
            d.depth = 1.0 - (b - 0.25 * (a - c) * off);
        }
    }
    return d;
}

std::vector<ProbeConfig> probe_sweep(const RunConfig& cfg, const std::vector<double>& deltas) {
    std::vector<ProbeConfig> out;
    for (double d : deltas) {
        ProbeConfig p = cfg.probe;
        p.delta = d;
        out.push_back(p);
    }
    return out;
}

double dt_for(double base_dt, double gamma_e) {
    // Same Gamma_e * dt as the default at Gamma_e = 123.
    return std::min(base_dt, kDefaultMasterDt * kDefaultGammaE / gamma_e);
}

}  // namespace

ValidationReport run_validation(const RunConfig& cfg) {
    const SixLevelSettings s = cfg.six_level.value_or(SixLevelSettings{});
    const SixLevelConfig base = cfg.six_level_at(cfg.k);
    const auto deltas = cfg.delta_grid.values();
    const auto sweep = probe_sweep(cfg, deltas);
    ValidationReport rep;
    json& j = rep.json;
    bool ok = true;

    const double gamma = effective_gamma(base.jl, base.gamma_e);
    j["gamma_effective"] = gamma;

    const double dev = validate_elimination(base, sweep, dt_for(s.dt, base.gamma_e));
    const bool dev_ok = dev < kEliminationTolerance;
    j["elimination"] = {{"max_deviation", dev}, {"threshold", kEliminationTolerance}, {"pass", dev_ok}};
    ok = ok && dev_ok;

    SixLevelConfig off = base;
    off.jl = 0.0;
    const double dev0 = validate_elimination(off, sweep, dt_for(s.dt, off.gamma_e));
    const bool dev0_ok = dev0 < 1e-6;
    j["no_laser"] = {{"max_deviation", dev0}, {"threshold", 1e-6}, {"pass", dev0_ok}};
    ok = ok && dev0_ok;

    json scaling = json::array();
    double prev = INFINITY;
    bool mono = true;
    for (double factor : {1.0, 2.0, 4.0}) {
        SixLevelConfig c = base;
        c.gamma_e = base.gamma_e * factor;
        c.jl = std::sqrt(2.0 * c.gamma_e * gamma);
        for (auto& b : c.branching) b *= factor;
        const double d = validate_elimination(c, sweep, dt_for(s.dt, c.gamma_e));
        scaling.push_back({{"gamma_e", c.gamma_e}, {"JL", c.jl}, {"max_deviation", d}});
        mono = mono && d < prev;
        prev = d;
    }
    j["gamma_e_scaling"] = {{"runs", scaling}, {"monotone", mono}};
    ok = ok && mono;

    json deph = json::array();
    std::optional<Dip1> last;
    std::optional<double> first_center;
    bool shallower = true;
    bool fixed = true;
    const double step = cfg.delta_grid.step();
    for (double t2 : {800.0, 400.0, 200.0}) {
        SixLevelConfig c = base;
        c.dephasing_rate = 1.0 / t2;
        std::vector<double> na;
        for (const auto& p : sweep) na.push_back(na_master(c, p, dt_for(s.dt, c.gamma_e)));
        const Dip1 dip = global_dip(deltas, na);
        deph.push_back({{"t2", t2}, {"depth", dip.depth}, {"center", dip.center}});
        if (last) shallower = shallower && dip.depth < last->depth;
        if (!first_center) first_center = dip.center;
        fixed = fixed && std::abs(dip.center - *first_center) < step;
        last = dip;
    }
    j["dephasing"] = {{"runs", deph}, {"shallower", shallower}, {"center_fixed", fixed},
                      {"grid_step", step}};
    ok = ok && shallower && fixed;

    // Loss fluctuation envelope of the effective line, for plotting.
    json env = json::array();
    const TwoBandParams eff = effective_two_band(base);
    const double f = cfg.noise ? cfg.noise->gamma_fluct : NoiseSettings{}.gamma_fluct;
    for (double scale : {1.0 - f, 1.0, 1.0 + f}) {
        TwoBandParams p = eff;
        p.d = cplx(p.d.real(), p.d.imag() * scale);
        std::vector<double> na;
        for (const auto& pr : sweep) na.push_back(na_effective(p, pr));
        const Dip1 dip = global_dip(deltas, na);
        env.push_back({{"loss_scale", scale}, {"depth", dip.depth}, {"center", dip.center}});
    }
    j["loss_envelope"] = env;
    j["pass"] = ok;
    rep.passed = ok;
    return rep;
}

}  // namespace nhspec
