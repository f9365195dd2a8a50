#include "nhspec/fitting.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "nhspec/dynamics.hpp"

namespace nhspec {

namespace {

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
    std::nth_element(v.begin(), mid, v.end());
    double m = *mid;
    if (v.size() % 2 == 0) {
        m = 0.5 * (m + *std::max_element(v.begin(), mid));
    }
    return m;
}

std::vector<double> smooth3(const std::vector<double>& y) {
    const std::size_t n = y.size();
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (i == 0) {
            s[i] = 0.5 * (y[0] + y[1]);
        } else if (i + 1 == n) {
            s[i] = 0.5 * (y[n - 2] + y[n - 1]);
        } else {
            s[i] = (y[i - 1] + y[i] + y[i + 1]) / 3.0;
        }
    }
    return s;
}

}  // namespace

std::vector<Dip> detect_dips(const SpectralLine& line) {
    line.check();
    const std::size_t n = line.size();
    if (n < 7) {
        throw InvalidInput("detect_dips: need at least 7 points");
    }
    const auto& x = line.deltas;
    const std::vector<double> s = smooth3(line.na_mean);
    const double baseline = *std::max_element(s.begin(), s.end());
    const double noise = median(line.na_std);
    const double threshold = baseline * (1.0 - 3.0 * noise);
    const double min_prominence = std::max(3.0 * noise, 1e-6);

    struct Candidate {
        std::size_t i;
        double prominence;
    };
    std::vector<Candidate> found;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (!(s[i] <= s[i - 1] && s[i] < s[i + 1]) || !(s[i] < threshold)) {
            continue;
        }
        const double left = *std::max_element(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(i) + 1);
        const double right = *std::max_element(s.begin() + static_cast<std::ptrdiff_t>(i), s.end());
        const double prominence = std::min(left, right) - s[i];
        if (prominence >= min_prominence) {
            found.push_back({i, prominence});
        }
    }
    std::sort(found.begin(), found.end(),
              [](const Candidate& a, const Candidate& b) { return a.prominence > b.prominence; });
    if (found.size() > 2) found.resize(2);

    std::vector<Dip> dips;
    for (const auto& c : found) {
        const std::size_t i = c.i;
        // Parabola through the three smoothed samples around the minimum.
        const double y0 = s[i - 1], y1 = s[i], y2 = s[i + 1];
        const double h0 = x[i] - x[i - 1], h1 = x[i + 1] - x[i];
        const double d0 = (y1 - y0) / h0, d1 = (y2 - y1) / h1;
        const double curv = 2.0 * (d1 - d0) / (h0 + h1);
        double center = x[i];
        double bottom = y1;
        if (curv > 0.0) {
            const double slope_mid = (d0 * h1 + d1 * h0) / (h0 + h1);
            const double shift = std::clamp(-slope_mid / curv, -h0, h1);
            center = x[i] + shift;
            bottom = y1 + slope_mid * shift + 0.5 * curv * shift * shift;
        }
        const double level = s[i] + 0.5 * c.prominence;
        std::optional<double> xl, xr;
        for (std::size_t j = i; j > 0; --j) {
            if (s[j - 1] >= level) {
                xl = x[j - 1] + (level - s[j - 1]) * (x[j] - x[j - 1]) / (s[j] - s[j - 1]);
                break;
            }
        }
        for (std::size_t j = i; j + 1 < n; ++j) {
            if (s[j + 1] >= level) {
                xr = x[j] + (level - s[j]) * (x[j + 1] - x[j]) / (s[j + 1] - s[j]);
                break;
            }
        }
        double hw;
        if (xl && xr) {
            hw = 0.5 * (*xr - *xl);
        } else if (xl) {
            hw = x[i] - *xl;
        } else if (xr) {
            hw = *xr - x[i];
        } else {
            hw = 0.25 * (x.back() - x.front());
        }
        dips.push_back({center, hw, baseline - std::min(bottom, s[i])});
    }
    std::sort(dips.begin(), dips.end(), [](const Dip& a, const Dip& b) { return a.center < b.center; });
    return dips;
}

namespace {

using Vec4 = Eigen::Vector4d;

constexpr double kMaxC = 5.0;
constexpr double kMaxD = 10.0;
constexpr double kMinC = 1e-4;

Vec4 clamp_params(Vec4 p) {
    p[0] = std::clamp(p[0], 0.0, kMaxC);
    p[1] = std::clamp(p[1], -kMaxD, kMaxD);
    p[2] = std::clamp(p[2], -kMaxD, 0.0);
    p[3] = std::clamp(p[3], 0.0, 1.0);
    return p;
}

constexpr double kLower[4] = {0.0, -kMaxD, -kMaxD, 0.0};
constexpr double kUpper[4] = {kMaxC, kMaxD, 0.0, 1.0};

bool at_upper(const Vec4& p, int j) { return p[j] >= kUpper[j]; }
bool at_lower(const Vec4& p, int j) { return p[j] <= kLower[j]; }

/// Residual model for one spectral line at fixed (t, omega).
class LineModel {
public:
    LineModel(const SpectralLine& line, double t, double omega, bool weighted)
        : y_(line.na_mean), deltas_(line.deltas), t_(t), omega_(omega) {
        w_.assign(y_.size(), 1.0);
        if (weighted) {
            const double floor = std::max(1e-4, median(line.na_std) * 0.1);
            for (std::size_t i = 0; i < y_.size(); ++i) {
                w_[i] = 1.0 / std::max(line.na_std[i], floor);
            }
        }
    }

    std::size_t size() const { return y_.size(); }
    int evaluations() const { return evaluations_; }

    Eigen::VectorXd residuals(const Vec4& p) {
        ++evaluations_;
        const TwoBandParams tb{p[0], cplx(p[1], p[2]), 0.0};
        ProbeConfig probe{omega_, 0.0, t_, 1.0};
        Eigen::VectorXd r(static_cast<Eigen::Index>(y_.size()));
        for (std::size_t i = 0; i < y_.size(); ++i) {
            probe.delta = deltas_[i];
            const Eigen::Matrix3cd u = expm(full_hamiltonian3(tb, probe), t_);
            const double model = p[3] * std::norm(u(2, 2));
            r[static_cast<Eigen::Index>(i)] = (y_[i] - model) * w_[i];
        }
        return r;
    }

private:
    std::vector<double> y_;
    std::vector<double> deltas_;
    std::vector<double> w_;
    double t_;
    double omega_;
    int evaluations_ = 0;
};

struct LmOutcome {
    Vec4 p;
    double objective = 0.0;
    bool converged = false;
    int iterations = 0;
    std::vector<double> trace;
};

constexpr int kScoutEvaluations = 300;

/// Projected Levenberg-Marquardt with forward-difference Jacobian.
LmOutcome levenberg_marquardt(LineModel& model, Vec4 p, const FitOptions& opt) {
    const int budget_end = model.evaluations() + opt.max_evaluations;
    p = clamp_params(p);
    p[0] = std::max(p[0], kMinC);
    Eigen::VectorXd r = model.residuals(p);
    double obj = r.squaredNorm();
    LmOutcome out;
    out.trace.push_back(obj);
    const auto m = static_cast<Eigen::Index>(model.size());
    double lambda = -1.0;
    const double abs_floor = 1e-30 * static_cast<double>(m);

    while (model.evaluations() + 5 <= budget_end) {
        Eigen::MatrixXd jac(m, 4);
        for (int j = 0; j < 4; ++j) {
            const double h = 1e-7 * std::max(1.0, std::abs(p[j]));
            Vec4 q = p;
            const double sign = at_upper(p, j) ? -1.0 : 1.0;
            q[j] += sign * h;
            jac.col(j) = (model.residuals(q) - r) / (sign * h);
        }
        const Eigen::Matrix4d a = jac.transpose() * jac;
        const Vec4 g = jac.transpose() * r;
        const double diag_max = a.diagonal().maxCoeff();
        if (lambda < 0.0) lambda = 1e-3 * std::max(diag_max, 1e-12);
        ++out.iterations;

        // Parameters pinned at a bound with the descent direction pointing out stay put.
        std::array<bool, 4> active{};
        for (int j = 0; j < 4; ++j) {
            active[j] = (at_upper(p, j) && g[j] < 0.0) || (at_lower(p, j) && g[j] > 0.0);
        }

        bool accepted = false;
        while (model.evaluations() < budget_end) {
            Eigen::Matrix4d damped = a;
            Vec4 rhs = -g;
            for (int j = 0; j < 4; ++j) {
                damped(j, j) += lambda * std::max(a(j, j), 1e-9 * diag_max + 1e-300);
            }
            for (int j = 0; j < 4; ++j) {
                if (!active[j]) continue;
                damped.row(j).setZero();
                damped.col(j).setZero();
                damped(j, j) = 1.0;
                rhs[j] = 0.0;
            }
            const Vec4 step = damped.ldlt().solve(rhs);
            const Vec4 trial = clamp_params(p + step);
            const Vec4 moved = trial - p;
            if (moved.cwiseAbs().maxCoeff() == 0.0) {
                // Every direction is blocked by a bound: constrained optimum.
                out.converged = true;
                break;
            }
            const Eigen::VectorXd r_trial = model.residuals(trial);
            const double obj_trial = r_trial.squaredNorm();
            if (obj_trial < obj) {
                const double drop = obj - obj_trial;
                p = trial;
                r = r_trial;
                obj = obj_trial;
                out.trace.push_back(obj);
                lambda = std::max(lambda / 3.0, 1e-12 * std::max(diag_max, 1e-12));
                accepted = true;
                if (moved.cwiseAbs().maxCoeff() < opt.param_tol &&
                    drop <= opt.rel_tol * (obj + drop) + abs_floor) {
                    out.converged = true;
                }
                break;
            }
            lambda *= 4.0;
            if (lambda > 1e16 * std::max(diag_max, 1e-12)) {
                // No descent left at working precision.
                out.converged = true;
                break;
            }
        }
        if (out.converged || !accepted) break;
    }
    out.p = p;
    out.objective = obj;
    return out;
}

/// Coefficients (c, d) having `e` as one eigenvalue for a given coupling c.
Vec4 with_eigenvalue(cplx e, double c, double n0) {
    if (std::abs(e) < 1e-6) e = cplx(1e-3, e.imag());
    const cplx d = (e * e - c * c) / e;
    return {c, d.real(), std::min(d.imag(), -1e-3), n0};
}

std::vector<Vec4> initial_guesses(const SpectralLine& line, double n0) {
    std::vector<Vec4> guesses;
    const std::vector<Dip> dips = detect_dips(line);
    auto eig_from = [](const Dip& dip) { return cplx(-dip.center, -std::max(dip.half_width, 1e-3)); };
    if (dips.size() == 2) {
        const cplx e1 = eig_from(dips[0]);
        const cplx e2 = eig_from(dips[1]);
        const cplx d = e1 + e2;
        const cplx c2 = -e1 * e2;
        const double c = std::sqrt(std::max(std::abs(c2.real()), 1e-4));
        guesses.push_back({c, d.real(), std::min(d.imag(), -1e-3), n0});
        guesses.push_back({std::sqrt(std::abs(c2)), d.real(), std::min(d.imag(), -1e-3), n0});
    }
    if (!dips.empty()) {
        // Single-dip hypotheses: each dip alone, partner unconstrained.
        for (const Dip& dip : dips) {
            for (double c : {0.08, 0.2, 0.35}) {
                guesses.push_back(with_eigenvalue(eig_from(dip), c, n0));
            }
        }
    }
    if (guesses.empty()) {
        guesses.push_back({0.2, 0.0, -0.1, n0});
        guesses.push_back({0.1, -0.2, -0.2, n0});
    }
    return guesses;
}

}  // namespace

FitResult fit_line(const SpectralLine& line, double t, double omega,
                   const std::optional<FitResult>& init, const FitOptions& options) {
    line.check();
    if (!(t > 0.0) || !(omega > 0.0) || !std::isfinite(t) || !std::isfinite(omega)) {
        throw InvalidInput("fit_line: t and omega must be positive");
    }
    if (options.starts < 1) {
        throw InvalidInput("fit_line: need at least one start");
    }
    const double n0 = std::clamp(*std::max_element(line.na_mean.begin(), line.na_mean.end()), 0.05, 1.0);

    std::vector<Vec4> base;
    if (init) {
        base.push_back({init->c, init->d_re, init->d_im, init->n0});
    } else {
        base = initial_guesses(line, n0);
    }
    std::vector<Vec4> starts = base;
    std::mt19937_64 rng(options.jitter_seed);
    std::uniform_real_distribution<double> jitter(-0.2, 0.2);
    for (std::size_t i = 0; starts.size() < static_cast<std::size_t>(options.starts); ++i) {
        Vec4 p = base[i % base.size()];
        p[0] *= 1.0 + jitter(rng);
        p[1] += 0.2 * std::abs(p[1]) * jitter(rng) + 0.02 * jitter(rng);
        p[2] *= 1.0 + jitter(rng);
        p[3] = std::clamp(p[3] * (1.0 + 0.1 * jitter(rng)), 0.0, 1.0);
        starts.push_back(p);
    }

    LineModel model(line, t, omega, options.weighted);
    // Scout every start briefly, then polish the two most promising ones.
    FitOptions scout = options;
    scout.max_evaluations = std::min(options.max_evaluations, kScoutEvaluations);
    std::vector<LmOutcome> scouted;
    for (const Vec4& s : starts) scouted.push_back(levenberg_marquardt(model, s, scout));
    std::vector<std::size_t> order(scouted.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return scouted[a].objective < scouted[b].objective;
    });
    auto better = [](const LmOutcome& a, const std::optional<LmOutcome>& b) {
        return !b || (a.converged && !b->converged) ||
               (a.converged == b->converged && a.objective < b->objective);
    };
    std::optional<LmOutcome> best;
    for (std::size_t rank = 0; rank < order.size(); ++rank) {
        LmOutcome out = std::move(scouted[order[rank]]);
        if (!out.converged && rank < 2) {
            LmOutcome more = levenberg_marquardt(model, out.p, options);
            more.iterations += out.iterations;
            out.trace.insert(out.trace.end(), more.trace.begin() + 1, more.trace.end());
            more.trace = std::move(out.trace);
            out = std::move(more);
        }
        if (better(out, best)) best = std::move(out);
    }

    FitResult fr;
    fr.c = best->p[0];
    fr.d_re = best->p[1];
    fr.d_im = best->p[2];
    fr.n0 = best->p[3];
    fr.residual = std::sqrt(best->objective / static_cast<double>(line.size()));
    fr.converged = best->converged;
    fr.iterations = best->iterations;
    fr.evaluations = model.evaluations();
    fr.objective_trace = std::move(best->trace);
    return fr;
}

EnergyPair energies_from_fit(const FitResult& fr) {
    if (!fr.converged) {
        throw InvalidInput("energies_from_fit: fit did not converge");
    }
    const auto [a, b] = closed_form_energies(fr.two_band());
    return {EnergyEstimate{a, 0.0, 0.0}, EnergyEstimate{b, 0.0, 0.0}};
}

std::pair<cplx, cplx> match_pair(std::pair<cplx, cplx> v, std::pair<cplx, cplx> ref) {
    const double keep = std::abs(v.first - ref.first) + std::abs(v.second - ref.second);
    const double swap = std::abs(v.first - ref.second) + std::abs(v.second - ref.first);
    return swap < keep ? std::pair{v.second, v.first} : v;
}

EnergyPair fit_uncertainty(std::span<const SpectralLine> resamples, double t, double omega,
                           const std::optional<FitResult>& reference, const FitOptions& options) {
    if (resamples.size() < 5) {
        throw UncertaintyUnavailable("fit_uncertainty: need at least 5 resamples");
    }
    std::vector<std::pair<cplx, cplx>> values;
    for (const auto& line : resamples) {
        const FitResult fr = fit_line(line, t, omega, reference, options);
        if (fr.converged) {
            values.push_back(closed_form_energies(fr.two_band()));
        }
    }
    if (values.size() < 5) {
        throw UncertaintyUnavailable("fit_uncertainty: fewer than 5 converged resample fits");
    }
    std::pair<cplx, cplx> ref = reference ? closed_form_energies(reference->two_band()) : values.front();
    for (auto& v : values) v = match_pair(v, ref);

    const double n = static_cast<double>(values.size());
    auto summarize = [&](auto pick) {
        cplx mean = 0.0;
        for (const auto& v : values) mean += pick(v);
        mean /= n;
        double sre = 0.0, sim = 0.0;
        for (const auto& v : values) {
            const cplx dv = pick(v) - mean;
            sre += dv.real() * dv.real();
            sim += dv.imag() * dv.imag();
        }
        return EnergyEstimate{mean, std::sqrt(sre / (n - 1.0)), std::sqrt(sim / (n - 1.0))};
    };
    return {summarize([](const auto& v) { return v.first; }),
            summarize([](const auto& v) { return v.second; })};
}

}  // namespace nhspec
