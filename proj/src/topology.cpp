#include "nhspec/topology.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <limits>

#include "nhspec/errors.hpp"

namespace nhspec {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kMaxStepPhase = kPi / 2.0;
constexpr double kSnapResidue = 0.05;
constexpr double kOnCurve = 1e-6;

double segment_distance(cplx p, cplx a, cplx b) {
    const cplx ab = b - a;
    const double len2 = std::norm(ab);
    double s = 0.0;
    if (len2 > 0.0) {
        s = std::clamp(((p - a) * std::conj(ab)).real() / len2, 0.0, 1.0);
    }
    return std::abs(a + s * ab - p);
}

/// Distance from p to the closed polyline through `curve`.
double curve_distance(std::span<const cplx> curve, cplx p) {
    double best = std::numeric_limits<double>::infinity();
    const std::size_t n = curve.size();
    for (std::size_t i = 0; i < n; ++i) {
        best = std::min(best, segment_distance(p, curve[i], curve[(i + 1) % n]));
    }
    return best;
}

/// Sum of principal-branch phase increments of z along the closed sequence.
/// Throws ResolutionError when a single step turns by pi/2 or more.
double phase_sum(std::span<const cplx> z, cplx closing, const char* who) {
    double total = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        const cplx next = i + 1 < z.size() ? z[i + 1] : closing;
        const double step = std::arg(next / z[i]);
        if (std::abs(step) >= kMaxStepPhase) {
            throw ResolutionError(std::string(who) + ": phase step of " + std::to_string(step) +
                                  " rad at index " + std::to_string(i) + "; refine the k grid");
        }
        total += step;
    }
    return total;
}

int snap(double value, const char* who) {
    const double r = std::round(value);
    if (std::abs(value - r) >= kSnapResidue) {
        throw ResolutionError(std::string(who) + ": invariant residue too large");
    }
    return static_cast<int>(r);
}

/// Fast unchecked winding count used by the base-energy search.
int raw_winding(std::span<const cplx> curve, cplx p) {
    double total = 0.0;
    const std::size_t n = curve.size();
    for (std::size_t i = 0; i < n; ++i) {
        total += std::arg((curve[(i + 1) % n] - p) / (curve[i] - p));
    }
    return static_cast<int>(std::lround(total / (2.0 * kPi)));
}

/// Largest principal phase step of (curve - p) around the closed curve.
double max_phase_step(std::span<const cplx> curve, cplx p) {
    double worst = 0.0;
    const std::size_t n = curve.size();
    for (std::size_t i = 0; i < n; ++i) {
        worst = std::max(worst, std::abs(std::arg((curve[(i + 1) % n] - p) / (curve[i] - p))));
    }
    return worst;
}

/// Distance from p to the curve in units of the local energy uncertainty
/// (infinite when the curve carries no uncertainty).
double significance(std::span<const cplx> curve, std::span<const double> sigma, cplx p) {
    if (sigma.empty()) return std::numeric_limits<double>::infinity();
    double best = std::numeric_limits<double>::infinity();
    const std::size_t n = curve.size();
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = (i + 1) % n;
        const double s = std::max(sigma[i], sigma[j]);
        if (s > 0.0) best = std::min(best, segment_distance(p, curve[i], curve[j]) / s);
    }
    return best;
}

cplx exterior_point(std::span<const cplx> curve) {
    double hi = -std::numeric_limits<double>::infinity();
    double lo = std::numeric_limits<double>::infinity();
    double im = 0.0;
    for (const cplx& e : curve) {
        hi = std::max(hi, e.real());
        lo = std::min(lo, e.real());
        im += e.imag();
    }
    return {hi + (hi - lo) + 1.0, im / static_cast<double>(curve.size())};
}

std::vector<cplx> joined_path(const BandSet& bs, int band) {
    std::vector<cplx> path(bs.bands[static_cast<std::size_t>(band)]);
    if (bs.swapped) {
        const auto& other = bs.bands[static_cast<std::size_t>(1 - band)];
        path.insert(path.end(), other.begin(), other.end());
    }
    return path;
}

/// One-sigma radius per point of the joined path; empty when the bands carry no errors.
std::vector<double> joined_sigma(const BandSet& bs, int band) {
    std::vector<double> out;
    auto append = [&](int b) {
        for (const auto& e : bs.errors[static_cast<std::size_t>(b)]) out.push_back(std::hypot(e.re, e.im));
    };
    if (bs.errors[0].size() != bs.size() || bs.errors[1].size() != bs.size()) return out;
    append(band);
    if (bs.swapped) append(1 - band);
    return out;
}

int gcd_int(int a, int b) {
    return std::gcd(std::abs(a), std::abs(b));
}

}  // namespace

std::string Rational::str() const {
    return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
}

BandSet track_bands(std::span<const double> k_grid, std::span<const std::pair<cplx, cplx>> pairs) {
    const std::size_t n = k_grid.size();
    if (n < 8) {
        throw InvalidInput("track_bands: need at least 8 k points");
    }
    if (pairs.size() != n) {
        throw InvalidInput("track_bands: one eigenvalue pair per k point required");
    }
    for (std::size_t j = 0; j < n; ++j) {
        const auto& [a, b] = pairs[j];
        if (!std::isfinite(k_grid[j]) || !std::isfinite(a.real()) || !std::isfinite(a.imag()) ||
            !std::isfinite(b.real()) || !std::isfinite(b.imag())) {
            throw InvalidInput("track_bands: non-finite input");
        }
        if (j > 0 && !(k_grid[j] > k_grid[j - 1])) {
            throw InvalidInput("track_bands: k grid must be strictly increasing");
        }
    }

    BandSet bs;
    bs.k.assign(k_grid.begin(), k_grid.end());
    bs.bands[0].reserve(n);
    bs.bands[1].reserve(n);
    bs.bands[0].push_back(pairs[0].first);
    bs.bands[1].push_back(pairs[0].second);

    auto decide = [](double keep, double swap, double k_lo, double k_hi) {
        const double best = std::min(keep, swap);
        const double alt = std::max(keep, swap);
        if (!(alt > 0.0) || best > kTrackingAmbiguity * alt) {
            throw GridRefinementRequired("track_bands: ambiguous band pairing between k = " +
                                             std::to_string(k_lo) + " and " + std::to_string(k_hi),
                                         k_lo, k_hi);
        }
        return swap < keep;
    };

    for (std::size_t j = 1; j < n; ++j) {
        cplx pred[2];
        for (int b = 0; b < 2; ++b) {
            const auto& band = bs.bands[static_cast<std::size_t>(b)];
            pred[b] = band[j - 1];
            if (j >= 2) {
                const double ratio = (k_grid[j] - k_grid[j - 1]) / (k_grid[j - 1] - k_grid[j - 2]);
                pred[b] += (band[j - 1] - band[j - 2]) * ratio;
            }
        }
        auto [a, c] = pairs[j];
        const double keep = std::abs(a - pred[0]) + std::abs(c - pred[1]);
        const double swap = std::abs(c - pred[0]) + std::abs(a - pred[1]);
        if (decide(keep, swap, k_grid[j - 1], k_grid[j])) std::swap(a, c);
        bs.bands[0].push_back(a);
        bs.bands[1].push_back(c);
    }

    const cplx end0 = bs.bands[0].back(), end1 = bs.bands[1].back();
    const cplx start0 = bs.bands[0].front(), start1 = bs.bands[1].front();
    const double keep = std::abs(end0 - start0) + std::abs(end1 - start1);
    const double swap = std::abs(end0 - start1) + std::abs(end1 - start0);
    if (keep == 0.0 || swap == 0.0) {
        bs.swapped = swap == 0.0 && keep != 0.0;
    } else {
        bs.swapped = decide(keep, swap, k_grid[n - 1], k_grid[0]);
    }
    return bs;
}

int winding_number(std::span<const cplx> curve, cplx eb) {
    if (curve.size() < 3) {
        throw InvalidInput("winding_number: curve needs at least 3 points");
    }
    double max_step = 0.0;
    for (std::size_t i = 0; i + 1 < curve.size(); ++i) {
        max_step = std::max(max_step, std::abs(curve[i + 1] - curve[i]));
    }
    if (std::abs(curve.back() - curve.front()) > max_step + 1e-12) {
        throw InvalidInput("winding_number: curve does not close");
    }
    if (curve_distance(curve, eb) <= kOnCurve) {
        throw BaseEnergyError("winding_number: base energy lies on the curve");
    }
    std::vector<cplx> z(curve.size());
    std::transform(curve.begin(), curve.end(), z.begin(), [eb](cplx e) { return e - eb; });
    return snap(phase_sum(z, z.front(), "winding_number") / (2.0 * kPi), "winding_number");
}

ModifiedWinding modified_winding(const BandSet& bs, cplx eb, int band) {
    if (band != 0 && band != 1) {
        throw InvalidInput("modified_winding: band index must be 0 or 1");
    }
    const std::vector<cplx> path = joined_path(bs, band);
    if (curve_distance(path, eb) <= kOnCurve) {
        throw BaseEnergyError("modified_winding: base energy lies on the curve");
    }
    const int m = bs.swapped ? 2 : 1;
    std::vector<cplx> z(path.size());
    std::transform(path.begin(), path.end(), z.begin(), [eb](cplx e) { return e - eb; });
    const double turns = phase_sum(z, z.front(), "modified_winding") / (2.0 * kPi * m);
    // Snap to the nearest multiple of 1/(2m).
    const int num = snap(turns * 2 * m, "modified_winding");
    if (std::abs(turns - static_cast<double>(num) / (2 * m)) >= kSnapResidue) {
        throw ResolutionError("modified_winding: invariant residue too large");
    }
    const int g = std::max(1, gcd_int(num, 2 * m));
    return {Rational{num / g, (2 * m) / g}, m};
}

int braid_degree(const BandSet& bs) {
    const std::size_t n = bs.size();
    if (n < 2 || bs.bands[0].size() != n || bs.bands[1].size() != n) {
        throw InvalidInput("braid_degree: malformed band set");
    }
    std::vector<cplx> z(n);
    for (std::size_t j = 0; j < n; ++j) {
        z[j] = bs.bands[0][j] - bs.bands[1][j];
        if (std::abs(z[j]) <= kOnCurve) {
            throw DegenerateBands("braid_degree: bands touch at k = " + std::to_string(bs.k[j]));
        }
    }
    // One period: the difference returns to itself, or to its negative when the bands exchange.
    const cplx closing = bs.swapped ? -z.front() : z.front();
    return snap(phase_sum(z, closing, "braid_degree") / kPi, "braid_degree");
}

std::optional<cplx> interior_base_energy(std::span<const cplx> curve, std::span<const double> sigma) {
    if (curve.size() < 3) return std::nullopt;
    if (!sigma.empty() && sigma.size() != curve.size()) {
        throw InvalidInput("interior_base_energy: one uncertainty per curve point required");
    }
    double re_lo = curve[0].real(), re_hi = re_lo, im_lo = curve[0].imag(), im_hi = im_lo;
    for (const cplx& e : curve) {
        re_lo = std::min(re_lo, e.real());
        re_hi = std::max(re_hi, e.real());
        im_lo = std::min(im_lo, e.imag());
        im_hi = std::max(im_hi, e.imag());
    }
    if (re_hi - re_lo < 1e-9 || im_hi - im_lo < 1e-9) return std::nullopt;

    constexpr int grid = 64;
    bool enclosed = false;
    double top_z = 0.0;
    std::optional<cplx> best;
    double best_step = kPi;
    double best_dist = 0.0;
    for (int i = 0; i < grid; ++i) {
        for (int j = 0; j < grid; ++j) {
            const cplx p(re_lo + (re_hi - re_lo) * (i + 0.5) / grid,
                         im_lo + (im_hi - im_lo) * (j + 0.5) / grid);
            const double dist = curve_distance(curve, p);
            if (dist <= kOnCurve || raw_winding(curve, p) == 0) continue;
            enclosed = true;
            const double z = significance(curve, sigma, p);
            top_z = std::max(top_z, z);
            if (z < kLoopSignificance) continue;
            const double step = max_phase_step(curve, p);
            if (step < best_step || (step == best_step && dist > best_dist)) {
                best = p;
                best_step = step;
                best_dist = dist;
            }
        }
    }
    if (best || !enclosed || top_z < kLoopNoise) return best;
    throw BaseEnergyError("interior_base_energy: the enclosed region lies only " + std::to_string(top_z) +
                          " standard errors from the curve; give an explicit base energy");
}

std::string to_string(Classification c) {
    switch (c) {
        case Classification::TrivialArcs: return "TrivialArcs";
        case Classification::Unlink: return "Unlink";
        case Classification::Unknot: return "Unknot";
        case Classification::HopfLink: return "HopfLink";
        case Classification::Other: return "Other";
    }
    return "Other";
}

TopologyReport classify(const BandSet& bs, const std::optional<cplx>& eb) {
    TopologyReport rep;
    rep.swapped = bs.swapped;
    rep.nu = braid_degree(bs);
    auto base_for = [&](std::span<const cplx> curve, int band) {
        if (eb) return *eb;
        const std::vector<double> sigma = joined_sigma(bs, band);
        return interior_base_energy(curve, sigma).value_or(exterior_point(curve));
    };

    if (bs.swapped) {
        const std::vector<cplx> path = joined_path(bs, 0);
        const cplx base = base_for(path, 0);
        rep.eb = {base};
        const ModifiedWinding mw = modified_winding(bs, base, 0);
        rep.big_w = mw.w;
        rep.period = mw.period;
        if (mw.w.den == 2 && std::abs(mw.w.num) == 1) {
            rep.classification = Classification::Unknot;
        } else if (mw.w.num == 0) {
            rep.classification = Classification::TrivialArcs;
        } else {
            rep.classification = Classification::Other;
        }
        return rep;
    }

    for (int b = 0; b < 2; ++b) {
        const auto& band = bs.bands[static_cast<std::size_t>(b)];
        const cplx base = base_for(band, b);
        rep.eb.push_back(base);
        rep.w[static_cast<std::size_t>(b)] = winding_number(band, base);
    }
    const ModifiedWinding mw = modified_winding(bs, rep.eb[0], 0);
    rep.big_w = mw.w;
    rep.period = mw.period;

    const int w0 = *rep.w[0], w1 = *rep.w[1];
    if (w0 == w1 && std::abs(w0) == 1 && std::abs(rep.nu) >= 2) {
        rep.classification = Classification::HopfLink;
    } else if (w0 == w1 && std::abs(w0) == 1 && rep.nu == 0) {
        rep.classification = Classification::Unlink;
    } else if (w0 == 0 && w1 == 0) {
        rep.classification = Classification::TrivialArcs;
    } else {
        rep.classification = Classification::Other;
    }
    return rep;
}

}  // namespace nhspec
