#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nhspec/linalg.hpp"

namespace nhspec {

struct BandErrors {
    double re = 0.0;
    double im = 0.0;
};

/// Two continuity-tracked bands over k in [0, 2pi] (closure point included).
struct BandSet {
    std::vector<double> k;
    std::array<std::vector<cplx>, 2> bands;
    /// true when band 0 at k = 2pi continues into band 1 at k = 0.
    bool swapped = false;
    std::array<std::vector<BandErrors>, 2> errors;  // optional, empty or aligned to k

    std::size_t size() const { return k.size(); }
};

/// Pairs unordered eigenvalue pairs into bands by continuity. Each step picks
/// the assignment closest to a linear extrapolation of the previous two
/// points; a step whose two assignments are nearly equally good raises
/// GridRefinementRequired with the offending k interval.
BandSet track_bands(std::span<const double> k_grid, std::span<const std::pair<cplx, cplx>> pairs);

/// Ratio (best / alternative) above which a pairing is ambiguous.
inline constexpr double kTrackingAmbiguity = 0.75;

/// Winding of a closed curve around eB in units of full turns. The curve is
/// closed back to its first point if needed.
int winding_number(std::span<const cplx> curve, cplx eb);

struct Rational {
    int num = 0;
    int den = 1;

    double value() const { return static_cast<double>(num) / den; }
    bool operator==(const Rational&) const = default;
    std::string str() const;
};

struct ModifiedWinding {
    Rational w;
    int period = 1;  // m
};

/// Winding accumulated over m Brillouin periods divided by m, where m = 2 when
/// the bands exchange at the zone boundary.
ModifiedWinding modified_winding(const BandSet& bs, cplx eb, int band = 0);

/// Braid degree: phase increment of E1 - E2 over one period divided by pi.
int braid_degree(const BandSet& bs);

/// Default base energy for a closed curve. Candidates are points it encloses
/// with nonzero winding that lie at least kLoopSignificance standard errors
/// (`sigma`, one radius per point; empty means exact) from the curve; the one
/// with the smallest largest phase step is returned. nullopt means the curve
/// encloses nothing beyond kLoopNoise standard errors; anything in between
/// raises BaseEnergyError.
std::optional<cplx> interior_base_energy(std::span<const cplx> curve, std::span<const double> sigma = {});

inline constexpr double kLoopSignificance = 1.0;
inline constexpr double kLoopNoise = 0.5;

enum class Classification { TrivialArcs, Unlink, Unknot, HopfLink, Other };

std::string to_string(Classification c);

struct TopologyReport {
    std::array<std::optional<int>, 2> w;  // per band; empty when bands exchange
    Rational big_w;
    int period = 1;
    int nu = 0;
    bool swapped = false;
    std::vector<cplx> eb;  // base energies used (per band, or one for a joined loop)
    Classification classification = Classification::Other;
};

/// Invariants and structural class. With no explicit base energy, each closed
/// loop is measured around interior_base_energy, using the band error bars.
TopologyReport classify(const BandSet& bs, const std::optional<cplx>& eb = std::nullopt);

}  // namespace nhspec
