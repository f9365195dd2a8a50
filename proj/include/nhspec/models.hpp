#pragma once

#include <array>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "nhspec/linalg.hpp"

namespace nhspec {

// All energies and rates are angular frequencies in rad/us; times are in us.

/// Modified Rice-Mele model: (J0 |0><1| + h.c.) - 2 (Jz + i gamma) |1><1|.
struct MrmParams {
    double J1 = 0.0;
    double J2 = 0.0;
    double J3 = 0.0;
    double mz = 0.0;
    double gamma = 0.0;
};

/// Hopf-link model: mx sigma_x + g(k) |1><1|.
struct LkParams {
    double mx = 0.0;
    double g1 = 0.0;
    double g2 = 0.0;
    double g3 = 0.0;
    double gamma0 = 0.0;
};

/// k-independent two-band model given directly by (c, d).
struct GenericParams {
    double c = 0.0;
    cplx d{0.0, 0.0};
};

/// H = c (|0><1| + |1><0|) + d |1><1| at one momentum.
struct TwoBandParams {
    double c = 0.0;
    cplx d{0.0, 0.0};
    double k = 0.0;
};

using ModelDescriptor = std::variant<MrmParams, LkParams, GenericParams>;

struct ProbeConfig {
    double omega = 0.0;  // Rabi frequency of the |0> <-> |a> probe
    double delta = 0.0;  // probe detuning
    double t = 0.0;      // evolution time
    double n0 = 1.0;     // initial auxiliary population
};

/// Physical six-level model: system |0>,|1>, Zeeman sinks |2>,|3>, excited |e>, auxiliary |a>.
struct SixLevelConfig {
    double jx = 0.0;
    double jy = 0.0;
    double jz = 0.0;
    double omega = 0.0;
    double delta = 0.0;
    double jl = 0.0;       // |1> <-> |e> laser coupling
    double gamma_e = 0.0;  // total decay rate of |e>
    std::array<double, 3> branching{0.0, 0.0, 0.0};  // decay into |1>, |2>, |3>
    double dephasing_rate = 0.0;                     // 1 / t2 on the auxiliary level
};

/// Basis indices of the six-level model.
namespace six {
inline constexpr int k0 = 0;
inline constexpr int k1 = 1;
inline constexpr int k2 = 2;
inline constexpr int k3 = 3;
inline constexpr int ke = 4;
inline constexpr int ka = 5;
}  // namespace six

/// Decay rate of |e> for 171Yb+ used when nothing else is configured.
inline constexpr double kDefaultGammaE = 123.0;

void validate(const MrmParams& p);
void validate(const LkParams& p);
void validate(const ProbeConfig& p);
void validate(const SixLevelConfig& cfg);

TwoBandParams mrm_at_k(const MrmParams& p, double k);
TwoBandParams lk_at_k(const LkParams& p, double k);
TwoBandParams model_at_k(const ModelDescriptor& m, double k);

/// Short tag ("mrm", "lk", "generic") used in metadata and configs.
std::string model_kind(const ModelDescriptor& m);

CMat two_band_matrix(const TwoBandParams& p);

/// E+- = d/2 +- sqrt(d^2/4 + c^2), ordered like eig2.
std::pair<cplx, cplx> closed_form_energies(const TwoBandParams& p);

/// Probe Hamiltonian in basis (|0>, |1>, |a>).
CMat full_hamiltonian(const TwoBandParams& p, const ProbeConfig& probe);
Eigen::Matrix3cd full_hamiltonian3(const TwoBandParams& p, const ProbeConfig& probe);

struct SixLevelSystem {
    CMat h;
    std::vector<CMat> lindblads;
};

SixLevelSystem six_level_system(const SixLevelConfig& cfg);

/// Loss rate on |1> left after adiabatically eliminating |e>: JL^2 / (2 Gamma_e).
double effective_gamma(double jl, double gamma_e);

/// Six-level configuration reproducing `p` (gamma = -Im d / 2) with equal branching.
SixLevelConfig six_level_for(const TwoBandParams& p, double gamma_e = kDefaultGammaE);

/// Effective two-band parameters of a six-level configuration.
TwoBandParams effective_two_band(const SixLevelConfig& cfg);

}  // namespace nhspec
