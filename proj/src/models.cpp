#include "nhspec/models.hpp"

#include <cmath>
#include <numbers>

namespace nhspec {

namespace {

void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) {
        throw InvalidInput(std::string(what) + " must be finite");
    }
}

void require_k(double k) {
    constexpr double tol = 1e-12;
    if (!std::isfinite(k) || k < -tol || k > 2.0 * std::numbers::pi + tol) {
        throw InvalidInput("momentum k must lie in [0, 2pi]");
    }
}

}  // namespace

void validate(const MrmParams& p) {
    for (double v : {p.J1, p.J2, p.J3, p.mz, p.gamma}) {
        require_finite(v, "MRM parameter");
    }
    if (p.gamma < 0.0) {
        throw InvalidInput("MRM gamma must be non-negative");
    }
}

void validate(const LkParams& p) {
    for (double v : {p.mx, p.g1, p.g2, p.g3, p.gamma0}) {
        require_finite(v, "LK parameter");
    }
    if (p.gamma0 < 0.0) {
        throw InvalidInput("LK gamma0 must be non-negative");
    }
}

void validate(const ProbeConfig& p) {
    for (double v : {p.omega, p.delta, p.t, p.n0}) {
        require_finite(v, "probe parameter");
    }
    if (p.omega < 0.0) throw InvalidInput("probe omega must be non-negative");
    if (p.t < 0.0) throw InvalidInput("probe time must be non-negative");
    if (p.n0 < 0.0 || p.n0 > 1.0) throw InvalidInput("probe n0 must lie in [0, 1]");
}

void validate(const SixLevelConfig& c) {
    for (double v : {c.jx, c.jy, c.jz, c.omega, c.delta, c.jl, c.gamma_e, c.dephasing_rate}) {
        require_finite(v, "six-level parameter");
    }
    if (c.gamma_e < 0.0 || c.dephasing_rate < 0.0) {
        throw InvalidInput("six-level rates must be non-negative");
    }
    double sum = 0.0;
    for (double g : c.branching) {
        require_finite(g, "branching rate");
        if (g < 0.0) throw InvalidInput("branching rates must be non-negative");
        sum += g;
    }
    if (std::abs(sum - c.gamma_e) > 1e-9 * std::max(1.0, c.gamma_e)) {
        throw InvalidInput("branching rates must sum to gamma_e");
    }
}

TwoBandParams mrm_at_k(const MrmParams& p, double k) {
    validate(p);
    require_k(k);
    const double jx = p.J1 + p.J2 * std::cos(k);
    const double jy = p.J2 * std::sin(k);
    const double jz = p.J3 * std::sin(k) + p.mz;
    return {std::hypot(jx, jy), -2.0 * cplx(jz, p.gamma), k};
}

TwoBandParams lk_at_k(const LkParams& p, double k) {
    validate(p);
    require_k(k);
    const cplx g = 2.0 * cplx(p.g1 * std::cos(k) + p.g2 * std::cos(2.0 * k),
                              p.g3 * std::sin(2.0 * k) - 0.5 * p.gamma0);
    // A negative mx is gauge-equivalent to |mx| under |1> -> -|1>.
    return {std::abs(p.mx), g, k};
}

TwoBandParams model_at_k(const ModelDescriptor& m, double k) {
    return std::visit(
        [k](const auto& p) -> TwoBandParams {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, MrmParams>) {
                return mrm_at_k(p, k);
            } else if constexpr (std::is_same_v<T, LkParams>) {
                return lk_at_k(p, k);
            } else {
                require_k(k);
                if (!std::isfinite(p.c) || !std::isfinite(p.d.real()) || !std::isfinite(p.d.imag())) {
                    throw InvalidInput("generic parameters must be finite");
                }
                return {std::abs(p.c), p.d, k};
            }
        },
        m);
}

std::string model_kind(const ModelDescriptor& m) {
    switch (m.index()) {
        case 0: return "mrm";
        case 1: return "lk";
        default: return "generic";
    }
}

CMat two_band_matrix(const TwoBandParams& p) {
    CMat h(2, 2);
    h << cplx(0.0), cplx(p.c), cplx(p.c), p.d;
    return h;
}

std::pair<cplx, cplx> closed_form_energies(const TwoBandParams& p) {
    const cplx half = 0.5 * p.d;
    const cplx root = std::sqrt(half * half + p.c * p.c);
    cplx a = half + root;
    cplx b = half - root;
    if (b.real() > a.real() || (b.real() == a.real() && b.imag() > a.imag())) {
        std::swap(a, b);
    }
    return {a, b};
}

Eigen::Matrix3cd full_hamiltonian3(const TwoBandParams& p, const ProbeConfig& probe) {
    const double half = 0.5 * probe.omega;
    Eigen::Matrix3cd h;
    h << cplx(0.0), cplx(p.c), cplx(half),
         cplx(p.c), p.d, cplx(0.0),
         cplx(half), cplx(0.0), cplx(-probe.delta);
    return h;
}

CMat full_hamiltonian(const TwoBandParams& p, const ProbeConfig& probe) {
    return CMat(full_hamiltonian3(p, probe));
}

SixLevelSystem six_level_system(const SixLevelConfig& cfg) {
    validate(cfg);
    using namespace six;
    CMat h = CMat::Zero(6, 6);
    h(k0, k1) = cplx(cfg.jx, -cfg.jy);
    h(k1, k0) = cplx(cfg.jx, cfg.jy);
    h(k1, k1) = -2.0 * cfg.jz;
    h(k0, ka) = h(ka, k0) = 0.5 * cfg.omega;
    h(ka, ka) = -cfg.delta;
    h(k1, ke) = h(ke, k1) = cfg.jl;

    SixLevelSystem sys{h, {}};
    const int targets[3] = {k1, k2, k3};
    for (int mu = 0; mu < 3; ++mu) {
        CMat l = CMat::Zero(6, 6);
        l(targets[mu], ke) = std::sqrt(cfg.branching[mu]);
        sys.lindblads.push_back(std::move(l));
    }
    if (cfg.dephasing_rate > 0.0) {
        CMat l = CMat::Zero(6, 6);
        l(ka, ka) = std::sqrt(cfg.dephasing_rate);
        sys.lindblads.push_back(std::move(l));
    }
    return sys;
}

double effective_gamma(double jl, double gamma_e) {
    if (!(gamma_e > 0.0)) {
        throw InvalidInput("effective_gamma: gamma_e must be positive");
    }
    return jl * jl / (2.0 * gamma_e);
}

SixLevelConfig six_level_for(const TwoBandParams& p, double gamma_e) {
    if (p.d.imag() > 0.0) {
        throw InvalidInput("six_level_for: gain (Im d > 0) has no laser-loss realization");
    }
    SixLevelConfig cfg;
    cfg.jx = p.c;
    cfg.jz = -0.5 * p.d.real();
    const double gamma = -0.5 * p.d.imag();
    cfg.jl = std::sqrt(2.0 * gamma_e * gamma);
    cfg.gamma_e = gamma_e;
    cfg.branching = {gamma_e / 3.0, gamma_e / 3.0, gamma_e - 2.0 * (gamma_e / 3.0)};
    return cfg;
}

TwoBandParams effective_two_band(const SixLevelConfig& cfg) {
    const double gamma = effective_gamma(cfg.jl, cfg.gamma_e);
    return {std::hypot(cfg.jx, cfg.jy), -2.0 * cplx(cfg.jz, gamma), 0.0};
}

}  // namespace nhspec
