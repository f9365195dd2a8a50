#include "nhspec/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace nhspec {

namespace {

constexpr double kHermitianTol = 1e-10;
constexpr double kPsdTol = 1e-8;
constexpr double kTraceDriftFail = 1e-4;

double inf_norm(const CMat& m) {
    return m.cwiseAbs().rowwise().sum().maxCoeff();
}

CMat vec_to_mat(const CVec& v, Eigen::Index dim) {
    return Eigen::Map<const CMat>(v.data(), dim, dim);
}

CVec mat_to_vec(const CMat& m) {
    return Eigen::Map<const CVec>(m.data(), m.size());
}

void check_operators(const CMat& h, std::span<const CMat> lindblads) {
    if (h.rows() != h.cols() || h.rows() == 0) {
        throw InvalidInput("master equation: Hamiltonian must be square");
    }
    if (!h.allFinite()) {
        throw InvalidInput("master equation: non-finite Hamiltonian entry");
    }
    for (const auto& l : lindblads) {
        if (l.rows() != h.rows() || l.cols() != h.cols()) {
            throw InvalidInput("master equation: Lindblad operator dimension mismatch");
        }
        if (!l.allFinite()) {
            throw InvalidInput("master equation: non-finite Lindblad entry");
        }
    }
}

CMat decay_operator(const CMat& h, std::span<const CMat> lindblads) {
    CMat sum = CMat::Zero(h.rows(), h.cols());
    for (const auto& l : lindblads) {
        sum += l.adjoint() * l;
    }
    return sum;
}

}  // namespace

DensityMatrix::DensityMatrix(CMat rho) : rho_(std::move(rho)) {
    if (rho_.rows() != rho_.cols() || rho_.rows() == 0) {
        throw InvalidInput("density matrix must be square and non-empty");
    }
    if (!rho_.allFinite()) {
        throw InvalidInput("density matrix has non-finite entries");
    }
    if ((rho_ - rho_.adjoint()).cwiseAbs().maxCoeff() > kHermitianTol) {
        throw InvalidInput("density matrix is not Hermitian");
    }
    const double tr = trace();
    if (tr < -kPsdTol || tr > 1.0 + 1e-6) {
        throw InvalidInput("density matrix trace outside [0, 1]");
    }
    Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (rho_ + rho_.adjoint()), Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -kPsdTol) {
        throw InvalidInput("density matrix is not positive semidefinite");
    }
}

DensityMatrix DensityMatrix::pure(Eigen::Index dim, Eigen::Index level) {
    if (level < 0 || level >= dim) {
        throw InvalidInput("pure state level out of range");
    }
    CMat rho = CMat::Zero(dim, dim);
    rho(level, level) = 1.0;
    return DensityMatrix(std::move(rho));
}

cplx probe_amplitude(const TwoBandParams& p, const ProbeConfig& probe) {
    validate(probe);
    if (!std::isfinite(p.c) || !std::isfinite(p.d.real()) || !std::isfinite(p.d.imag())) {
        throw InvalidInput("probe_amplitude: non-finite model parameters");
    }
    const Eigen::Matrix3cd u = expm(full_hamiltonian3(p, probe), probe.t);
    return u(2, 2);
}

double na_effective(const TwoBandParams& p, const ProbeConfig& probe) {
    return probe.n0 * std::norm(probe_amplitude(p, probe));
}

MasterPropagator::MasterPropagator(const CMat& h, std::span<const CMat> lindblads, double dt)
    : dim_(h.rows()), dt_(dt) {
    check_operators(h, lindblads);
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw InvalidStep("master equation: dt must be positive");
    }
    if (dt > max_stable_dt(h, lindblads) * (1.0 + 1e-12)) {
        throw InvalidStep("master equation: dt * max(Gamma, |H|) exceeds the stability bound");
    }
    const Eigen::Index n = dim_;
    const CMat heff = h - cplx(0.0, 1.0) * decay_operator(h, lindblads);
    const CMat id = CMat::Identity(n, n);
    // Column-major vec: vec(A X B) = (B^T kron A) vec(X).
    auto kron = [n](const CMat& a, const CMat& b) {
        CMat out(n * n, n * n);
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) {
                out.block(i * n, j * n, n, n) = a(i, j) * b;
            }
        }
        return out;
    };
    liouvillian_ = cplx(0.0, -1.0) * kron(id, heff) + cplx(0.0, 1.0) * kron(heff.conjugate(), id);
    for (const auto& l : lindblads) {
        liouvillian_ += 2.0 * kron(l.conjugate(), l);
    }
    // One RK4 step of a linear autonomous system: sum_{j<=4} (dt L)^j / j!.
    const CMat x = dt * liouvillian_;
    const CMat idn = CMat::Identity(n * n, n * n);
    step_ = idn + x * (idn + x * (idn / 2.0 + x * (idn / 6.0 + x / 24.0)));
}

double MasterPropagator::max_stable_dt(const CMat& h, std::span<const CMat> lindblads) {
    check_operators(h, lindblads);
    const double rate = std::max(inf_norm(decay_operator(h, lindblads)), inf_norm(h));
    return rate > 0.0 ? kMasterStabilityBound / rate : std::numeric_limits<double>::infinity();
}

CMat MasterPropagator::rhs(const CMat& rho) const {
    return vec_to_mat(liouvillian_ * mat_to_vec(rho), dim_);
}

CMat MasterPropagator::advance(const CMat& rho, long long steps) const {
    if (steps < 0) {
        throw InvalidInput("master equation: negative step count");
    }
    CVec v = mat_to_vec(rho);
    CMat power = step_;
    while (steps > 0) {
        if (steps & 1) {
            v = power * v;
        }
        steps >>= 1;
        if (steps > 0) {
            power = (power * power).eval();
        }
    }
    return vec_to_mat(v, dim_);
}

namespace {

long long step_count(double span, double dt) {
    if (span <= 0.0) return 0;
    return static_cast<long long>(std::ceil(span / dt - 1e-9));
}

DensityMatrix checked(const CMat& rho, double trace0) {
    const double tr = rho.trace().real();
    if (!rho.allFinite() || std::abs(tr - trace0) > kTraceDriftFail) {
        throw IntegratorFailure("master equation: trace drift beyond tolerance");
    }
    return DensityMatrix(rho);
}

}  // namespace

std::vector<DensityMatrix> integrate_master_trajectory(const DensityMatrix& rho0, const CMat& h,
                                                       std::span<const CMat> lindblads,
                                                       std::span<const double> times, double dt) {
    if (rho0.dim() != h.rows()) {
        throw InvalidInput("master equation: state dimension does not match the Hamiltonian");
    }
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw InvalidStep("master equation: dt must be positive");
    }
    if (dt > MasterPropagator::max_stable_dt(h, lindblads) * (1.0 + 1e-12)) {
        throw InvalidStep("master equation: dt * max(Gamma, |H|) exceeds the stability bound");
    }
    std::vector<DensityMatrix> out;
    out.reserve(times.size());
    double prev = 0.0;
    CMat rho = rho0.matrix();
    std::optional<MasterPropagator> prop;
    double prop_dt = -1.0;
    for (double t : times) {
        if (!(t >= prev) || !std::isfinite(t)) {
            throw InvalidInput("master equation: times must be ascending and non-negative");
        }
        const long long n = step_count(t - prev, dt);
        if (n > 0) {
            const double h_step = (t - prev) / static_cast<double>(n);
            if (h_step != prop_dt) {
                prop.emplace(h, lindblads, h_step);
                prop_dt = h_step;
            }
            rho = prop->advance(rho, n);
        }
        out.push_back(checked(rho, rho0.trace()));
        prev = t;
    }
    return out;
}

DensityMatrix integrate_master(const DensityMatrix& rho0, const CMat& h,
                               std::span<const CMat> lindblads, double t, double dt) {
    const double times[1] = {t};
    return integrate_master_trajectory(rho0, h, lindblads, times, dt).front();
}

double na_master(const SixLevelConfig& cfg, const ProbeConfig& probe, double dt) {
    validate(probe);
    SixLevelConfig c = cfg;
    c.omega = probe.omega;
    c.delta = probe.delta;
    const SixLevelSystem sys = six_level_system(c);
    const DensityMatrix rho = integrate_master(DensityMatrix::pure(6, six::ka), sys.h,
                                               sys.lindblads, probe.t, dt);
    return probe.n0 * rho.population(six::ka);
}

double validate_elimination(const SixLevelConfig& cfg, std::span<const ProbeConfig> sweep,
                            double dt) {
    const TwoBandParams eff = effective_two_band(cfg);
    double worst = 0.0;
    for (const auto& probe : sweep) {
        const double diff = std::abs(na_master(cfg, probe, dt) - na_effective(eff, probe));
        worst = std::max(worst, diff);
    }
    return worst;
}

}  // namespace nhspec
