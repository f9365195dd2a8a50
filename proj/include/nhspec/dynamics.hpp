#pragma once

#include <functional>
#include <span>
#include <vector>

#include "nhspec/models.hpp"

namespace nhspec {

/// Hermitian, trace-bounded density matrix. Validated on construction.
class DensityMatrix {
public:
    explicit DensityMatrix(CMat rho);

    static DensityMatrix pure(Eigen::Index dim, Eigen::Index level);

    const CMat& matrix() const { return rho_; }
    Eigen::Index dim() const { return rho_.rows(); }
    double trace() const { return rho_.trace().real(); }
    double population(Eigen::Index level) const { return rho_(level, level).real(); }
    double purity() const { return (rho_ * rho_).trace().real(); }

private:
    CMat rho_;
};

/// N_a = N0 |<a| exp(-i H_f t) |a>|^2 for the three-level probe problem.
double na_effective(const TwoBandParams& p, const ProbeConfig& probe);

/// <a| exp(-i H_f t) |a>.
cplx probe_amplitude(const TwoBandParams& p, const ProbeConfig& probe);

inline constexpr double kMasterStabilityBound = 0.1;
inline constexpr double kDefaultMasterDt = 5e-4;

/// Classical fourth-order Runge-Kutta on
///   drho/dt = -i (Heff rho - rho Heff^dag) + sum_mu 2 L_mu rho L_mu^dag,
///   Heff = H - i sum_mu L_mu^dag L_mu.
/// The right-hand side is linear and time independent, so one step is a fixed
/// superoperator; repeated steps are applied by binary powering of that map.
class MasterPropagator {
public:
    MasterPropagator(const CMat& h, std::span<const CMat> lindblads, double dt);

    /// Largest step for which the stability guard passes.
    static double max_stable_dt(const CMat& h, std::span<const CMat> lindblads);

    double dt() const { return dt_; }
    Eigen::Index dim() const { return dim_; }

    /// Right-hand side of the master equation evaluated on rho.
    CMat rhs(const CMat& rho) const;

    /// Applies `steps` RK4 steps.
    CMat advance(const CMat& rho, long long steps) const;

private:
    Eigen::Index dim_;
    double dt_;
    CMat liouvillian_;
    CMat step_;
};

/// Integrates to time t with step at most dt (t / ceil(t / dt) exactly).
DensityMatrix integrate_master(const DensityMatrix& rho0, const CMat& h,
                               std::span<const CMat> lindblads, double t, double dt);

/// Integrates and reports rho at each time in `times` (ascending, >= 0).
std::vector<DensityMatrix> integrate_master_trajectory(const DensityMatrix& rho0, const CMat& h,
                                                       std::span<const CMat> lindblads,
                                                       std::span<const double> times, double dt);

/// N0 rho_aa(t) of the six-level model started in |a><a|; probe overrides cfg's omega and delta.
double na_master(const SixLevelConfig& cfg, const ProbeConfig& probe, double dt = kDefaultMasterDt);

/// max |na_master - na_effective| over the sweep, with the effective loss
/// gamma = JL^2 / (2 Gamma_e).
double validate_elimination(const SixLevelConfig& cfg, std::span<const ProbeConfig> sweep,
                            double dt = kDefaultMasterDt);

}  // namespace nhspec
