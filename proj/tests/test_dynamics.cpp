#include <doctest.h>

#include <random>
#include <vector>

#include "nhspec/dynamics.hpp"
#include "nhspec/errors.hpp"
#include "oracles.hpp"

using namespace nhspec;

namespace {

// Step-by-step RK4 on the master equation, written out directly.
CMat rk4_master(CMat rho, const CMat& h, const std::vector<CMat>& ls, double t, double dt) {
    const int n = static_cast<int>(std::ceil(t / dt - 1e-9));
    const double step = t / n;
    CMat heff = h;
    for (const auto& l : ls) heff -= cplx(0.0, 1.0) * l.adjoint() * l;
    auto f = [&](const CMat& r) {
        CMat out = cplx(0.0, -1.0) * (heff * r - r * heff.adjoint());
        for (const auto& l : ls) out += 2.0 * l * r * l.adjoint();
        return out;
    };
    for (int i = 0; i < n; ++i) {
        const CMat k1 = f(rho);
        const CMat k2 = f(rho + 0.5 * step * k1);
        const CMat k3 = f(rho + 0.5 * step * k2);
        const CMat k4 = f(rho + step * k3);
        rho += step / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return rho;
}

SixLevelConfig figs1_config(double delta = 0.0) {
    const auto p = mrm_at_k(oracle::fig2_nontrivial(), oracle::kFig2K);
    SixLevelConfig cfg;
    const double k = oracle::kFig2K;
    cfg.jx = 0.315 + 0.098 * std::cos(k);
    cfg.jy = 0.098 * std::sin(k);
    cfg.jz = -0.5 * p.d.real();
    cfg.omega = 0.019;
    cfg.delta = delta;
    cfg.jl = 4.76;
    cfg.gamma_e = 123.0;
    cfg.branching = {41.0, 41.0, 41.0};
    return cfg;
}

}  // namespace

TEST_CASE("density matrix validation") {
    CHECK_NOTHROW(DensityMatrix::pure(6, 5));
    CMat bad = CMat::Zero(2, 2);
    bad(0, 1) = 0.5;
    CHECK_THROWS_AS(DensityMatrix{bad}, InvalidInput);
    CMat neg = CMat::Zero(2, 2);
    neg(0, 0) = 1.5;
    neg(1, 1) = -0.5;
    CHECK_THROWS_AS(DensityMatrix{neg}, InvalidInput);
    CHECK(DensityMatrix::pure(3, 1).purity() == doctest::Approx(1.0));
}

TEST_CASE("decay follows the factor-two convention") {
    CMat h = CMat::Zero(2, 2);
    const double gamma = 0.7;
    CMat l = CMat::Zero(2, 2);
    l(0, 1) = std::sqrt(gamma);
    const std::vector<CMat> ls{l};
    const DensityMatrix rho = integrate_master(DensityMatrix::pure(2, 1), h, ls, 1.3, 1e-3);
    CHECK(rho.population(1) == doctest::Approx(std::exp(-2.0 * gamma * 1.3)).epsilon(1e-10));
    CHECK(rho.trace() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("closed Hermitian evolution conserves purity") {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> g(0.0, 1.0);
    CMat a(3, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) a(i, j) = cplx(g(rng), g(rng));
    const CMat h = 0.5 * (a + a.adjoint());
    const DensityMatrix rho = integrate_master(DensityMatrix::pure(3, 0), h, {}, 20.0, 1e-3);
    CHECK(std::abs(rho.purity() - 1.0) < 1e-8);
    const CMat u = expm(h, 20.0);
    CHECK(std::abs(rho.population(0) - std::norm(u(0, 0))) < 1e-9);
}

TEST_CASE("binary powering matches step-by-step RK4") {
    const auto sys = six_level_system(figs1_config(0.1));
    CMat rho0 = CMat::Zero(6, 6);
    rho0(six::ka, six::ka) = 1.0;
    const double t = 3.0, dt = 5e-4;
    const CMat ref = rk4_master(rho0, sys.h, sys.lindblads, t, dt);
    const DensityMatrix got = integrate_master(DensityMatrix(rho0), sys.h, sys.lindblads, t, dt);
    CHECK((got.matrix() - ref).norm() < 1e-12);
}

TEST_CASE("stability bound and time checks") {
    const auto sys = six_level_system(figs1_config());
    CHECK(MasterPropagator::max_stable_dt(sys.h, sys.lindblads) * 123.0 == doctest::Approx(0.1));
    CHECK_THROWS_AS(integrate_master(DensityMatrix::pure(6, six::ka), sys.h, sys.lindblads, 1.0, 1e-3),
                    InvalidStep);
    CHECK_THROWS_AS(integrate_master(DensityMatrix::pure(6, six::ka), sys.h, sys.lindblads, 1.0, 0.0),
                    InvalidStep);
    CHECK_THROWS_AS(integrate_master(DensityMatrix::pure(6, six::ka), sys.h, sys.lindblads, -1.0, 1e-4),
                    InvalidInput);
}

TEST_CASE("halving the step changes the six-level result negligibly") {
    for (double delta : {-0.22, 0.0, 0.5}) {
        const SixLevelConfig cfg = figs1_config();
        const ProbeConfig probe{0.019, delta, 200.0, 1.0};
        const double a = na_master(cfg, probe, 5e-4);
        const double b = na_master(cfg, probe, 2.5e-4);
        CHECK(std::abs(a - b) < 1e-6);
    }
}

TEST_CASE("trajectory conserves trace and fills the sinks monotonically") {
    const auto sys = six_level_system(figs1_config(-0.22));
    std::vector<double> times;
    for (int i = 0; i <= 40; ++i) times.push_back(5.0 * i);
    const auto traj = integrate_master_trajectory(DensityMatrix::pure(6, six::ka), sys.h, sys.lindblads,
                                                  times, kDefaultMasterDt);
    REQUIRE(traj.size() == times.size());
    double sink = -1.0;
    for (const auto& rho : traj) {
        CHECK(std::abs(rho.trace() - 1.0) < 1e-6);
        const double s = rho.population(six::k2) + rho.population(six::k3);
        CHECK(s >= sink - 1e-12);
        sink = s;
    }
    CHECK(sink > 0.0);
}

TEST_CASE("six-level limits") {
    SixLevelConfig cfg = figs1_config();
    cfg.jl = 0.0;
    const ProbeConfig off{0.0, 0.1, 200.0, 0.9};
    CHECK(na_master(cfg, off) == doctest::Approx(0.9).epsilon(1e-10));

    const ProbeConfig far{0.019, 5.0, 200.0, 1.0};
    CHECK(na_master(figs1_config(), far) > 0.95);
}

TEST_CASE("elimination error is small and shrinks with Gamma_e") {
    std::vector<ProbeConfig> sweep;
    for (int i = 0; i <= 12; ++i) sweep.push_back({0.019, -0.6 + 0.1 * i, 200.0, 1.0});
    const SixLevelConfig cfg = figs1_config();
    CHECK(validate_elimination(cfg, sweep) < 0.01);

    SixLevelConfig zero = cfg;
    zero.jl = 0.0;
    CHECK(validate_elimination(zero, sweep) < 1e-6);

    const double gamma = effective_gamma(cfg.jl, cfg.gamma_e);
    double prev = 1.0;
    for (double f : {1.0, 2.0, 4.0}) {
        SixLevelConfig c = cfg;
        c.gamma_e *= f;
        c.jl = std::sqrt(2.0 * c.gamma_e * gamma);
        for (auto& b : c.branching) b *= f;
        const double dev = validate_elimination(c, sweep, kDefaultMasterDt / f);
        CHECK(dev < prev);
        prev = dev;
    }
}

TEST_CASE("effective probe signal") {
    const auto p = mrm_at_k(oracle::fig2_nontrivial(), oracle::kFig2K);
    CHECK(na_effective(p, {0.0, 0.1, 200.0, 0.8}) == doctest::Approx(0.8));

    // Free Rabi flopping between |0> and |a> when the system block is empty.
    const ProbeConfig rabi{0.2, 0.0, 7.0, 1.0};
    CHECK(na_effective({0.0, 0.0, 0.0}, rabi) == doctest::Approx(std::pow(std::cos(0.1 * 7.0), 2)));

    // A global energy shift only changes the phase of the amplitude.
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 20; ++i) {
        const double eps = u(rng);
        ProbeConfig probe{0.019, 0.1 * u(rng), 200.0, 1.0};
        const CMat hf = full_hamiltonian(p, probe);
        const CMat shifted = hf + eps * CMat::Identity(3, 3);
        CHECK(std::norm(expm(shifted, probe.t)(2, 2)) ==
              doctest::Approx(na_effective(p, probe)).epsilon(1e-10));
    }
}

TEST_CASE("effective norm never grows for lossy models") {
    const auto p = mrm_at_k(oracle::fig3_unknot(), 1.0);
    const ProbeConfig probe{0.019, -0.1, 0.0, 1.0};
    const CMat hf = full_hamiltonian(p, probe);
    CVec psi = CVec::Zero(3);
    psi[2] = 1.0;
    double prev = 1.0;
    for (double t = 10.0; t <= 200.0; t += 10.0) {
        const double n = evolve(hf, psi, t).norm();
        CHECK(n <= prev + 1e-12);
        prev = n;
    }
}
