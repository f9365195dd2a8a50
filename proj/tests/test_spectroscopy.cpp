#include <doctest.h>

#include <algorithm>

#include "nhspec/errors.hpp"
#include "nhspec/spectroscopy.hpp"
#include "oracles.hpp"

using namespace nhspec;

namespace {

const ProbeConfig kProbe{0.019, 0.0, 200.0, 1.0};

TwoBandParams fig2_at_k() { return mrm_at_k(oracle::fig2_nontrivial(), oracle::kFig2K); }

}  // namespace

TEST_CASE("grids") {
    const auto g = uniform_grid(-0.6, 0.6, 61);
    CHECK(g.size() == 61);
    CHECK(g.front() == -0.6);
    CHECK(g.back() == 0.6);
    CHECK(g[30] == doctest::Approx(0.0));
    const auto k = uniform_k_grid(21);
    CHECK(k.back() == doctest::Approx(2.0 * std::numbers::pi));
    CHECK(uniform_k_grid(1).size() == 1);
    CHECK_THROWS_AS(uniform_grid(0.0, 1.0, 0), InvalidInput);
}

TEST_CASE("noiseless line regression fixture") {
    // Reference values from an independent scipy expm evaluation.
    const auto deltas = uniform_grid(-0.6, 0.6, 61);
    const SpectralLine line = line_noiseless(fig2_at_k(), kProbe, deltas);
    CHECK(line.na_mean[19] == doctest::Approx(0.646237825904).epsilon(1e-9));
    CHECK(line.na_mean[55] == doctest::Approx(0.915265531182).epsilon(1e-9));
    CHECK(line.na_mean[0] == doctest::Approx(0.994443836184).epsilon(1e-9));
    CHECK(line.na_mean[20] == doctest::Approx(0.682276604403).epsilon(1e-9));
    CHECK(line.na_mean[30] == doctest::Approx(0.947556246954).epsilon(1e-9));
    CHECK(line.na_mean[40] == doctest::Approx(0.963466353448).epsilon(1e-9));
    CHECK(line.na_mean[60] == doctest::Approx(0.944610566085).epsilon(1e-9));
    CHECK(std::min_element(line.na_mean.begin(), line.na_mean.end()) - line.na_mean.begin() == 19);
    CHECK(std::all_of(line.na_std.begin(), line.na_std.end(), [](double s) { return s == 0.0; }));
}

TEST_CASE("dips sit half a width from minus the real energies") {
    const TwoBandParams p = fig2_at_k();
    const auto [e1, e2] = closed_form_energies(p);
    const auto deltas = uniform_grid(-0.6, 0.6, 1201);
    const SpectralLine line = line_noiseless(p, kProbe, deltas);
    for (cplx e : {e1, e2}) {
        // Local minimum nearest to -Re E.
        std::size_t best = 0;
        double best_dist = 1e9;
        for (std::size_t i = 1; i + 1 < line.size(); ++i) {
            if (line.na_mean[i] < line.na_mean[i - 1] && line.na_mean[i] < line.na_mean[i + 1]) {
                const double dist = std::abs(deltas[i] + e.real());
                if (dist < best_dist) {
                    best_dist = dist;
                    best = i;
                }
            }
        }
        CHECK(best > 0);
        CHECK(best_dist < 0.5 * std::abs(e.imag()));
    }
}

TEST_CASE("Hermitian model puts dips at the real energies") {
    const TwoBandParams p{0.2, cplx(-0.1, 0.0), 0.0};
    const auto [e1, e2] = closed_form_energies(p);
    const auto deltas = uniform_grid(-0.6, 0.6, 241);
    const SpectralLine line = line_noiseless(p, {0.019, 0.0, 80.0, 1.0}, deltas);
    const double step = deltas[1] - deltas[0];
    for (cplx e : {e1, e2}) {
        const auto i = static_cast<std::size_t>(std::lround((-e.real() + 0.6) / step));
        const auto lo = line.na_mean.begin() + static_cast<long>(i) - 2;
        const auto it = std::min_element(lo, lo + 5);
        CHECK(std::abs(deltas[static_cast<std::size_t>(it - line.na_mean.begin())] + e.real()) <= step);
    }
}

TEST_CASE("flat line without probe coupling") {
    const auto deltas = uniform_grid(-0.6, 0.6, 31);
    const SpectralLine line = line_noiseless(fig2_at_k(), {0.0, 0.0, 200.0, 0.93}, deltas);
    for (double v : line.na_mean) CHECK(v == doctest::Approx(0.93));
}

TEST_CASE("far-detuned baseline") {
    for (const TwoBandParams& p : {fig2_at_k(), mrm_at_k(oracle::fig3_unknot(), 2.0),
                                   lk_at_k(oracle::fig3_hopf(), 2.6)}) {
        const double radius = std::max(std::abs(closed_form_energies(p).first),
                                       std::abs(closed_form_energies(p).second));
        const double edge = 25.0 * 0.019 + radius;
        const std::vector<double> deltas{-edge - 1.0, -edge, edge, edge + 1.0};
        for (double v : line_noiseless(p, kProbe, deltas).na_mean) CHECK(v > 0.95);
    }
}

TEST_CASE("many shots converge to the noiseless line") {
    const auto deltas = uniform_grid(-0.6, 0.6, 61);
    NoiseModel nm;
    nm.shots = 1000000;
    nm.reps = 3;
    nm.gamma_fluct = 0.0;
    nm.seed = 99;
    const SpectralLine noisy = line_noisy(fig2_at_k(), kProbe, deltas, nm);
    const SpectralLine clean = line_noiseless(fig2_at_k(), kProbe, deltas);
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        CHECK(std::abs(noisy.na_mean[i] - clean.na_mean[i]) < 3e-3);
    }
}

TEST_CASE("noisy lines are reproducible and bounded") {
    const auto deltas = uniform_grid(-0.6, 0.6, 61);
    NoiseModel nm;
    nm.seed = 12345;
    const SpectralLine a = line_noisy(fig2_at_k(), kProbe, deltas, nm);
    const SpectralLine b = line_noisy(fig2_at_k(), kProbe, deltas, nm);
    CHECK(a.na_mean == b.na_mean);
    CHECK(a.na_std == b.na_std);
    CHECK(a.repetitions.size() == 20);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a.na_mean[i] >= 0.0);
        CHECK(a.na_mean[i] <= 1.0);
        CHECK(a.na_std[i] >= 0.0);
    }
    nm.seed = 12346;
    CHECK(line_noisy(fig2_at_k(), kProbe, deltas, nm).na_mean != a.na_mean);

    const SpectralLine r0 = a.repetition(0);
    CHECK(r0.na_mean == a.repetitions[0]);
    CHECK_THROWS_AS(a.repetition(20), InvalidInput);
}

TEST_CASE("loss fluctuation brackets the nominal dip") {
    const auto deltas = uniform_grid(-0.6, 0.6, 61);
    const TwoBandParams p = fig2_at_k();
    auto min_of = [&](double scale) {
        TwoBandParams q = p;
        q.d = cplx(q.d.real(), q.d.imag() * scale);
        const auto line = line_noiseless(q, kProbe, deltas);
        return *std::min_element(line.na_mean.begin(), line.na_mean.end());
    };
    // More loss makes the dip shallower; the +-20% band straddles the nominal one.
    CHECK(min_of(0.8) < min_of(1.0));
    CHECK(min_of(1.0) < min_of(1.2));
}

TEST_CASE("noise model validation") {
    NoiseModel nm;
    nm.shots = 0;
    CHECK_THROWS_AS(nm.check(), InvalidInput);
    nm = NoiseModel{};
    nm.gamma_fluct = 1.0;
    CHECK_THROWS_AS(nm.check(), InvalidInput);
    nm = NoiseModel{};
    nm.dephasing_t2 = -1.0;
    CHECK_THROWS_AS(nm.check(), InvalidInput);
}

TEST_CASE("dephased lines come from the master equation") {
    const auto deltas = uniform_grid(-0.3, -0.1, 7);
    NoiseModel nm;
    nm.shots = 1000000;
    nm.reps = 2;
    nm.gamma_fluct = 0.0;
    nm.dephasing_t2 = 200.0;
    const SpectralLine deph = line_noisy(fig2_at_k(), kProbe, deltas, nm);
    nm.dephasing_t2.reset();
    const SpectralLine plain = line_noisy(fig2_at_k(), kProbe, deltas, nm);
    // Dephasing fills in the dip.
    CHECK(*std::min_element(deph.na_mean.begin(), deph.na_mean.end()) >
          *std::min_element(plain.na_mean.begin(), plain.na_mean.end()) + 0.01);
}

TEST_CASE("k sweeps derive per-point seeds") {
    const auto deltas = uniform_grid(-0.6, 0.6, 21);
    const auto ks = uniform_k_grid(3);
    NoiseModel nm;
    nm.reps = 5;
    nm.seed = 77;
    const auto lines = sweep_k(oracle::fig2_nontrivial(), ks, kProbe, deltas, nm);
    REQUIRE(lines.size() == 3);
    CHECK(lines[1].meta.k == doctest::Approx(ks[1]));
    CHECK(lines[1].meta.seed == derive_seed(77, 1));
    CHECK(derive_seed(77, 0) != derive_seed(77, 1));
    // The same point computed alone gives the same line.
    NoiseModel single = nm;
    single.seed = derive_seed(77, 2);
    const auto alone = line_noisy(mrm_at_k(oracle::fig2_nontrivial(), ks[2]), kProbe, deltas, single);
    CHECK(alone.na_mean == lines[2].na_mean);
    CHECK(sweep_k(oracle::fig2_nontrivial(), std::vector<double>{1.0}, kProbe, deltas, std::nullopt).size() == 1);
}
