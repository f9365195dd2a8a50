#include <doctest.h>

#include <sstream>

#include "nhspec/config.hpp"
#include "nhspec/errors.hpp"
#include "nhspec/io.hpp"
#include "nhspec/pipeline.hpp"

using namespace nhspec;
using nlohmann::json;

TEST_CASE("every preset survives a serialization round trip") {
    for (const auto& name : preset_names()) {
        const json once = config_to_json(preset(name));
        const json twice = config_to_json(config_from_json(once));
        CHECK(once == twice);
        CHECK(once.dump() == json::parse(once.dump()).dump());
    }
}

TEST_CASE("preset contents") {
    const RunConfig nt = preset("fig2_nontrivial");
    CHECK(std::get<MrmParams>(nt.model).J3 == 0.122);
    CHECK(nt.probe.t == 200.0);
    CHECK(nt.probe.omega == 0.019);
    CHECK(nt.noise->shots == 1000);
    CHECK(nt.noise->reps == 20);
    CHECK(nt.noise->gamma_fluct == 0.2);
    CHECK(nt.delta_grid.points == 61);
    CHECK(preset("figS4_short_time").probe.t == 80.0);
    CHECK(std::holds_alternative<LkParams>(preset("fig3_hopf").model));
    CHECK_FALSE(preset("figS1_validate").noise.has_value());
    CHECK(preset("figS1_validate").six_level.has_value());
    CHECK_THROWS_AS(preset("nope"), InvalidInput);
}

TEST_CASE("config validation") {
    json j = config_to_json(preset("fig2_nontrivial"));
    CHECK_NOTHROW(config_from_json(j));

    json extra = j;
    extra["colour"] = "red";
    CHECK_THROWS_AS(config_from_json(extra), InvalidInput);

    json nested = j;
    nested["probe"]["phase"] = 0.0;
    CHECK_THROWS_AS(config_from_json(nested), InvalidInput);

    json no_units = j;
    no_units.erase("units");
    CHECK_THROWS_AS(config_from_json(no_units), InvalidInput);

    json mhz = j;
    mhz["units"] = "MHz";
    CHECK_THROWS_AS(config_from_json(mhz), InvalidInput);

    json bad_model = j;
    bad_model["model"]["type"] = "ssh";
    CHECK_THROWS_AS(config_from_json(bad_model), InvalidInput);

    json bad_noise = j;
    bad_noise["noise"]["gamma_fluct"] = 1.5;
    CHECK_THROWS_AS(config_from_json(bad_noise), InvalidInput);

    json bad_grid = j;
    bad_grid["delta_grid"]["points"] = 3;
    CHECK_THROWS_AS(config_from_json(bad_grid), InvalidInput);

    json minimal = {{"units", "rad_per_us"},
                    {"model", {{"type", "generic"}, {"c", 0.2}, {"d_re", -0.1}, {"d_im", -0.2}}},
                    {"probe", {{"omega", 0.019}, {"t", 200.0}}}};
    const RunConfig rc = config_from_json(minimal);
    CHECK_FALSE(rc.noise.has_value());
    CHECK(rc.probe.n0 == 1.0);
    CHECK(rc.k_points == 21);
}

TEST_CASE("spectral-line CSV round trip is exact") {
    SpectralLine line;
    line.deltas = {-0.1, 0.0, 0.1 / 3.0};
    line.na_mean = {0.9, 1.0 / 3.0, 0.123456789012345678};
    line.na_std = {0.0, 1e-17, 0.5};
    std::ostringstream os;
    write_line_csv(os, line);
    const std::string text = os.str();
    CHECK(text.rfind("delta,na_mean,na_std\n", 0) == 0);
    CHECK(text.find('\r') == std::string::npos);
    std::istringstream is(text);
    const SpectralLine back = read_line_csv(is);
    CHECK(back.deltas == line.deltas);
    CHECK(back.na_mean == line.na_mean);
    CHECK(back.na_std == line.na_std);

    std::istringstream wrong("delta,na\n0,1\n");
    CHECK_THROWS_AS(read_line_csv(wrong), InvalidInput);
    std::istringstream junk("delta,na_mean,na_std\n0,abc,0\n");
    CHECK_THROWS_AS(read_line_csv(junk), InvalidInput);
}

TEST_CASE("energies CSV round trip is exact") {
    std::vector<EnergyRow> rows(2);
    rows[0].k = 0.0;
    rows[0].e1 = {cplx(0.3, -0.1), 0.01, 0.02};
    rows[0].e2 = {cplx(-0.4, -0.2), 0.03, 0.04};
    rows[1].k = 6.283185307179586;
    rows[1].e1.e = cplx(1.0 / 7.0, -2.0 / 9.0);
    rows[1].converged2 = false;
    std::ostringstream os;
    write_energies_csv(os, rows);
    CHECK(os.str().rfind(
              "k,re_e1,im_e1,re_e2,im_e2,err_re_e1,err_im_e1,err_re_e2,err_im_e2,converged1,converged2\n", 0) == 0);
    std::istringstream is(os.str());
    const auto back = read_energies_csv(is);
    REQUIRE(back.size() == 2);
    CHECK(back[1].k == rows[1].k);
    CHECK(back[1].e1.e == rows[1].e1.e);
    CHECK(back[0].e2.err_im == 0.04);
    CHECK(back[1].converged1);
    CHECK_FALSE(back[1].converged2);
}

TEST_CASE("topology refuses unconverged rows") {
    auto rows = closed_form_rows(preset("fig2_nontrivial"));
    CHECK(topology_from_rows(rows).classification == Classification::Unlink);
    rows[3].converged1 = false;
    CHECK_THROWS_AS(topology_from_rows(rows), InvalidInput);
}

TEST_CASE("topology report JSON") {
    const auto rep = topology_from_rows(closed_form_rows(preset("fig3_unknot")));
    const json j = topology_json(rep);
    CHECK(j["classification"] == "Unknot");
    CHECK(j["W"] == "1/2");
    CHECK(j["period"] == 2);
    CHECK(j["nu"] == 1);
    CHECK(j["permutation"] == "swap");
    CHECK(j["w"][0].is_null());
}

TEST_CASE("grid refinement arithmetic") {
    CHECK(refined_points(21, 1) == 21);
    CHECK(refined_points(21, 2) == 41);
    CHECK(refined_points(41, 3) == 121);
    CHECK_THROWS_AS(refined_points(21, 0), InvalidInput);
}
