#include "nhspec/config.hpp"

#include <fstream>
#include <initializer_list>
#include <numbers>
#include <set>

namespace nhspec {

using nlohmann::json;

namespace {

void only_keys(const json& obj, const char* where, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) {
        throw InvalidInput(std::string("config: '") + where + "' must be an object");
    }
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, _] : obj.items()) {
        if (!ok.contains(key)) {
            throw InvalidInput(std::string("config: unknown key '") + key + "' in " + where);
        }
    }
}

double num(const json& obj, const char* key, const char* where) {
    if (!obj.contains(key)) {
        throw InvalidInput(std::string("config: missing '") + key + "' in " + where);
    }
    const json& v = obj.at(key);
    if (!v.is_number()) {
        throw InvalidInput(std::string("config: '") + key + "' in " + where + " must be a number");
    }
    return v.get<double>();
}

double num_or(const json& obj, const char* key, const char* where, double fallback) {
    return obj.contains(key) ? num(obj, key, where) : fallback;
}

int int_or(const json& obj, const char* key, const char* where, int fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number_integer()) {
        throw InvalidInput(std::string("config: '") + key + "' in " + where + " must be an integer");
    }
    return v.get<int>();
}

ModelDescriptor parse_model(const json& m) {
    if (!m.is_object() || !m.contains("type") || !m.at("type").is_string()) {
        throw InvalidInput("config: model needs a string 'type'");
    }
    const std::string type = m.at("type").get<std::string>();
    if (type == "mrm") {
        only_keys(m, "model", {"type", "J1", "J2", "J3", "mz", "gamma"});
        MrmParams p{num(m, "J1", "model"), num(m, "J2", "model"), num(m, "J3", "model"),
                    num(m, "mz", "model"), num(m, "gamma", "model")};
        validate(p);
        return p;
    }
    if (type == "lk") {
        only_keys(m, "model", {"type", "mx", "g1", "g2", "g3", "gamma0"});
        LkParams p{num(m, "mx", "model"), num(m, "g1", "model"), num(m, "g2", "model"),
                   num(m, "g3", "model"), num(m, "gamma0", "model")};
        validate(p);
        return p;
    }
    if (type == "generic") {
        only_keys(m, "model", {"type", "c", "d_re", "d_im"});
        const double c = num(m, "c", "model");
        if (c < 0.0) throw InvalidInput("config: generic model needs c >= 0");
        return GenericParams{c, cplx(num(m, "d_re", "model"), num(m, "d_im", "model"))};
    }
    throw InvalidInput("config: unknown model type '" + type + "'");
}

json model_json(const ModelDescriptor& m) {
    return std::visit(
        [](const auto& p) -> json {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, MrmParams>) {
                return {{"type", "mrm"}, {"J1", p.J1}, {"J2", p.J2}, {"J3", p.J3},
                        {"mz", p.mz}, {"gamma", p.gamma}};
            } else if constexpr (std::is_same_v<T, LkParams>) {
                return {{"type", "lk"}, {"mx", p.mx}, {"g1", p.g1}, {"g2", p.g2},
                        {"g3", p.g3}, {"gamma0", p.gamma0}};
            } else {
                return {{"type", "generic"}, {"c", p.c}, {"d_re", p.d.real()}, {"d_im", p.d.imag()}};
            }
        },
        m);
}

}  // namespace

std::optional<NoiseModel> RunConfig::noise_model() const {
    if (!noise) return std::nullopt;
    NoiseModel nm;
    nm.shots = noise->shots;
    nm.reps = noise->reps;
    nm.gamma_fluct = noise->gamma_fluct;
    nm.dephasing_t2 = noise->dephasing_t2;
    nm.seed = seed;
    if (six_level) {
        nm.gamma_e = six_level->gamma_e;
        nm.master_dt = six_level->dt;
    }
    return nm;
}

SixLevelConfig RunConfig::six_level_at(double kk) const {
    const SixLevelSettings s = six_level.value_or(SixLevelSettings{});
    SixLevelConfig cfg;
    if (const auto* mrm = std::get_if<MrmParams>(&model)) {
        cfg.jx = mrm->J1 + mrm->J2 * std::cos(kk);
        cfg.jy = mrm->J2 * std::sin(kk);
        cfg.jz = mrm->J3 * std::sin(kk) + mrm->mz;
        cfg.jl = s.jl;
        cfg.gamma_e = s.gamma_e;
        cfg.branching = s.branching;
    } else {
        // Loss varies with k here, so the laser coupling follows Im d.
        cfg = six_level_for(model_at_k(model, kk), s.gamma_e);
    }
    cfg.omega = probe.omega;
    return cfg;
}

RunConfig config_from_json(const json& j) {
    only_keys(j, "config", {"units", "model", "probe", "k", "delta_grid", "k_points", "noise", "eb",
                            "six_level", "fit", "output_dir", "seed"});
    if (!j.contains("units") || !j.at("units").is_string() || j.at("units").get<std::string>() != kUnitsTag) {
        throw InvalidInput(std::string("config: 'units' must be \"") + kUnitsTag + "\"");
    }
    RunConfig c;
    if (!j.contains("model")) throw InvalidInput("config: missing 'model'");
    c.model = parse_model(j.at("model"));

    if (!j.contains("probe")) throw InvalidInput("config: missing 'probe'");
    const json& pr = j.at("probe");
    only_keys(pr, "probe", {"omega", "t", "n0"});
    c.probe.omega = num(pr, "omega", "probe");
    c.probe.t = num(pr, "t", "probe");
    c.probe.n0 = num_or(pr, "n0", "probe", 1.0);
    validate(c.probe);

    c.k = num_or(j, "k", "config", 2.0 * std::numbers::pi / 5.0);
    if (c.k < 0.0 || c.k > 2.0 * std::numbers::pi) throw InvalidInput("config: k must lie in [0, 2pi]");

    if (j.contains("delta_grid")) {
        const json& g = j.at("delta_grid");
        only_keys(g, "delta_grid", {"min", "max", "points"});
        c.delta_grid.min = num_or(g, "min", "delta_grid", c.delta_grid.min);
        c.delta_grid.max = num_or(g, "max", "delta_grid", c.delta_grid.max);
        c.delta_grid.points = int_or(g, "points", "delta_grid", c.delta_grid.points);
        if (c.delta_grid.points < 7 || !(c.delta_grid.max > c.delta_grid.min)) {
            throw InvalidInput("config: delta_grid needs max > min and at least 7 points");
        }
    }
    c.k_points = int_or(j, "k_points", "config", c.k_points);
    if (c.k_points < 1) throw InvalidInput("config: k_points must be >= 1");

    if (j.contains("noise") && !j.at("noise").is_null()) {
        const json& n = j.at("noise");
        only_keys(n, "noise", {"shots", "reps", "gamma_fluct", "dephasing_t2"});
        NoiseSettings ns;
        ns.shots = int_or(n, "shots", "noise", ns.shots);
        ns.reps = int_or(n, "reps", "noise", ns.reps);
        ns.gamma_fluct = num_or(n, "gamma_fluct", "noise", ns.gamma_fluct);
        if (n.contains("dephasing_t2") && !n.at("dephasing_t2").is_null()) {
            ns.dephasing_t2 = num(n, "dephasing_t2", "noise");
        }
        c.noise = ns;
        c.noise_model()->check();
    }
    if (j.contains("eb") && !j.at("eb").is_null()) {
        const json& e = j.at("eb");
        if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
            throw InvalidInput("config: 'eb' must be [re, im]");
        }
        c.eb = cplx(e[0].get<double>(), e[1].get<double>());
    }
    if (j.contains("six_level") && !j.at("six_level").is_null()) {
        const json& s = j.at("six_level");
        only_keys(s, "six_level", {"JL", "gamma_e", "branching", "dt"});
        SixLevelSettings ss;
        ss.jl = num_or(s, "JL", "six_level", ss.jl);
        ss.gamma_e = num_or(s, "gamma_e", "six_level", ss.gamma_e);
        ss.branching = {ss.gamma_e / 3.0, ss.gamma_e / 3.0, ss.gamma_e / 3.0};
        if (s.contains("branching")) {
            const json& b = s.at("branching");
            if (!b.is_array() || b.size() != 3) {
                throw InvalidInput("config: six_level.branching must hold three rates");
            }
            for (std::size_t i = 0; i < 3; ++i) {
                if (!b[i].is_number()) throw InvalidInput("config: branching rates must be numbers");
                ss.branching[i] = b[i].get<double>();
            }
        }
        ss.dt = num_or(s, "dt", "six_level", ss.dt);
        c.six_level = ss;
        validate(c.six_level_at(c.k));
    }
    if (j.contains("fit")) {
        const json& f = j.at("fit");
        only_keys(f, "fit", {"starts", "weighted"});
        c.fit.starts = int_or(f, "starts", "fit", c.fit.starts);
        if (f.contains("weighted")) {
            if (!f.at("weighted").is_boolean()) throw InvalidInput("config: fit.weighted must be boolean");
            c.fit.weighted = f.at("weighted").get<bool>();
        }
        if (c.fit.starts < 1) throw InvalidInput("config: fit.starts must be >= 1");
    }
    if (j.contains("output_dir")) {
        if (!j.at("output_dir").is_string()) throw InvalidInput("config: output_dir must be a string");
        c.output_dir = j.at("output_dir").get<std::string>();
    }
    if (j.contains("seed")) {
        const json& s = j.at("seed");
        if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0)) {
            throw InvalidInput("config: seed must be a non-negative integer");
        }
        c.seed = s.get<std::uint64_t>();
    }
    return c;
}

json config_to_json(const RunConfig& c) {
    json j;
    j["units"] = kUnitsTag;
    j["model"] = model_json(c.model);
    j["probe"] = {{"omega", c.probe.omega}, {"t", c.probe.t}, {"n0", c.probe.n0}};
    j["k"] = c.k;
    j["delta_grid"] = {{"min", c.delta_grid.min}, {"max", c.delta_grid.max}, {"points", c.delta_grid.points}};
    j["k_points"] = c.k_points;
    if (c.noise) {
        j["noise"] = {{"shots", c.noise->shots},
                      {"reps", c.noise->reps},
                      {"gamma_fluct", c.noise->gamma_fluct},
                      {"dephasing_t2", c.noise->dephasing_t2 ? json(*c.noise->dephasing_t2) : json(nullptr)}};
    } else {
        j["noise"] = nullptr;
    }
    j["eb"] = c.eb ? json::array({c.eb->real(), c.eb->imag()}) : json(nullptr);
    if (c.six_level) {
        j["six_level"] = {{"JL", c.six_level->jl},
                          {"gamma_e", c.six_level->gamma_e},
                          {"branching", c.six_level->branching},
                          {"dt", c.six_level->dt}};
    } else {
        j["six_level"] = nullptr;
    }
    j["fit"] = {{"starts", c.fit.starts}, {"weighted", c.fit.weighted}};
    j["output_dir"] = c.output_dir;
    j["seed"] = c.seed;
    return j;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw InvalidInput("config: cannot open '" + path + "'");
    }
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw InvalidInput("config: " + path + ": " + e.what());
    }
    return config_from_json(j);
}

std::vector<std::string> preset_names() {
    return {"fig2_nontrivial", "fig2_trivial", "fig3_unknot", "fig3_hopf", "figS1_validate",
            "figS4_short_time"};
}

RunConfig preset(const std::string& name) {
    RunConfig c;
    c.probe = ProbeConfig{0.019, 0.0, 200.0, 1.0};
    c.k = 2.0 * std::numbers::pi / 5.0;
    c.noise = NoiseSettings{};
    c.seed = 20240501;
    c.output_dir = "out/" + name;
    const MrmParams nontrivial{0.315, 0.098, 0.122, 0.035, 0.092};
    if (name == "fig2_nontrivial") {
        c.model = nontrivial;
    } else if (name == "fig2_trivial") {
        c.model = MrmParams{0.315, 0.098, 0.0, 0.038, 0.092};
    } else if (name == "fig3_unknot") {
        c.model = MrmParams{0.195, 0.098, 0.100, 0.038, 0.127};
    } else if (name == "fig3_hopf") {
        c.model = LkParams{0.13, 0.05, 0.08, 0.07, 0.15};
        // The bands pass within ~0.06 of each other; 21 points alias the braid phase.
        c.k_points = 41;
    } else if (name == "figS1_validate") {
        c.model = nontrivial;
        c.noise.reset();
        c.six_level = SixLevelSettings{};
    } else if (name == "figS4_short_time") {
        c.model = nontrivial;
        c.probe.t = 80.0;
    } else {
        throw InvalidInput("unknown preset '" + name + "'");
    }
    return c;
}

}  // namespace nhspec
