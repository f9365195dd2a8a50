// nhspec: spectral lines, energy sweeps, topology and six-level validation.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "nhspec/config.hpp"
#include "nhspec/errors.hpp"
#include "nhspec/io.hpp"
#include "nhspec/pipeline.hpp"

namespace fs = std::filesystem;
using namespace nhspec;

namespace {

struct Common {
    std::string config_path;
    std::string preset_name;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<double> k;
    bool no_noise = false;
    std::string eb;
    int grid_refine = 1;
};

void add_common(CLI::App* sub, Common& c) {
    auto* cfg = sub->add_option("--config", c.config_path, "JSON run configuration");
    sub->add_option("--preset", c.preset_name, "bundled configuration")->excludes(cfg);
    sub->add_option("--out", c.out_dir, "output directory (overrides the config)");
    sub->add_option("--seed", c.seed, "noise seed (overrides the config)");
    sub->add_option("--k", c.k, "momentum for single-line commands")->check(CLI::Range(0.0, 6.283185307179586));
    sub->add_flag("--no-noise", c.no_noise, "drop the noise model");
    sub->add_option("--eb", c.eb, "base energy RE,IM");
    sub->add_option("--grid-refine", c.grid_refine, "multiply k-grid density")->check(CLI::PositiveNumber);
}

RunConfig resolve(const Common& c, bool config_optional = false) {
    RunConfig cfg;
    if (!c.config_path.empty()) {
        cfg = load_config(c.config_path);
    } else if (!c.preset_name.empty()) {
        cfg = preset(c.preset_name);
    } else if (!config_optional) {
        throw InvalidInput("one of --config or --preset is required");
    }
    if (!c.out_dir.empty()) cfg.output_dir = c.out_dir;
    if (c.seed) cfg.seed = *c.seed;
    if (c.k) cfg.k = *c.k;
    if (c.no_noise) cfg.noise.reset();
    if (!c.eb.empty()) {
        const auto comma = c.eb.find(',');
        if (comma == std::string::npos) throw InvalidInput("--eb expects RE,IM");
        try {
            cfg.eb = cplx(std::stod(c.eb.substr(0, comma)), std::stod(c.eb.substr(comma + 1)));
        } catch (const std::logic_error&) {
            throw InvalidInput("--eb expects two numbers, got '" + c.eb + "'");
        }
    }
    cfg.k_points = refined_points(cfg.k_points, c.grid_refine);
    return cfg;
}

fs::path out_dir(const RunConfig& cfg) {
    fs::path dir(cfg.output_dir);
    fs::create_directories(dir);
    return dir;
}

std::string line_csv(const SpectralLine& line) {
    std::ostringstream os;
    write_line_csv(os, line);
    return os.str();
}

int cmd_spectrum(const Common& c) {
    const RunConfig cfg = resolve(c);
    const auto dir = out_dir(cfg);
    const SpectralLine line = run_spectrum(cfg);
    write_text_file((dir / "spectrum.csv").string(), line_csv(line));
    write_text_file((dir / "spectrum.json").string(), line_meta_json(line.meta).dump(2) + "\n");
    std::cout << (dir / "spectrum.csv").string() << '\n';
    return 0;
}

int cmd_sweep(const Common& c) {
    const RunConfig cfg = resolve(c);
    const auto dir = out_dir(cfg);
    const SweepResult res = run_sweep(cfg);
    fs::create_directories(dir / "lines");
    for (std::size_t i = 0; i < res.lines.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "k_%03zu.csv", i);
        write_text_file((dir / "lines" / name).string(), line_csv(res.lines[i]));
    }
    std::ostringstream os;
    write_energies_csv(os, res.rows);
    write_text_file((dir / "energies.csv").string(), os.str());
    write_text_file((dir / "config.json").string(), config_to_json(cfg).dump(2) + "\n");
    std::cout << (dir / "energies.csv").string() << '\n';
    if (!res.all_converged()) {
        std::cerr << "nhspec: some fits did not converge (see converged columns)\n";
        return 2;
    }
    return 0;
}

int cmd_topology(const Common& c, const std::string& energies) {
    // an energies file carries everything needed; a config only adds eB and the output directory
    const RunConfig cfg = resolve(c, !energies.empty());
    std::vector<EnergyRow> rows;
    if (!energies.empty()) {
        std::ifstream in(energies);
        if (!in) throw InvalidInput("cannot open '" + energies + "'");
        rows = read_energies_csv(in);
    } else {
        rows = closed_form_rows(cfg);
    }
    const TopologyReport rep = topology_from_rows(rows, cfg.eb);
    const std::string text = topology_json(rep).dump(2) + "\n";
    const auto dir = out_dir(cfg);
    write_text_file((dir / "topology.json").string(), text);
    std::cout << text;
    return 0;
}

int cmd_validate(const Common& c) {
    const RunConfig cfg = resolve(c);
    const ValidationReport rep = run_validation(cfg);
    const std::string text = rep.json.dump(2) + "\n";
    const auto dir = out_dir(cfg);
    write_text_file((dir / "validate.json").string(), text);
    std::cout << text;
    return rep.passed ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Non-Hermitian absorption spectroscopy: simulate, fit and classify complex bands"};
    app.require_subcommand(1);

    Common common;
    std::string energies;
    auto* spectrum = app.add_subcommand("spectrum", "spectral line at one k");
    add_common(spectrum, common);
    auto* sweep = app.add_subcommand("sweep", "fit energies over the k grid");
    add_common(sweep, common);
    auto* topo = app.add_subcommand("topology", "band invariants and classification");
    add_common(topo, common);
    topo->add_option("--energies", energies, "energies CSV (closed form when omitted)");
    auto* validate = app.add_subcommand("validate", "six-level model checks");
    add_common(validate, common);
    auto* presets = app.add_subcommand("presets", "list bundled configurations");
    auto* show_cmd = app.add_subcommand("show", "print a resolved configuration as JSON");
    add_common(show_cmd, common);

    CLI11_PARSE(app, argc, argv);
    try {
        if (*spectrum) return cmd_spectrum(common);
        if (*sweep) return cmd_sweep(common);
        if (*topo) return cmd_topology(common, energies);
        if (*validate) return cmd_validate(common);
        if (*presets) {
            for (const auto& n : preset_names()) std::cout << n << '\n';
            return 0;
        }
        if (*show_cmd) {
            std::cout << config_to_json(resolve(common)).dump(2) << '\n';
            return 0;
        }
    } catch (const GridRefinementRequired& e) {
        std::cerr << "nhspec: " << e.what() << " (k in [" << e.k_lo() << ", " << e.k_hi() << "])\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "nhspec: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
