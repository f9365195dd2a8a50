#include "nhspec/io.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "nhspec/errors.hpp"

namespace nhspec {

using nlohmann::json;

namespace {

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::string> split(const std::string& s) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(s);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!s.empty() && s.back() == ',') out.emplace_back();
    return out;
}

double parse_double(const std::string& s, int line_no) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size()) {
        throw InvalidInput("csv line " + std::to_string(line_no) + ": bad number '" + s + "'");
    }
    return v;
}

bool parse_flag(const std::string& s, int line_no) {
    if (s == "1") return true;
    if (s == "0") return false;
    throw InvalidInput("csv line " + std::to_string(line_no) + ": flag must be 0 or 1, got '" + s + "'");
}

// Reads the header then yields rows with exactly `cols` fields.
std::vector<std::vector<std::string>> read_table(std::istream& in, const std::string& header) {
    std::string line;
    if (!std::getline(in, line)) throw InvalidInput("csv: empty input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != header) throw InvalidInput("csv: expected header '" + header + "', got '" + line + "'");
    const std::size_t cols = split(header).size();
    std::vector<std::vector<std::string>> rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto f = split(line);
        if (f.size() != cols) {
            throw InvalidInput("csv line " + std::to_string(line_no) + ": expected " +
                               std::to_string(cols) + " fields");
        }
        rows.push_back(std::move(f));
    }
    return rows;
}

constexpr const char* kLineHeader = "delta,na_mean,na_std";
constexpr const char* kEnergyHeader =
    "k,re_e1,im_e1,re_e2,im_e2,err_re_e1,err_im_e1,err_re_e2,err_im_e2,converged1,converged2";

}  // namespace

void write_line_csv(std::ostream& out, const SpectralLine& line) {
    line.check();
    out << kLineHeader << '\n';
    for (std::size_t i = 0; i < line.size(); ++i) {
        out << g17(line.deltas[i]) << ',' << g17(line.na_mean[i]) << ',' << g17(line.na_std[i]) << '\n';
    }
}

SpectralLine read_line_csv(std::istream& in) {
    SpectralLine line;
    int n = 1;
    for (const auto& f : read_table(in, kLineHeader)) {
        ++n;
        line.deltas.push_back(parse_double(f[0], n));
        line.na_mean.push_back(parse_double(f[1], n));
        line.na_std.push_back(parse_double(f[2], n));
    }
    line.check();
    return line;
}

void write_energies_csv(std::ostream& out, const std::vector<EnergyRow>& rows) {
    out << kEnergyHeader << '\n';
    for (const auto& r : rows) {
        out << g17(r.k) << ',' << g17(r.e1.e.real()) << ',' << g17(r.e1.e.imag()) << ','
            << g17(r.e2.e.real()) << ',' << g17(r.e2.e.imag()) << ',' << g17(r.e1.err_re) << ','
            << g17(r.e1.err_im) << ',' << g17(r.e2.err_re) << ',' << g17(r.e2.err_im) << ','
            << (r.converged1 ? 1 : 0) << ',' << (r.converged2 ? 1 : 0) << '\n';
    }
}

std::vector<EnergyRow> read_energies_csv(std::istream& in) {
    std::vector<EnergyRow> rows;
    int n = 1;
    for (const auto& f : read_table(in, kEnergyHeader)) {
        ++n;
        EnergyRow r;
        r.k = parse_double(f[0], n);
        r.e1.e = {parse_double(f[1], n), parse_double(f[2], n)};
        r.e2.e = {parse_double(f[3], n), parse_double(f[4], n)};
        r.e1.err_re = parse_double(f[5], n);
        r.e1.err_im = parse_double(f[6], n);
        r.e2.err_re = parse_double(f[7], n);
        r.e2.err_im = parse_double(f[8], n);
        r.converged1 = parse_flag(f[9], n);
        r.converged2 = parse_flag(f[10], n);
        rows.push_back(r);
    }
    if (rows.empty()) throw InvalidInput("csv: energies table has no rows");
    return rows;
}

json line_meta_json(const LineMeta& m) {
    return {{"units", "rad_per_us"},
            {"t", m.t},
            {"omega", m.omega},
            {"n0", m.n0},
            {"shots", m.shots},
            {"reps", m.reps},
            {"seed", m.seed},
            {"model", m.model},
            {"k", m.k},
            {"gamma_distribution", m.gamma_distribution},
            {"gamma_fluct", m.gamma_fluct},
            {"dephasing_t2", m.dephasing_t2 ? json(*m.dephasing_t2) : json(nullptr)}};
}

json topology_json(const TopologyReport& r) {
    json w = json::array();
    for (const auto& x : r.w) w.push_back(x ? json(*x) : json(nullptr));
    json eb = json::array();
    for (const auto& e : r.eb) eb.push_back({e.real(), e.imag()});
    return {{"w", w},
            {"W", r.big_w.str()},
            {"W_value", r.big_w.value()},
            {"period", r.period},
            {"nu", r.nu},
            {"permutation", r.swapped ? "swap" : "identity"},
            {"eb", eb},
            {"classification", to_string(r.classification)}};
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidInput("cannot write '" + path + "'");
    out << text;
    if (!out) throw InvalidInput("write failed for '" + path + "'");
}

}  // namespace nhspec
