#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "nhspec/fitting.hpp"
#include "nhspec/spectroscopy.hpp"
#include "nhspec/topology.hpp"

namespace nhspec {

/// One row of an energies table.
struct EnergyRow {
    double k = 0.0;
    EnergyEstimate e1;
    EnergyEstimate e2;
    bool converged1 = true;
    bool converged2 = true;
};

// CSV columns: delta,na_mean,na_std
void write_line_csv(std::ostream& out, const SpectralLine& line);
SpectralLine read_line_csv(std::istream& in);

// CSV columns: k,re_e1,im_e1,re_e2,im_e2,err_re_e1,err_im_e1,err_re_e2,err_im_e2,converged1,converged2
void write_energies_csv(std::ostream& out, const std::vector<EnergyRow>& rows);
std::vector<EnergyRow> read_energies_csv(std::istream& in);

nlohmann::json line_meta_json(const LineMeta& meta);
nlohmann::json topology_json(const TopologyReport& r);

void write_text_file(const std::string& path, const std::string& text);

}  // namespace nhspec
