#pragma once

#include <string>

#include "loctemp/scenarios.hpp"

namespace loctemp {

// JSON document with a fixed key order and 17-significant-digit numbers, so
// identical (config, seed) runs diff cleanly apart from runtime and timestamp.
std::string report_to_json(const Report& rep);

void write_report_json(const Report& rep, const std::string& path);

// Per-beta rows: beta,w,w_error,temperature,defined_flag
void write_sweep_csv(const Report& rep, const std::string& path);

// Plot-data file, one "beta w temperature" row per sweep entry.
void write_plot_data(const Report& rep, const std::string& path);

const char* status_label(CheckStatus s);

}  // namespace loctemp
