#include "loctemp/report_io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace loctemp {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  out += '"';
  return out;
}

std::ofstream open_or_throw(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open output file: " + path);
  return f;
}

}  // namespace

const char* status_label(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    default: return "inconclusive";
  }
}

std::string report_to_json(const Report& rep) {
  std::string out = "{\n";
  out += "  \"scenario\": " + quoted(rep.scenario) + ",\n";
  out += "  \"config_hash\": " + quoted(rep.config_hash) + ",\n";
  out += "  \"spacings\": [";
  for (std::size_t i = 0; i < rep.spacings.size(); ++i)
    out += (i ? ", " : "") + num(rep.spacings[i]);
  out += "],\n";
  out += "  \"checks\": [\n";
  for (std::size_t i = 0; i < rep.checks.size(); ++i) {
    const CheckRecord& c = rep.checks[i];
    out += "    {\"name\": " + quoted(c.name) + ", \"measured\": " + num(c.measured) +
           ", \"bound\": " + num(c.bound) + ", \"comparator\": " + quoted(c.comparator) +
           ", \"status\": " + quoted(status_label(c.status)) + ", \"note\": " + quoted(c.note) +
           "}";
    out += i + 1 < rep.checks.size() ? ",\n" : "\n";
  }
  out += "  ],\n";
  if (!rep.sweep.empty()) {
    out += "  \"sweep\": [\n";
    for (std::size_t i = 0; i < rep.sweep.size(); ++i) {
      const BetaSweepEntry& e = rep.sweep[i];
      out += "    {\"beta\": " + num(e.beta) + ", \"w\": " + num(e.estimate.value) +
             ", \"w_error\": " + num(e.estimate.error) +
             ", \"temperature\": " + num(e.temperature.temperature) +
             ", \"defined\": " + (e.temperature.defined ? "true" : "false") + "}";
      out += i + 1 < rep.sweep.size() ? ",\n" : "\n";
    }
    out += "  ],\n";
  }
  out += "  \"overall\": " + quoted(status_label(rep.overall())) + ",\n";
  out += "  \"runtime_seconds\": " + num(rep.runtime_seconds) + ",\n";
  out += "  \"timestamp\": " + quoted(rep.timestamp) + "\n";
  out += "}\n";
  return out;
}

void write_report_json(const Report& rep, const std::string& path) {
  open_or_throw(path) << report_to_json(rep);
}

void write_sweep_csv(const Report& rep, const std::string& path) {
  std::ofstream f = open_or_throw(path);
  f << "beta,w,w_error,temperature,defined_flag\n";
  for (const BetaSweepEntry& e : rep.sweep)
    f << num(e.beta) << ',' << num(e.estimate.value) << ',' << num(e.estimate.error) << ','
      << num(e.temperature.temperature) << ',' << (e.temperature.defined ? 1 : 0) << '\n';
}

void write_plot_data(const Report& rep, const std::string& path) {
  std::ofstream f = open_or_throw(path);
  f << "# beta w temperature\n";
  for (const BetaSweepEntry& e : rep.sweep)
    f << num(e.beta) << ' ' << num(e.estimate.value) << ' ' << num(e.temperature.temperature)
      << '\n';
}

}  // namespace loctemp
