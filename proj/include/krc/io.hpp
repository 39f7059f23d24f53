#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "krc/control_scheme.hpp"
#include "krc/propagate.hpp"
#include "krc/quantization.hpp"
#include "krc/torus.hpp"

namespace krc {

using json = nlohmann::ordered_json;

/// Shortest round-trip decimal form of a double; deterministic across runs.
inline std::string fmt_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// Run configuration shared by the CLI commands. JSON with explicit fields;
/// unknown fields are rejected so configs stay reproducible.
struct RunConfig {
  double K = 8.0;
  int tau = 6;
  double alpha_q = 0.5, alpha_p = 0.0;
  double beta_q = 0.0, beta_p = 0.0;
  ControlScheme scheme = ControlScheme::SolA;
  std::vector<int> dimensions;  ///< one entry for propagate, many for sweep
  std::vector<ControlScheme> schemes;  ///< sweep only; defaults to {scheme}
  int unwind_period = 1;
  std::uint64_t seed = 1;
  double capture_radius = 0.05;
  double newton_tol = 1e-12;
  std::string out_dir;

  void validate() const {
    if (!(K > 0.0)) throw config_error("config: K must be positive");
    if (tau < 0) throw config_error("config: tau must be >= 0");
    if (unwind_period < 1) throw config_error("config: unwind_period must be >= 1");
    for (int n : dimensions)
      if (n < 2) throw config_error("config: N must be >= 2");
  }
};

inline RunConfig config_from_json(const json& j) {
  static const std::vector<std::string> known = {
      "K",       "tau",           "alpha", "beta", "scheme",         "schemes", "N",
      "N_list",  "unwind_period", "seed",  "capture_radius", "newton_tol", "out_dir"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (std::find(known.begin(), known.end(), it.key()) == known.end())
      throw config_error("config: unknown field '" + it.key() + "'");
  RunConfig c;
  try {
    c.K = j.value("K", 8.0);
    c.tau = j.value("tau", 6);
    if (j.contains("alpha")) {
      c.alpha_q = j["alpha"].at(0).get<double>();
      c.alpha_p = j["alpha"].at(1).get<double>();
    }
    if (j.contains("beta")) {
      c.beta_q = j["beta"].at(0).get<double>();
      c.beta_p = j["beta"].at(1).get<double>();
    }
    if (j.contains("scheme")) c.scheme = parse_scheme(j["scheme"].get<std::string>());
    if (j.contains("schemes"))
      for (const auto& s : j["schemes"]) c.schemes.push_back(parse_scheme(s.get<std::string>()));
    if (j.contains("N")) c.dimensions.push_back(j["N"].get<int>());
    if (j.contains("N_list"))
      for (const auto& n : j["N_list"]) c.dimensions.push_back(n.get<int>());
    c.unwind_period = j.value("unwind_period", 1);
    c.seed = j.value("seed", std::uint64_t{1});
    c.capture_radius = j.value("capture_radius", 0.05);
    c.newton_tol = j.value("newton_tol", 1e-12);
    c.out_dir = j.value("out_dir", std::string{});
  } catch (const nlohmann::json::exception& e) {
    throw config_error(std::string("malformed config: ") + e.what());
  }
  c.validate();
  return c;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw config_error(std::string("config is not valid JSON: ") + e.what());
  }
  return config_from_json(j);
}

/// Resolved configuration block embedded in every output file.
inline json config_to_json(const RunConfig& c) {
  json j;
  j["K"] = c.K;
  j["tau"] = c.tau;
  j["alpha"] = {c.alpha_q, c.alpha_p};
  j["beta"] = {c.beta_q, c.beta_p};
  j["scheme"] = std::string(to_string(c.scheme));
  if (!c.schemes.empty()) {
    auto arr = json::array();
    for (auto s : c.schemes) arr.push_back(std::string(to_string(s)));
    j["schemes"] = arr;
  }
  if (c.dimensions.size() == 1) j["N"] = c.dimensions.front();
  if (c.dimensions.size() > 1) j["N_list"] = c.dimensions;
  j["unwind_period"] = c.unwind_period;
  j["seed"] = c.seed;
  j["capture_radius"] = c.capture_radius;
  j["newton_tol"] = c.newton_tol;
  return j;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw config_error("cannot write file: " + path.string());
  out << text;
}

/// CSV with a one-line JSON header block ("# {...}") carrying the resolved
/// run configuration, then a column header and rows.
inline std::string csv_document(const json& header, const std::string& columns,
                                const std::vector<std::string>& rows) {
  std::ostringstream os;
  os << "# " << header.dump() << "\n" << columns << "\n";
  for (const auto& r : rows) os << r << "\n";
  return os.str();
}

/// Wavefunction dump: one row per grid point.
inline std::string state_csv(const json& header, const TorusQuantization& tq, const Vec& psi) {
  std::vector<std::string> rows;
  rows.reserve(static_cast<size_t>(tq.N));
  for (int j = 0; j < tq.N; ++j) {
    std::ostringstream r;
    r << j << ',' << fmt_double(tq.q(j)) << ',' << fmt_double(psi(j).real()) << ','
      << fmt_double(psi(j).imag()) << ',' << fmt_double(std::abs(psi(j)));
    rows.push_back(r.str());
  }
  return csv_document(header, "j,q,re,im,abs", rows);
}

struct StateFile {
  json header;
  TorusQuantization tq;
  Vec psi;
};

inline StateFile read_state_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open state file: " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("# ", 0) != 0)
    throw config_error("state file missing JSON header line: " + path);
  StateFile f{json::parse(line.substr(2)), TorusQuantization{}, {}};
  int N = f.header.at("N").get<int>();
  double S = f.header.value("S", 2.0);
  f.tq = TorusQuantization(N, S);
  f.psi.resize(N);
  std::getline(in, line);  // column header
  int count = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    std::vector<double> vals;
    int col = 0;
    while (std::getline(ls, cell, ',')) {
      if (col >= 2 && col <= 3) vals.push_back(std::stod(cell));
      ++col;
    }
    if (vals.size() != 2 || count >= N) throw config_error("malformed state row in " + path);
    f.psi(count++) = Complex(vals[0], vals[1]);
  }
  if (count != N) throw config_error("state file row count != N: " + path);
  return f;
}

inline std::string sweep_csv(const json& header, const std::vector<SweepRow>& rows) {
  std::vector<std::string> lines;
  lines.reserve(rows.size());
  for (const auto& r : rows) {
    std::ostringstream os;
    os << r.N << ',' << fmt_double(r.h) << ',' << to_string(r.scheme) << ','
       << fmt_double(r.delta) << ',' << r.status;
    lines.push_back(os.str());
  }
  return csv_document(header, "N,h,scheme,delta,status", lines);
}

}  // namespace krc
