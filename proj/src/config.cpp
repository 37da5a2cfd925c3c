#include "fdswipt/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace fdswipt {
namespace config {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double x;
  try {
    x = std::stod(v, &pos);
  } catch (const std::exception&) {
    throw ContractViolation("config: bad number for '" + key + "': " + v);
  }
  if (pos != v.size() || !std::isfinite(x))
    throw ContractViolation("config: bad number for '" + key + "': " + v);
  return x;
}

long parse_int(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  long x;
  try {
    x = std::stol(v, &pos);
  } catch (const std::exception&) {
    throw ContractViolation("config: bad integer for '" + key + "': " + v);
  }
  if (pos != v.size())
    throw ContractViolation("config: bad integer for '" + key + "': " + v);
  return x;
}

std::vector<std::string> split_commas(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

baselines::Scheme parse_scheme(const std::string& s) {
  if (s == "full-duplex") return baselines::Scheme::kFullDuplex;
  if (s == "perfect-fd") return baselines::Scheme::kPerfectFd;
  if (s == "half-duplex") return baselines::Scheme::kHalfDuplex;
  throw ContractViolation("config: unknown scheme '" + s + "'");
}

}  // namespace

Settings::Settings() {
  sweep.schemes = {baselines::Scheme::kFullDuplex, baselines::Scheme::kPerfectFd,
                   baselines::Scheme::kHalfDuplex};
  sweep.grid = {-100, -90, -80, -70, -60, -50, -40};
  sweep.base = system;
}

void apply_override(Settings& s, const std::string& key, const std::string& value) {
  if (key == "n_tx")
    s.system.n_tx = static_cast<int>(parse_int(key, value));
  else if (key == "n_rx")
    s.system.n_rx = static_cast<int>(parse_int(key, value));
  else if (key == "p_bs")
    s.system.p_bs = parse_double(key, value);
  else if (key == "p_u")
    s.system.p_u = parse_double(key, value);
  else if (key == "zeta")
    s.system.zeta = parse_double(key, value);
  else if (key == "sigma_z2")
    s.system.sigma_z2 = parse_double(key, value);
  else if (key == "sigma_si2_db")
    s.system.sigma_si2 = std::pow(10.0, parse_double(key, value) / 10.0);
  else if (key == "e_min_w")
    s.system.e_min = parse_double(key, value);
  else if (key == "attn_bs_idle_db")
    s.system.attn_bs_idle_db = parse_double(key, value);
  else if (key == "attn_other_db")
    s.system.attn_other_db = parse_double(key, value);
  else if (key == "seed")
    s.sweep.master_seed = static_cast<std::uint64_t>(parse_int(key, value));
  else if (key == "trials")
    s.sweep.trials = static_cast<int>(parse_int(key, value));
  else if (key == "threads")
    s.sweep.threads = static_cast<int>(parse_int(key, value));
  else if (key == "param") {
    auto p = harness::sweep_param_from_string(value);
    if (!p) throw ContractViolation("config: unknown sweep param '" + value + "'");
    s.sweep.param = *p;
  } else if (key == "grid") {
    std::vector<double> g;
    for (const auto& tok : split_commas(value)) g.push_back(parse_double(key, tok));
    s.sweep.grid = std::move(g);
  } else if (key == "schemes") {
    std::vector<baselines::Scheme> sc;
    for (const auto& tok : split_commas(value)) sc.push_back(parse_scheme(tok));
    s.sweep.schemes = std::move(sc);
  } else if (key == "rel_tol")
    s.sweep.spca.rel_tol = parse_double(key, value);
  else if (key == "max_iter")
    s.sweep.spca.max_iter = static_cast<int>(parse_int(key, value));
  else
    throw ContractViolation("config: unknown key '" + key + "'");
  s.sweep.base = s.system;
}

Settings parse(std::istream& in, const Settings& base) {
  Settings s = base;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ContractViolation("config: line " + std::to_string(lineno) +
                              ": expected 'key = value'");
    apply_override(s, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return s;
}

Settings parse_file(const std::string& path, const Settings& base) {
  std::ifstream in(path);
  if (!in) throw ContractViolation("config: cannot open file: " + path);
  return parse(in, base);
}

}  // namespace config
}  // namespace fdswipt
