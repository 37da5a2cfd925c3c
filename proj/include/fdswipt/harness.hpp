#pragma once

#include "fdswipt/baselines.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fdswipt {
namespace harness {

enum class SweepParam { kSigmaSi2Db, kEMinW };

const char* to_string(SweepParam p);
std::optional<SweepParam> sweep_param_from_string(const std::string& s);

struct SweepSpec {
  SweepParam param = SweepParam::kSigmaSi2Db;
  std::vector<double> grid;  // nonempty, strictly increasing
  int trials = 200;
  std::vector<baselines::Scheme> schemes;
  SystemConfig base;
  std::uint64_t master_seed = 1;
  int threads = 1;
  // Monte Carlo sweeps report mean rates only, so the KKT polish rounds
  // are skipped by default; single-instance solves keep them on.
  spca::SpcaOptions spca = [] {
    spca::SpcaOptions o;
    o.polish = false;
    return o;
  }();

  void validate() const;
};

struct PointStats {
  double value = 0.0;  // grid value
  baselines::Scheme scheme;
  double mean_rate_bits = 0.0;
  double stderr_bits = 0.0;
  int n_ok = 0;
  int n_infeasible = 0;
  int n_failed = 0;
};

struct SweepResult {
  SweepParam param;
  std::vector<PointStats> points;  // sorted by (value, scheme)
};

/// splitmix64 step; the documented seed-mixing primitive.
std::uint64_t mix64(std::uint64_t x);

/// Per-trial channel seed. Deliberately independent of the grid index so
/// that every grid point reuses the same channel draws: that is what makes
/// schemes comparable across a sweep and keeps SI-independent schemes
/// exactly constant along a sigma_si2 sweep.
std::uint64_t trial_seed(std::uint64_t master, int trial);

/// One i.i.d. Rayleigh-fading realization of every channel. The raw SI
/// matrix is drawn with unit variance and scaled by sqrt(sigma_si2), so
/// two configs differing only in sigma_si2 share all other entries.
ChannelSet gen_channels(const SystemConfig& cfg, std::uint64_t seed);

struct InstanceOutcome {
  baselines::Scheme scheme;
  bool infeasible = false;
  bool failed = false;
  std::string error;
  baselines::BaselineResult result;
};

/// Runs every requested scheme on one shared channel realization.
/// Per-scheme failures are recorded, not thrown.
std::vector<InstanceOutcome> run_instance(const ChannelSet& ch, const SystemConfig& cfg,
                                          const std::vector<baselines::Scheme>& schemes,
                                          const spca::SpcaOptions& opts = {});

/// Full Monte Carlo sweep; deterministic given (spec, master seed).
SweepResult sweep(const SweepSpec& spec);

/// CSV with header param,value,scheme,mean_rate_bits,stderr_bits,n_ok,
/// n_infeasible,n_failed; floats at 10 significant digits.
void write_csv(const SweepResult& res, const std::string& path);

}  // namespace harness
}  // namespace fdswipt
