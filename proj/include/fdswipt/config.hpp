#pragma once

#include "fdswipt/harness.hpp"

#include <istream>
#include <map>
#include <string>

namespace fdswipt {
namespace config {

/// Flat `key = value` settings file. `#` starts a comment, blank lines are
/// ignored. Keys mirror SystemConfig plus the sweep controls; unknown keys
/// are an error so typos fail loudly instead of silently using defaults.
///
/// Recognized keys:
///   n_tx, n_rx, p_bs, p_u, zeta, sigma_z2, sigma_si2_db, e_min_w,
///   attn_bs_idle_db, attn_other_db,
///   seed, trials, threads, param, grid, schemes,
///   rel_tol, max_iter
///
/// `grid` is a comma-separated list of numbers; `schemes` a comma-separated
/// list of full-duplex | perfect-fd | half-duplex.
struct Settings {
  SystemConfig system;
  harness::SweepSpec sweep;  // sweep.base is kept in sync with `system`

  Settings();
};

/// Parses a settings stream, applying values on top of `base`.
/// Throws ContractViolation on unknown keys or malformed values.
Settings parse(std::istream& in, const Settings& base = {});

/// Convenience: parse from file path.
Settings parse_file(const std::string& path, const Settings& base = {});

/// Applies one `key=value` override (same key set as the file format).
void apply_override(Settings& s, const std::string& key, const std::string& value);

}  // namespace config
}  // namespace fdswipt
