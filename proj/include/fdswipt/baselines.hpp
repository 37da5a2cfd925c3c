#pragma once

#include "fdswipt/spca.hpp"

namespace fdswipt {
namespace baselines {

enum class Scheme { kFullDuplex, kPerfectFd, kHalfDuplex };

const char* to_string(Scheme s);

struct BaselineResult {
  Scheme scheme = Scheme::kFullDuplex;
  double r_sum = 0.0;    // achieved sum secrecy rate [bits/s/Hz]
  double r_d_sec = 0.0;
  double r_u_sec = 0.0;
  double energy = 0.0;   // harvested power [W]
};

/// Proposed full-duplex design via SPCA.
BaselineResult full_duplex_solve(const ChannelSet& ch, const SystemConfig& cfg,
                                 const spca::SpcaOptions& opts = {});

/// Same pipeline with the self-interference channel forced to zero.
BaselineResult perfect_fd_solve(const ChannelSet& ch, const SystemConfig& cfg,
                                const spca::SpcaOptions& opts = {});

/// Two-phase half duplex over all n_tx+n_rx antennas: phase 1 is a
/// downlink-only secrecy design (AN included, idle user eavesdropping,
/// uplink silent), phase 2 is MRC uplink reception with no AN protection.
/// Rates carry the 1/2 time split; the energy floor applies to the
/// time-weighted total over both phases.
BaselineResult half_duplex_solve(const ChannelSet& ch, const SystemConfig& cfg,
                                 const spca::SpcaOptions& opts = {});

}  // namespace baselines
}  // namespace fdswipt
