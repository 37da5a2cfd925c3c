#include "fdswipt/baselines.hpp"

#include "fdswipt/receiver.hpp"

#include <cmath>

namespace fdswipt {
namespace baselines {

const char* to_string(Scheme s) {
  switch (s) {
    case Scheme::kFullDuplex: return "full-duplex";
    case Scheme::kPerfectFd: return "perfect-fd";
    case Scheme::kHalfDuplex: return "half-duplex";
  }
  return "unknown";
}

BaselineResult full_duplex_solve(const ChannelSet& ch, const SystemConfig& cfg,
                                 const spca::SpcaOptions& opts) {
  const spca::SpcaResult r = spca_solve(ch, cfg, opts);
  return BaselineResult{Scheme::kFullDuplex, r.report.r_sum, r.report.r_d_sec,
                        r.report.r_u_sec, r.report.energy};
}

BaselineResult perfect_fd_solve(const ChannelSet& ch, const SystemConfig& cfg,
                                const spca::SpcaOptions& opts) {
  ChannelSet no_si = ch;
  no_si.h_si.setZero();
  BaselineResult r = full_duplex_solve(no_si, cfg, opts);
  r.scheme = Scheme::kPerfectFd;
  return r;
}

namespace {

VecC stacked(const VecC& base, const VecC& ext) {
  VecC out(base.size() + ext.size());
  out << base, ext;
  return out;
}

}  // namespace

BaselineResult half_duplex_solve(const ChannelSet& ch, const SystemConfig& cfg,
                                 const spca::SpcaOptions& opts) {
  cfg.validate();
  ch.validate(cfg);
  const int n = cfg.n_tx + cfg.n_rx;
  if (ch.h_d_ext.size() != cfg.n_rx || ch.h_i_ext.size() != cfg.n_rx ||
      ch.g_u_ext.size() != cfg.n_tx)
    throw ContractViolation("half duplex needs the extension channel entries");
  const VecC h_d8 = stacked(ch.h_d, ch.h_d_ext);
  const VecC h_i8 = stacked(ch.h_i, ch.h_i_ext);
  const VecC g_u8 = stacked(ch.g_u, ch.g_u_ext);
  if (h_d8.size() != n || h_i8.size() != n || g_u8.size() != n)
    throw ContractViolation("half-duplex channel dimensions inconsistent");

  // phase 1: downlink-only secrecy design, uplink user silent; the
  // harvested-energy floor sees half the slot plus the phase-2 uplink term
  spca::ProblemForm f;
  f.n_t = n;
  f.h_d = h_d8;
  f.h_i = h_i8;
  f.cci_d = 0.0;
  f.cci_i = 0.0;
  f.sigma_z2 = cfg.sigma_z2;
  f.p_bs = cfg.p_bs;
  f.uplink = false;
  f.energy_coeff = 0.5 * cfg.zeta;
  f.energy_offset = 0.5 * cfg.zeta * cfg.p_u * std::norm(ch.g_i);
  f.e_min = cfg.e_min;

  const spca::CoreResult core = spca::solve_core(f, opts);
  const double qi = quad_form(h_i8, core.s) + quad_form(h_i8, core.v);
  const double energy =
      0.5 * cfg.zeta * qi + 0.5 * cfg.zeta * cfg.p_u * std::norm(ch.g_i);

  // phase 2: all n antennas receive, no transmit, MRC is optimal; the idle
  // user overhears the uplink with no AN cover
  const double gamma_u = cfg.p_u * g_u8.squaredNorm() / cfg.sigma_z2;
  const double gamma_i_u = cfg.p_u * std::norm(ch.g_i) / cfg.sigma_z2;
  const double r_u_full =
      std::max(0.0, std::log2(1.0 + gamma_u) - std::log2(1.0 + gamma_i_u));

  BaselineResult r;
  r.scheme = Scheme::kHalfDuplex;
  r.r_d_sec = 0.5 * core.u_bits;
  r.r_u_sec = 0.5 * r_u_full;
  r.r_sum = r.r_d_sec + r.r_u_sec;
  r.energy = energy;
  return r;
}

}  // namespace baselines
}  // namespace fdswipt
