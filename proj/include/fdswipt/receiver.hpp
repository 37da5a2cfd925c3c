#pragma once

#include "fdswipt/types.hpp"

namespace fdswipt {

/// MMSE-style receive vector X_U^{-1} g_U / ||X_U^{-1} g_U|| with
/// X_U = sigma_z2 I + H_SI (S+V) H_SI^H, computed through a
/// positive-definite factorization. The global phase is fixed so the
/// largest-magnitude entry is real positive.
ReceiveVector optimal_receiver(const ChannelSet& ch, const TransmitDesign& d,
                               const SystemConfig& cfg);

/// Closed-form uplink SINR p_u g_U^H X_U^{-1} g_U.
double uplink_sinr_closed_form(const ChannelSet& ch, const TransmitDesign& d,
                               const SystemConfig& cfg);

namespace detail {

/// X_U for arbitrary channel blocks; used by both receiver functions and
/// the half-duplex baseline.
MatC interference_matrix(const MatC& h_si, const MatC& sum_cov, double sigma_z2);

/// Solves X w = g with a conditioning guard: if cond(X) > 1e12 a ridge of
/// 1e-12 sigma_z2 is added and *flagged is set.
VecC guarded_pd_solve(const MatC& x, const VecC& g, double sigma_z2, bool* flagged);

}  // namespace detail

}  // namespace fdswipt
