#pragma once

#include "fdswipt/types.hpp"

namespace fdswipt {

/// Real value of h^H M h for Hermitian M. Checks that the imaginary
/// residue is negligible (1e-12 relative) before dropping it.
double quad_form(const VecC& h, const MatC& m);

/// SINR of the information signal at the downlink user.
double downlink_sinr(const ChannelSet& ch, const TransmitDesign& d,
                     const SystemConfig& cfg);

/// Uplink SINR at the FD-BS for an explicit unit receive vector w.
double uplink_sinr_with_receiver(const ChannelSet& ch, const TransmitDesign& d,
                                 const VecC& w, const SystemConfig& cfg);

/// Downlink SINR observed by the (eavesdropping) idle user.
double eve_downlink_sinr(const ChannelSet& ch, const TransmitDesign& d,
                         const SystemConfig& cfg);

/// Uplink SINR observed by the idle user.
double eve_uplink_sinr(const ChannelSet& ch, const TransmitDesign& d,
                       const SystemConfig& cfg);

/// Clamped secrecy rates [bits/s/Hz] for the two links:
/// max{0, log2(1+gamma_main) - log2(1+gamma_eve)} each.
std::pair<double, double> secrecy_rates(double gamma_main_dl,
                                        double gamma_eve_dl,
                                        double gamma_main_ul,
                                        double gamma_eve_ul);

/// RF power harvested by the idle user [W].
double harvested_energy(const ChannelSet& ch, const TransmitDesign& d,
                        const SystemConfig& cfg);

/// True iff e_min <= zeta * (p_bs ||h_i||^2 + p_u |g_i|^2).
bool is_feasible(const ChannelSet& ch, const SystemConfig& cfg);

/// Assembles every SINR, both secrecy rates and the harvested energy.
RatesReport full_report(const ChannelSet& ch, const TransmitDesign& d,
                        const VecC& w, const SystemConfig& cfg);

}  // namespace fdswipt
