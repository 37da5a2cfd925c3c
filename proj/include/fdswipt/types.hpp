#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace fdswipt {

using Cplx = std::complex<double>;
using VecC = Eigen::VectorXcd;
using MatC = Eigen::MatrixXcd;
using VecD = Eigen::VectorXd;
using MatD = Eigen::MatrixXd;

/// Precondition or type-invariant breach (caller bug).
struct ContractViolation : std::logic_error {
  using std::logic_error::logic_error;
};

/// The optimization instance has an empty feasible set.
struct InfeasibleProblem : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A channel realization is degenerate (e.g. zero uplink vector).
struct DegenerateChannel : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Factorization or iteration breakdown inside a numerical routine.
struct NumericalFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// All scalar physical parameters of the full-duplex SWIPT link.
/// Powers are in watts; attenuations in dB relative to unit gain.
struct SystemConfig {
  int n_tx = 4;                   // transmit antennas at the FD base station
  int n_rx = 4;                   // receive antennas at the FD base station
  double p_bs = 1.0;              // max base-station transmit power [W]
  double p_u = 0.1;               // uplink user transmit power [W]
  double zeta = 0.5;              // RF energy conversion efficiency
  double sigma_z2 = 1e-8;         // receiver noise power [W] (-80 dBW)
  double sigma_si2 = 1e-6;        // residual self-interference gain variance
  double e_min = 0.0;             // minimum harvested energy [W]
  double attn_bs_idle_db = 30.0;  // BS -> idle-user path attenuation [dB]
  double attn_other_db = 70.0;    // all other link attenuations [dB]

  void validate() const;
};

/// One block-static realization of all channels in the system.
///
/// The *_ext members carry extra i.i.d. entries (same per-entry attenuation
/// as their base vector) used only by the 8-antenna half-duplex baseline,
/// which stacks them under the base vectors. They are populated by
/// gen_channels; hand-built sets may leave them empty.
struct ChannelSet {
  VecC h_d;   // FD-BS -> downlink user, length n_tx
  VecC h_i;   // FD-BS -> idle user, length n_tx
  Cplx g_d{0.0, 0.0};  // uplink user -> downlink user
  Cplx g_i{0.0, 0.0};  // uplink user -> idle user
  VecC g_u;   // uplink user -> FD-BS, length n_rx
  MatC h_si;  // residual self-interference channel, n_rx x n_tx

  VecC h_d_ext;  // length n_rx, extends h_d to n_tx+n_rx antennas
  VecC h_i_ext;  // length n_rx, extends h_i
  VecC g_u_ext;  // length n_tx, extends g_u

  void validate(const SystemConfig& cfg) const;
};

/// Hermitian PSD covariance pair: information signal S and artificial
/// noise V, both n_tx x n_tx in watts.
struct TransmitDesign {
  MatC s_cov;
  MatC v_cov;

  /// Symmetrizes both matrices and checks the Hermitian drift is below
  /// 1e-10 before accepting.
  static TransmitDesign make(MatC s, MatC v);

  /// PSD (min eigenvalue >= -1e-9 * trace) and power budget
  /// Tr(S)+Tr(V) <= p_bs * (1 + 1e-9).
  void validate(double p_bs) const;
};

/// Unit-norm uplink receive vector.
struct ReceiveVector {
  VecC w;
  bool conditioning_flagged = false;  // set if a ridge was added to X_U

  void validate() const;  // ||w|| = 1 to 1e-10
};

/// All SINRs, secrecy rates and harvested energy for one design.
struct RatesReport {
  double gamma_d = 0.0;    // downlink SINR at the downlink user
  double gamma_u = 0.0;    // uplink SINR at the FD-BS
  double gamma_i_d = 0.0;  // downlink SINR observed by the idle user
  double gamma_i_u = 0.0;  // uplink SINR observed by the idle user
  double r_d_sec = 0.0;    // downlink secrecy rate [bits/s/Hz]
  double r_u_sec = 0.0;    // uplink secrecy rate [bits/s/Hz]
  double r_sum = 0.0;      // r_d_sec + r_u_sec
  double energy = 0.0;     // harvested power at the idle user [W]
};

/// dB attenuation -> linear average channel gain.
inline double attn_db_to_gain(double attn_db) {
  return std::pow(10.0, -attn_db / 10.0);
}

}  // namespace fdswipt
