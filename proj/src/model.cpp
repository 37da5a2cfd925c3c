#include "fdswipt/model.hpp"

#include <cmath>

namespace fdswipt {

void SystemConfig::validate() const {
  if (n_tx < 1 || n_rx < 1) throw ContractViolation("antenna counts must be >= 1");
  if (!(p_bs > 0.0)) throw ContractViolation("p_bs must be > 0");
  if (!(p_u >= 0.0)) throw ContractViolation("p_u must be >= 0");
  if (!(zeta > 0.0 && zeta <= 1.0)) throw ContractViolation("zeta must be in (0, 1]");
  if (!(sigma_z2 > 0.0)) throw ContractViolation("sigma_z2 must be > 0");
  if (!(sigma_si2 >= 0.0)) throw ContractViolation("sigma_si2 must be >= 0");
  if (!(e_min >= 0.0)) throw ContractViolation("e_min must be >= 0");
  if (!(attn_bs_idle_db >= 0.0) || !(attn_other_db >= 0.0))
    throw ContractViolation("attenuations must be >= 0");
}

namespace {

bool all_finite(const MatC& m) {
  return m.array().isFinite().all();
}

}  // namespace

void ChannelSet::validate(const SystemConfig& cfg) const {
  if (h_d.size() != cfg.n_tx || h_i.size() != cfg.n_tx)
    throw ContractViolation("downlink channel length != n_tx");
  if (g_u.size() != cfg.n_rx)
    throw ContractViolation("uplink channel length != n_rx");
  if (h_si.rows() != cfg.n_rx || h_si.cols() != cfg.n_tx)
    throw ContractViolation("h_si must be n_rx x n_tx");
  if (!all_finite(h_d) || !all_finite(h_i) || !all_finite(g_u) || !all_finite(h_si) ||
      !std::isfinite(g_d.real()) || !std::isfinite(g_d.imag()) ||
      !std::isfinite(g_i.real()) || !std::isfinite(g_i.imag()))
    throw ContractViolation("channel entries must be finite");
}

TransmitDesign TransmitDesign::make(MatC s, MatC v) {
  if (s.rows() != s.cols() || v.rows() != v.cols() || s.rows() != v.rows())
    throw ContractViolation("covariances must be square and same size");
  const double scale_s = std::max(1.0, s.norm());
  const double scale_v = std::max(1.0, v.norm());
  MatC sh = 0.5 * (s + s.adjoint());
  MatC vh = 0.5 * (v + v.adjoint());
  if ((sh - s).norm() > 1e-10 * scale_s || (vh - v).norm() > 1e-10 * scale_v)
    throw ContractViolation("covariance is not Hermitian to tolerance");
  return TransmitDesign{std::move(sh), std::move(vh)};
}

void TransmitDesign::validate(double p_bs) const {
  Eigen::SelfAdjointEigenSolver<MatC> es(s_cov, Eigen::EigenvaluesOnly);
  Eigen::SelfAdjointEigenSolver<MatC> ev(v_cov, Eigen::EigenvaluesOnly);
  const double tr_s = s_cov.trace().real();
  const double tr_v = v_cov.trace().real();
  if (es.eigenvalues().minCoeff() < -1e-9 * std::max(tr_s, 1e-300))
    throw ContractViolation("S is not PSD to tolerance");
  if (ev.eigenvalues().minCoeff() < -1e-9 * std::max(tr_v, 1e-300))
    throw ContractViolation("V is not PSD to tolerance");
  if (tr_s + tr_v > p_bs * (1.0 + 1e-9))
    throw ContractViolation("Tr(S)+Tr(V) exceeds the power budget");
}

void ReceiveVector::validate() const {
  if (std::abs(w.norm() - 1.0) > 1e-10)
    throw ContractViolation("receive vector is not unit norm");
}

double quad_form(const VecC& h, const MatC& m) {
  if (m.rows() != h.size() || m.cols() != h.size())
    throw ContractViolation("quad_form dimension mismatch");
  const Cplx q = h.dot(m * h);  // h^H M h
  // The reference scale is ||h||^2 ||M||, not |q|: a nearly-orthogonal
  // direction cancels the value to rounding noise in both components.
  const double ref = h.squaredNorm() * m.norm();
  if (std::abs(q.imag()) > 1e-12 * std::max(ref, 1e-300) + 1e-300)
    throw ContractViolation("quadratic form has a non-negligible imaginary part");
  return q.real();
}

double downlink_sinr(const ChannelSet& ch, const TransmitDesign& d,
                     const SystemConfig& cfg) {
  // PSD quadratic forms can round to tiny negatives along near-null
  // directions; clamp so the SINR stays in [0, inf)
  const double num = std::max(0.0, quad_form(ch.h_d, d.s_cov));
  const double den = std::max(0.0, quad_form(ch.h_d, d.v_cov)) +
                     cfg.p_u * std::norm(ch.g_d) + cfg.sigma_z2;
  return num / den;
}

double uplink_sinr_with_receiver(const ChannelSet& ch, const TransmitDesign& d,
                                 const VecC& w, const SystemConfig& cfg) {
  if (w.size() != cfg.n_rx) throw ContractViolation("receive vector length != n_rx");
  if (std::abs(w.norm() - 1.0) > 1e-10)
    throw ContractViolation("receive vector is not unit norm");
  const double num = cfg.p_u * std::norm(w.dot(ch.g_u));
  const MatC x_si = ch.h_si * (d.s_cov + d.v_cov) * ch.h_si.adjoint();
  const double den = std::max(0.0, quad_form(w, 0.5 * (x_si + x_si.adjoint()))) +
                     cfg.sigma_z2 * w.squaredNorm();
  return num / den;
}

double eve_downlink_sinr(const ChannelSet& ch, const TransmitDesign& d,
                         const SystemConfig& cfg) {
  const double num = std::max(0.0, quad_form(ch.h_i, d.s_cov));
  const double den = std::max(0.0, quad_form(ch.h_i, d.v_cov)) +
                     cfg.p_u * std::norm(ch.g_i) + cfg.sigma_z2;
  return num / den;
}

double eve_uplink_sinr(const ChannelSet& ch, const TransmitDesign& d,
                       const SystemConfig& cfg) {
  const double num = cfg.p_u * std::norm(ch.g_i);
  const double den = std::max(0.0, quad_form(ch.h_i, d.v_cov)) +
                     std::max(0.0, quad_form(ch.h_i, d.s_cov)) + cfg.sigma_z2;
  return num / den;
}

std::pair<double, double> secrecy_rates(double gamma_main_dl, double gamma_eve_dl,
                                        double gamma_main_ul, double gamma_eve_ul) {
  for (double g : {gamma_main_dl, gamma_eve_dl, gamma_main_ul, gamma_eve_ul})
    if (!(g >= 0.0)) throw ContractViolation("SINRs must be nonnegative");
  const double r_d = std::max(0.0, std::log2(1.0 + gamma_main_dl) - std::log2(1.0 + gamma_eve_dl));
  const double r_u = std::max(0.0, std::log2(1.0 + gamma_main_ul) - std::log2(1.0 + gamma_eve_ul));
  return {r_d, r_u};
}

double harvested_energy(const ChannelSet& ch, const TransmitDesign& d,
                        const SystemConfig& cfg) {
  return cfg.zeta * (std::max(0.0, quad_form(ch.h_i, d.s_cov)) +
                     std::max(0.0, quad_form(ch.h_i, d.v_cov)) +
                     cfg.p_u * std::norm(ch.g_i));
}

bool is_feasible(const ChannelSet& ch, const SystemConfig& cfg) {
  return cfg.e_min <= cfg.zeta * (cfg.p_bs * ch.h_i.squaredNorm() + cfg.p_u * std::norm(ch.g_i));
}

RatesReport full_report(const ChannelSet& ch, const TransmitDesign& d,
                        const VecC& w, const SystemConfig& cfg) {
  RatesReport r;
  r.gamma_d = downlink_sinr(ch, d, cfg);
  r.gamma_u = uplink_sinr_with_receiver(ch, d, w, cfg);
  r.gamma_i_d = eve_downlink_sinr(ch, d, cfg);
  r.gamma_i_u = eve_uplink_sinr(ch, d, cfg);
  std::tie(r.r_d_sec, r.r_u_sec) = secrecy_rates(r.gamma_d, r.gamma_i_d, r.gamma_u, r.gamma_i_u);
  r.r_sum = r.r_d_sec + r.r_u_sec;
  r.energy = harvested_energy(ch, d, cfg);
  return r;
}

}  // namespace fdswipt
