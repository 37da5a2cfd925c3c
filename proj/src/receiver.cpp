#include "fdswipt/receiver.hpp"

#include "fdswipt/model.hpp"

#include <cmath>

namespace fdswipt {
namespace detail {

MatC interference_matrix(const MatC& h_si, const MatC& sum_cov, double sigma_z2) {
  MatC x = h_si * sum_cov * h_si.adjoint();
  x = 0.5 * (x + x.adjoint());  // remove Hermitian fp drift
  x.diagonal().array() += sigma_z2;
  return x;
}

VecC guarded_pd_solve(const MatC& x, const VecC& g, double sigma_z2, bool* flagged) {
  Eigen::SelfAdjointEigenSolver<MatC> es(x, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  MatC xr = x;
  if (!(lo > 0.0) || hi / lo > 1e12) {
    xr.diagonal().array() += 1e-12 * sigma_z2;
    if (flagged) *flagged = true;
  }
  Eigen::LLT<MatC> llt(xr);
  if (llt.info() != Eigen::Success)
    throw NumericalFailure("X_U factorization failed");
  return llt.solve(g);
}

}  // namespace detail

ReceiveVector optimal_receiver(const ChannelSet& ch, const TransmitDesign& d,
                               const SystemConfig& cfg) {
  if (ch.g_u.norm() == 0.0)
    throw DegenerateChannel("g_u is zero; receive vector undefined");
  const MatC x_u = detail::interference_matrix(ch.h_si, d.s_cov + d.v_cov, cfg.sigma_z2);
  ReceiveVector rv;
  VecC w = detail::guarded_pd_solve(x_u, ch.g_u, cfg.sigma_z2, &rv.conditioning_flagged);
  w /= w.norm();
  // deterministic global phase: largest-magnitude entry real positive
  int k = 0;
  w.cwiseAbs().maxCoeff(&k);
  const Cplx pivot = w(k);
  if (std::abs(pivot) > 0.0) w *= std::conj(pivot) / std::abs(pivot);
  rv.w = std::move(w);
  rv.validate();
  return rv;
}

double uplink_sinr_closed_form(const ChannelSet& ch, const TransmitDesign& d,
                               const SystemConfig& cfg) {
  if (ch.g_u.norm() == 0.0)
    throw DegenerateChannel("g_u is zero");
  const MatC x_u = detail::interference_matrix(ch.h_si, d.s_cov + d.v_cov, cfg.sigma_z2);
  const VecC sol = detail::guarded_pd_solve(x_u, ch.g_u, cfg.sigma_z2, nullptr);
  const Cplx q = ch.g_u.dot(sol);
  return cfg.p_u * q.real();
}

}  // namespace fdswipt
