#pragma once

#include "fdswipt/model.hpp"
#include "fdswipt/subproblem.hpp"
#include "fdswipt/subsolver.hpp"

#include <atomic>
#include <vector>

namespace fdswipt {
namespace spca {

/// Slack values in natural-log units. t_u/y_u are unused (zero) for
/// downlink-only problems.
struct SlackVector {
  double x_d = 0, y_d = 0, x_i = 0, y_i = 0, t_u = 0, y_u = 0;

  VecD to_vec(int n_slacks) const;
  static SlackVector from_vec(const VecD& v);
};

/// Previous iterate plus the cached logs the Taylor bounds expand around.
struct LinearizationPoint {
  MatC s_star;
  MatC v_star;
  double y_d_star = 0;  // ln(h_d^H V* h_d + cci_d + sigma_z2)
  double x_i_star = 0;  // ln(h_i^H (S*+V*) h_i + cci_i + sigma_z2)
  MatC x_u_star;        // sigma_z2 I + H_SI (S*+V*) H_SI^H
};

enum class StopReason { kConverged, kMaxIterations, kSubsolverFailure };

struct IterRecord {
  int n = 0;
  double u_bits = 0.0;           // true (clamped) sum secrecy objective
  double rel_improvement = 0.0;
  SlackVector slacks;
  SolveStatus sub_status = SolveStatus::kOptimal;
  double kkt_residual = -1.0;    // -1 until computed
};

struct SpcaTrace {
  std::vector<IterRecord> iters;
  StopReason reason = StopReason::kMaxIterations;
};

struct SpcaOptions {
  double rel_tol = 1e-3;
  int max_iter = 50;
  // kept well under the 1e-7 monotonicity budget so the subproblem's
  // duality gap cannot masquerade as an objective decrease
  double subsolver_tol = 1e-8;
  // After the relative-improvement test fires, keep iterating until the
  // KKT residual drops below kkt_tol (or max_polish extra rounds).
  bool polish = true;
  double kkt_tol = 8e-5;
  int max_polish = 2000;
};

/// A secrecy-rate design problem in the shape the SPCA loop consumes.
/// The full-duplex problem and the half-duplex phase-1 problem are both
/// instances of this form.
struct ProblemForm {
  int n_t = 0;
  VecC h_d;
  VecC h_i;
  double cci_d = 0.0;  // co-channel power p_u |g_d|^2 at the downlink user
  double cci_i = 0.0;  // co-channel power p_u |g_i|^2 at the idle user
  double sigma_z2 = 0.0;
  double p_bs = 0.0;
  // uplink leg (absent for downlink-only problems)
  bool uplink = false;
  int n_r = 0;
  VecC g_u;
  MatC h_si;
  double p_u = 0.0;
  // harvested-energy constraint: coeff * h_i^H (S+V) h_i + offset >= e_min
  double energy_coeff = 0.0;
  double energy_offset = 0.0;
  double e_min = 0.0;

  static ProblemForm full_duplex(const ChannelSet& ch, const SystemConfig& cfg);

  int n_slacks() const { return uplink ? 6 : 4; }
};

struct CoreResult {
  MatC s;
  MatC v;
  SlackVector slacks;
  double u_bits = 0.0;
  SpcaTrace trace;
  SubproblemSolution last_solution;  // duals of the final subproblem
};

/// Chord-at-tangent lower bound e^{y*}(y - y* + 1) <= e^y.
double exp_tangent(double y, double y_star);

/// First-order lower bound on p_u g_u^H X_U^{-1} g_u around lp.x_u_star.
double g_linearization(const MatC& x_u, const LinearizationPoint& lp,
                       const ChannelSet& ch, const SystemConfig& cfg);

/// Feasible starting design: artificial noise along the idle-user channel
/// (covers the energy floor) plus information power on the component of
/// h_d orthogonal to h_i, split so both per-link nonnegativity margins
/// hold at the start.
std::pair<TransmitDesign, LinearizationPoint> init_feasible(const ChannelSet& ch,
                                                            const SystemConfig& cfg);

/// Convex subproblem at one linearization point (full-duplex form).
SubproblemSpec build_subproblem(const LinearizationPoint& lp, const ChannelSet& ch,
                                const SystemConfig& cfg);

struct SpcaResult {
  TransmitDesign design;
  ReceiveVector w;
  RatesReport report;
  SpcaTrace trace;
  SubproblemSolution last_solution;
};

SpcaResult spca_solve(const ChannelSet& ch, const SystemConfig& cfg,
                      const SpcaOptions& opts = {});

/// Generalized core used by spca_solve and the half-duplex baseline.
CoreResult solve_core(const ProblemForm& form, const SpcaOptions& opts);

/// Max of scale-normalized stationarity, complementary slackness and
/// primal feasibility residuals of the slack-reformulated problem at
/// (d, slacks) with the given subproblem multipliers.
double kkt_residual(const TransmitDesign& d, const SlackVector& slacks,
                    const SubproblemSolution& duals, const ChannelSet& ch,
                    const SystemConfig& cfg);

namespace testing {
// Test-only fault-injection hook: sign applied to the trace term of
// g_linearization. Flipping it must break the conservative-bound suite.
extern std::atomic<double> g_lin_trace_sign;
}  // namespace testing

}  // namespace spca
}  // namespace fdswipt
