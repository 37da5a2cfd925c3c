#pragma once

#include "fdswipt/types.hpp"

#include <string>
#include <vector>

namespace fdswipt {

/// Slack ordering inside a subproblem. Downlink-only problems use the
/// first four entries; full-duplex problems use all six.
enum SlackIndex : int { kXd = 0, kYd = 1, kXi = 2, kYi = 3, kTu = 4, kYu = 5 };

enum class ConstraintKind {
  kExpUpper,     // e^{slacks[exp_index]} <= lhs(S, V, slacks)
  kAffineIneq,   // lhs(S, V, slacks) >= 0
  kTraceBudget,  // lhs(S, V, slacks) >= 0 with lhs = p_bs - Tr S - Tr V
};

/// Unit of a constraint row; power rows are normalized by sigma_z2 before
/// the barrier solve, unitless rows are not.
enum class ConstraintUnit { kPower, kUnitless };

/// Real-valued affine functional Tr(A_s S) + Tr(A_v V) + d . slacks + c
/// over Hermitian S, V (A_s, A_v Hermitian).
struct AffineForm {
  MatC a_s;  // zero-size when the row does not touch S
  MatC a_v;
  VecD d;    // slack coefficients, length = spec.n_slacks
  double c = 0.0;
};

struct Constraint {
  ConstraintKind kind = ConstraintKind::kAffineIneq;
  ConstraintUnit unit = ConstraintUnit::kPower;
  AffineForm lhs;
  int exp_index = -1;  // slack index under e^{.} for kExpUpper rows
  std::string tag;     // diagnostic label, e.g. "16b"
};

/// One fully-linearized convex program: maximize objective . slacks over
/// Hermitian PSD S, V (n_t x n_t each, implicit cone constraints) and the
/// scalar slacks, subject to the listed rows.
struct SubproblemSpec {
  int n_t = 0;
  int n_r = 0;
  int n_slacks = 0;
  VecD objective;  // bits per unit slack
  std::vector<Constraint> constraints;
  std::vector<bool> slack_is_power_log;  // log-of-watts slacks shift under scaling
  double sigma_z2 = 1.0;
  double p_bs = 1.0;

  void validate() const;
};

enum class SolveStatus { kOptimal, kInfeasible, kMaxIter, kNumericalFailure };

const char* to_string(SolveStatus s);

struct SubproblemSolution {
  MatC s;           // watts
  MatC v;           // watts
  VecD slacks;      // natural-log units (logs of watts where applicable)
  double objective = 0.0;  // bits
  SolveStatus status = SolveStatus::kNumericalFailure;
  int newton_iters = 0;
  double duality_gap = 0.0;     // scaled by max(1, |objective|)
  double feas_violation = 0.0;  // scaled max violation at the returned point

  // Lagrange multipliers of the watt-unit constraints, one per row, and
  // of the two PSD cones (gradients w.r.t. S and V respectively).
  VecD duals;
  MatC dual_s;
  MatC dual_v;
};

}  // namespace fdswipt
