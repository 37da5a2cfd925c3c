#pragma once

#include "fdswipt/subproblem.hpp"

#include <optional>

namespace fdswipt {
namespace subsolver {

/// [[Re M, -Im M], [Im M, Re M]]; PSD iff M is PSD, eigenvalues doubled.
MatD real_embedding(const MatC& m);

/// Inverse of real_embedding (exact round trip on embedded inputs).
MatC from_real_embedding(const MatD& e);

struct Phase1Result {
  bool feasible = false;
  // strictly feasible point when feasible
  MatC s;
  MatC v;
  VecD slacks;
  // minimal relaxation that makes all scalar rows hold; > 0 when infeasible
  double infeasibility = 0.0;
};

/// Finds a strictly feasible point for the scalar rows (the PSD cones are
/// kept strictly satisfied throughout), or reports the minimal scalar
/// relaxation as an infeasibility measure.
Phase1Result phase1(const SubproblemSpec& spec);

struct SolveOptions {
  double tol = 1e-7;          // duality-gap target, scaled by max(1, |obj|)
  double mu = 10.0;           // barrier growth per stage
  double t0 = 1.0;            // initial barrier parameter
  int max_newton = 400;       // total Newton-iteration budget
  std::optional<SubproblemSolution> warm;  // previous iterate, pulled to interior
};

/// Log-barrier interior-point solve of one SubproblemSpec. Damped Newton
/// with Armijo backtracking; power rows and matrix variables are
/// noise/power normalized internally and unscaled on return.
SubproblemSolution solve(const SubproblemSpec& spec, const SolveOptions& opts = {});

/// Evaluates one watt-unit constraint row at a point.
double eval_constraint(const Constraint& con, const MatC& s, const MatC& v,
                       const VecD& slacks);

/// Max scaled violation over all rows plus PSD eigenvalue deficits;
/// independent of solver internals (direct evaluation).
double max_violation(const SubproblemSpec& spec, const MatC& s, const MatC& v,
                     const VecD& slacks);

/// Versioned structured-text dump of a spec and (optionally) a solution
/// for offline inspection. Schema documented in the README.
void dump_spec(const SubproblemSpec& spec, const SubproblemSolution* sol,
               const std::string& path);

}  // namespace subsolver
}  // namespace fdswipt
