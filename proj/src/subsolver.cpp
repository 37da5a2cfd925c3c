#include "fdswipt/subsolver.hpp"

#include "fdswipt/detail/herm_basis.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>

namespace fdswipt {

void SubproblemSpec::validate() const {
  if (n_t < 1) throw ContractViolation("spec: n_t must be >= 1");
  if (n_slacks < 1 || objective.size() != n_slacks)
    throw ContractViolation("spec: objective length != n_slacks");
  if (static_cast<int>(slack_is_power_log.size()) != n_slacks)
    throw ContractViolation("spec: slack unit mask length != n_slacks");
  if (!(sigma_z2 > 0.0) || !(p_bs > 0.0))
    throw ContractViolation("spec: sigma_z2 and p_bs must be > 0");
  for (const auto& con : constraints) {
    if (con.lhs.d.size() != n_slacks)
      throw ContractViolation("spec row '" + con.tag + "': slack coefficient length");
    for (const MatC* a : {&con.lhs.a_s, &con.lhs.a_v}) {
      if (a->size() == 0) continue;
      if (a->rows() != n_t || a->cols() != n_t)
        throw ContractViolation("spec row '" + con.tag + "': coefficient matrix size");
      if ((*a - a->adjoint()).norm() > 1e-10 * std::max(1.0, a->norm()))
        throw ContractViolation("spec row '" + con.tag + "': coefficient not Hermitian");
    }
    if (con.kind == ConstraintKind::kExpUpper) {
      if (con.exp_index < 0 || con.exp_index >= n_slacks)
        throw ContractViolation("spec row '" + con.tag + "': bad exp_index");
      const bool power_slack = slack_is_power_log[con.exp_index];
      if (power_slack != (con.unit == ConstraintUnit::kPower))
        throw ContractViolation("spec row '" + con.tag + "': exp slack unit mismatch");
    }
  }
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kInfeasible: return "infeasible";
    case SolveStatus::kMaxIter: return "max-iter";
    case SolveStatus::kNumericalFailure: return "numerical-failure";
  }
  return "unknown";
}

namespace subsolver {

MatD real_embedding(const MatC& m) {
  const Eigen::Index n = m.rows();
  if (m.cols() != n) throw ContractViolation("real_embedding: matrix not square");
  if ((m - m.adjoint()).norm() > 1e-10 * std::max(1.0, m.norm()))
    throw ContractViolation("real_embedding: matrix not Hermitian");
  MatD e(2 * n, 2 * n);
  e.topLeftCorner(n, n) = m.real();
  e.topRightCorner(n, n) = -m.imag();
  e.bottomLeftCorner(n, n) = m.imag();
  e.bottomRightCorner(n, n) = m.real();
  return e;
}

MatC from_real_embedding(const MatD& e) {
  const Eigen::Index n2 = e.rows();
  if (e.cols() != n2 || n2 % 2 != 0)
    throw ContractViolation("from_real_embedding: bad size");
  const Eigen::Index n = n2 / 2;
  MatC m(n, n);
  m.real() = e.topLeftCorner(n, n);
  m.imag() = e.bottomLeftCorner(n, n);
  return m;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using detail::HermBasis;

// Noise/power-normalized copy of the spec over one flat variable vector
// z = [S coords | V coords | slacks], with S, V divided by p_bs, power
// rows divided by sigma_z2, and log-of-watts slacks shifted by -ln(sigma).
struct ScaledProblem {
  int n_t = 0;
  int nm = 0;        // coords per matrix
  int n_slacks = 0;
  int nz = 0;
  HermBasis basis;
  VecD c;            // maximize c . z
  double m_total = 0;  // barrier degree: rows + 2 * 2*n_t

  struct Row {
    VecD a;        // gradient of the affine part over z
    double cst = 0.0;
    int expvar = -1;  // z index under e^{.}, or -1
    double unit_div = 1.0;  // divisor applied to the watt-unit row
  };
  std::vector<Row> rows;

  const SubproblemSpec* spec = nullptr;

  explicit ScaledProblem(const SubproblemSpec& sp) : spec(&sp) {
    n_t = sp.n_t;
    basis.n = n_t;
    nm = basis.dim();
    n_slacks = sp.n_slacks;
    nz = 2 * nm + n_slacks;

    const double lns = std::log(sp.sigma_z2);
    c = VecD::Zero(nz);
    for (int j = 0; j < n_slacks; ++j) c(2 * nm + j) = sp.objective(j);

    rows.reserve(sp.constraints.size());
    for (const auto& con : sp.constraints) {
      Row r;
      r.unit_div = (con.unit == ConstraintUnit::kPower) ? sp.sigma_z2 : 1.0;
      r.a = VecD::Zero(nz);
      if (con.lhs.a_s.size() != 0)
        r.a.segment(0, nm) = basis.affine_coeffs(con.lhs.a_s) * (sp.p_bs / r.unit_div);
      if (con.lhs.a_v.size() != 0)
        r.a.segment(nm, nm) = basis.affine_coeffs(con.lhs.a_v) * (sp.p_bs / r.unit_div);
      r.cst = con.lhs.c;
      for (int j = 0; j < n_slacks; ++j) {
        r.a(2 * nm + j) = con.lhs.d(j) / r.unit_div;
        if (sp.slack_is_power_log[j]) r.cst += con.lhs.d(j) * lns;
      }
      r.cst /= r.unit_div;
      if (con.kind == ConstraintKind::kExpUpper) r.expvar = 2 * nm + con.exp_index;
      rows.push_back(std::move(r));
    }
    m_total = static_cast<double>(rows.size()) + 4.0 * n_t;
  }

  double row_value(const Row& r, const VecD& z) const {
    double g = r.a.dot(z) + r.cst;
    if (r.expvar >= 0) g -= std::exp(z(r.expvar));
    return g;
  }

  MatC mat_s(const VecD& z) const { return basis.unpack(z.segment(0, nm)); }
  MatC mat_v(const VecD& z) const { return basis.unpack(z.segment(nm, nm)); }

  // z from watt-unit (S, V, slacks)
  VecD pack_point(const MatC& s, const MatC& v, const VecD& slacks) const {
    VecD z(nz);
    z.segment(0, nm) = basis.pack(s / spec->p_bs);
    z.segment(nm, nm) = basis.pack(v / spec->p_bs);
    const double lns = std::log(spec->sigma_z2);
    for (int j = 0; j < n_slacks; ++j)
      z(2 * nm + j) = slacks(j) - (spec->slack_is_power_log[j] ? lns : 0.0);
    return z;
  }

  void unpack_point(const VecD& z, MatC* s, MatC* v, VecD* slacks) const {
    *s = mat_s(z) * spec->p_bs;
    *v = mat_v(z) * spec->p_bs;
    const double lns = std::log(spec->sigma_z2);
    slacks->resize(n_slacks);
    for (int j = 0; j < n_slacks; ++j)
      (*slacks)(j) = z(2 * nm + j) + (spec->slack_is_power_log[j] ? lns : 0.0);
  }

  // Strict feasibility with margin; PSD via Cholesky of the real embedding.
  bool strictly_feasible(const VecD& z, double margin = 0.0) const {
    for (const auto& r : rows)
      if (!(row_value(r, z) > margin)) return false;
    for (const MatC& m : {mat_s(z), mat_v(z)}) {
      Eigen::LLT<MatD> llt(real_embedding(m));
      if (llt.info() != Eigen::Success) return false;
    }
    return true;
  }

  // -log det of the real embedding, +inf if not PD.
  static double neg_logdet_emb(const MatC& m) {
    Eigen::LLT<MatD> llt(real_embedding(m));
    if (llt.info() != Eigen::Success) return kInf;
    return -2.0 * llt.matrixLLT().diagonal().array().log().sum();
  }

  double barrier_value(const VecD& z, double t) const {
    double f = -t * c.dot(z);
    for (const auto& r : rows) {
      const double g = row_value(r, z);
      if (!(g > 0.0)) return kInf;
      f -= std::log(g);
    }
    const double ls = neg_logdet_emb(mat_s(z));
    const double lv = neg_logdet_emb(mat_v(z));
    if (!std::isfinite(ls) || !std::isfinite(lv)) return kInf;
    return f + ls + lv;
  }

  // grad/Hess of the barrier at a strictly feasible z.
  void derivatives(const VecD& z, double t, VecD* grad, MatD* hess) const {
    grad->setZero(nz);
    hess->setZero(nz, nz);
    *grad -= t * c;
    VecD gi(nz);
    for (const auto& r : rows) {
      const double g = row_value(r, z);
      gi = r.a;
      double ex = 0.0;
      if (r.expvar >= 0) {
        ex = std::exp(z(r.expvar));
        gi(r.expvar) -= ex;
      }
      *grad -= gi / g;
      hess->noalias() += (gi * gi.transpose()) / (g * g);
      if (r.expvar >= 0) (*hess)(r.expvar, r.expvar) += ex / g;
    }
    psd_derivatives(z, grad, hess);
  }

  // PSD-cone barrier contributions only (adds into grad/hess).
  void psd_derivatives(const VecD& z, VecD* grad, MatD* hess) const {
    for (int blk = 0; blk < 2; ++blk) {
      const int off = blk * nm;
      const MatC m = basis.unpack(z.segment(off, nm));
      Eigen::LLT<MatC> llt(m);
      if (llt.info() != Eigen::Success)
        throw NumericalFailure("PSD block lost definiteness during Newton");
      const MatC minv = llt.solve(MatC::Identity(n_t, n_t));
      std::vector<MatC> cmats(nm);
      for (int k = 0; k < nm; ++k) {
        cmats[k] = minv * basis.basis_mat(k);
        (*grad)(off + k) -= 2.0 * cmats[k].trace().real();
      }
      for (int k = 0; k < nm; ++k)
        for (int l = k; l < nm; ++l) {
          const double h = 2.0 * (cmats[k].array() * cmats[l].transpose().array()).sum().real();
          (*hess)(off + k, off + l) += h;
          if (l != k) (*hess)(off + l, off + k) += h;
        }
    }
  }
};

struct CenterResult {
  bool converged = false;
  int iters = 0;
};

// Damped Newton centering for min barrier_value(., t).
CenterResult center(const ScaledProblem& p, double t, VecD& z, int budget) {
  CenterResult res;
  VecD grad(p.nz);
  MatD hess(p.nz, p.nz);
  double f = p.barrier_value(z, t);
  for (; res.iters < budget; ++res.iters) {
    p.derivatives(z, t, &grad, &hess);
    VecD step;
    double ridge = 0.0;
    for (int attempt = 0; attempt < 60; ++attempt) {
      MatD h = hess;
      if (ridge > 0.0) h.diagonal().array() += ridge;
      Eigen::LDLT<MatD> ldlt(h);
      if (ldlt.info() == Eigen::Success) {
        step = ldlt.solve(-grad);
        if (grad.dot(step) < 0.0) break;
      }
      ridge = (ridge == 0.0) ? 1e-12 * std::max(1.0, hess.diagonal().maxCoeff()) : ridge * 10.0;
      step.resize(0);
    }
    if (step.size() == 0) throw NumericalFailure("Newton system unsolvable");
    const double decrement2 = -grad.dot(step);
    // The decrement measures suboptimality in barrier-objective units,
    // which grow like t; the floor must scale with |f| or rounding in f
    // makes it unreachable at large t.
    if (0.5 * decrement2 < std::max(1e-10, 1e-13 * (1.0 + std::abs(f)))) {
      res.converged = true;
      break;
    }
    // Armijo backtracking, feasibility-preserving
    double alpha = 1.0;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt, alpha *= 0.5) {
      const VecD zn = z + alpha * step;
      const double fn = p.barrier_value(zn, t);
      if (std::isfinite(fn) && fn <= f - 0.01 * alpha * decrement2) {
        z = zn;
        f = fn;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // stagnation: no representable decrease left; accept if the point is
      // well inside the quadratic convergence region
      res.converged = 0.5 * decrement2 < std::max(1e-6, 1e-11 * (1.0 + std::abs(f)));
      ++res.iters;
      break;
    }
  }
  return res;
}

// Heuristic interior slack assignment given fixed matrices in z.
void seed_slacks(const ScaledProblem& p, const SubproblemSpec& spec, VecD& z) {
  const int base = 2 * p.nm;
  // exp rows give upper bounds e^{s} <= lin; affine rows with a positive
  // single-slack coefficient give lower bounds.
  VecD lo = VecD::Constant(p.n_slacks, -kInf);
  VecD hi = VecD::Constant(p.n_slacks, kInf);
  for (std::size_t i = 0; i < p.rows.size(); ++i) {
    const auto& r = p.rows[i];
    if (r.expvar >= 0) {
      const double lin = r.a.dot(z) + r.cst - r.a(r.expvar) * z(r.expvar);
      if (lin > 0.0) hi(r.expvar - base) = std::min(hi(r.expvar - base), std::log(lin));
      continue;
    }
    // single-slack affine rows: a_j * s_j + rest >= 0
    int nnz = 0, jvar = -1;
    for (int j = 0; j < p.n_slacks; ++j)
      if (r.a(base + j) != 0.0) { ++nnz; jvar = j; }
    if (nnz == 1 && r.a(base + jvar) > 0.0) {
      const double rest = r.a.dot(z) - r.a(base + jvar) * z(base + jvar) + r.cst;
      lo(jvar) = std::max(lo(jvar), -rest / r.a(base + jvar));
    }
  }
  for (int j = 0; j < p.n_slacks; ++j) {
    double v;
    if (std::isfinite(lo(j)) && std::isfinite(hi(j)))
      v = (lo(j) < hi(j)) ? 0.5 * (lo(j) + hi(j)) : lo(j) + 0.5;
    else if (std::isfinite(hi(j)))
      v = hi(j) - 0.5;
    else if (std::isfinite(lo(j)))
      v = lo(j) + 0.5;
    else
      v = 0.0;
    z(base + j) = v;
  }
  (void)spec;
}

VecD interior_guess(const ScaledProblem& p) {
  VecD z = VecD::Zero(p.nz);
  const double rho = 1.0 / (4.0 * p.n_t);  // S = V = p_bs/(4 n_t) I in watts
  z.segment(0, p.nm) = p.basis.pack(rho * MatC::Identity(p.n_t, p.n_t));
  z.segment(p.nm, p.nm) = z.segment(0, p.nm);
  seed_slacks(p, *p.spec, z);
  return z;
}

// Phase-1 on the scaled problem: minimize the shared relaxation s of the
// scalar rows, PSD cones kept hard. Returns (feasible-z, infeasibility).
struct Phase1Internal {
  bool feasible = false;
  VecD z;
  double infeasibility = 0.0;
};

Phase1Internal phase1_scaled(const ScaledProblem& p, const VecD* z0 = nullptr) {
  // Augmented problem over (z, s): rows g_i(z) + s > 0, s > -1.
  const double s_floor = -1.0;
  const double stop_margin = 1e-9;
  VecD z = (z0 != nullptr) ? *z0 : interior_guess(p);
  double s = 0.0;
  for (const auto& r : p.rows) s = std::max(s, -p.row_value(r, z));
  s += 1.0;

  const int nz1 = p.nz + 1;
  const double m1 = static_cast<double>(p.rows.size()) + 1.0 + 4.0 * p.n_t;

  auto value = [&](const VecD& za, double t) {
    double f = t * za(p.nz);
    for (const auto& r : p.rows) {
      const double g = p.row_value(r, za.head(p.nz)) + za(p.nz);
      if (!(g > 0.0)) return kInf;
      f -= std::log(g);
    }
    const double sb = za(p.nz) - s_floor;
    if (!(sb > 0.0)) return kInf;
    f -= std::log(sb);
    const double ls = ScaledProblem::neg_logdet_emb(p.mat_s(za.head(p.nz)));
    const double lv = ScaledProblem::neg_logdet_emb(p.mat_v(za.head(p.nz)));
    if (!std::isfinite(ls) || !std::isfinite(lv)) return kInf;
    return f + ls + lv;
  };
  auto derivs = [&](const VecD& za, double t, VecD* grad, MatD* hess) {
    grad->setZero(nz1);
    hess->setZero(nz1, nz1);
    (*grad)(p.nz) += t;
    VecD gi(nz1);
    for (const auto& r : p.rows) {
      const double g = p.row_value(r, za.head(p.nz)) + za(p.nz);
      gi.setZero();
      gi.head(p.nz) = r.a;
      gi(p.nz) = 1.0;
      double ex = 0.0;
      if (r.expvar >= 0) {
        ex = std::exp(za(r.expvar));
        gi(r.expvar) -= ex;
      }
      *grad -= gi / g;
      hess->noalias() += (gi * gi.transpose()) / (g * g);
      if (r.expvar >= 0) (*hess)(r.expvar, r.expvar) += ex / g;
    }
    const double sb = za(p.nz) - s_floor;
    (*grad)(p.nz) -= 1.0 / sb;
    (*hess)(p.nz, p.nz) += 1.0 / (sb * sb);
    // PSD blocks (same as the main problem)
    VecD g2 = VecD::Zero(p.nz);
    MatD h2 = MatD::Zero(p.nz, p.nz);
    const VecD zh = za.head(p.nz);
    p.psd_derivatives(zh, &g2, &h2);
    grad->head(p.nz) += g2;
    hess->topLeftCorner(p.nz, p.nz) += h2;
  };

  VecD za(nz1);
  za.head(p.nz) = z;
  za(p.nz) = s;

  int budget = 600;
  for (double t = 1.0; t < 2.0 * m1 / 1e-10; t *= 10.0) {
    double f = value(za, t);
    VecD grad(nz1);
    MatD hess(nz1, nz1);
    for (int it = 0; it < 80 && budget > 0; ++it, --budget) {
      if (za(p.nz) < -stop_margin) break;  // strictly feasible point found
      derivs(za, t, &grad, &hess);
      VecD step;
      double ridge = 0.0;
      for (int attempt = 0; attempt < 60; ++attempt) {
        MatD h = hess;
        if (ridge > 0.0) h.diagonal().array() += ridge;
        Eigen::LDLT<MatD> ldlt(h);
        if (ldlt.info() == Eigen::Success) {
          step = ldlt.solve(-grad);
          if (grad.dot(step) < 0.0) break;
        }
        ridge = (ridge == 0.0) ? 1e-12 * std::max(1.0, hess.diagonal().maxCoeff())
                               : ridge * 10.0;
        step.resize(0);
      }
      if (step.size() == 0) throw NumericalFailure("phase-1 Newton system unsolvable");
      const double dec2 = -grad.dot(step);
      if (0.5 * dec2 < 1e-10) break;
      double alpha = 1.0;
      bool ok = false;
      for (int bt = 0; bt < 60; ++bt, alpha *= 0.5) {
        VecD zn = za + alpha * step;
        const double fn = value(zn, t);
        if (std::isfinite(fn) && fn <= f - 0.01 * alpha * dec2) {
          za = zn;
          f = fn;
          ok = true;
          break;
        }
      }
      if (!ok) break;
    }
    if (za(p.nz) < -stop_margin || budget <= 0) break;
  }

  Phase1Internal out;
  out.z = za.head(p.nz);
  out.infeasibility = std::max(0.0, za(p.nz));
  out.feasible = p.strictly_feasible(out.z, 0.0) && za(p.nz) < 0.0;
  return out;
}

}  // namespace

Phase1Result phase1(const SubproblemSpec& spec) {
  spec.validate();
  ScaledProblem p(spec);
  Phase1Internal in = phase1_scaled(p);
  Phase1Result out;
  out.feasible = in.feasible;
  out.infeasibility = in.infeasibility;
  if (in.feasible) p.unpack_point(in.z, &out.s, &out.v, &out.slacks);
  return out;
}

double eval_constraint(const Constraint& con, const MatC& s, const MatC& v,
                       const VecD& slacks) {
  double g = con.lhs.c + con.lhs.d.dot(slacks);
  if (con.lhs.a_s.size() != 0) g += (con.lhs.a_s * s).trace().real();
  if (con.lhs.a_v.size() != 0) g += (con.lhs.a_v * v).trace().real();
  if (con.kind == ConstraintKind::kExpUpper) g -= std::exp(slacks(con.exp_index));
  return g;
}

double max_violation(const SubproblemSpec& spec, const MatC& s, const MatC& v,
                     const VecD& slacks) {
  ScaledProblem p(spec);
  const VecD z = p.pack_point(s, v, slacks);
  double worst = 0.0;
  for (const auto& r : p.rows) {
    const double g = p.row_value(r, z);
    double ref = std::abs(r.cst) + r.a.cwiseAbs().dot(z.cwiseAbs());
    if (r.expvar >= 0) ref += std::exp(z(r.expvar));
    worst = std::max(worst, -g / std::max(1.0, ref));
  }
  for (const MatC* m : {&s, &v}) {
    Eigen::SelfAdjointEigenSolver<MatC> es(*m, Eigen::EigenvaluesOnly);
    const double tr = std::max(m->trace().real(), 1e-300);
    worst = std::max(worst, -es.eigenvalues().minCoeff() / tr);
  }
  return worst;
}

SubproblemSolution solve(const SubproblemSpec& spec, const SolveOptions& opts) {
  spec.validate();
  ScaledProblem p(spec);
  SubproblemSolution sol;
  sol.duals = VecD::Zero(static_cast<int>(spec.constraints.size()));

  // starting point: pulled warm start when strictly feasible, else phase-1
  VecD z;
  bool have_start = false;
  VecD pulled_warm;
  if (opts.warm) {
    VecD zw = p.pack_point(opts.warm->s, opts.warm->v, opts.warm->slacks);
    const VecD zi = interior_guess(p);
    for (double eps : {1e-3, 1e-5, 1e-7}) {
      VecD pulled = (1.0 - eps) * zw + eps * zi;
      const bool cones_pd =
          std::isfinite(ScaledProblem::neg_logdet_emb(p.mat_s(pulled))) &&
          std::isfinite(ScaledProblem::neg_logdet_emb(p.mat_v(pulled)));
      if (cones_pd && pulled_warm.size() == 0) pulled_warm = pulled;
      if (p.strictly_feasible(pulled, 0.0)) {
        z = std::move(pulled);
        have_start = true;
        break;
      }
    }
  }
  if (!have_start) {
    // A near-feasible warm point (often exactly on the scalar-row boundary)
    // beats the generic centre guess as a phase-1 start by many orders of
    // magnitude; fall back to the generic start only when that fails too.
    Phase1Internal ph = (pulled_warm.size() > 0) ? phase1_scaled(p, &pulled_warm)
                                                 : phase1_scaled(p);
    if (pulled_warm.size() > 0 && !ph.feasible) ph = phase1_scaled(p);
    if (!ph.feasible) {
      sol.status = SolveStatus::kInfeasible;
      sol.feas_violation = ph.infeasibility;
      return sol;
    }
    z = std::move(ph.z);
  }

  int budget = opts.max_newton;
  double t = opts.t0;
  bool centered = true;
  while (true) {
    CenterResult cr = center(p, t, z, budget);
    budget -= cr.iters;
    sol.newton_iters += cr.iters;
    centered = cr.converged;
    if (std::getenv("FDSWIPT_DEBUG"))
      std::fprintf(stderr, "[subsolver] t=%.1e iters=%d converged=%d obj=%.8f\n", t,
                   cr.iters, (int)cr.converged, p.c.dot(z));
    const double obj = p.c.dot(z);
    if (p.m_total / t < opts.tol * std::max(1.0, std::abs(obj))) break;
    if (budget <= 0) break;
    // cap the last stage at the t that already meets the gap target, so
    // the final centering happens at the smallest sufficient t
    const double t_req = 1.01 * p.m_total / (opts.tol * std::max(1.0, std::abs(obj)));
    t = std::min(t * opts.mu, std::max(t_req, 1.01 * t));
  }

  p.unpack_point(z, &sol.s, &sol.v, &sol.slacks);
  sol.s = 0.5 * (sol.s + sol.s.adjoint());
  sol.v = 0.5 * (sol.v + sol.v.adjoint());
  sol.objective = spec.objective.dot(sol.slacks);
  sol.duality_gap = p.m_total / t / std::max(1.0, std::abs(p.c.dot(z)));
  sol.feas_violation = max_violation(spec, sol.s, sol.v, sol.slacks);

  // duals: lambda_i = 1 / (t g_i) for the scaled rows, mapped back to the
  // watt-unit rows; PSD multipliers from the barrier gradient.
  for (std::size_t i = 0; i < p.rows.size(); ++i) {
    const double g = p.row_value(p.rows[i], z);
    sol.duals(static_cast<int>(i)) = 1.0 / (t * std::max(g, 1e-300)) / p.rows[i].unit_div;
  }
  for (int blk = 0; blk < 2; ++blk) {
    const MatC m = (blk == 0) ? p.mat_s(z) : p.mat_v(z);
    Eigen::LLT<MatC> llt(m);
    MatC lam = (2.0 / t) * llt.solve(MatC::Identity(spec.n_t, spec.n_t)) / spec.p_bs;
    lam = 0.5 * (lam + lam.adjoint());
    (blk == 0 ? sol.dual_s : sol.dual_v) = std::move(lam);
  }

  if (budget <= 0 && p.m_total / t >= opts.tol * std::max(1.0, std::abs(p.c.dot(z))))
    sol.status = SolveStatus::kMaxIter;
  else if (!centered)
    sol.status = SolveStatus::kNumericalFailure;
  else
    sol.status = SolveStatus::kOptimal;
  return sol;
}

void dump_spec(const SubproblemSpec& spec, const SubproblemSolution* sol,
               const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open dump file: " + path);
  out.precision(17);
  out << "fdswipt-subproblem-dump v1\n";
  out << "n_t " << spec.n_t << " n_r " << spec.n_r << " n_slacks " << spec.n_slacks << "\n";
  out << "sigma_z2 " << spec.sigma_z2 << " p_bs " << spec.p_bs << "\n";
  out << "objective";
  for (int j = 0; j < spec.objective.size(); ++j) out << " " << spec.objective(j);
  out << "\n";
  auto put_mat = [&](const char* name, const MatC& m) {
    out << name << " " << m.rows() << "\n";
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j)
        out << m(i, j).real() << " " << m(i, j).imag() << " ";
      out << "\n";
    }
  };
  for (const auto& con : spec.constraints) {
    out << "constraint " << con.tag << " kind " << static_cast<int>(con.kind)
        << " unit " << static_cast<int>(con.unit) << " exp_index " << con.exp_index
        << " c " << con.lhs.c << "\nd";
    for (int j = 0; j < con.lhs.d.size(); ++j) out << " " << con.lhs.d(j);
    out << "\n";
    if (con.lhs.a_s.size() != 0) put_mat("a_s", con.lhs.a_s);
    if (con.lhs.a_v.size() != 0) put_mat("a_v", con.lhs.a_v);
  }
  if (sol) {
    out << "solution status " << to_string(sol->status) << " objective "
        << sol->objective << " gap " << sol->duality_gap << "\n";
    put_mat("S", sol->s);
    put_mat("V", sol->v);
    out << "slacks";
    for (int j = 0; j < sol->slacks.size(); ++j) out << " " << sol->slacks(j);
    out << "\nduals";
    for (int j = 0; j < sol->duals.size(); ++j) out << " " << sol->duals(j);
    out << "\n";
  }
}

}  // namespace subsolver
}  // namespace fdswipt
