// Command-line front end: solve one instance, run a Monte Carlo sweep,
// trace the convex-approximation iterations, or run the quick self tests.
//
// Exit codes: 0 success, 1 runtime error, 2 problem infeasible, 64 usage.

#include "fdswipt/config.hpp"
#include "fdswipt/receiver.hpp"
#include "fdswipt/subsolver.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>

namespace {

using namespace fdswipt;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitUsage = 64;

struct CommonArgs {
  std::string config_path;
  std::vector<std::string> overrides;  // key=value
  std::uint64_t seed = 1;
  bool seed_set = false;
};

void add_common(CLI::App* cmd, CommonArgs* args) {
  cmd->add_option("-c,--config", args->config_path, "settings file (key = value lines)");
  cmd->add_option("-D,--set", args->overrides, "override a settings key, e.g. -D p_bs=2");
  cmd->add_option("-s,--seed", args->seed, "random seed")->each([args](const std::string&) {
    args->seed_set = true;
  });
}

config::Settings resolve(const CommonArgs& args) {
  config::Settings s;
  if (!args.config_path.empty()) s = config::parse_file(args.config_path);
  for (const auto& ov : args.overrides) {
    const auto eq = ov.find('=');
    if (eq == std::string::npos)
      throw ContractViolation("override must be key=value: " + ov);
    config::apply_override(s, ov.substr(0, eq), ov.substr(eq + 1));
  }
  if (args.seed_set) s.sweep.master_seed = args.seed;
  s.system.validate();
  return s;
}

void banner(const config::Settings& s) {
  const SystemConfig& c = s.system;
  std::fprintf(stderr,
               "[fdswipt] n_tx=%d n_rx=%d p_bs=%g W p_u=%g W zeta=%g sigma_z2=%g W "
               "sigma_si2=%g e_min=%g W seed=%llu\n",
               c.n_tx, c.n_rx, c.p_bs, c.p_u, c.zeta, c.sigma_z2, c.sigma_si2, c.e_min,
               static_cast<unsigned long long>(s.sweep.master_seed));
}

baselines::Scheme parse_scheme_arg(const std::string& s) {
  if (s == "full-duplex") return baselines::Scheme::kFullDuplex;
  if (s == "perfect-fd") return baselines::Scheme::kPerfectFd;
  if (s == "half-duplex") return baselines::Scheme::kHalfDuplex;
  throw ContractViolation("unknown scheme: " + s);
}

int cmd_solve(const CommonArgs& common, const std::string& scheme_name, int trial) {
  const config::Settings s = resolve(common);
  banner(s);
  const auto scheme = parse_scheme_arg(scheme_name);
  const ChannelSet ch =
      harness::gen_channels(s.system, harness::trial_seed(s.sweep.master_seed, trial));
  const auto outs = harness::run_instance(ch, s.system, {scheme}, s.sweep.spca);
  const auto& o = outs.front();
  if (o.infeasible) {
    std::fprintf(stderr, "infeasible: %s\n", o.error.c_str());
    return kExitInfeasible;
  }
  if (o.failed) {
    std::fprintf(stderr, "solver failure: %s\n", o.error.c_str());
    return kExitError;
  }
  const auto& r = o.result;
  std::printf("scheme            %s\n", baselines::to_string(r.scheme));
  std::printf("sum secrecy rate  %.6f bits/s/Hz\n", r.r_sum);
  std::printf("  downlink        %.6f bits/s/Hz\n", r.r_d_sec);
  std::printf("  uplink          %.6f bits/s/Hz\n", r.r_u_sec);
  std::printf("harvested power   %.6e W (floor %.6e W, slack %.6e W)\n", r.energy,
              s.system.e_min, r.energy - s.system.e_min);
  if (scheme != baselines::Scheme::kHalfDuplex) {
    // full design diagnostics are only meaningful for the one-phase schemes
    ChannelSet ch2 = ch;
    if (scheme == baselines::Scheme::kPerfectFd) ch2.h_si.setZero();
    const auto res = spca::spca_solve(ch2, s.system, s.sweep.spca);
    const double tr_s = res.design.s_cov.trace().real();
    const double tr_v = res.design.v_cov.trace().real();
    std::printf("trace(S)          %.6e W\n", tr_s);
    std::printf("trace(V)          %.6e W\n", tr_v);
    std::printf("power slack       %.6e W\n", s.system.p_bs - tr_s - tr_v);
    std::printf("iterations        %zu\n", res.trace.iters.size());
    if (res.w.conditioning_flagged)
      std::printf("note: receive filter used a ridge-regularized solve\n");
  }
  return kExitOk;
}

int cmd_sweep(const CommonArgs& common, const std::string& out_path) {
  config::Settings s = resolve(common);
  banner(s);
  s.sweep.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const harness::SweepResult res = harness::sweep(s.sweep);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!out_path.empty()) harness::write_csv(res, out_path);
  std::printf("%-12s %-12s %-14s %-12s %5s %6s %6s\n", "value", "scheme", "mean[bits]",
              "stderr", "ok", "infeas", "fail");
  for (const auto& p : res.points)
    std::printf("%-12g %-12s %-14.6f %-12.3g %5d %6d %6d\n", p.value,
                baselines::to_string(p.scheme), p.mean_rate_bits, p.stderr_bits, p.n_ok,
                p.n_infeasible, p.n_failed);
  std::fprintf(stderr, "[fdswipt] sweep finished in %.1f s%s%s\n", secs,
               out_path.empty() ? "" : ", CSV written to ",
               out_path.empty() ? "" : out_path.c_str());
  return kExitOk;
}

int cmd_trace(const CommonArgs& common, int trial, const std::string& csv_path) {
  const config::Settings s = resolve(common);
  banner(s);
  const ChannelSet ch =
      harness::gen_channels(s.system, harness::trial_seed(s.sweep.master_seed, trial));
  spca::SpcaResult res;
  try {
    res = spca::spca_solve(ch, s.system, s.sweep.spca);
  } catch (const InfeasibleProblem& e) {
    std::fprintf(stderr, "infeasible: %s\n", e.what());
    return kExitInfeasible;
  }
  std::printf("%4s %-14s %-12s %-12s %s\n", "n", "u[bits]", "rel.improv", "kkt", "status");
  for (const auto& it : res.trace.iters)
    std::printf("%4d %-14.8f %-12.3e %-12.3e %s\n", it.n, it.u_bits, it.rel_improvement,
                it.kkt_residual, to_string(it.sub_status));
  const char* reason = res.trace.reason == spca::StopReason::kConverged
                           ? "converged"
                           : (res.trace.reason == spca::StopReason::kMaxIterations
                                  ? "max-iterations"
                                  : "subsolver-failure");
  std::printf("stop: %s, final rate %.6f bits/s/Hz\n", reason, res.report.r_sum);
  if (!csv_path.empty()) {
    std::FILE* f = std::fopen(csv_path.c_str(), "wb");
    if (!f) throw std::runtime_error("cannot open " + csv_path);
    std::fprintf(f, "n,u_bits,rel_improvement,kkt_residual,status\n");
    for (const auto& it : res.trace.iters)
      std::fprintf(f, "%d,%.10g,%.10g,%.10g,%s\n", it.n, it.u_bits, it.rel_improvement,
                   it.kkt_residual, to_string(it.sub_status));
    std::fclose(f);
  }
  return kExitOk;
}

// ---- self test ------------------------------------------------------------

struct SelfTest {
  int failures = 0;

  void check(const char* name, bool ok) {
    std::printf("  %-44s %s\n", name, ok ? "ok" : "FAIL");
    if (!ok) ++failures;
  }
};

int cmd_selftest(const CommonArgs& common, bool inject_fault) {
  const config::Settings s = resolve(common);
  SelfTest t;
  std::mt19937_64 rng(s.sweep.master_seed);
  std::uniform_real_distribution<double> uni(-20.0, 5.0);

  if (inject_fault) spca::testing::g_lin_trace_sign.store(-1.0);

  {  // tangent bound of the exponential
    bool ok = true;
    for (int i = 0; i < 20000 && ok; ++i) {
      const double y = uni(rng), ys = uni(rng);
      ok = spca::exp_tangent(y, ys) <= std::exp(y) * (1 + 1e-12) + 1e-300;
    }
    ok = ok && spca::exp_tangent(3.0, 3.0) == std::exp(3.0);
    t.check("exponential tangent is a lower bound", ok);
  }
  {  // closed-form uplink SINR equals the explicit-receiver SINR
    bool ok = true;
    SystemConfig cfg = s.system;
    for (int i = 0; i < 50 && ok; ++i) {
      const ChannelSet ch = harness::gen_channels(cfg, harness::trial_seed(7, i));
      MatC a = MatC::Random(cfg.n_tx, cfg.n_tx), b = MatC::Random(cfg.n_tx, cfg.n_tx);
      const auto d = TransmitDesign::make(0.1 * a * a.adjoint(), 0.1 * b * b.adjoint());
      const auto w = optimal_receiver(ch, d, cfg);
      const double g1 = uplink_sinr_with_receiver(ch, d, w.w, cfg);
      const double g2 = uplink_sinr_closed_form(ch, d, cfg);
      ok = std::abs(g1 - g2) <= 1e-8 * std::max(1.0, g2);
    }
    t.check("receive filter attains the closed-form SINR", ok);
  }
  {  // real embedding round trip + spectrum doubling
    MatC m = MatC::Random(5, 5);
    m = (m + m.adjoint()).eval();
    const MatD e = subsolver::real_embedding(m);
    const bool round = (subsolver::from_real_embedding(e) - m).norm() < 1e-12;
    Eigen::SelfAdjointEigenSolver<MatC> esc(m);
    Eigen::SelfAdjointEigenSolver<MatD> esr(e);
    const bool spec = std::abs(esr.eigenvalues().minCoeff() -
                               esc.eigenvalues().minCoeff()) < 1e-10;
    t.check("real embedding round trip and spectrum", round && spec);
  }
  {  // conservativeness: intermediate designs must satisfy the true rows
    bool ok = true;
    SystemConfig cfg = s.system;
    cfg.e_min = 1e-3;
    try {
      int solved = 0;
      for (int i = 0; solved < 3 && i < 20; ++i) {
        const ChannelSet ch = harness::gen_channels(cfg, harness::trial_seed(11, i));
        if (!is_feasible(ch, cfg)) continue;  // harvesting floor out of reach
        (void)spca::spca_solve(ch, cfg, s.sweep.spca);
        ++solved;
      }
      ok = solved == 3;
    } catch (const std::exception&) {
      ok = false;
    }
    t.check("approximation stays inside the true feasible set", ok);
  }
  {  // single-antenna spot check against a coarse power-split scan
    SystemConfig cfg = s.system;
    cfg.n_tx = cfg.n_rx = 1;
    cfg.e_min = 0.0;
    const ChannelSet ch = harness::gen_channels(cfg, harness::trial_seed(13, 0));
    const auto res = spca::spca_solve(ch, cfg, s.sweep.spca);
    double best = 0.0;
    const int k = 80;
    for (int i = 0; i <= k; ++i)
      for (int j = 0; i + j <= k; ++j) {
        MatC sm(1, 1), vm(1, 1);
        sm(0, 0) = cfg.p_bs * double(i) / k;
        vm(0, 0) = cfg.p_bs * double(j) / k;
        const auto d = TransmitDesign::make(sm, vm);
        const auto w = optimal_receiver(ch, d, cfg);
        best = std::max(best, full_report(ch, d, w.w, cfg).r_sum);
      }
    t.check("single-antenna solve matches a brute-force scan",
            res.report.r_sum >= best - 0.02);
  }

  if (inject_fault) spca::testing::g_lin_trace_sign.store(1.0);
  std::printf("%s\n", t.failures == 0 ? "selftest: all ok" : "selftest: FAILURES");
  return t.failures == 0 ? kExitOk : kExitError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Full-duplex SWIPT sum-secrecy-rate transceiver designer"};
  app.require_subcommand(1);

  CommonArgs c_solve, c_sweep, c_trace, c_self;
  std::string scheme = "full-duplex", sweep_out, trace_csv;
  int trial = 0, trace_trial = 0;
  bool inject = false;

  auto* solve = app.add_subcommand("solve", "Design one instance and print the rates");
  add_common(solve, &c_solve);
  solve->add_option("--scheme", scheme, "full-duplex | perfect-fd | half-duplex");
  solve->add_option("--trial", trial, "trial index used to derive the channel seed");

  auto* sweep = app.add_subcommand("sweep", "Monte Carlo parameter sweep");
  add_common(sweep, &c_sweep);
  sweep->add_option("-o,--output", sweep_out, "CSV output path");

  auto* trace = app.add_subcommand("trace", "Per-iteration convergence trace");
  add_common(trace, &c_trace);
  trace->add_option("--trial", trace_trial, "trial index used to derive the channel seed");
  trace->add_option("-o,--output", trace_csv, "CSV output path for the trace");

  auto* self = app.add_subcommand("selftest", "Fast invariant checks (< 1 min)");
  add_common(self, &c_self);
  self->add_flag("--inject-linearization-sign-flip", inject)->group("");  // hidden

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (solve->parsed()) return cmd_solve(c_solve, scheme, trial);
    if (sweep->parsed()) return cmd_sweep(c_sweep, sweep_out);
    if (trace->parsed()) return cmd_trace(c_trace, trace_trial, trace_csv);
    if (self->parsed()) return cmd_selftest(c_self, inject);
  } catch (const ContractViolation& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kExitUsage;
  } catch (const InfeasibleProblem& e) {
    std::fprintf(stderr, "infeasible: %s\n", e.what());
    return kExitInfeasible;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitError;
  }
  return kExitUsage;
}
