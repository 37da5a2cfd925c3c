#include "fdswipt/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <thread>

namespace fdswipt {
namespace harness {

const char* to_string(SweepParam p) {
  return p == SweepParam::kSigmaSi2Db ? "sigma_si2_db" : "e_min_w";
}

std::optional<SweepParam> sweep_param_from_string(const std::string& s) {
  if (s == "sigma_si2_db") return SweepParam::kSigmaSi2Db;
  if (s == "e_min_w") return SweepParam::kEMinW;
  return std::nullopt;
}

void SweepSpec::validate() const {
  base.validate();
  if (grid.empty()) throw ContractViolation("sweep grid is empty");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1]))
      throw ContractViolation("sweep grid must be strictly increasing");
  if (trials < 1) throw ContractViolation("trials must be >= 1");
  if (schemes.empty()) throw ContractViolation("no schemes requested");
  if (threads < 1) throw ContractViolation("threads must be >= 1");
}

std::uint64_t mix64(std::uint64_t x) {
  // splitmix64 finalizer
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t trial_seed(std::uint64_t master, int trial) {
  return mix64(mix64(master) + static_cast<std::uint64_t>(trial));
}

namespace {

// Draw order is part of the reproducibility contract: h_d, h_i, g_d, g_i,
// g_u, h_si (row-major), h_d_ext, h_i_ext, g_u_ext.
struct GaussStream {
  std::mt19937_64 rng;
  std::normal_distribution<double> norm{0.0, 1.0};

  explicit GaussStream(std::uint64_t seed) : rng(seed) {}

  Cplx cn(double var) {
    const double re = norm(rng);
    const double im = norm(rng);
    return std::sqrt(var / 2.0) * Cplx(re, im);
  }

  VecC vec(Eigen::Index n, double var) {
    VecC v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = cn(var);
    return v;
  }
};

}  // namespace

ChannelSet gen_channels(const SystemConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  GaussStream g(seed);
  const double gain_idle = attn_db_to_gain(cfg.attn_bs_idle_db);
  const double gain_other = attn_db_to_gain(cfg.attn_other_db);
  ChannelSet ch;
  ch.h_d = g.vec(cfg.n_tx, gain_other);
  ch.h_i = g.vec(cfg.n_tx, gain_idle);
  ch.g_d = g.cn(gain_other);
  ch.g_i = g.cn(gain_other);
  ch.g_u = g.vec(cfg.n_rx, gain_other);
  ch.h_si.resize(cfg.n_rx, cfg.n_tx);
  const double si_scale = std::sqrt(cfg.sigma_si2);
  for (int i = 0; i < cfg.n_rx; ++i)
    for (int j = 0; j < cfg.n_tx; ++j) ch.h_si(i, j) = si_scale * g.cn(1.0);
  ch.h_d_ext = g.vec(cfg.n_rx, gain_other);
  ch.h_i_ext = g.vec(cfg.n_rx, gain_idle);
  ch.g_u_ext = g.vec(cfg.n_tx, gain_other);
  return ch;
}

std::vector<InstanceOutcome> run_instance(const ChannelSet& ch, const SystemConfig& cfg,
                                          const std::vector<baselines::Scheme>& schemes,
                                          const spca::SpcaOptions& opts) {
  std::vector<InstanceOutcome> out;
  out.reserve(schemes.size());
  for (auto scheme : schemes) {
    InstanceOutcome o;
    o.scheme = scheme;
    try {
      switch (scheme) {
        case baselines::Scheme::kFullDuplex:
          o.result = baselines::full_duplex_solve(ch, cfg, opts);
          break;
        case baselines::Scheme::kPerfectFd:
          o.result = baselines::perfect_fd_solve(ch, cfg, opts);
          break;
        case baselines::Scheme::kHalfDuplex:
          o.result = baselines::half_duplex_solve(ch, cfg, opts);
          break;
      }
    } catch (const InfeasibleProblem& e) {
      o.infeasible = true;
      o.error = e.what();
    } catch (const std::exception& e) {
      o.failed = true;
      o.error = e.what();
    }
    out.push_back(std::move(o));
  }
  return out;
}

namespace {

SystemConfig patched(const SystemConfig& base, SweepParam param, double value) {
  SystemConfig cfg = base;
  if (param == SweepParam::kSigmaSi2Db)
    cfg.sigma_si2 = std::pow(10.0, value / 10.0);
  else
    cfg.e_min = value;
  return cfg;
}

}  // namespace

SweepResult sweep(const SweepSpec& spec) {
  spec.validate();
  const int ng = static_cast<int>(spec.grid.size());
  const int nt = spec.trials;

  // outcome table [grid][trial] -> per-scheme outcomes, filled by a fixed
  // task partition so the aggregation order never depends on scheduling
  std::vector<std::vector<std::vector<InstanceOutcome>>> table(
      ng, std::vector<std::vector<InstanceOutcome>>(nt));

  std::atomic<int> next{0};
  const int total = ng * nt;
  auto worker = [&] {
    for (;;) {
      const int task = next.fetch_add(1);
      if (task >= total) break;
      const int gi = task / nt;
      const int ti = task % nt;
      const SystemConfig cfg = patched(spec.base, spec.param, spec.grid[gi]);
      const ChannelSet ch = gen_channels(cfg, trial_seed(spec.master_seed, ti));
      table[gi][ti] = run_instance(ch, cfg, spec.schemes, spec.spca);
    }
  };
  if (spec.threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < spec.threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  SweepResult res;
  res.param = spec.param;
  for (int gi = 0; gi < ng; ++gi) {
    for (std::size_t si = 0; si < spec.schemes.size(); ++si) {
      PointStats ps;
      ps.value = spec.grid[gi];
      ps.scheme = spec.schemes[si];
      std::vector<double> rates;
      for (int ti = 0; ti < nt; ++ti) {
        const InstanceOutcome& o = table[gi][ti][si];
        if (o.infeasible)
          ++ps.n_infeasible;
        else if (o.failed)
          ++ps.n_failed;
        else {
          ++ps.n_ok;
          rates.push_back(o.result.r_sum);
        }
      }
      if (!rates.empty()) {
        double sum = 0.0;
        for (double r : rates) sum += r;
        ps.mean_rate_bits = sum / rates.size();
        if (rates.size() > 1) {
          double ss = 0.0;
          for (double r : rates) ss += (r - ps.mean_rate_bits) * (r - ps.mean_rate_bits);
          ps.stderr_bits = std::sqrt(ss / (rates.size() - 1)) / std::sqrt(double(rates.size()));
        }
      }
      res.points.push_back(ps);
    }
  }
  std::sort(res.points.begin(), res.points.end(),
            [](const PointStats& a, const PointStats& b) {
              if (a.value != b.value) return a.value < b.value;
              return std::string(baselines::to_string(a.scheme)) <
                     std::string(baselines::to_string(b.scheme));
            });
  return res;
}

void write_csv(const SweepResult& res, const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // no platform newline games
  if (!out) throw std::runtime_error("cannot open CSV output: " + path);
  out << "param,value,scheme,mean_rate_bits,stderr_bits,n_ok,n_infeasible,n_failed\n";
  char buf[64];
  auto fmt = [&](double x) {
    std::snprintf(buf, sizeof(buf), "%.10g", x);
    return std::string(buf);
  };
  for (const auto& p : res.points) {
    out << to_string(res.param) << ',' << fmt(p.value) << ','
        << baselines::to_string(p.scheme) << ',' << fmt(p.mean_rate_bits) << ','
        << fmt(p.stderr_bits) << ',' << p.n_ok << ',' << p.n_infeasible << ','
        << p.n_failed << '\n';
  }
  if (!out) throw std::runtime_error("CSV write failed: " + path);
}

}  // namespace harness
}  // namespace fdswipt
