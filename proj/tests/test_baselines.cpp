#include <doctest.h>

#include "fdswipt/baselines.hpp"
#include "fdswipt/harness.hpp"

#include <cmath>

using namespace fdswipt;
using namespace fdswipt::baselines;

namespace {

spca::SpcaOptions fast_opts() {
  spca::SpcaOptions o;
  o.polish = false;  // mean-rate comparisons only
  return o;
}

}  // namespace

TEST_CASE("scheme names round-trip through the CSV vocabulary") {
  CHECK(std::string(to_string(Scheme::kFullDuplex)) == "full-duplex");
  CHECK(std::string(to_string(Scheme::kPerfectFd)) == "perfect-fd");
  CHECK(std::string(to_string(Scheme::kHalfDuplex)) == "half-duplex");
}

TEST_CASE("zero self-interference makes the perfect-FD model exact") {
  SystemConfig cfg;
  cfg.sigma_si2 = 0.0;
  cfg.e_min = 5e-4;
  for (int trial = 0; trial < 4; ++trial) {
    const ChannelSet ch = harness::gen_channels(cfg, harness::trial_seed(50, trial));
    const BaselineResult fd = full_duplex_solve(ch, cfg, fast_opts());
    const BaselineResult pf = perfect_fd_solve(ch, cfg, fast_opts());
    // same deterministic pipeline on identical inputs
    CHECK(pf.r_sum == doctest::Approx(fd.r_sum).epsilon(1e-9));
    CHECK(pf.energy == doctest::Approx(fd.energy).epsilon(1e-9));
  }
}

TEST_CASE("perfect-FD and half-duplex results ignore the SI variance") {
  SystemConfig lo, hi;
  lo.sigma_si2 = 1e-10;
  hi.sigma_si2 = 1e-4;
  lo.e_min = hi.e_min = 1e-3;
  for (int trial = 0; trial < 3; ++trial) {
    const std::uint64_t seed = harness::trial_seed(60, trial);
    const ChannelSet ch_lo = harness::gen_channels(lo, seed);
    const ChannelSet ch_hi = harness::gen_channels(hi, seed);

    const BaselineResult pf_lo = perfect_fd_solve(ch_lo, lo, fast_opts());
    const BaselineResult pf_hi = perfect_fd_solve(ch_hi, hi, fast_opts());
    CHECK(pf_lo.r_sum == pf_hi.r_sum);  // bit-for-bit

    const BaselineResult hd_lo = half_duplex_solve(ch_lo, lo, fast_opts());
    const BaselineResult hd_hi = half_duplex_solve(ch_hi, hi, fast_opts());
    CHECK(hd_lo.r_sum == hd_hi.r_sum);
  }
}

TEST_CASE("self-interference can only hurt the full-duplex scheme") {
  SystemConfig lo, hi;
  lo.sigma_si2 = 1e-12;
  hi.sigma_si2 = 1e-4;
  for (int trial = 0; trial < 3; ++trial) {
    const std::uint64_t seed = harness::trial_seed(70, trial);
    const BaselineResult fd_lo =
        full_duplex_solve(harness::gen_channels(lo, seed), lo, fast_opts());
    const BaselineResult fd_hi =
        full_duplex_solve(harness::gen_channels(hi, seed), hi, fast_opts());
    const BaselineResult pf =
        perfect_fd_solve(harness::gen_channels(hi, seed), hi, fast_opts());
    // SPCA is a lower-bounding heuristic, so allow a small solver slack
    CHECK(fd_hi.r_sum <= pf.r_sum + 0.05);
    CHECK(fd_lo.r_sum <= pf.r_sum + 0.05);
    CHECK(fd_hi.r_sum <= fd_lo.r_sum + 0.05);
  }
}

TEST_CASE("baseline reports are internally consistent") {
  SystemConfig cfg;
  cfg.e_min = 1e-3;
  const ChannelSet ch = harness::gen_channels(cfg, 808);
  for (const BaselineResult& r : {full_duplex_solve(ch, cfg, fast_opts()),
                                  perfect_fd_solve(ch, cfg, fast_opts()),
                                  half_duplex_solve(ch, cfg, fast_opts())}) {
    CHECK(r.r_sum == doctest::Approx(r.r_d_sec + r.r_u_sec).epsilon(1e-12));
    CHECK(r.r_d_sec >= 0.0);
    CHECK(r.r_u_sec >= 0.0);
    CHECK(r.energy >= cfg.e_min * (1.0 - 1e-8));
  }
}

TEST_CASE("half duplex pays the time-split factor on the uplink") {
  // With SI harmless (tiny sigma_si2), the FD uplink sees essentially the
  // same channel the HD phase 2 sees on n_rx antennas, full time; HD gets
  // half the time. Its uplink secrecy rate cannot beat the full-time MRC
  // bound on the stacked array.
  SystemConfig cfg;
  cfg.sigma_si2 = 1e-12;
  for (int trial = 0; trial < 3; ++trial) {
    const ChannelSet ch = harness::gen_channels(cfg, harness::trial_seed(90, trial));
    const BaselineResult hd = half_duplex_solve(ch, cfg, fast_opts());
    const double g_full = cfg.p_u * (ch.g_u.squaredNorm() + ch.g_u_ext.squaredNorm()) /
                          cfg.sigma_z2;
    CHECK(hd.r_u_sec <= 0.5 * std::log2(1.0 + g_full) + 1e-9);
  }
}
