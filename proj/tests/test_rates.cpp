#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include <dof3wc/allocation.hpp>
#include <dof3wc/beamformer.hpp>
#include <dof3wc/channel.hpp>
#include <dof3wc/channel_config.hpp>
#include <dof3wc/rates.hpp>

using namespace dof3wc;

namespace {

ChannelConfig make_cfg(long m1, long m2, long m3, const char* tau) {
  return ChannelConfig(m1, m2, m3, Rational::parse(tau));
}

StreamAllocation worked_allocation() {
  StreamAllocation alloc;
  alloc.zf[pair_index(1, 2)] = 1;
  alloc.zf[pair_index(2, 1)] = 1;
  alloc.zf[pair_index(2, 3)] = 2;
  alloc.ia[pair_index(2, 3)] = 2;
  alloc.ia[pair_index(3, 2)] = 4;
  alloc.gamma[0] = 2;
  return alloc;
}

double find_rate(const RateReport& report, int from, int to, BeamKind kind) {
  for (const RateRow& row : report.rows)
    if (row.from == from && row.to == to && row.kind == kind) return row.rate;
  REQUIRE(false);
  return 0.0;
}

const SlopeRow* find_slope(const RateReport& report, int from, int to, BeamKind kind) {
  for (const SlopeRow& row : report.slopes)
    if (row.from == from && row.to == to && row.kind == kind) return &row;
  return nullptr;
}

}  // namespace

TEST_CASE("closed-form capacities hit hand-computed values") {
  Eigen::MatrixXcd one(1, 1);
  one(0, 0) = 1.0;
  // a unit scalar channel at unit SNR carries one bit when always on
  CHECK(p2p_capacity(one, 1.0, 1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(p2p_capacity(one, 0.0, 1.0, 1.0) == 0.0);
  // two parallel unit channels at snr 3: each contributes log2(4) = 2,
  // halved by the erasure fraction
  Eigen::MatrixXcd eye2 = Eigen::MatrixXcd::Identity(2, 2);
  CHECK(p2p_capacity(eye2, 0.5, 3.0, 1.0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(twc_sum_capacity(eye2, 0.5, 3.0, 1.0) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK_THROWS_AS(p2p_capacity(one, 0.5, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(p2p_capacity(one, 1.5, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("capacity is invariant under the matrix adjoint") {
  ChannelRealization real = sample_channel(make_cfg(5, 3, 2, "1/2"), 77, 10.0, 1.0);
  const Eigen::MatrixXcd& h = real.channel(1, 2);
  const Eigen::MatrixXcd back = h.adjoint();
  CHECK(p2p_capacity(h, 0.5, 10.0, 1.0) ==
        doctest::Approx(p2p_capacity(back, 0.5, 10.0, 1.0)).epsilon(1e-12));
}

TEST_CASE("stream rates require a clean verification report") {
  ChannelConfig cfg = make_cfg(5, 7, 4, "1/2");
  ChannelRealization real = sample_channel(cfg, 7, 100.0, 1.0);
  StreamAllocation alloc = worked_allocation();
  BeamformerSet set = design_beamformers(real, alloc);
  set_transmit_power(set, real, alloc);

  CHECK_THROWS_AS(stream_rates(cfg, real, alloc, set, nullptr), UnverifiedDesign);

  BeamformerSet broken = set;
  broken.V_zf[pair_index(2, 3)](0, 0) += 1e-3;
  BeamformerReport bad = verify_beamformers(real, alloc, broken);
  REQUIRE_FALSE(bad.all_ok());
  CHECK_THROWS_AS(stream_rates(cfg, real, alloc, broken, &bad), UnverifiedDesign);
}

TEST_CASE("worked allocation rates scale with beam count and availability") {
  ChannelConfig cfg = make_cfg(5, 7, 4, "1/2");
  ChannelRealization real = sample_channel(cfg, 7, 1e4, 1.0);
  StreamAllocation alloc = worked_allocation();
  BeamformerSet set = design_beamformers(real, alloc);
  set_transmit_power(set, real, alloc);
  BeamformerReport check = verify_beamformers(real, alloc, set);
  REQUIRE(check.all_ok());
  RateReport report = stream_rates(cfg, real, alloc, set, &check);
  // five active stream/kind entries for this allocation
  CHECK(report.rows.size() == 5);
  // 2->3 runs two always-on beams, 2->1 one beam gated by node 3's duty
  // cycle; at 40 dB the former must be well ahead
  CHECK(find_rate(report, 2, 3, BeamKind::ZF) > find_rate(report, 2, 1, BeamKind::ZF));
  // the four aligned beams into node 2 are always on as well
  CHECK(find_rate(report, 3, 2, BeamKind::IA) > find_rate(report, 2, 3, BeamKind::IA));
  for (const RateRow& row : report.rows) CHECK(row.rate > 0.0);
}

TEST_CASE("a single zero-forced stream reduces to a scalar capacity") {
  ChannelConfig cfg = make_cfg(1, 2, 1, "1/2");
  ChannelRealization real = sample_channel(cfg, 13, 50.0, 2.0);
  StreamAllocation alloc;
  alloc.zf[pair_index(2, 1)] = 1;
  BeamformerSet set = design_beamformers(real, alloc);
  set_transmit_power(set, real, alloc);
  BeamformerReport check = verify_beamformers(real, alloc, set);
  REQUIRE(check.all_ok());
  RateReport report = stream_rates(cfg, real, alloc, set, &check);
  REQUIRE(report.rows.size() == 1);
  const Eigen::MatrixXcd effective = set.postcoder(2, 1, BeamKind::ZF) *
                                     real.channel(2, 1) *
                                     set.precoder(2, 1, BeamKind::ZF);
  REQUIRE(effective.rows() == 1);
  const double by_hand =
      0.5 * std::log2(1.0 + (50.0 / 2.0) * std::norm(effective(0, 0)));
  CHECK(report.rows[0].rate == doctest::Approx(by_hand).epsilon(1e-12));
}

TEST_CASE("slope estimates match the erasure-scaled beam counts") {
  ChannelConfig cfg = make_cfg(5, 7, 4, "1/2");
  StreamAllocation alloc = worked_allocation();
  std::vector<double> grid = {40.0, 60.0, 80.0, 100.0, 120.0};
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  RateReport report = estimate_dof_slopes(cfg, alloc, grid, seeds);
  REQUIRE(report.slopes.size() == 5);
  for (const SlopeRow& row : report.slopes) {
    INFO(row.from, "->", row.to, " ", kind_name(row.kind));
    const double tol = std::max(0.05, 0.05 * row.target);
    CHECK(std::abs(row.slope - row.target) <= tol);
  }
  // spot targets: the aligned 3->2 beams are always on, 2->1 is gated
  const SlopeRow* ia32 = find_slope(report, 3, 2, BeamKind::IA);
  REQUIRE(ia32 != nullptr);
  CHECK(ia32->target == doctest::Approx(4.0));
  const SlopeRow* zf21 = find_slope(report, 2, 1, BeamKind::ZF);
  REQUIRE(zf21 != nullptr);
  CHECK(zf21->target == doctest::Approx(0.5));
}

TEST_CASE("slope estimation validates its grid") {
  ChannelConfig cfg = make_cfg(3, 3, 3, "1/2");
  StreamAllocation alloc;
  alloc.zf[pair_index(1, 2)] = 1;
  CHECK_THROWS_AS(estimate_dof_slopes(cfg, alloc, {40.0, 80.0}, {1}),
                  std::invalid_argument);
  CHECK_THROWS_AS(estimate_dof_slopes(cfg, alloc, {40.0, 50.0, 60.0}, {1}),
                  std::invalid_argument);
  CHECK_THROWS_AS(estimate_dof_slopes(cfg, alloc, {40.0, 80.0, 120.0}, {}),
                  std::invalid_argument);
}

TEST_CASE("state averaging brackets the erasure capacity") {
  Eigen::MatrixXcd one(1, 1);
  one(0, 0) = 1.0;
  auto [mean, half_width] = empirical_state_average(one, 0.5, 1000.0, 1.0, 100000, 99);
  const double exact = 0.5 * std::log2(1001.0);
  CHECK(exact == doctest::Approx(4.9836).epsilon(1e-4));
  CHECK(std::abs(mean - exact) <= half_width);
  CHECK(half_width > 0.0);
  CHECK(half_width < 0.2);

  // an always-on link has no sampling noise at all
  auto [mean_on, width_on] = empirical_state_average(one, 1.0, 1000.0, 1.0, 1000, 5);
  CHECK(mean_on == doctest::Approx(std::log2(1001.0)).epsilon(1e-12));
  CHECK(width_on == 0.0);

  CHECK_THROWS_AS(empirical_state_average(one, 0.5, 1.0, 1.0, 10, 1),
                  std::invalid_argument);
}

TEST_CASE("state averaging covers random configurations") {
  std::mt19937_64 pick(20250304);
  int covered = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const long rows = 1 + long(pick() % 4);
    const long cols = 1 + long(pick() % 4);
    ChannelRealization real =
        sample_channel(ChannelConfig(rows, cols, 1, Rational(1, 2)), pick());
    const Eigen::MatrixXcd h = real.channel(1, 2);
    const double tau = double(1 + pick() % 9) / 10.0;
    const double snr = std::pow(10.0, double(pick() % 5));
    auto [mean, half_width] = empirical_state_average(h, tau, snr, 1.0, 20000, pick());
    const double exact = p2p_capacity(h, tau, snr, 1.0);
    if (std::abs(mean - exact) <= half_width) ++covered;
  }
  // a 3-sigma interval misses roughly one time in 370; allow a little slack
  CHECK(covered >= 48);
}

TEST_CASE("decode-forward is capped by the relay hop") {
  ChannelConfig cfg = make_cfg(10, 7, 4, "1/2");
  ChannelRealization real = sample_channel(cfg, 21, 1.0, 1.0);
  CHECK(decode_forward_rate(real, 0.0) == 0.0);

  // least-squares slope of the rate against log2(rho) over 40..120 dB
  std::vector<double> grid = {40.0, 60.0, 80.0, 100.0, 120.0};
  std::vector<double> xs, ys;
  for (double db : grid) {
    real.P = std::pow(10.0, db / 10.0);
    xs.push_back(std::log2(real.rho()));
    ys.push_back(decode_forward_rate(real, 0.5));
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= double(xs.size());
  my /= double(ys.size());
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    num += (xs[i] - mx) * (ys[i] - my);
    den += (xs[i] - mx) * (xs[i] - mx);
  }
  // the relay decodes over a rank-4 link, so four dimensions survive even
  // though the first hop could carry five
  CHECK(num / den == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("csv emitters keep a stable layout") {
  RateReport report;
  report.rows.push_back({2, 3, BeamKind::ZF, 40.0, 26.5817349375});
  report.slopes.push_back({3, 2, BeamKind::IA, 3.99871, 4.0});
  CHECK(rate_report_to_csv(report) ==
        "from,to,kind,snr_db,rate_bits\n2,3,zf,40,26.5817349375\n");
  CHECK(slope_report_to_csv(report) ==
        "from,to,kind,slope,target\n3,2,ia,3.99871,4\n");
}
