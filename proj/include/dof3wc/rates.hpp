#pragma once

// Rate evaluation for sampled channels: erasure-scaled log-det capacities,
// per-stream rates of a designed beamformer set, SNR-sweep slope estimates
// against their dimension-count targets, and the decode-forward benchmark.
// All rates are in bits per channel use; slopes are per log2(rho), which is
// the degrees-of-freedom scale.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>
#include <array>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "dof3wc/allocation.hpp"
#include "dof3wc/beamformer.hpp"
#include "dof3wc/channel.hpp"
#include "dof3wc/channel_config.hpp"

namespace dof3wc {

struct UnverifiedDesign : std::runtime_error {
  explicit UnverifiedDesign(const std::string& what) : std::runtime_error(what) {}
};

struct RateRow {
  int from = 0, to = 0;
  BeamKind kind = BeamKind::ZF;
  double snr_db = 0.0;
  double rate = 0.0;
};

struct SlopeRow {
  int from = 0, to = 0;
  BeamKind kind = BeamKind::ZF;
  double slope = 0.0;
  double target = 0.0;
};

struct RateReport {
  std::vector<RateRow> rows;
  std::vector<SlopeRow> slopes;
  // seeds that drew a degenerate channel, with their replacements
  std::vector<std::array<std::uint64_t, 2>> reseeds;
};

namespace detail {

inline double log2_det_gram(const Eigen::MatrixXcd& h, double rho) {
  if (h.rows() == 0 || h.cols() == 0) return 0.0;
  const Eigen::MatrixXcd gram =
      Eigen::MatrixXcd::Identity(h.rows(), h.rows()) + rho * (h * h.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(gram);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i)
    sum += std::log2(eig.eigenvalues()(i));
  return sum;
}

}  // namespace detail

// Capacity of a point-to-point MIMO link whose output is erased a (1-tau)
// fraction of the time, with the erasure state known at the receiver.
inline double p2p_capacity(const Eigen::MatrixXcd& h, double tau, double P, double sigma2) {
  if (!(P > 0.0) || !(sigma2 > 0.0))
    throw std::invalid_argument("power and noise variance must be positive");
  if (!(tau >= 0.0 && tau <= 1.0)) throw std::invalid_argument("tau must lie in [0, 1]");
  return tau * detail::log2_det_gram(h, P / sigma2);
}

// Two-way sum capacity: the reciprocal direction h^H has the same log-det,
// so both directions run at the one-way capacity simultaneously.
inline double twc_sum_capacity(const Eigen::MatrixXcd& h, double tau, double P,
                               double sigma2) {
  return 2.0 * p2p_capacity(h, tau, P, sigma2);
}

// Per-stream rates of a verified design at the realization's operating
// point. Each stream sees its post-coded effective channel with the
// transmitter's per-symbol power, scaled by the third node's availability.
inline RateReport stream_rates(const ChannelConfig& cfg, const ChannelRealization& real,
                               const StreamAllocation& alloc, const BeamformerSet& set,
                               const BeamformerReport* verified) {
  if (cfg.M != real.M)
    throw std::invalid_argument("configuration and realization antenna counts differ");
  if (verified == nullptr)
    throw UnverifiedDesign("stream_rates requires a verification report");
  if (!verified->all_ok())
    throw UnverifiedDesign("stream_rates refuses a design that failed verification");
  RateReport report;
  const double snr_db = 10.0 * std::log10(real.rho());
  for (std::size_t q = 0; q < kStreamPairs.size(); ++q) {
    auto [s, r] = kStreamPairs[q];
    for (BeamKind kind : {BeamKind::ZF, BeamKind::IA}) {
      const long a = kind == BeamKind::ZF ? alloc.zf[q] : alloc.ia[q];
      if (a == 0) continue;
      const Eigen::MatrixXcd effective =
          set.postcoder(s, r, kind) * real.channel(s, r) * set.precoder(s, r, kind);
      const double tau_k = cfg.stream_tau(s, r).to_double();
      const double rate =
          tau_k * detail::log2_det_gram(effective, set.p[s - 1] / real.sigma2);
      report.rows.push_back({s, r, kind, snr_db, rate});
    }
  }
  return report;
}

// Slope of rate against log2(rho) over the strongest grid points, per
// stream, averaged over seeds. The targets are the erasure-scaled beam
// counts; matching them is the numeric counterpart of the region analysis.
inline RateReport estimate_dof_slopes(const ChannelConfig& cfg, const StreamAllocation& alloc,
                                      const std::vector<double>& snr_db_grid,
                                      const std::vector<std::uint64_t>& seeds,
                                      double tol = 1e-8) {
  if (snr_db_grid.size() < 3)
    throw std::invalid_argument("slope estimation needs at least three SNR points");
  std::vector<double> grid = snr_db_grid;
  std::sort(grid.begin(), grid.end());
  if (grid.back() - grid.front() < 40.0)
    throw std::invalid_argument("SNR grid must span at least 40 dB");
  if (seeds.empty()) throw std::invalid_argument("at least one seed is required");

  RateReport report;
  // rows keyed by (stream, kind, grid point); accumulate means over seeds
  struct Key {
    std::size_t pair;
    BeamKind kind;
  };
  std::vector<Key> active;
  for (std::size_t q = 0; q < kStreamPairs.size(); ++q) {
    if (alloc.zf[q] > 0) active.push_back({q, BeamKind::ZF});
    if (alloc.ia[q] > 0) active.push_back({q, BeamKind::IA});
  }
  if (active.empty()) return report;

  std::vector<std::vector<double>> rate_sum(active.size(),
                                            std::vector<double>(grid.size(), 0.0));
  std::vector<double> slope_sum(active.size(), 0.0);

  const std::size_t fit_points = std::min<std::size_t>(4, grid.size());
  const std::size_t fit_from = grid.size() - fit_points;

  for (std::uint64_t seed : seeds) {
    // a degenerate draw is replaced by a salted reseed, a few times over
    std::uint64_t use = seed;
    BeamformerSet set;
    ChannelRealization real;
    bool designed = false;
    for (int attempt = 0; attempt < 16 && !designed; ++attempt) {
      real = sample_channel(cfg, use, 1.0, 1.0);
      try {
        set = design_beamformers(real, alloc);
        designed = true;
      } catch (const DegenerateChannel&) {
        const std::uint64_t next = use ^ (0x9e3779b97f4a7c15ULL + (use << 1));
        report.reseeds.push_back({use, next});
        use = next;
      }
    }
    if (!designed)
      throw DegenerateChannel("no usable channel draw after repeated reseeding");
    BeamformerReport check = verify_beamformers(real, alloc, set, tol);
    if (!check.all_ok())
      throw DegenerateChannel("design failed verification during slope estimation");

    std::vector<std::vector<double>> rates(active.size());
    for (std::size_t g = 0; g < grid.size(); ++g) {
      real.P = std::pow(10.0, grid[g] / 10.0);
      set_transmit_power(set, real, alloc);
      RateReport at_point = stream_rates(cfg, real, alloc, set, &check);
      for (std::size_t s = 0; s < active.size(); ++s) {
        auto [i, j] = kStreamPairs[active[s].pair];
        double rate = 0.0;
        for (const RateRow& row : at_point.rows)
          if (row.from == i && row.to == j && row.kind == active[s].kind) rate = row.rate;
        rates[s].push_back(rate);
        rate_sum[s][g] += rate;
      }
    }
    for (std::size_t s = 0; s < active.size(); ++s) {
      double mx = 0.0, my = 0.0;
      for (std::size_t g = fit_from; g < grid.size(); ++g) {
        mx += grid[g] / 10.0 * std::log2(10.0);
        my += rates[s][g];
      }
      mx /= double(fit_points);
      my /= double(fit_points);
      double num = 0.0, den = 0.0;
      for (std::size_t g = fit_from; g < grid.size(); ++g) {
        const double x = grid[g] / 10.0 * std::log2(10.0) - mx;
        num += x * (rates[s][g] - my);
        den += x * x;
      }
      slope_sum[s] += num / den;
    }
  }

  for (std::size_t s = 0; s < active.size(); ++s) {
    auto [i, j] = kStreamPairs[active[s].pair];
    for (std::size_t g = 0; g < grid.size(); ++g)
      report.rows.push_back(
          {i, j, active[s].kind, grid[g], rate_sum[s][g] / double(seeds.size())});
    const long a = active[s].kind == BeamKind::ZF ? alloc.zf[active[s].pair]
                                                  : alloc.ia[active[s].pair];
    const double target = cfg.stream_tau(i, j).to_double() * double(a);
    report.slopes.push_back(
        {i, j, active[s].kind, slope_sum[s] / double(seeds.size()), target});
  }
  return report;
}

// Monte-Carlo check of the erasure capacity: average s * log2 det over
// sampled Bernoulli states and report a 3-sigma half-width around the mean.
inline std::pair<double, double> empirical_state_average(const Eigen::MatrixXcd& h,
                                                         double tau, double P, double sigma2,
                                                         std::size_t n_samples,
                                                         std::uint64_t seed) {
  if (!(P > 0.0) || !(sigma2 > 0.0))
    throw std::invalid_argument("power and noise variance must be positive");
  if (!(tau >= 0.0 && tau <= 1.0)) throw std::invalid_argument("tau must lie in [0, 1]");
  if (n_samples < 1000)
    throw std::invalid_argument("state averaging needs at least 1000 samples");
  const double on_value = detail::log2_det_gram(h, P / sigma2);
  std::mt19937_64 rng(seed);
  auto unit = [&rng] { return (static_cast<double>(rng() >> 11) + 1.0) * 0x1p-53; };
  std::size_t on = 0;
  for (std::size_t i = 0; i < n_samples; ++i)
    if (unit() <= tau) ++on;
  const double mean = on_value * double(on) / double(n_samples);
  // sample variance of the two-valued draw, scaled down by n for the mean
  const double frac = double(on) / double(n_samples);
  const double var =
      on_value * on_value * frac * (1.0 - frac) * double(n_samples) / double(n_samples - 1);
  const double half_width = 3.0 * std::sqrt(var / double(n_samples));
  return {mean, half_width};
}

// Decode-forward through node 2: the relay must decode (direct 3->2 link,
// always on), and node 1 must resolve the joint (2,3) transmission while it
// is up, with the power split evenly between the two senders.
inline double decode_forward_rate(const ChannelRealization& real, double tau) {
  if (!(tau >= 0.0 && tau <= 1.0)) throw std::invalid_argument("tau must lie in [0, 1]");
  const Eigen::MatrixXcd& h21 = real.channel(2, 1);
  const Eigen::MatrixXcd& h31 = real.channel(3, 1);
  Eigen::MatrixXcd joint(h21.rows(), h21.cols() + h31.cols());
  joint << h21, h31;
  const double rho = real.rho();
  const double hop_in = tau * detail::log2_det_gram(joint, rho / 2.0);
  const double hop_relay = detail::log2_det_gram(real.channel(3, 2), rho);
  return std::min(hop_in, hop_relay);
}

// Fixed-point-free formatting with a pinned significant-digit count, used
// by every CSV emitter so outputs are stable across runs.
inline std::string format_significant(double value, int digits = 12) {
  std::ostringstream out;
  out.precision(digits);
  out << value;
  return out.str();
}

inline std::string rate_report_to_csv(const RateReport& report) {
  std::ostringstream out;
  out << "from,to,kind,snr_db,rate_bits\n";
  for (const RateRow& row : report.rows)
    out << row.from << ',' << row.to << ',' << kind_name(row.kind) << ','
        << format_significant(row.snr_db) << ',' << format_significant(row.rate) << '\n';
  return out.str();
}

inline std::string slope_report_to_csv(const RateReport& report) {
  std::ostringstream out;
  out << "from,to,kind,slope,target\n";
  for (const SlopeRow& row : report.slopes)
    out << row.from << ',' << row.to << ',' << kind_name(row.kind) << ','
        << format_significant(row.slope) << ',' << format_significant(row.target) << '\n';
  return out.str();
}

}  // namespace dof3wc
