#pragma once

// Seeded random channel realizations. Reproducibility contract: matrices
// depend only on (antenna counts, seed), never on compiler or platform, so
// the generator pipeline is spelled out here rather than delegated to
// distribution classes whose output is implementation-defined.
//
//   * stream: std::mt19937_64 seeded directly with the given seed
//   * uniform: u = ((x >> 11) + 1) * 2^-53, open at zero so logs are safe
//   * normal pairs: Box-Muller, z1 = sqrt(-2 ln u1) cos(2 pi u2),
//     z2 = same with sin
//   * complex entry: (z1 + i z2) / sqrt(2), unit variance overall
//   * matrices filled in kStreamPairs order, each row-major
//
// A draw failing the full-rank check is redrawn from the continuing stream,
// so such seeds stay reproducible too.

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <array>
#include <random>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "dof3wc/channel_config.hpp"

namespace dof3wc {

// Singular values below this fraction of the largest one count as zero
// everywhere in the numeric modules.
inline constexpr double kRankTolerance = 1e-9;

namespace detail {

class GaussianSource {
 public:
  explicit GaussianSource(std::uint64_t seed) : rng_(seed) {}

  double unit() {  // uniform on (0, 1]
    return (static_cast<double>(rng_() >> 11) + 1.0) * 0x1p-53;
  }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = unit();
    const double u2 = unit();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * M_PI * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

  std::complex<double> complex_entry() {
    const double re = normal();
    const double im = normal();
    return {re * M_SQRT1_2, im * M_SQRT1_2};
  }

  Eigen::MatrixXcd matrix(Eigen::Index rows, Eigen::Index cols) {
    Eigen::MatrixXcd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = complex_entry();
    return m;
  }

 private:
  std::mt19937_64 rng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

inline Eigen::Index numeric_rank(const Eigen::MatrixXcd& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  const auto& sv = svd.singularValues();
  const double cutoff = kRankTolerance * sv(0);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff) ++rank;
  return rank;
}

}  // namespace detail

// One draw of the six cross-channel matrices plus the operating point.
// channel(i, j) is the matrix a signal from node i passes through on its
// way to node j, hence shaped M_j x M_i.
struct ChannelRealization {
  std::array<long, 3> M{};
  std::array<Eigen::MatrixXcd, 6> H;
  double P = 1.0;
  double sigma2 = 1.0;
  std::uint64_t seed = 0;

  const Eigen::MatrixXcd& channel(int i, int j) const { return H[pair_index(i, j)]; }
  double rho() const { return P / sigma2; }
};

inline ChannelRealization sample_channel(const ChannelConfig& cfg, std::uint64_t seed,
                                         double P = 1.0, double sigma2 = 1.0) {
  if (!(P > 0.0) || !(sigma2 > 0.0))
    throw std::invalid_argument("power and noise variance must be positive");
  ChannelRealization real;
  real.M = cfg.M;
  real.P = P;
  real.sigma2 = sigma2;
  real.seed = seed;
  detail::GaussianSource source(seed);
  for (std::size_t p = 0; p < kStreamPairs.size(); ++p) {
    auto [i, j] = kStreamPairs[p];
    const Eigen::Index rows = cfg.M[j - 1];
    const Eigen::Index cols = cfg.M[i - 1];
    Eigen::MatrixXcd h = source.matrix(rows, cols);
    while (detail::numeric_rank(h) < std::min(rows, cols)) h = source.matrix(rows, cols);
    real.H[p] = std::move(h);
  }
  return real;
}

}  // namespace dof3wc
