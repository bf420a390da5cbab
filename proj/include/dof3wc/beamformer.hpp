#pragma once

// Pre- and post-coder synthesis for an integer beam allocation on a sampled
// channel. Zero-forced beams live in the null space toward the unintended
// third node. Aligned beams come in pairs: a null vector of [H_ji | -H_ki]
// splits into one column for each of the two cross streams, making their
// images at receiver i collinear, so gamma_i pairs collapse into gamma_i
// shared dimensions. Post-coders are built from an SVD of the desired
// matrix after projecting out everything the stream must ignore.
//
// Extra aligned columns beyond the paired ones are drawn random unit-norm
// from a generator seeded with (channel seed XOR 0x9e3779b97f4a7c15), so a
// design is a pure function of (realization, allocation).

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>
#include <array>

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <json.hpp>

#include "dof3wc/allocation.hpp"
#include "dof3wc/channel.hpp"
#include "dof3wc/channel_config.hpp"

namespace dof3wc {

inline constexpr std::uint64_t kAuxColumnSeedSalt = 0x9e3779b97f4a7c15ULL;

enum class BeamKind { ZF, IA };

inline const char* kind_name(BeamKind k) { return k == BeamKind::ZF ? "zf" : "ia"; }

struct AllocationInfeasible : std::runtime_error {
  explicit AllocationInfeasible(const std::string& what) : std::runtime_error(what) {}
};

// A structurally feasible allocation met a channel draw that defeats it
// numerically. Vanishingly rare for generic draws; callers reseed.
struct DegenerateChannel : std::runtime_error {
  explicit DegenerateChannel(const std::string& what) : std::runtime_error(what) {}
};

struct BeamformerCheck {
  std::string label;
  bool ok = false;
  double measured = 0.0;
  double limit = 0.0;
};

struct BeamformerReport {
  std::vector<BeamformerCheck> checks;
  bool all_ok() const {
    for (const auto& c : checks)
      if (!c.ok) return false;
    return true;
  }
};

struct BeamformerSet {
  // pre-coders V (antennas x beams, unit-norm columns) and post-coders T
  // (beams x antennas, orthonormal rows), indexed like kStreamPairs
  std::array<Eigen::MatrixXcd, 6> V_zf, V_ia, T_zf, T_ia;
  std::array<double, 3> p{};  // per-symbol transmit power, zero for idle nodes

  const Eigen::MatrixXcd& precoder(int i, int j, BeamKind k) const {
    return (k == BeamKind::ZF ? V_zf : V_ia)[pair_index(i, j)];
  }
  const Eigen::MatrixXcd& postcoder(int i, int j, BeamKind k) const {
    return (k == BeamKind::ZF ? T_zf : T_ia)[pair_index(i, j)];
  }

  nlohmann::ordered_json to_json() const {
    auto matrix_json = [](const Eigen::MatrixXcd& m) {
      nlohmann::ordered_json rows = nlohmann::ordered_json::array();
      for (Eigen::Index r = 0; r < m.rows(); ++r) {
        nlohmann::ordered_json row = nlohmann::ordered_json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c)
          row.push_back({m(r, c).real(), m(r, c).imag()});
        rows.push_back(std::move(row));
      }
      return rows;
    };
    nlohmann::ordered_json j;
    j["p"] = p;
    j["precoders"] = nlohmann::ordered_json::object();
    j["postcoders"] = nlohmann::ordered_json::object();
    for (std::size_t q = 0; q < kStreamPairs.size(); ++q) {
      const std::string key = std::to_string(kStreamPairs[q].first) +
                              std::to_string(kStreamPairs[q].second);
      if (V_zf[q].cols() > 0) j["precoders"][key]["zf"] = matrix_json(V_zf[q]);
      if (V_ia[q].cols() > 0) j["precoders"][key]["ia"] = matrix_json(V_ia[q]);
      if (T_zf[q].rows() > 0) j["postcoders"][key]["zf"] = matrix_json(T_zf[q]);
      if (T_ia[q].rows() > 0) j["postcoders"][key]["ia"] = matrix_json(T_ia[q]);
    }
    return j;
  }
};

namespace detail {

// Orthonormal basis of the kernel, via the right singular vectors past the
// numeric rank. A matrix with no rows constrains nothing.
inline Eigen::MatrixXcd kernel_basis(const Eigen::MatrixXcd& a) {
  if (a.cols() == 0) return Eigen::MatrixXcd(0, 0);
  if (a.rows() == 0) return Eigen::MatrixXcd::Identity(a.cols(), a.cols());
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cutoff = kRankTolerance * sv(0);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff) ++rank;
  return svd.matrixV().rightCols(a.cols() - rank);
}

inline Eigen::MatrixXcd orthonormal_span(const Eigen::MatrixXcd& a) {
  if (a.rows() == 0 || a.cols() == 0) return Eigen::MatrixXcd(a.rows(), 0);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  const double cutoff = kRankTolerance * sv(0);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff) ++rank;
  return svd.matrixU().leftCols(rank);
}

inline void others_of(int i, int& j, int& k) {
  j = i == 1 ? 2 : 1;
  k = i == 3 ? 2 : 3;
}

// Everything the post-coder of stream s->r (of the given kind) must ignore
// at receiver r: the same stream's other kind, the other incoming message,
// and the aligned cross-traffic. Zero-forced cross-traffic is absent by
// construction of the V's.
inline std::vector<Eigen::MatrixXcd> unwanted_blocks(const ChannelRealization& real,
                                                     const BeamformerSet& set, int s,
                                                     int r, BeamKind kind) {
  const int k = third_node(s, r);
  const BeamKind other = kind == BeamKind::ZF ? BeamKind::IA : BeamKind::ZF;
  return {
      real.channel(s, r) * set.precoder(s, r, other),
      real.channel(k, r) * set.precoder(k, r, BeamKind::ZF),
      real.channel(k, r) * set.precoder(k, r, BeamKind::IA),
      real.channel(s, r) * set.precoder(s, k, BeamKind::IA),
      real.channel(k, r) * set.precoder(k, s, BeamKind::IA),
  };
}

// Structural feasibility of the counts alone, independent of the draw.
inline void require_fits(const ChannelRealization& real, const StreamAllocation& alloc) {
  for (int i = 1; i <= 3; ++i) {
    long sent = 0;
    for (auto [a, b] : kStreamPairs)
      if (a == i) sent += alloc.zf_count(a, b) + alloc.ia_count(a, b);
    if (sent > real.M[i - 1])
      throw AllocationInfeasible("node " + std::to_string(i) + " transmits " +
                                 std::to_string(sent) + " beams with " +
                                 std::to_string(real.M[i - 1]) + " antennas");
    int j, k;
    others_of(i, j, k);
    const long seen = alloc.zf_count(j, i) + alloc.ia_count(j, i) + alloc.zf_count(k, i) +
                      alloc.ia_count(k, i) + alloc.ia_count(j, k) + alloc.ia_count(k, j) -
                      alloc.gamma[i - 1];
    if (seen > real.M[i - 1])
      throw AllocationInfeasible("node " + std::to_string(i) + " must resolve " +
                                 std::to_string(seen) + " dimensions with " +
                                 std::to_string(real.M[i - 1]) + " antennas");
    const long overlap_cap =
        std::max(real.M[j - 1] + real.M[k - 1] - real.M[i - 1], 0L);
    if (alloc.gamma[i - 1] > std::min({(long)alloc.ia_count(j, k),
                                       (long)alloc.ia_count(k, j), overlap_cap}))
      throw AllocationInfeasible("alignment overlap at node " + std::to_string(i) +
                                 " exceeds its cap");
  }
  for (auto [i, j] : kStreamPairs) {
    const int k = third_node(i, j);
    const long cap = std::max(real.M[i - 1] - real.M[k - 1], 0L);
    if (alloc.zf_count(i, j) > cap)
      throw AllocationInfeasible("zero-forcing " + std::to_string(i) + "->" +
                                 std::to_string(j) + " wants " +
                                 std::to_string(alloc.zf_count(i, j)) +
                                 " dimensions, null space has " + std::to_string(cap));
  }
}

}  // namespace detail

inline void set_transmit_power(BeamformerSet& set, const ChannelRealization& real,
                               const StreamAllocation& alloc) {
  for (int i = 1; i <= 3; ++i) {
    long beams = 0;
    for (auto [a, b] : kStreamPairs)
      if (a == i) beams += alloc.zf_count(a, b) + alloc.ia_count(a, b);
    set.p[i - 1] = beams > 0 ? real.P / static_cast<double>(beams) : 0.0;
  }
}

inline BeamformerSet design_beamformers(const ChannelRealization& real,
                                        const StreamAllocation& alloc) {
  if (alloc.extension != 1)
    throw std::invalid_argument(
        "symbol-extended allocations (L > 1) have no single-use realization");
  detail::require_fits(real, alloc);

  BeamformerSet set;

  for (std::size_t q = 0; q < kStreamPairs.size(); ++q) {
    auto [i, j] = kStreamPairs[q];
    const long a = alloc.zf[q];
    const int k = third_node(i, j);
    Eigen::MatrixXcd kernel = detail::kernel_basis(real.channel(i, k));
    if (kernel.cols() < a)
      throw DegenerateChannel("null space toward node " + std::to_string(k) +
                              " came up short for stream " + std::to_string(i) + "->" +
                              std::to_string(j));
    set.V_zf[q] = kernel.leftCols(a);
    set.V_ia[q].resize(real.M[i - 1], alloc.ia[q]);
  }

  // aligned pairs first, then random filler columns in a fixed order
  std::array<long, 6> filled{};
  for (int i = 1; i <= 3; ++i) {
    const long gi = alloc.gamma[i - 1];
    if (gi == 0) continue;
    int j, k;
    detail::others_of(i, j, k);
    Eigen::MatrixXcd stacked(real.M[i - 1], real.M[j - 1] + real.M[k - 1]);
    stacked << real.channel(j, i), -real.channel(k, i);
    Eigen::MatrixXcd kernel = detail::kernel_basis(stacked);
    if (kernel.cols() < gi)
      throw DegenerateChannel("alignment null space at node " + std::to_string(i) +
                              " came up short");
    const std::size_t jk = pair_index(j, k), kj = pair_index(k, j);
    for (long t = 0; t < gi; ++t) {
      Eigen::VectorXcd to_k = kernel.col(t).head(real.M[j - 1]);
      Eigen::VectorXcd to_j = kernel.col(t).tail(real.M[k - 1]);
      if (to_k.norm() < kRankTolerance || to_j.norm() < kRankTolerance)
        throw DegenerateChannel("aligned pair at node " + std::to_string(i) +
                                " degenerated to one side");
      set.V_ia[jk].col(filled[jk]++) = to_k.normalized();
      set.V_ia[kj].col(filled[kj]++) = to_j.normalized();
    }
  }
  detail::GaussianSource aux(real.seed ^ kAuxColumnSeedSalt);
  for (std::size_t q = 0; q < kStreamPairs.size(); ++q) {
    auto [i, j] = kStreamPairs[q];
    for (long t = filled[q]; t < alloc.ia[q]; ++t) {
      Eigen::VectorXcd col = aux.matrix(real.M[i - 1], 1);
      if (col.norm() < kRankTolerance) throw DegenerateChannel("random column vanished");
      set.V_ia[q].col(t) = col.normalized();
    }
  }

  for (int i = 1; i <= 3; ++i) {
    long beams = 0;
    for (auto [a, b] : kStreamPairs)
      if (a == i) beams += alloc.zf_count(a, b) + alloc.ia_count(a, b);
    if (beams == 0) continue;
    Eigen::MatrixXcd all(real.M[i - 1], beams);
    Eigen::Index at = 0;
    for (auto [a, b] : kStreamPairs)
      if (a == i) {
        const std::size_t q = pair_index(a, b);
        all.middleCols(at, set.V_zf[q].cols()) = set.V_zf[q];
        at += set.V_zf[q].cols();
        all.middleCols(at, set.V_ia[q].cols()) = set.V_ia[q];
        at += set.V_ia[q].cols();
      }
    if (detail::numeric_rank(all) < beams)
      throw DegenerateChannel("transmit columns of node " + std::to_string(i) +
                              " are linearly dependent");
  }

  // post-coders: strip the other kind, the other incoming message, and the
  // residual cross-traffic interference, then keep the strongest directions
  // of what remains of the desired signal
  for (std::size_t q = 0; q < kStreamPairs.size(); ++q) {
    auto [s, r] = kStreamPairs[q];
    for (BeamKind kind : {BeamKind::ZF, BeamKind::IA}) {
      const long a = kind == BeamKind::ZF ? alloc.zf[q] : alloc.ia[q];
      Eigen::MatrixXcd& target = (kind == BeamKind::ZF ? set.T_zf : set.T_ia)[q];
      if (a == 0) {
        target.resize(0, real.M[r - 1]);
        continue;
      }
      const Eigen::MatrixXcd desired =
          real.channel(s, r) * set.precoder(s, r, kind);
      std::vector<Eigen::MatrixXcd> blocks = detail::unwanted_blocks(real, set, s, r, kind);
      Eigen::Index unwanted_cols = 0;
      for (const auto& b : blocks) unwanted_cols += b.cols();
      Eigen::MatrixXcd unwanted(real.M[r - 1], unwanted_cols);
      Eigen::Index at = 0;
      for (const auto& b : blocks) {
        unwanted.middleCols(at, b.cols()) = b;
        at += b.cols();
      }
      Eigen::MatrixXcd basis = detail::orthonormal_span(unwanted);
      Eigen::MatrixXcd clean = desired - basis * (basis.adjoint() * desired);
      Eigen::JacobiSVD<Eigen::MatrixXcd> svd(clean, Eigen::ComputeThinU);
      if (svd.singularValues().size() < a ||
          svd.singularValues()(a - 1) <= kRankTolerance * svd.singularValues()(0))
        throw DegenerateChannel("projected desired matrix for stream " +
                                std::to_string(s) + "->" + std::to_string(r) +
                                " lost rank");
      target = svd.matrixU().leftCols(a).adjoint();
    }
  }

  set_transmit_power(set, real, alloc);
  return set;
}

inline BeamformerReport verify_beamformers(const ChannelRealization& real,
                                           const StreamAllocation& alloc,
                                           const BeamformerSet& set, double tol = 1e-8) {
  BeamformerReport report;
  auto residual = [&](std::string label, double value, double scale) {
    report.checks.push_back({std::move(label), value <= tol * scale, value, tol * scale});
  };
  auto exact = [&](std::string label, Eigen::Index got, long want) {
    report.checks.push_back({std::move(label), got == want, double(got), double(want)});
  };

  for (std::size_t q = 0; q < kStreamPairs.size(); ++q) {
    auto [i, j] = kStreamPairs[q];
    if (alloc.zf[q] == 0) continue;
    const int k = third_node(i, j);
    const Eigen::MatrixXcd& h = real.channel(i, k);
    const Eigen::MatrixXcd& v = set.V_zf[q];
    residual("leakage " + std::to_string(i) + "->" + std::to_string(j),
             (h * v).norm(), h.norm() * v.norm());
  }

  for (int i = 1; i <= 3; ++i) {
    int j, k;
    detail::others_of(i, j, k);
    const Eigen::MatrixXcd seen_jk = real.channel(j, i) * set.V_ia[pair_index(j, k)];
    const Eigen::MatrixXcd seen_kj = real.channel(k, i) * set.V_ia[pair_index(k, j)];
    Eigen::MatrixXcd both(real.M[i - 1], seen_jk.cols() + seen_kj.cols());
    both << seen_jk, seen_kj;
    const Eigen::Index overlap = detail::numeric_rank(seen_jk) +
                                 detail::numeric_rank(seen_kj) -
                                 detail::numeric_rank(both);
    exact("alignment overlap node " + std::to_string(i), overlap, alloc.gamma[i - 1]);

    long beams = 0;
    for (auto [a, b] : kStreamPairs)
      if (a == i) beams += alloc.zf_count(a, b) + alloc.ia_count(a, b);
    Eigen::MatrixXcd all(real.M[i - 1], beams);
    Eigen::Index at = 0;
    for (auto [a, b] : kStreamPairs)
      if (a == i) {
        const std::size_t p = pair_index(a, b);
        all.middleCols(at, set.V_zf[p].cols()) = set.V_zf[p];
        at += set.V_zf[p].cols();
        all.middleCols(at, set.V_ia[p].cols()) = set.V_ia[p];
        at += set.V_ia[p].cols();
      }
    exact("transmit independence node " + std::to_string(i), detail::numeric_rank(all),
          beams);
  }

  for (std::size_t q = 0; q < kStreamPairs.size(); ++q) {
    auto [s, r] = kStreamPairs[q];
    for (BeamKind kind : {BeamKind::ZF, BeamKind::IA}) {
      const long a = kind == BeamKind::ZF ? alloc.zf[q] : alloc.ia[q];
      if (a == 0) continue;
      const std::string tag =
          std::to_string(s) + "->" + std::to_string(r) + " " + kind_name(kind);
      const Eigen::MatrixXcd& t = set.postcoder(s, r, kind);
      std::vector<Eigen::MatrixXcd> blocks = detail::unwanted_blocks(real, set, s, r, kind);
      double leak = 0.0, scale = 0.0;
      for (const auto& b : blocks) {
        leak = std::hypot(leak, (t * b).norm());
        scale = std::hypot(scale, b.norm());
      }
      residual("isolation " + tag, leak, t.norm() * scale);
      exact("postcoded rank " + tag,
            detail::numeric_rank(t * real.channel(s, r) * set.precoder(s, r, kind)), a);
      const Eigen::MatrixXcd gram =
          t * t.adjoint() - Eigen::MatrixXcd::Identity(t.rows(), t.rows());
      report.checks.push_back(
          {"orthonormal rows " + tag, gram.norm() <= tol, gram.norm(), tol});
    }
  }
  return report;
}

}  // namespace dof3wc
