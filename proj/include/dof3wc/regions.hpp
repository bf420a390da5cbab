#pragma once

// Degrees-of-freedom regions for the intermittent three-way channel. The
// achievable region is constructed mechanically: a 21-variable system
// couples the per-stream DoF to zero-forcing / interference-alignment
// dimension counts and alignment overlaps, and Fourier-Motzkin projects the
// auxiliary variables away. The closed-form counterparts (compact
// achievable region, non-intermittent region, cut-set and genie-aided outer
// bounds, sum-DoF formula) are built directly and cross-checked in tests.

#include <algorithm>
#include <array>
#include <map>
#include <string>
#include <vector>

#include "dof3wc/channel_config.hpp"
#include "dof3wc/fme.hpp"
#include "dof3wc/linear_system.hpp"
#include "dof3wc/rational.hpp"

namespace dof3wc {

namespace names {
inline std::string d(int i, int j) { return "d" + std::to_string(i) + std::to_string(j); }
inline std::string zf(int i, int j) {
  return "a" + std::to_string(i) + std::to_string(j) + "_zf";
}
inline std::string ia(int i, int j) {
  return "a" + std::to_string(i) + std::to_string(j) + "_ia";
}
inline std::string gamma(int i) { return "g" + std::to_string(i); }
}  // namespace names

inline std::vector<std::string> dof_variable_names() {
  std::vector<std::string> v;
  for (auto [i, j] : kStreamPairs) v.push_back(names::d(i, j));
  return v;
}

// The full stream-allocation system over 21 variables: per-stream DoF d_ij,
// zero-forced and aligned beam counts a_ij (split by kind), and per-receiver
// alignment overlaps gamma_i.
inline LinearSystem build_scheme_system(const ChannelConfig& cfg) {
  std::vector<std::string> vars = dof_variable_names();
  for (auto [i, j] : kStreamPairs) vars.push_back(names::zf(i, j));
  for (auto [i, j] : kStreamPairs) vars.push_back(names::ia(i, j));
  for (int i = 1; i <= 3; ++i) vars.push_back(names::gamma(i));
  LinearSystem sys(vars);
  const Rational one(1);

  // transmit budget: all beams sent by node i fit its antennas
  for (int i = 1; i <= 3; ++i) {
    std::map<std::string, Rational> c;
    for (auto [a, b] : kStreamPairs)
      if (a == i) {
        c[names::zf(a, b)] = one;
        c[names::ia(a, b)] = one;
      }
    sys.add_le(c, cfg.antennas(i));
  }

  // receive budget: desired beams plus residual interference after the
  // gamma_i aligned dimensions collapse must fit node i's antennas
  for (int i = 1; i <= 3; ++i) {
    const int j = i == 1 ? 2 : 1;
    const int k = i == 3 ? 2 : 3;
    std::map<std::string, Rational> c;
    c[names::zf(j, i)] = one;
    c[names::ia(j, i)] = one;
    c[names::zf(k, i)] = one;
    c[names::ia(k, i)] = one;
    c[names::ia(j, k)] = one;
    c[names::ia(k, j)] = one;
    c[names::gamma(i)] = -one;
    sys.add_le(c, cfg.antennas(i));
  }

  // zero-forced beams for i->j must lie in the null space toward the third
  // node, which has dimension (M_i - M_k)^+
  for (auto [i, j] : kStreamPairs) {
    const int k = third_node(i, j);
    sys.add_le({{names::zf(i, j), one}}, (cfg.antennas(i) - cfg.antennas(k)).pos_part());
  }

  // alignment overlap at receiver i is limited by both cross streams and by
  // the dimension of the aligned intersection, (M_j + M_k - M_i)^+
  for (int i = 1; i <= 3; ++i) {
    const int j = i == 1 ? 2 : 1;
    const int k = i == 3 ? 2 : 3;
    sys.add_le({{names::gamma(i), one}, {names::ia(j, k), -one}}, Rational(0));
    sys.add_le({{names::gamma(i), one}, {names::ia(k, j), -one}}, Rational(0));
    sys.add_le({{names::gamma(i), one}},
               (cfg.antennas(j) + cfg.antennas(k) - cfg.antennas(i)).pos_part());
  }

  // coupling: a stream's DoF is its beam count scaled by the third node's
  // availability (equality written as two inequalities)
  for (auto [i, j] : kStreamPairs) {
    const Rational t = cfg.stream_tau(i, j);
    sys.add_eq({{names::d(i, j), one}, {names::zf(i, j), -t}, {names::ia(i, j), -t}},
               Rational(0));
  }

  // nonnegativity of every quantity
  for (const std::string& v : sys.variables()) sys.add_ge({{v, one}}, Rational(0));
  return sys;
}

// Auxiliary variables in the order they are projected away: overlaps first,
// then zero-forcing counts, then alignment counts (fewest couplings first,
// which keeps the intermediate systems small).
inline std::vector<std::string> scheme_elimination_order() {
  std::vector<std::string> order;
  for (int i = 1; i <= 3; ++i) order.push_back(names::gamma(i));
  for (auto [i, j] : kStreamPairs) order.push_back(names::zf(i, j));
  for (auto [i, j] : kStreamPairs) order.push_back(names::ia(i, j));
  return order;
}

// Achievable DoF region as the exact projection of the scheme system onto
// the six stream variables.
inline LinearSystem build_inner_region(const ChannelConfig& cfg) {
  return fm_eliminate(build_scheme_system(cfg), scheme_elimination_order());
}

// Closed-form description of the same region: six two-sided max families
// plus nonnegativity. Undefined at tau = 0 (the 2<->3 streams lose their
// scaled bounds there), so that case is rejected.
inline LinearSystem build_compact_region(const ChannelConfig& cfg) {
  if (cfg.tau.is_zero())
    throw DegenerateTau("the compact region requires tau > 0; use the projected region");
  const Rational t = cfg.tau;
  const Rational M1 = cfg.antennas(1), M2 = cfg.antennas(2), M3 = cfg.antennas(3);
  LinearSystem sys(dof_variable_names());
  const Rational one(1);
  auto le = [&](std::initializer_list<std::pair<std::string, Rational>> terms,
                const Rational& rhs) {
    std::map<std::string, Rational> c;
    for (const auto& [n, v] : terms) c[n] = v;
    sys.add_le(c, rhs);
  };
  using names::d;
  le({{d(1, 2), one}, {d(1, 3), one}}, t * M1);
  le({{d(2, 1), one}, {d(3, 1), one}}, t * M1);
  le({{d(2, 1), one}, {d(2, 3), t}}, t * M2);
  le({{d(1, 2), one}, {d(3, 2), t}}, t * M2);
  le({{d(3, 1), one}, {d(3, 2), t}}, t * M3);
  le({{d(1, 3), one}, {d(2, 3), t}}, t * M3);
  le({{d(1, 2), one}, {d(1, 3), one}, {d(2, 3), t}}, t * max(M1, M3));
  le({{d(2, 1), one}, {d(3, 1), one}, {d(3, 2), t}}, t * max(M1, M3));
  le({{d(1, 2), one}, {d(1, 3), one}, {d(3, 2), t}}, t * max(M1, M2));
  le({{d(2, 1), one}, {d(3, 1), one}, {d(2, 3), t}}, t * max(M1, M2));
  le({{d(1, 2), one}, {d(3, 1), one}, {d(3, 2), t}}, t * max(M2, M3));
  le({{d(2, 1), one}, {d(1, 3), one}, {d(2, 3), t}}, t * max(M2, M3));
  for (const std::string& v : sys.variables()) sys.add_ge({{v, one}}, Rational(0));
  return sys;
}

// DoF region with node 1 always on. Stated for sorted antenna counts, so
// roles are assigned by strength (ties keep node order) and mapped back.
inline LinearSystem build_nonintermittent_region(const ChannelConfig& cfg) {
  std::array<int, 3> node = {1, 2, 3};
  std::stable_sort(node.begin(), node.end(),
                   [&](int a, int b) { return cfg.M[a - 1] > cfg.M[b - 1]; });
  auto D = [&](int ra, int rb) { return names::d(node[ra - 1], node[rb - 1]); };
  auto Mr = [&](int r) { return cfg.antennas(node[r - 1]); };

  LinearSystem sys(dof_variable_names());
  const Rational one(1);
  auto le3 = [&](const std::string& x, const std::string& y, const std::string& z,
                 const Rational& rhs) {
    sys.add_le({{x, one}, {y, one}, {z, one}}, rhs);
  };
  le3(D(1, 2), D(1, 3), D(2, 3), Mr(1));
  le3(D(1, 2), D(1, 3), D(3, 2), Mr(1));
  le3(D(2, 1), D(3, 1), D(3, 2), Mr(1));
  le3(D(2, 1), D(3, 1), D(2, 3), Mr(1));
  le3(D(2, 1), D(1, 3), D(2, 3), Mr(2));
  le3(D(1, 2), D(3, 1), D(3, 2), Mr(2));
  sys.add_le({{D(3, 1), one}, {D(3, 2), one}}, Mr(3));
  sys.add_le({{D(1, 3), one}, {D(2, 3), one}}, Mr(3));
  for (const std::string& v : sys.variables()) sys.add_ge({{v, one}}, Rational(0));
  return sys;
}

// Cut-set outer bound. The node-1 cut sees the channel only while node 1 is
// up; the node-2 and node-3 cuts keep their direct 2<->3 link the rest of
// the time.
inline LinearSystem build_cutset_region(const ChannelConfig& cfg) {
  const Rational t = cfg.tau;
  const Rational M1 = cfg.antennas(1), M2 = cfg.antennas(2), M3 = cfg.antennas(3);
  LinearSystem sys(dof_variable_names());
  const Rational one(1);
  using names::d;
  const Rational cut1 = t * min(M1, M2 + M3);
  sys.add_le({{d(1, 2), one}, {d(1, 3), one}}, cut1);
  sys.add_le({{d(2, 1), one}, {d(3, 1), one}}, cut1);
  const Rational cut2 = t * min(M2, M1 + M3) + (Rational(1) - t) * min(M2, M3);
  sys.add_le({{d(2, 1), one}, {d(2, 3), one}}, cut2);
  sys.add_le({{d(1, 2), one}, {d(3, 2), one}}, cut2);
  const Rational cut3 = t * min(M3, M1 + M2) + (Rational(1) - t) * min(M3, M2);
  sys.add_le({{d(3, 1), one}, {d(3, 2), one}}, cut3);
  sys.add_le({{d(1, 3), one}, {d(2, 3), one}}, cut3);
  for (const std::string& v : sys.variables()) sys.add_ge({{v, one}}, Rational(0));
  return sys;
}

inline Rational middle_antennas(const ChannelConfig& cfg) {
  std::array<long, 3> m = cfg.M;
  std::sort(m.begin(), m.end());
  return Rational(m[1]);
}

// Genie-aided outer bound: a genie hands the strongest node (the
// "intermediary") enough side information to decode everything, which caps
// two complementary triplets of streams by the same mixed bound.
inline LinearSystem build_genie_outer_region(const ChannelConfig& cfg) {
  int im = 1;
  for (int i = 2; i <= 3; ++i)
    if (cfg.M[i - 1] > cfg.M[im - 1]) im = i;
  using P = std::pair<int, int>;
  std::array<std::array<P, 3>, 2> triplets;
  switch (im) {
    case 1: triplets = {{{{P{1, 2}, P{3, 2}, P{3, 1}}}, {{P{1, 3}, P{2, 3}, P{2, 1}}}}}; break;
    case 2: triplets = {{{{P{1, 3}, P{2, 3}, P{1, 2}}}, {{P{2, 1}, P{3, 1}, P{3, 2}}}}}; break;
    default: triplets = {{{{P{3, 2}, P{1, 2}, P{1, 3}}}, {{P{3, 1}, P{2, 1}, P{2, 3}}}}}; break;
  }
  const Rational rhs = cfg.tau * middle_antennas(cfg) +
                       (Rational(1) - cfg.tau) * min(cfg.antennas(2), cfg.antennas(3));
  LinearSystem sys(dof_variable_names());
  const Rational one(1);
  for (const auto& tri : triplets) {
    std::map<std::string, Rational> c;
    for (const auto& [i, j] : tri) c[names::d(i, j)] = one;
    sys.add_le(c, rhs);
  }
  for (const std::string& v : sys.variables()) sys.add_ge({{v, one}}, Rational(0));
  return sys;
}

// Closed-form maximum sum DoF: the 2<->3 exchange runs at min(M2, M3) both
// ways while node 1 is away, and the best two-way relaying pattern yields
// the middle antenna count both ways while it is up.
inline Rational sum_dof_formula(const ChannelConfig& cfg) {
  const Rational direct = min(cfg.antennas(2), cfg.antennas(3));
  return Rational(2) * (Rational(1) - cfg.tau) * direct +
         Rational(2) * cfg.tau * middle_antennas(cfg);
}

// Best d31 when node 3 must talk to node 1 directly (no adaptive relaying).
inline Rational d31_nonadaptive_cap(const ChannelConfig& cfg) {
  return cfg.tau * min(cfg.antennas(1), cfg.antennas(3));
}

// d31 achieved by decode-and-forward through node 2.
inline Rational d31_decode_forward_bound(const ChannelConfig& cfg) {
  return min(min(cfg.tau * cfg.antennas(1), cfg.tau * (cfg.antennas(2) + cfg.antennas(3))),
             cfg.antennas(3));
}

}  // namespace dof3wc
