#pragma once

// Channel configuration for the three-node MIMO setup: antenna counts
// M1, M2, M3 and the availability fraction tau of node 1. Nodes 2 and 3 are
// always present; node 1 is up for a tau fraction of time, so every stream
// that touches node 1 carries a factor tau while the 2<->3 streams carry
// factor one (erasure-coded traffic relayed through node 1 is accounted for
// by the same factors).

#include <json.hpp>

#include <array>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "dof3wc/linear_system.hpp"
#include "dof3wc/rational.hpp"

namespace dof3wc {

struct DegenerateTau : std::runtime_error {
  explicit DegenerateTau(const std::string& what) : std::runtime_error(what) {}
};

// The six ordered node pairs in canonical order; streams, channel matrices,
// and allocations are all indexed this way.
inline constexpr std::array<std::pair<int, int>, 6> kStreamPairs = {
    {{1, 2}, {1, 3}, {2, 1}, {2, 3}, {3, 1}, {3, 2}}};

inline int third_node(int i, int j) { return 6 - i - j; }

inline std::size_t pair_index(int i, int j) {
  for (std::size_t p = 0; p < kStreamPairs.size(); ++p)
    if (kStreamPairs[p].first == i && kStreamPairs[p].second == j) return p;
  throw std::invalid_argument("invalid node pair (" + std::to_string(i) + "," +
                              std::to_string(j) + ")");
}

struct ChannelConfig {
  std::array<long, 3> M{};  // antennas at nodes 1, 2, 3
  Rational tau;             // availability of node 1, in [0, 1]

  ChannelConfig(long m1, long m2, long m3, Rational t) : M{m1, m2, m3}, tau(std::move(t)) {
    if (m1 < 0 || m2 < 0 || m3 < 0)
      throw std::invalid_argument("antenna counts must be nonnegative");
    if (tau < Rational(0) || tau > Rational(1))
      throw DegenerateTau("tau = " + tau.str() + " is outside [0, 1]");
  }

  Rational antennas(int node) const { return Rational(M.at(node - 1)); }

  // Availability factor per node: 1 is intermittent, 2 and 3 always on.
  // A stream i->j shares the medium with the third node's schedule, so its
  // prelog carries the third node's factor.
  Rational node_tau(int node) const { return node == 1 ? Rational(1) : tau; }
  Rational stream_tau(int i, int j) const { return node_tau(third_node(i, j)); }

  static ChannelConfig from_json(const nlohmann::json& j) {
    if (!j.contains("M") || !j["M"].is_array() || j["M"].size() != 3)
      throw std::invalid_argument("channel config needs \"M\": [M1, M2, M3]");
    std::array<long, 3> m{};
    for (int i = 0; i < 3; ++i) {
      if (!j["M"][i].is_number_integer())
        throw std::invalid_argument("antenna counts must be integers");
      m[i] = j["M"][i].get<long>();
    }
    if (!j.contains("tau"))
      throw std::invalid_argument("channel config needs \"tau\"");
    return ChannelConfig(m[0], m[1], m[2], tau_from_json(j["tau"]));
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["M"] = M;
    j["tau"] = tau.str();
    return j;
  }

 private:
  // "p/q" strings, [p, q] pairs, and integers are exact; binary floats are
  // not and are rejected.
  static Rational tau_from_json(const nlohmann::json& v) {
    if (v.is_string()) return Rational::parse(v.get<std::string>());
    if (v.is_number_integer()) return Rational(static_cast<long>(v.get<std::int64_t>()));
    if (v.is_array() && v.size() == 2 && v[0].is_number_integer() && v[1].is_number_integer()) {
      long den = v[1].get<long>();
      if (den == 0) throw std::invalid_argument("tau denominator must be nonzero");
      return Rational(v[0].get<long>(), den);
    }
    throw std::invalid_argument(
        "tau must be a \"p/q\" string, [p, q] pair, or integer, got " + v.dump());
  }
};

// One degrees-of-freedom value per stream, in kStreamPairs order.
struct DofTuple {
  std::array<Rational, 6> d{};

  Rational& operator()(int i, int j) { return d[pair_index(i, j)]; }
  const Rational& operator()(int i, int j) const { return d[pair_index(i, j)]; }

  Rational sum() const {
    Rational s;
    for (const Rational& v : d) s += v;
    return s;
  }

  static std::string name(std::size_t p) {
    return "d" + std::to_string(kStreamPairs[p].first) + std::to_string(kStreamPairs[p].second);
  }

  std::map<std::string, Rational> as_point() const {
    std::map<std::string, Rational> pt;
    for (std::size_t p = 0; p < d.size(); ++p) pt[name(p)] = d[p];
    return pt;
  }

  static DofTuple from_point(const std::map<std::string, Rational>& pt) {
    DofTuple t;
    for (std::size_t p = 0; p < t.d.size(); ++p) {
      auto it = pt.find(name(p));
      if (it == pt.end()) throw MissingVariable(name(p));
      t.d[p] = it->second;
    }
    return t;
  }
};

}  // namespace dof3wc
