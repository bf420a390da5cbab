#pragma once

// Turns a DoF tuple inside the achievable region into concrete integer beam
// counts. The region construction guarantees some rational allocation
// exists; this module picks a canonical one (zero-forcing first, then as
// much alignment overlap as possible) and scales it to integers with a
// symbol-extension factor L.

#include <array>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "dof3wc/channel_config.hpp"
#include "dof3wc/fme.hpp"
#include "dof3wc/linear_system.hpp"
#include "dof3wc/rational.hpp"
#include "dof3wc/regions.hpp"
#include "dof3wc/simplex.hpp"

namespace dof3wc {

struct OutsideRegion : std::runtime_error {
  explicit OutsideRegion(const std::string& what) : std::runtime_error(what) {}
};

// Integer beam counts per stream, split by pre-coder kind, plus the
// alignment overlaps and the symbol-extension factor they are scaled by.
// An entry of k with extension L means k beams over L channel uses.
struct StreamAllocation {
  std::array<long, 6> zf{};
  std::array<long, 6> ia{};
  std::array<long, 3> gamma{};
  long extension = 1;

  long zf_count(int i, int j) const { return zf[pair_index(i, j)]; }
  long ia_count(int i, int j) const { return ia[pair_index(i, j)]; }

  bool operator==(const StreamAllocation&) const = default;

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["L"] = extension;
    j["zf"] = nlohmann::ordered_json::object();
    j["ia"] = nlohmann::ordered_json::object();
    for (std::size_t p = 0; p < kStreamPairs.size(); ++p) {
      const std::string key = std::to_string(kStreamPairs[p].first) +
                              std::to_string(kStreamPairs[p].second);
      if (zf[p] != 0) j["zf"][key] = zf[p];
      if (ia[p] != 0) j["ia"][key] = ia[p];
    }
    j["gamma"] = gamma;
    return j;
  }

  static StreamAllocation from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("L") || !j.contains("zf") || !j.contains("ia") ||
        !j.contains("gamma"))
      throw std::invalid_argument("allocation JSON needs L, zf, ia and gamma");
    StreamAllocation alloc;
    if (!j["L"].is_number_integer() || j["L"].get<long>() < 1)
      throw std::invalid_argument("allocation extension L must be a positive integer");
    alloc.extension = j["L"].get<long>();
    auto read_counts = [](const nlohmann::json& obj, std::array<long, 6>& out,
                          const char* kind) {
      if (!obj.is_object())
        throw std::invalid_argument(std::string("allocation field ") + kind +
                                    " must be an object");
      for (auto it = obj.begin(); it != obj.end(); ++it) {
        const std::string& key = it.key();
        if (key.size() != 2 || key[0] < '1' || key[0] > '3' || key[1] < '1' || key[1] > '3' ||
            key[0] == key[1])
          throw std::invalid_argument("unknown stream key '" + key + "'");
        if (!it->is_number_integer() || it->get<long>() < 0)
          throw std::invalid_argument("beam count for '" + key +
                                      "' must be a nonnegative integer");
        out[pair_index(key[0] - '0', key[1] - '0')] = it->get<long>();
      }
    };
    read_counts(j["zf"], alloc.zf, "zf");
    read_counts(j["ia"], alloc.ia, "ia");
    if (!j["gamma"].is_array() || j["gamma"].size() != 3)
      throw std::invalid_argument("allocation gamma must be an array of three integers");
    for (int i = 0; i < 3; ++i) {
      const auto& g = j["gamma"][i];
      if (!g.is_number_integer() || g.get<long>() < 0)
        throw std::invalid_argument("gamma entries must be nonnegative integers");
      alloc.gamma[i] = g.get<long>();
    }
    return alloc;
  }
};

struct AllocationCheck {
  std::string label;
  bool ok = false;
  Rational slack;  // rhs minus lhs; negative slack is exactly a failure
};

struct AllocationReport {
  std::vector<AllocationCheck> checks;
  bool all_ok() const {
    for (const auto& c : checks)
      if (!c.ok) return false;
    return true;
  }
};

namespace detail {

inline long to_long_checked(const Rational& r, const char* what) {
  if (!r.is_integer()) throw std::logic_error(std::string(what) + " did not scale to an integer");
  const mpz_class n = r.numerator();
  if (!n.fits_slong_p()) throw std::overflow_error(std::string(what) + " overflows long");
  return n.get_si();
}

}  // namespace detail

// Picks the canonical allocation for a tuple in the achievable region:
// first spend as many zero-forced dimensions as possible (they cost nothing
// at the unintended receiver), then maximize the alignment overlaps. Ties
// beyond that are resolved by the deterministic pivoting rule. The basic
// optimum has modest denominators; L clears them.
inline StreamAllocation allocate(const ChannelConfig& cfg, const DofTuple& d) {
  LinearSystem inner = build_inner_region(cfg);
  if (!inner.check_point(d.as_point()))
    throw OutsideRegion("DoF tuple lies outside the achievable region");

  LinearSystem sys = build_scheme_system(cfg);
  for (auto [i, j] : kStreamPairs)
    sys.add_eq({{names::d(i, j), Rational(1)}}, d(i, j));

  std::map<std::string, Rational> zf_total;
  for (auto [i, j] : kStreamPairs) zf_total[names::zf(i, j)] = Rational(1);
  LpResult phase_zf = lp_maximize(sys, zf_total);
  if (phase_zf.status != LpStatus::Optimal)
    throw std::logic_error("allocation system infeasible for an in-region tuple");
  sys.add_eq(zf_total, phase_zf.value);

  std::map<std::string, Rational> gamma_total;
  for (int i = 1; i <= 3; ++i) gamma_total[names::gamma(i)] = Rational(1);
  LpResult phase_gamma = lp_maximize(sys, gamma_total);
  if (phase_gamma.status != LpStatus::Optimal)
    throw std::logic_error("alignment phase lost feasibility");

  const auto& point = phase_gamma.point;
  mpz_class denom_lcm(1);
  auto fold_denominator = [&](const std::string& name) {
    const mpz_class den = point.at(name).denominator();
    mpz_lcm(denom_lcm.get_mpz_t(), denom_lcm.get_mpz_t(), den.get_mpz_t());
  };
  for (auto [i, j] : kStreamPairs) fold_denominator(names::zf(i, j));
  for (auto [i, j] : kStreamPairs) fold_denominator(names::ia(i, j));
  for (int i = 1; i <= 3; ++i) fold_denominator(names::gamma(i));
  if (!denom_lcm.fits_slong_p()) throw std::overflow_error("symbol extension overflows long");

  StreamAllocation alloc;
  alloc.extension = denom_lcm.get_si();
  const Rational scale(alloc.extension);
  for (std::size_t p = 0; p < kStreamPairs.size(); ++p) {
    auto [i, j] = kStreamPairs[p];
    alloc.zf[p] = detail::to_long_checked(point.at(names::zf(i, j)) * scale, "zf count");
    alloc.ia[p] = detail::to_long_checked(point.at(names::ia(i, j)) * scale, "ia count");
  }
  for (int i = 1; i <= 3; ++i)
    alloc.gamma[i - 1] = detail::to_long_checked(point.at(names::gamma(i)) * scale, "gamma");
  return alloc;
}

// Re-derives every constraint on the scaled integers and reports each one
// with its slack, so a failing allocation names the violated budget instead
// of just returning false.
inline AllocationReport verify_allocation(const ChannelConfig& cfg, const DofTuple& d,
                                          const StreamAllocation& alloc) {
  AllocationReport report;
  const Rational L(alloc.extension);
  auto add = [&](std::string label, const Rational& lhs, const Rational& rhs) {
    report.checks.push_back({std::move(label), lhs <= rhs, rhs - lhs});
  };
  auto add_eq = [&](std::string label, const Rational& lhs, const Rational& rhs) {
    report.checks.push_back({std::move(label), lhs == rhs, rhs - lhs});
  };

  for (int i = 1; i <= 3; ++i) {
    Rational sent(0);
    for (auto [a, b] : kStreamPairs)
      if (a == i) sent += Rational(alloc.zf_count(a, b) + alloc.ia_count(a, b));
    add("transmit budget node " + std::to_string(i), sent, L * cfg.antennas(i));
  }
  for (int i = 1; i <= 3; ++i) {
    const int j = i == 1 ? 2 : 1;
    const int k = i == 3 ? 2 : 3;
    const Rational seen = Rational(alloc.zf_count(j, i) + alloc.ia_count(j, i) +
                                   alloc.zf_count(k, i) + alloc.ia_count(k, i) +
                                   alloc.ia_count(j, k) + alloc.ia_count(k, j)) -
                          Rational(alloc.gamma[i - 1]);
    add("receive budget node " + std::to_string(i), seen, L * cfg.antennas(i));
  }
  for (auto [i, j] : kStreamPairs) {
    const int k = third_node(i, j);
    add("zero-forcing cap " + std::to_string(i) + "->" + std::to_string(j),
        Rational(alloc.zf_count(i, j)),
        L * (cfg.antennas(i) - cfg.antennas(k)).pos_part());
  }
  for (int i = 1; i <= 3; ++i) {
    const int j = i == 1 ? 2 : 1;
    const int k = i == 3 ? 2 : 3;
    const Rational cap =
        min(min(Rational(alloc.ia_count(j, k)), Rational(alloc.ia_count(k, j))),
            L * (cfg.antennas(j) + cfg.antennas(k) - cfg.antennas(i)).pos_part());
    add("alignment cap node " + std::to_string(i), Rational(alloc.gamma[i - 1]), cap);
  }
  for (auto [i, j] : kStreamPairs) {
    add_eq("coupling " + std::to_string(i) + "->" + std::to_string(j), d(i, j) * L,
           cfg.stream_tau(i, j) * Rational(alloc.zf_count(i, j) + alloc.ia_count(i, j)));
  }
  Rational least(alloc.extension);
  for (long v : alloc.zf) least = min(least, Rational(v));
  for (long v : alloc.ia) least = min(least, Rational(v));
  for (long v : alloc.gamma) least = min(least, Rational(v));
  report.checks.push_back({"nonnegative counts", least.sign() >= 0, least});
  report.checks.push_back({"positive extension", alloc.extension >= 1, L - Rational(1)});
  return report;
}

}  // namespace dof3wc
