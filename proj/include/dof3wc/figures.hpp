#pragma once

// Curve tables behind the `figure` subcommand: sum-DoF sweeps over the
// third node's antenna count, once for a few duty cycles and once for a few
// sizes of the second node. Values are exact rationals end to end; the CSV
// writer only rounds when a value has no finite decimal expansion.

#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "dof3wc/channel_config.hpp"
#include "dof3wc/rational.hpp"
#include "dof3wc/regions.hpp"

namespace dof3wc {

struct CurveTable {
  std::vector<std::string> columns;
  std::vector<std::vector<Rational>> rows;

  std::string to_csv() const;
};

// Exact decimal string when the denominator is of the form 2^a 5^b,
// otherwise rounded to the given number of significant digits.
inline std::string rational_to_decimal(const Rational& r, int sig_digits = 12) {
  mpz_class den = r.denominator();
  unsigned long twos = 0, fives = 0;
  while (mpz_divisible_ui_p(den.get_mpz_t(), 2)) {
    mpz_divexact_ui(den.get_mpz_t(), den.get_mpz_t(), 2);
    ++twos;
  }
  while (mpz_divisible_ui_p(den.get_mpz_t(), 5)) {
    mpz_divexact_ui(den.get_mpz_t(), den.get_mpz_t(), 5);
    ++fives;
  }
  if (den != 1) {
    std::ostringstream out;
    out.precision(sig_digits);
    out << r.to_double();
    return out.str();
  }
  const unsigned long shift = std::max(twos, fives);
  mpz_class pow10;
  mpz_ui_pow_ui(pow10.get_mpz_t(), 10, shift);
  mpz_class scaled = r.numerator() * pow10;
  mpz_divexact(scaled.get_mpz_t(), scaled.get_mpz_t(), r.denominator().get_mpz_t());
  const bool negative = scaled < 0;
  std::string digits = mpz_class(abs(scaled)).get_str();
  std::string out;
  if (shift == 0) {
    out = digits;
  } else {
    if (digits.size() <= shift) digits.insert(0, shift - digits.size() + 1, '0');
    out = digits.substr(0, digits.size() - shift) + "." +
          digits.substr(digits.size() - shift);
  }
  return negative ? "-" + out : out;
}

inline std::string CurveTable::to_csv() const {
  std::ostringstream out;
  for (std::size_t c = 0; c < columns.size(); ++c)
    out << (c ? "," : "") << columns[c];
  out << '\n';
  for (const std::vector<Rational>& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c)
      out << (c ? "," : "") << rational_to_decimal(row[c]);
    out << '\n';
  }
  return out.str();
}

namespace detail {

inline Rational always_on_sum_dof(long m1, long m2, long m3) {
  ChannelConfig cfg(m1, m2, m3, Rational(1));
  return Rational(2) * middle_antennas(cfg);
}

}  // namespace detail

// Sum-DoF against M3 at (M1, M2) = (10, 7) for duty cycles 0, 1/4 and 1,
// with the always-on system as reference. The tau = 1 column and the
// reference column agree; both are kept so plots can show the overlap.
inline CurveTable curve_sum_dof_by_duty_cycle() {
  CurveTable table;
  table.columns = {"M3", "sum_dof_tau_0", "sum_dof_tau_1_4", "sum_dof_tau_1",
                   "sum_dof_always_on"};
  const std::vector<Rational> taus = {Rational(0), Rational(1, 4), Rational(1)};
  for (long m3 = 0; m3 <= 10; ++m3) {
    std::vector<Rational> row = {Rational(m3)};
    for (const Rational& tau : taus)
      row.push_back(sum_dof_formula(ChannelConfig(10, 7, m3, tau)));
    row.push_back(detail::always_on_sum_dof(10, 7, m3));
    table.rows.push_back(std::move(row));
  }
  return table;
}

// Sum-DoF against M3 at M1 = 10 and tau = 7/10 for several sizes of node 2,
// paired with the always-on counterpart of each curve.
inline CurveTable curve_sum_dof_by_second_node() {
  CurveTable table;
  table.columns = {"M3",
                   "sum_dof_M2_2",
                   "sum_dof_M2_5",
                   "sum_dof_M2_9",
                   "always_on_M2_2",
                   "always_on_M2_5",
                   "always_on_M2_9"};
  const std::vector<long> m2s = {2, 5, 9};
  const Rational tau(7, 10);
  for (long m3 = 0; m3 <= 10; ++m3) {
    std::vector<Rational> row = {Rational(m3)};
    for (long m2 : m2s) row.push_back(sum_dof_formula(ChannelConfig(10, m2, m3, tau)));
    for (long m2 : m2s) row.push_back(detail::always_on_sum_dof(10, m2, m3));
    table.rows.push_back(std::move(row));
  }
  return table;
}

// Dispatch by the figure ids the command line exposes.
inline CurveTable curve_table(const std::string& id) {
  if (id == "fig5") return curve_sum_dof_by_duty_cycle();
  if (id == "fig6") return curve_sum_dof_by_second_node();
  throw std::invalid_argument("unknown figure id: " + id + " (expected fig5 or fig6)");
}

}  // namespace dof3wc
