#pragma once

// Systems of linear inequalities A x <= b over named variables, with exact
// rational coefficients. This is the shared currency of the polyhedral
// layer: Fourier-Motzkin, the simplex solver, and all the degrees-of-freedom
// region builders speak LinearSystem.

#include <json.hpp>

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dof3wc/rational.hpp"

namespace dof3wc {

struct UnknownVariable : std::runtime_error {
  explicit UnknownVariable(const std::string& name)
      : std::runtime_error("unknown variable '" + name + "'") {}
};

struct MissingVariable : std::runtime_error {
  explicit MissingVariable(const std::string& name)
      : std::runtime_error("point does not assign variable '" + name + "'") {}
};

struct VariableMismatch : std::runtime_error {
  explicit VariableMismatch(const std::string& what) : std::runtime_error(what) {}
};

// One inequality sum(coeffs[v] * v) <= rhs in name-keyed form. Variables not
// mentioned have coefficient zero.
struct LinearConstraint {
  std::map<std::string, Rational> coeffs;
  Rational rhs;
};

class LinearSystem {
 public:
  struct Row {
    std::vector<Rational> a;  // aligned with the system's variable order
    Rational b;
  };

  explicit LinearSystem(std::vector<std::string> variables)
      : vars_(std::move(variables)) {
    for (std::size_t i = 0; i < vars_.size(); ++i) {
      if (!index_.emplace(vars_[i], i).second)
        throw std::invalid_argument("duplicate variable '" + vars_[i] + "'");
    }
  }

  const std::vector<std::string>& variables() const { return vars_; }
  std::size_t num_variables() const { return vars_.size(); }
  std::size_t num_constraints() const { return rows_.size(); }
  const std::vector<Row>& rows() const { return rows_; }
  const Row& row(std::size_t i) const { return rows_.at(i); }

  bool has_variable(const std::string& name) const { return index_.count(name) != 0; }

  std::size_t index_of(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw UnknownVariable(name);
    return it->second;
  }

  void add(const LinearConstraint& c) {
    Row r;
    r.a.assign(vars_.size(), Rational());
    for (const auto& [name, coef] : c.coeffs) r.a[index_of(name)] = coef;
    r.b = c.rhs;
    rows_.push_back(std::move(r));
  }

  void add_le(const std::map<std::string, Rational>& coeffs, const Rational& rhs) {
    add(LinearConstraint{coeffs, rhs});
  }

  // sum >= rhs, stored as the negated <= row.
  void add_ge(const std::map<std::string, Rational>& coeffs, const Rational& rhs) {
    LinearConstraint c;
    for (const auto& [name, coef] : coeffs) c.coeffs[name] = -coef;
    c.rhs = -rhs;
    add(c);
  }

  // Equality as the pair of opposing inequalities.
  void add_eq(const std::map<std::string, Rational>& coeffs, const Rational& rhs) {
    add_le(coeffs, rhs);
    add_ge(coeffs, rhs);
  }

  void add_row(Row r) {
    if (r.a.size() != vars_.size())
      throw std::invalid_argument("row width does not match variable count");
    rows_.push_back(std::move(r));
  }

  // Name-keyed view of row i; zero coefficients are omitted.
  LinearConstraint constraint(std::size_t i) const {
    const Row& r = row(i);
    LinearConstraint c;
    for (std::size_t j = 0; j < vars_.size(); ++j)
      if (!r.a[j].is_zero()) c.coeffs[vars_[j]] = r.a[j];
    c.rhs = r.b;
    return c;
  }

  // Orders a name-keyed point by this system's variables. Every declared
  // variable must be assigned; extras in the map are ignored.
  std::vector<Rational> point_vector(const std::map<std::string, Rational>& pt) const {
    std::vector<Rational> x(vars_.size());
    for (std::size_t j = 0; j < vars_.size(); ++j) {
      auto it = pt.find(vars_[j]);
      if (it == pt.end()) throw MissingVariable(vars_[j]);
      x[j] = it->second;
    }
    return x;
  }

  Rational eval_lhs(std::size_t i, const std::vector<Rational>& x) const {
    const Row& r = row(i);
    Rational s;
    for (std::size_t j = 0; j < x.size(); ++j)
      if (!r.a[j].is_zero()) s += r.a[j] * x[j];
    return s;
  }

  bool check_point(const std::map<std::string, Rational>& pt) const {
    std::vector<Rational> x = point_vector(pt);
    for (std::size_t i = 0; i < rows_.size(); ++i)
      if (eval_lhs(i, x) > rows_[i].b) return false;
    return true;
  }

  // Canonical halfspace form: integer coefficients with overall gcd one
  // (rhs included), obtained by scaling with a positive rational. Makes
  // duplicate inequalities literally identical and keeps numbers small
  // through Fourier-Motzkin.
  static void normalize_row(Row& r) {
    mpz_class l = 1;
    for (const Rational& c : r.a) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.denominator().get_mpz_t());
    mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), r.b.denominator().get_mpz_t());
    mpz_class g = 0;
    auto scaled = [&](const Rational& c) {
      return mpz_class(c.numerator() * (l / c.denominator()));
    };
    for (const Rational& c : r.a) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), scaled(c).get_mpz_t());
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), scaled(r.b).get_mpz_t());
    if (g == 0) return;  // all-zero row with zero rhs
    for (Rational& c : r.a) c = Rational(mpz_class(scaled(c) / g));
    r.b = Rational(mpz_class(scaled(r.b) / g));
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["variables"] = vars_;
    j["constraints"] = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      const LinearConstraint c = constraint(i);
      nlohmann::ordered_json jc;
      nlohmann::ordered_json coeffs = nlohmann::ordered_json::object();
      for (const auto& [name, coef] : c.coeffs) coeffs[name] = coef.str();
      jc["coeffs"] = std::move(coeffs);
      jc["rhs"] = c.rhs.str();
      j["constraints"].push_back(std::move(jc));
    }
    return j;
  }

  static Rational rational_from_json(const nlohmann::json& v) {
    if (v.is_string()) return Rational::parse(v.get<std::string>());
    if (v.is_number_integer()) return Rational(static_cast<long>(v.get<std::int64_t>()));
    throw std::invalid_argument(
        "rational values must be \"p/q\" strings or integers, got " + v.dump());
  }

  static LinearSystem from_json(const nlohmann::json& j) {
    if (!j.contains("variables") || !j["variables"].is_array())
      throw std::invalid_argument("linear system JSON needs a \"variables\" array");
    LinearSystem sys(j["variables"].get<std::vector<std::string>>());
    if (!j.contains("constraints") || !j["constraints"].is_array())
      throw std::invalid_argument("linear system JSON needs a \"constraints\" array");
    for (const auto& jc : j["constraints"]) {
      LinearConstraint c;
      if (jc.contains("coeffs")) {
        if (!jc["coeffs"].is_object())
          throw std::invalid_argument("\"coeffs\" must be an object");
        for (const auto& [name, v] : jc["coeffs"].items())
          c.coeffs[name] = rational_from_json(v);
      }
      if (!jc.contains("rhs"))
        throw std::invalid_argument("constraint is missing \"rhs\"");
      c.rhs = rational_from_json(jc["rhs"]);
      sys.add(c);  // throws UnknownVariable on undeclared names
    }
    return sys;
  }

 private:
  std::vector<std::string> vars_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<Row> rows_;
};

// Lexicographic order on rows in canonical form; used for deterministic
// deduplication in the elimination pipeline.
inline int compare_rows(const LinearSystem::Row& x, const LinearSystem::Row& y) {
  for (std::size_t j = 0; j < x.a.size(); ++j) {
    if (x.a[j] < y.a[j]) return -1;
    if (y.a[j] < x.a[j]) return 1;
  }
  if (x.b < y.b) return -1;
  if (y.b < x.b) return 1;
  return 0;
}

}  // namespace dof3wc
