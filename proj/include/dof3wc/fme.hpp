#pragma once

// Fourier-Motzkin projection with interleaved redundancy removal, plus the
// polyhedron predicates built on top of the LP core (membership, inclusion).
//
// remove_redundant implements the standard scan: constraints are tested in
// listed order, and constraint c is dropped exactly when maximizing its
// left-hand side subject to the remaining constraints cannot exceed its
// right-hand side. The feasible set is invariant under every drop, and the
// surviving list is irredundant.

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "dof3wc/linear_system.hpp"
#include "dof3wc/rational.hpp"
#include "dof3wc/simplex.hpp"

namespace dof3wc {

namespace detail {

// In-place LP-scan redundancy removal over normalized rows.
//
// No derivation-counting shortcuts here: pruning redundant rows between
// elimination steps invalidates the ancestry bounds such shortcuts rely on
// (a surviving facet may only be derivable through rows the scan already
// deleted), so the scan is the sole and exact redundancy criterion.
inline void redundancy_scan(std::vector<LinearSystem::Row>& rows, std::size_t n) {
  // Exact duplicates first: of identical rows only the last survives the
  // scan (every earlier copy is bounded by it when tested), so drop the
  // others up front.
  std::vector<bool> alive(rows.size(), true);
  {
    std::map<std::vector<std::string>, std::size_t> seen;  // canonical text -> last index
    for (std::size_t i = 0; i < rows.size(); ++i) {
      std::vector<std::string> key;
      key.reserve(n + 1);
      for (const Rational& c : rows[i].a) key.push_back(c.str());
      key.push_back(rows[i].b.str());
      auto it = seen.find(key);
      if (it == seen.end()) {
        seen.emplace(std::move(key), i);
      } else {
        alive[it->second] = false;
        it->second = i;
      }
    }
  }

  auto all_zero = [](const LinearSystem::Row& r) {
    for (const Rational& c : r.a)
      if (!c.is_zero()) return false;
    return true;
  };

  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!alive[i]) continue;
    if (all_zero(rows[i])) {
      // 0 <= b holds identically when b >= 0; when b < 0 the row is an
      // infeasibility witness and only removable if the rest already is.
      if (rows[i].b.sign() >= 0) {
        alive[i] = false;
        continue;
      }
    }
    std::vector<const LinearSystem::Row*> rest;
    rest.reserve(rows.size());
    for (std::size_t j = 0; j < rows.size(); ++j)
      if (alive[j] && j != i) rest.push_back(&rows[j]);
    Rational value;
    LpStatus st = lp_core(n, rest, rows[i].a, &value, nullptr);
    if (st == LpStatus::Infeasible || (st == LpStatus::Optimal && value <= rows[i].b))
      alive[i] = false;
  }

  std::size_t w = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!alive[i]) continue;
    if (w != i) rows[w] = std::move(rows[i]);
    ++w;
  }
  rows.resize(w);
}

}  // namespace detail

// Drops every constraint whose bound is implied by the others (LP scan in
// listed order). The returned system describes the same polyhedron with
// rows in canonical integer form.
inline LinearSystem remove_redundant(const LinearSystem& sys) {
  std::vector<LinearSystem::Row> rows = sys.rows();
  for (auto& r : rows) LinearSystem::normalize_row(r);
  detail::redundancy_scan(rows, sys.num_variables());
  LinearSystem out(sys.variables());
  for (auto& r : rows) out.add_row(std::move(r));
  return out;
}

// Projects the system onto the complement of `eliminate` by Fourier-Motzkin,
// one variable at a time in the caller's order, removing redundant rows
// after every step. The result ranges over the surviving variables only.
inline LinearSystem fm_eliminate(const LinearSystem& sys,
                                 const std::vector<std::string>& eliminate) {
  std::vector<std::string> vars = sys.variables();
  std::vector<LinearSystem::Row> rows = sys.rows();
  for (auto& r : rows) LinearSystem::normalize_row(r);

  for (const std::string& name : eliminate) {
    auto vit = std::find(vars.begin(), vars.end(), name);
    if (vit == vars.end()) throw UnknownVariable(name);
    const std::size_t idx = static_cast<std::size_t>(vit - vars.begin());

    std::vector<LinearSystem::Row> next;
    auto drop_column = [&](const LinearSystem::Row& r) {
      LinearSystem::Row out;
      out.a.reserve(r.a.size() - 1);
      for (std::size_t j = 0; j < r.a.size(); ++j)
        if (j != idx) out.a.push_back(r.a[j]);
      out.b = r.b;
      return out;
    };
    auto emit = [&](LinearSystem::Row r) {
      LinearSystem::normalize_row(r);
      bool zero = true;
      for (const Rational& c : r.a)
        if (!c.is_zero()) { zero = false; break; }
      if (zero && r.b.sign() >= 0) return;  // identically true
      next.push_back(std::move(r));
    };

    std::vector<std::size_t> uppers, lowers;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const int s = rows[i].a[idx].sign();
      if (s == 0)
        emit(drop_column(rows[i]));
      else if (s > 0)
        uppers.push_back(i);
      else
        lowers.push_back(i);
    }
    for (std::size_t u : uppers) {
      for (std::size_t l : lowers) {
        const Rational p = rows[u].a[idx];   // > 0
        const Rational q = -rows[l].a[idx];  // > 0
        LinearSystem::Row r;
        r.a.resize(vars.size() - 1);
        std::size_t w = 0;
        for (std::size_t j = 0; j < vars.size(); ++j) {
          if (j == idx) continue;
          r.a[w] = q * rows[u].a[j] + p * rows[l].a[j];
          ++w;
        }
        r.b = q * rows[u].b + p * rows[l].b;
        emit(std::move(r));
      }
    }

    vars.erase(vit);
    rows = std::move(next);
    detail::redundancy_scan(rows, vars.size());
  }

  LinearSystem out(vars);
  for (auto& r : rows) out.add_row(std::move(r));
  return out;
}

inline bool check_point(const LinearSystem& sys,
                        const std::map<std::string, Rational>& point) {
  return sys.check_point(point);
}

// True when every point of p satisfies q. Both systems must range over the
// same variable set (order may differ). An infeasible p is a subset of
// everything.
inline bool is_subset(const LinearSystem& p, const LinearSystem& q) {
  std::vector<std::string> pv = p.variables(), qv = q.variables();
  std::sort(pv.begin(), pv.end());
  std::sort(qv.begin(), qv.end());
  if (pv != qv)
    throw VariableMismatch("is_subset: systems range over different variables");

  std::vector<const LinearSystem::Row*> rows;
  rows.reserve(p.num_constraints());
  for (const auto& r : p.rows()) rows.push_back(&r);

  for (std::size_t i = 0; i < q.num_constraints(); ++i) {
    const LinearConstraint c = q.constraint(i);
    std::vector<Rational> objective(p.num_variables());
    for (const auto& [name, coef] : c.coeffs) objective[p.index_of(name)] = coef;
    Rational value;
    LpStatus st = detail::lp_core(p.num_variables(), rows, objective, &value, nullptr);
    if (st == LpStatus::Infeasible) return true;  // p is empty
    if (st == LpStatus::Unbounded || value > c.rhs) return false;
  }
  return true;
}

}  // namespace dof3wc
