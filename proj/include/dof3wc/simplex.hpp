#pragma once

// Exact rational linear programming: maximize c.x subject to A x <= b with
// free (sign-unrestricted) variables. Dictionary simplex with Bland's
// anti-cycling rule throughout, so results are deterministic and finite.
//
// Layout: structural variables are free and enter the basis at most once
// (a free basic variable never leaves, and is exempt from ratio tests).
// Slack variables carry the nonnegativity. Infeasible starts are repaired
// with the classic single-auxiliary-variable phase: the auxiliary column is
// injected at the root dictionary, driven basic by one pivot on the most
// violated row, then minimized; a positive minimum proves infeasibility.

#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "dof3wc/linear_system.hpp"
#include "dof3wc/rational.hpp"

namespace dof3wc {

enum class LpStatus { Optimal, Unbounded, Infeasible };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  Rational value;                         // set when Optimal
  std::map<std::string, Rational> point;  // set when Optimal
};

namespace detail {

class DictionarySimplex {
 public:
  // rows points at constraints A x <= b; entries must outlive the solver.
  DictionarySimplex(std::size_t n, const std::vector<const LinearSystem::Row*>& rows)
      : n_(n), m_(rows.size()) {
    rows_.resize(m_);
    for (std::size_t r = 0; r < m_; ++r) {
      const LinearSystem::Row& src = *rows[r];
      if (src.a.size() != n_)
        throw std::invalid_argument("constraint width does not match variable count");
      rows_[r].basic = slack_id(r);
      rows_[r].cst = src.b;
      rows_[r].coef.resize(n_);
      for (std::size_t j = 0; j < n_; ++j) rows_[r].coef[j] = -src.a[j];
    }
    nb_var_.resize(n_);
    for (std::size_t j = 0; j < n_; ++j) nb_var_[j] = static_cast<int>(j);
    rebuild_positions();
  }

  LpStatus maximize(const std::vector<Rational>& objective) {
    if (objective.size() != n_)
      throw std::invalid_argument("objective width does not match variable count");
    obj_.cst = Rational();
    obj_.coef.assign(nb_var_.size(), Rational());
    for (std::size_t j = 0; j < n_; ++j) {
      int p = pos_[j];
      if (is_basic_[j]) {
        // substitute the basic variable's row into the objective
        if (!objective[j].is_zero()) {
          obj_.cst += objective[j] * rows_[p].cst;
          for (std::size_t k = 0; k < nb_var_.size(); ++k)
            obj_.coef[k] += objective[j] * rows_[p].coef[k];
        }
      } else {
        obj_.coef[p] += objective[j];
      }
    }
    if (!feasible_ && !make_feasible()) return LpStatus::Infeasible;
    return optimize(obj_) ? LpStatus::Optimal : LpStatus::Unbounded;
  }

  const Rational& objective_value() const { return obj_.cst; }

  std::vector<Rational> primal_point() const {
    std::vector<Rational> x(n_);
    for (std::size_t j = 0; j < n_; ++j)
      if (is_basic_[j]) x[j] = rows_[pos_[j]].cst;
    return x;
  }

 private:
  struct DictRow {
    int basic = -1;
    Rational cst;
    std::vector<Rational> coef;
  };

  int slack_id(std::size_t r) const { return static_cast<int>(n_ + r); }
  int aux_id() const { return static_cast<int>(n_ + m_); }
  bool is_free(int var) const { return var < static_cast<int>(n_); }

  void rebuild_positions() {
    pos_.assign(n_ + m_ + 1, -1);
    is_basic_.assign(n_ + m_ + 1, false);
    for (std::size_t r = 0; r < m_; ++r) {
      pos_[rows_[r].basic] = static_cast<int>(r);
      is_basic_[rows_[r].basic] = true;
    }
    for (std::size_t k = 0; k < nb_var_.size(); ++k) pos_[nb_var_[k]] = static_cast<int>(k);
    feasible_ = true;
    for (const DictRow& row : rows_)
      if (!is_free(row.basic) && row.cst.sign() < 0) feasible_ = false;
  }

  // Swaps entering nonbasic slot k with the basic variable of row r.
  void pivot(std::size_t r, std::size_t k) {
    DictRow& row = rows_[r];
    const Rational alpha = row.coef[k];
    const int entering = nb_var_[k];
    const int leaving = row.basic;
    Rational inv = Rational(1) / alpha;

    row.coef[k] = Rational(-1);  // fold the leaving variable into the row
    row.cst *= -inv;
    for (Rational& c : row.coef) c *= -inv;
    row.basic = entering;
    nb_var_[k] = leaving;
    pos_[entering] = static_cast<int>(r);
    is_basic_[entering] = true;
    pos_[leaving] = static_cast<int>(k);
    is_basic_[leaving] = false;

    for (std::size_t q = 0; q < rows_.size(); ++q) {
      if (q == r) continue;
      substitute(rows_[q], row, k);
    }
    substitute(obj_, row, k);
    if (aux_active_) substitute(aux_obj_, row, k);
  }

  // target += target.coef[k] * (row of the entering variable), folding out
  // the entering column.
  void substitute(DictRow& target, const DictRow& enter_row, std::size_t k) {
    const Rational delta = target.coef[k];
    if (delta.is_zero()) return;
    target.cst += delta * enter_row.cst;
    for (std::size_t kk = 0; kk < target.coef.size(); ++kk) {
      if (kk == k)
        target.coef[kk] = delta * enter_row.coef[kk];
      else if (!enter_row.coef[kk].is_zero())
        target.coef[kk] += delta * enter_row.coef[kk];
    }
  }

  // Bland entering choice: smallest-id eligible variable. Free variables
  // are eligible when their reduced cost is nonzero (they may move either
  // way), nonnegative ones when it is strictly positive.
  bool pick_entering(const DictRow& obj, std::size_t* out_slot, int* out_dir) const {
    int best = -1;
    std::size_t best_slot = 0;
    for (std::size_t k = 0; k < nb_var_.size(); ++k) {
      const int var = nb_var_[k];
      const int s = obj.coef[k].sign();
      const bool eligible = is_free(var) ? s != 0 : s > 0;
      if (eligible && (best < 0 || var < best)) {
        best = var;
        best_slot = k;
      }
    }
    if (best < 0) return false;
    *out_slot = best_slot;
    *out_dir = is_free(nb_var_[best_slot]) ? obj.coef[best_slot].sign() : 1;
    return true;
  }

  // Ratio test for moving the slot-k variable in direction dir. Only rows
  // with a nonnegative basic variable constrain the step. Returns false if
  // the step is unbounded.
  bool pick_leaving(std::size_t k, int dir, std::size_t* out_row) const {
    bool found = false;
    Rational best_limit;
    int best_basic = 0;
    std::size_t best_row = 0;
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      const DictRow& row = rows_[r];
      if (is_free(row.basic)) continue;
      Rational step = dir > 0 ? -row.coef[k] : row.coef[k];
      if (step.sign() <= 0) continue;  // this row does not shrink
      Rational limit = row.cst / step;
      if (!found || limit < best_limit ||
          (limit == best_limit && row.basic < best_basic)) {
        found = true;
        best_limit = limit;
        best_basic = row.basic;
        best_row = r;
      }
    }
    if (found) *out_row = best_row;
    return found;
  }

  // Bland simplex loop on the given objective row. Returns false when the
  // objective is unbounded above.
  bool optimize(DictRow& obj) {
    for (;;) {
      std::size_t k;
      int dir;
      if (!pick_entering(obj, &k, &dir)) return true;
      std::size_t r;
      if (!pick_leaving(k, dir, &r)) return false;
      pivot(r, k);
    }
  }

  bool make_feasible() {
    // Inject the auxiliary column (+1 in every row) at the root dictionary.
    aux_active_ = true;
    for (DictRow& row : rows_) row.coef.push_back(Rational(1));
    obj_.coef.push_back(Rational());
    nb_var_.push_back(aux_id());
    pos_[aux_id()] = static_cast<int>(nb_var_.size() - 1);
    aux_obj_.cst = Rational();
    aux_obj_.coef.assign(nb_var_.size(), Rational());
    aux_obj_.coef.back() = Rational(-1);  // maximize -aux

    // One pivot on the most violated row makes every row nonnegative.
    std::size_t worst = 0;
    bool have = false;
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      if (is_free(rows_[r].basic)) continue;
      if (!have || rows_[r].cst < rows_[worst].cst ||
          (rows_[r].cst == rows_[worst].cst && rows_[r].basic < rows_[worst].basic)) {
        worst = r;
        have = true;
      }
    }
    pivot(worst, nb_var_.size() - 1);

    if (!optimize(aux_obj_))
      throw std::logic_error("auxiliary objective cannot be unbounded");
    if (aux_obj_.cst.sign() < 0) return false;  // infeasible

    if (is_basic_[aux_id()]) {
      // Degenerate: the auxiliary sits in the basis at value zero. Pivot it
      // out through any nonzero entry of its row.
      std::size_t r0 = static_cast<std::size_t>(pos_[aux_id()]);
      std::size_t k0 = nb_var_.size();
      int best = -1;
      for (std::size_t k = 0; k < nb_var_.size(); ++k)
        if (!rows_[r0].coef[k].is_zero() && (best < 0 || nb_var_[k] < best)) {
          best = nb_var_[k];
          k0 = k;
        }
      if (k0 == nb_var_.size())
        throw std::logic_error("auxiliary row vanished; constraint rows are dependent");
      pivot(r0, k0);
    }

    // Remove the auxiliary column.
    std::size_t ka = static_cast<std::size_t>(pos_[aux_id()]);
    std::size_t last = nb_var_.size() - 1;
    auto drop = [&](DictRow& row) {
      if (ka != last) row.coef[ka] = row.coef[last];
      row.coef.pop_back();
    };
    for (DictRow& row : rows_) drop(row);
    drop(obj_);
    if (ka != last) {
      nb_var_[ka] = nb_var_[last];
      pos_[nb_var_[ka]] = static_cast<int>(ka);
    }
    nb_var_.pop_back();
    pos_[aux_id()] = -1;
    aux_active_ = false;
    feasible_ = true;
    return true;
  }

  std::size_t n_, m_;
  std::vector<DictRow> rows_;
  std::vector<int> nb_var_;    // slot -> variable id
  std::vector<int> pos_;       // variable id -> row (if basic) or slot
  std::vector<bool> is_basic_;
  DictRow obj_;
  DictRow aux_obj_;
  bool aux_active_ = false;
  bool feasible_ = true;
};

// Dense entry point shared by the redundancy scan and the named wrapper.
inline LpStatus lp_core(std::size_t n, const std::vector<const LinearSystem::Row*>& rows,
                        const std::vector<Rational>& objective, Rational* out_value,
                        std::vector<Rational>* out_point) {
  DictionarySimplex dict(n, rows);
  LpStatus st = dict.maximize(objective);
  if (st == LpStatus::Optimal) {
    if (out_value) *out_value = dict.objective_value();
    if (out_point) *out_point = dict.primal_point();
  }
  return st;
}

}  // namespace detail

// Maximize a named linear objective over the system's feasible set.
// Objective names must be declared variables; unmentioned variables have
// coefficient zero.
inline LpResult lp_maximize(const LinearSystem& sys,
                            const std::map<std::string, Rational>& objective) {
  std::vector<Rational> c(sys.num_variables());
  for (const auto& [name, coef] : objective) c[sys.index_of(name)] = coef;
  std::vector<const LinearSystem::Row*> rows;
  rows.reserve(sys.num_constraints());
  for (const auto& r : sys.rows()) rows.push_back(&r);
  LpResult res;
  std::vector<Rational> x;
  res.status = detail::lp_core(sys.num_variables(), rows, c, &res.value, &x);
  if (res.status == LpStatus::Optimal)
    for (std::size_t j = 0; j < x.size(); ++j) res.point[sys.variables()[j]] = x[j];
  return res;
}

}  // namespace dof3wc
