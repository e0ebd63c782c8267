#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace isingtune {

using VarIndex = std::int32_t;
using Coeff = std::int64_t;
using Energy = std::int64_t;

/// A binary assignment of all problem variables.
struct Assignment {
  std::vector<std::uint8_t> bits;

  Assignment() = default;
  explicit Assignment(std::size_t num_vars) : bits(num_vars, 0) {}

  std::size_t size() const { return bits.size(); }
};

/// One quadratic coefficient, stored canonically with i <= j.
/// A term contributes c * x_i * x_j to the quadratic form (c * x_i when
/// i == j, since bits are idempotent).
struct QuboTerm {
  VarIndex i = 0;
  VarIndex j = 0;
  Coeff c = 0;
};

/// Sparse upper-triangular QUBO matrix plus an optional constant offset.
/// Exact integer arithmetic throughout.
class SparseQubo {
 public:
  void add(VarIndex i, VarIndex j, Coeff c) {
    if (c == 0) return;
    if (i > j) std::swap(i, j);
    terms_.push_back({i, j, c});
  }

  void add_offset(Coeff c) { offset_ += c; }

  /// Sorts terms, merges duplicates, drops zeros. Builders call this once
  /// before the matrix is shared; evaluation is correct either way since
  /// duplicate terms simply accumulate.
  void finalize() {
    std::sort(terms_.begin(), terms_.end(),
              [](const QuboTerm& a, const QuboTerm& b) {
                return a.i != b.i ? a.i < b.i : a.j < b.j;
              });
    std::size_t out = 0;
    for (std::size_t in = 0; in < terms_.size(); ++in) {
      if (out > 0 && terms_[out - 1].i == terms_[in].i &&
          terms_[out - 1].j == terms_[in].j) {
        terms_[out - 1].c += terms_[in].c;
      } else {
        terms_[out++] = terms_[in];
      }
    }
    terms_.resize(out);
    terms_.erase(std::remove_if(terms_.begin(), terms_.end(),
                                [](const QuboTerm& t) { return t.c == 0; }),
                 terms_.end());
  }

  Energy evaluate(const Assignment& a) const {
    Energy e = offset_;
    for (const QuboTerm& t : terms_) {
      if (a.bits[static_cast<std::size_t>(t.i)] &&
          a.bits[static_cast<std::size_t>(t.j)]) {
        e += t.c;
      }
    }
    return e;
  }

  const std::vector<QuboTerm>& terms() const { return terms_; }

  Coeff offset() const { return offset_; }
  bool empty() const { return terms_.empty() && offset_ == 0; }

 private:
  std::vector<QuboTerm> terms_;
  Coeff offset_ = 0;
};

/// One linear inequality: weights . x <= bound.
struct LinearInequality {
  std::vector<Coeff> weights;
  Coeff bound = 0;
};

/// A binary quadratic program: an objective QUBO to minimize, subject to a
/// penalty QUBO that must evaluate to zero and a list of linear
/// inequalities. Immutable after construction; evaluation is pure, so one
/// instance can be shared across concurrent solver runs.
struct Bqp {
  VarIndex num_vars = 0;
  SparseQubo q_obj;
  SparseQubo q_pen;  // carries the constant offset of the penalty expansion
  std::vector<LinearInequality> inequalities;
};

namespace detail {
inline void check_dimensions(const Bqp& bqp, const Assignment& a,
                             const char* op) {
  if (a.size() != static_cast<std::size_t>(bqp.num_vars)) {
    throw std::invalid_argument(std::string(op) + ": assignment has " +
                                std::to_string(a.size()) +
                                " bits, problem has " +
                                std::to_string(bqp.num_vars) + " variables");
  }
}
}  // namespace detail

/// Objective energy x^T Q_obj x. Exact; no constant term.
inline Energy energy(const Bqp& bqp, const Assignment& a) {
  detail::check_dimensions(bqp, a, "energy");
  return bqp.q_obj.evaluate(a);
}

/// Penalty value x^T Q_pen x + offset. Zero means the QUBO constraint holds.
inline Energy penalty_energy(const Bqp& bqp, const Assignment& a) {
  detail::check_dimensions(bqp, a, "penalty_energy");
  return bqp.q_pen.evaluate(a);
}

/// True iff the penalty is zero and every linear inequality W . x <= C holds.
inline bool is_feasible(const Bqp& bqp, const Assignment& a) {
  detail::check_dimensions(bqp, a, "is_feasible");
  if (bqp.q_pen.evaluate(a) != 0) return false;
  for (const LinearInequality& ineq : bqp.inequalities) {
    Coeff lhs = 0;
    for (std::size_t v = 0; v < ineq.weights.size(); ++v) {
      if (a.bits[v]) lhs += ineq.weights[v];
    }
    if (lhs > ineq.bound) return false;
  }
  return true;
}

}  // namespace isingtune
