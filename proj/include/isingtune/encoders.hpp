#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "isingtune/bqp.hpp"
#include "isingtune/qaplib.hpp"
#include "isingtune/tsplib.hpp"

namespace isingtune {

namespace encode_detail {

inline void check_square(const std::vector<std::vector<Coeff>>& m, int n,
                         const char* what) {
  if (m.size() != static_cast<std::size_t>(n)) {
    throw std::invalid_argument(std::string("invalid instance: ") + what +
                                " matrix is not " + std::to_string(n) + "x" +
                                std::to_string(n));
  }
  for (const auto& row : m) {
    if (row.size() != static_cast<std::size_t>(n)) {
      throw std::invalid_argument(std::string("invalid instance: ") + what +
                                  " matrix is not square");
    }
  }
}

// One-hot penalty over an N x N variable grid indexed var(r, c) = r*N + c:
// every row and every column must contain exactly one set bit. Expanding
// the two sums of squared deficits gives coefficient -2 on each diagonal,
// +2 on every same-row and same-column pair, and a constant 2N, so the
// penalty evaluates to exactly 0 on permutation matrices.
inline SparseQubo one_hot_permutation_penalty(int n) {
  SparseQubo pen;
  const auto var = [n](int r, int c) {
    return static_cast<VarIndex>(r * n + c);
  };
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) pen.add(var(r, c), var(r, c), -2);
  }
  for (int r = 0; r < n; ++r) {
    for (int c1 = 0; c1 < n; ++c1) {
      for (int c2 = c1 + 1; c2 < n; ++c2) pen.add(var(r, c1), var(r, c2), 2);
    }
  }
  for (int c = 0; c < n; ++c) {
    for (int r1 = 0; r1 < n; ++r1) {
      for (int r2 = r1 + 1; r2 < n; ++r2) pen.add(var(r1, c), var(r2, c), 2);
    }
  }
  pen.add_offset(2 * static_cast<Coeff>(n));
  pen.finalize();
  return pen;
}

}  // namespace encode_detail

/// Encodes a TSP instance as a BQP over N^2 variables var(i, t) = i*N + t
/// ("city i visited at slot t"). The objective couples consecutive time
/// slots cyclically (slot N wraps to 0), so feasible energies are closed
/// tour lengths; the penalty enforces the permutation structure and is 0
/// exactly when each city and each slot is used once.
inline Bqp encode_tsp(const TspInstance& inst) {
  const int n = inst.n;
  if (n < 3) {
    throw std::invalid_argument(
        "invalid instance: TSP encoding requires at least 3 nodes");
  }
  encode_detail::check_square(inst.dist, n, "distance");

  Bqp bqp;
  bqp.num_vars = static_cast<VarIndex>(n) * static_cast<VarIndex>(n);
  const auto var = [n](int city, int slot) {
    return static_cast<VarIndex>(city * n + slot);
  };
  for (int t = 0; t < n; ++t) {
    const int next = (t + 1) % n;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        bqp.q_obj.add(var(i, t), var(j, next), inst.dist[i][j]);
      }
    }
  }
  bqp.q_obj.finalize();
  bqp.q_pen = encode_detail::one_hot_permutation_penalty(n);
  return bqp;
}

/// Encodes a QAP instance as a BQP over N^2 variables var(i, k) = i*N + k
/// ("factory i at location k"). The coefficient of x(i,k) x(j,l)
/// accumulates F[i][j] D[k][l] and F[j][i] D[l][k]; the penalty is the same
/// one-hot permutation structure as for TSP.
inline Bqp encode_qap(const QapInstance& inst) {
  const int n = inst.n;
  if (n < 2) {
    throw std::invalid_argument(
        "invalid instance: QAP encoding requires size at least 2");
  }
  encode_detail::check_square(inst.flow, n, "flow");
  encode_detail::check_square(inst.dist, n, "distance");

  Bqp bqp;
  const VarIndex m = static_cast<VarIndex>(n) * static_cast<VarIndex>(n);
  bqp.num_vars = m;
  for (VarIndex a = 0; a < m; ++a) {
    const int i = a / n;
    const int k = a % n;
    const Coeff diag = inst.flow[i][i] * inst.dist[k][k];
    if (diag != 0) bqp.q_obj.add(a, a, diag);
    for (VarIndex b = a + 1; b < m; ++b) {
      const int j = b / n;
      const int l = b % n;
      const Coeff c =
          inst.flow[i][j] * inst.dist[k][l] + inst.flow[j][i] * inst.dist[l][k];
      if (c != 0) bqp.q_obj.add(a, b, c);
    }
  }
  bqp.q_obj.finalize();
  bqp.q_pen = encode_detail::one_hot_permutation_penalty(n);
  return bqp;
}

/// Assignment with bit (tour[t], t) set for every slot t.
inline Assignment tsp_assignment(int n, const std::vector<int>& tour) {
  Assignment a(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  for (int t = 0; t < n; ++t) {
    a.bits[static_cast<std::size_t>(tour[t]) * n + t] = 1;
  }
  return a;
}

/// Assignment with bit (i, placement[i]) set for every factory i.
inline Assignment qap_assignment(int n, const std::vector<int>& placement) {
  Assignment a(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    a.bits[static_cast<std::size_t>(i) * n + placement[i]] = 1;
  }
  return a;
}

/// Recovers tour[t] = city at slot t from a feasible TSP assignment.
inline std::vector<int> tsp_tour_from_assignment(int n, const Assignment& a) {
  std::vector<int> tour(static_cast<std::size_t>(n), -1);
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  for (int i = 0; i < n; ++i) {
    for (int t = 0; t < n; ++t) {
      if (a.bits[static_cast<std::size_t>(i) * n + t]) {
        if (tour[t] != -1 || used[i]) {
          throw std::invalid_argument("assignment is not a permutation");
        }
        tour[t] = i;
        used[i] = true;
      }
    }
  }
  for (int t = 0; t < n; ++t) {
    if (tour[t] == -1) {
      throw std::invalid_argument("assignment is not a permutation");
    }
  }
  return tour;
}

/// Recovers placement[i] = location of factory i from a feasible QAP
/// assignment.
inline std::vector<int> qap_placement_from_assignment(int n,
                                                      const Assignment& a) {
  std::vector<int> placement(static_cast<std::size_t>(n), -1);
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) {
      if (a.bits[static_cast<std::size_t>(i) * n + k]) {
        if (placement[i] != -1 || used[k]) {
          throw std::invalid_argument("assignment is not a permutation");
        }
        placement[i] = k;
        used[k] = true;
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    if (placement[i] == -1) {
      throw std::invalid_argument("assignment is not a permutation");
    }
  }
  return placement;
}

}  // namespace isingtune
