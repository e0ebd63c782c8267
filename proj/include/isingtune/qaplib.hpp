#pragma once

#include <istream>
#include <vector>

#include "isingtune/bqp.hpp"
#include "isingtune/parse_error.hpp"

namespace isingtune {

/// A quadratic-assignment instance: size, flow matrix F and distance
/// matrix D, both N x N.
struct QapInstance {
  int n = 0;
  std::vector<std::vector<Coeff>> flow;
  std::vector<std::vector<Coeff>> dist;
};

/// Parses the QAPLIB plain format: the size N followed by two
/// whitespace-separated N x N integer matrices, flow first, distance second.
inline QapInstance parse_qaplib(std::istream& in) {
  std::vector<long long> tokens;
  long long value = 0;
  while (in >> value) tokens.push_back(value);
  if (!in.eof()) {
    throw ParseError("non-numeric token in QAPLIB file", 0);
  }
  if (tokens.empty()) throw ParseError("empty QAPLIB file", 0);

  const long long n = tokens[0];
  if (n <= 0) throw ParseError("QAPLIB size must be positive", 0);
  const std::size_t expected = 1 + 2 * static_cast<std::size_t>(n * n);
  if (tokens.size() != expected) {
    throw ParseError("QAPLIB file has " + std::to_string(tokens.size()) +
                         " tokens, expected " + std::to_string(expected) +
                         " for size " + std::to_string(n),
                     0);
  }

  QapInstance inst;
  inst.n = static_cast<int>(n);
  inst.flow.assign(inst.n, std::vector<Coeff>(inst.n, 0));
  inst.dist.assign(inst.n, std::vector<Coeff>(inst.n, 0));
  std::size_t pos = 1;
  for (int i = 0; i < inst.n; ++i) {
    for (int j = 0; j < inst.n; ++j) inst.flow[i][j] = tokens[pos++];
  }
  for (int i = 0; i < inst.n; ++i) {
    for (int j = 0; j < inst.n; ++j) inst.dist[i][j] = tokens[pos++];
  }
  return inst;
}

}  // namespace isingtune
