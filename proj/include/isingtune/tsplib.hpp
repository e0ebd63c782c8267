#pragma once

#include <cmath>
#include <cstdint>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "isingtune/bqp.hpp"
#include "isingtune/parse_error.hpp"

namespace isingtune {

/// A symmetric travelling-salesman instance: node count and integer
/// distance matrix with zero diagonal.
struct TspInstance {
  int n = 0;
  std::vector<std::vector<Coeff>> dist;
};

namespace tsplib_detail {

struct Point {
  double x = 0;
  double y = 0;
};

inline Coeff euc2d(const Point& a, const Point& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return std::llround(std::sqrt(dx * dx + dy * dy));
}

// Geographical distance in kilometres on the TSPLIB idealized sphere.
// Coordinates are DDD.MM (degrees and minutes); degrees are truncated, not
// rounded, following the TSPLIB95 FAQ reference code.
inline double geo_radians(double coord) {
  constexpr double kPi = 3.141592;
  const double deg = std::trunc(coord);
  const double min = coord - deg;
  return kPi * (deg + 5.0 * min / 3.0) / 180.0;
}

inline Coeff geo(const Point& a, const Point& b) {
  constexpr double kRadius = 6378.388;
  const double lat_a = geo_radians(a.x);
  const double lng_a = geo_radians(a.y);
  const double lat_b = geo_radians(b.x);
  const double lng_b = geo_radians(b.y);
  const double q1 = std::cos(lng_a - lng_b);
  const double q2 = std::cos(lat_a - lat_b);
  const double q3 = std::cos(lat_a + lat_b);
  return static_cast<Coeff>(
      kRadius * std::acos(0.5 * ((1.0 + q1) * q2 - (1.0 - q1) * q3)) + 1.0);
}

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  bool next(std::string& line) {
    if (!std::getline(in_, line)) return false;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    ++line_no_;
    return true;
  }

  int line_no() const { return line_no_; }

 private:
  std::istream& in_;
  int line_no_ = 0;
};

inline std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

}  // namespace tsplib_detail

/// Parses a TSPLIB-format symmetric TSP file. Supported edge weight types:
/// EUC_2D, GEO, and EXPLICIT with FULL_MATRIX, LOWER_DIAG_ROW or UPPER_ROW
/// layout. Distances follow the TSPLIB95 reference definitions
/// (nearest-integer Euclidean rounding; geographical great-circle formula).
inline TspInstance parse_tsplib(std::istream& in) {
  using namespace tsplib_detail;

  LineReader reader(in);
  std::string line;
  int n = 0;
  std::string edge_weight_type;
  std::string edge_weight_format;
  std::vector<Point> coords;
  std::vector<Coeff> weights;
  bool have_coords = false;
  bool have_weights = false;

  auto parse_fail = [&](const std::string& msg) -> ParseError {
    return ParseError(msg, reader.line_no());
  };

  while (reader.next(line)) {
    std::string text = trim(line);
    if (text.empty()) continue;

    std::string key = text;
    std::string value;
    const std::size_t colon = text.find(':');
    if (colon != std::string::npos) {
      key = trim(text.substr(0, colon));
      value = trim(text.substr(colon + 1));
    }

    if (key == "EOF") break;

    if (key == "NAME" || key == "COMMENT" || key == "DISPLAY_DATA_TYPE" ||
        key == "NODE_COORD_TYPE") {
      continue;
    }
    if (key == "TYPE") {
      if (value != "TSP") {
        throw UnsupportedFormatError("unsupported problem type '" + value +
                                         "', only TSP is handled",
                                     reader.line_no());
      }
      continue;
    }
    if (key == "DIMENSION") {
      try {
        n = std::stoi(value);
      } catch (const std::exception&) {
        throw parse_fail("bad DIMENSION value '" + value + "'");
      }
      if (n <= 0) throw parse_fail("DIMENSION must be positive");
      continue;
    }
    if (key == "EDGE_WEIGHT_TYPE") {
      edge_weight_type = value;
      if (value != "EUC_2D" && value != "GEO" && value != "EXPLICIT") {
        throw UnsupportedFormatError("unsupported EDGE_WEIGHT_TYPE '" + value +
                                         "'",
                                     reader.line_no());
      }
      continue;
    }
    if (key == "EDGE_WEIGHT_FORMAT") {
      edge_weight_format = value;
      if (value != "FULL_MATRIX" && value != "LOWER_DIAG_ROW" &&
          value != "UPPER_ROW") {
        throw UnsupportedFormatError("unsupported EDGE_WEIGHT_FORMAT '" +
                                         value + "'",
                                     reader.line_no());
      }
      continue;
    }
    if (key == "NODE_COORD_SECTION") {
      if (n == 0) throw parse_fail("NODE_COORD_SECTION before DIMENSION");
      coords.assign(static_cast<std::size_t>(n), Point{});
      for (int k = 0; k < n; ++k) {
        if (!reader.next(line)) {
          throw parse_fail("unexpected end of file in NODE_COORD_SECTION");
        }
        std::istringstream row(line);
        int id = 0;
        Point p;
        if (!(row >> id >> p.x >> p.y)) {
          throw parse_fail("malformed node coordinate line");
        }
        if (id < 1 || id > n) throw parse_fail("node id out of range");
        coords[static_cast<std::size_t>(id - 1)] = p;
      }
      have_coords = true;
      continue;
    }
    if (key == "EDGE_WEIGHT_SECTION") {
      if (n == 0) throw parse_fail("EDGE_WEIGHT_SECTION before DIMENSION");
      if (edge_weight_format.empty()) {
        throw parse_fail("EDGE_WEIGHT_SECTION without EDGE_WEIGHT_FORMAT");
      }
      std::size_t expected = 0;
      const std::size_t un = static_cast<std::size_t>(n);
      if (edge_weight_format == "FULL_MATRIX") {
        expected = un * un;
      } else if (edge_weight_format == "LOWER_DIAG_ROW") {
        expected = un * (un + 1) / 2;
      } else {  // UPPER_ROW
        expected = un * (un - 1) / 2;
      }
      weights.reserve(expected);
      while (weights.size() < expected) {
        if (!reader.next(line)) {
          throw parse_fail("unexpected end of file in EDGE_WEIGHT_SECTION");
        }
        std::istringstream row(line);
        long long w = 0;
        while (row >> w) weights.push_back(w);
        if (!row.eof()) throw parse_fail("non-numeric edge weight");
        if (weights.size() > expected) {
          throw parse_fail("too many edge weights");
        }
      }
      have_weights = true;
      continue;
    }
    if (key == "DISPLAY_DATA_SECTION") {
      if (n == 0) throw parse_fail("DISPLAY_DATA_SECTION before DIMENSION");
      for (int k = 0; k < n; ++k) {
        if (!reader.next(line)) {
          throw parse_fail("unexpected end of file in DISPLAY_DATA_SECTION");
        }
      }
      continue;
    }
    throw parse_fail("unrecognized keyword '" + key + "'");
  }

  if (n == 0) throw ParseError("missing DIMENSION", 0);
  if (edge_weight_type.empty()) {
    throw ParseError("missing EDGE_WEIGHT_TYPE", 0);
  }

  TspInstance inst;
  inst.n = n;
  inst.dist.assign(static_cast<std::size_t>(n),
                   std::vector<Coeff>(static_cast<std::size_t>(n), 0));

  if (edge_weight_type == "EUC_2D" || edge_weight_type == "GEO") {
    if (!have_coords) {
      throw ParseError("missing NODE_COORD_SECTION", 0);
    }
    const bool is_geo = edge_weight_type == "GEO";
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const Coeff d = is_geo ? tsplib_detail::geo(coords[i], coords[j])
                               : tsplib_detail::euc2d(coords[i], coords[j]);
        inst.dist[i][j] = d;
        inst.dist[j][i] = d;
      }
    }
    return inst;
  }

  // EXPLICIT
  if (!have_weights) throw ParseError("missing EDGE_WEIGHT_SECTION", 0);
  std::size_t pos = 0;
  if (edge_weight_format == "FULL_MATRIX") {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) inst.dist[i][j] = weights[pos++];
    }
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < i; ++j) {
        if (inst.dist[i][j] != inst.dist[j][i]) {
          throw ParseError("asymmetric FULL_MATRIX in symmetric TSP file", 0);
        }
      }
    }
  } else if (edge_weight_format == "LOWER_DIAG_ROW") {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j <= i; ++j) {
        inst.dist[i][j] = weights[pos];
        inst.dist[j][i] = weights[pos];
        ++pos;
      }
    }
  } else {  // UPPER_ROW
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        inst.dist[i][j] = weights[pos];
        inst.dist[j][i] = weights[pos];
        ++pos;
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    if (inst.dist[i][i] != 0) {
      throw ParseError("nonzero diagonal entry in distance matrix", 0);
    }
  }
  return inst;
}

}  // namespace isingtune
