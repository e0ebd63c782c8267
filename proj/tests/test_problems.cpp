#include <fstream>
#include <sstream>

#include <catch2/catch_amalgamated.hpp>

#include "isingtune/encoders.hpp"
#include "isingtune/qaplib.hpp"
#include "isingtune/tsplib.hpp"
#include "oracles.hpp"

using namespace isingtune;

namespace {

std::ifstream open_data(const std::string& name) {
  std::ifstream file(std::string(ISINGTUNE_TEST_DATA_DIR) + "/" + name);
  REQUIRE(file.good());
  return file;
}

}  // namespace

TEST_CASE("EUC_2D distances use nearest-integer rounding", "[problems]") {
  auto file = open_data("triangle345.tsp");
  const TspInstance inst = parse_tsplib(file);
  REQUIRE(inst.n == 3);
  CHECK(inst.dist[0][1] == 5);
  CHECK(inst.dist[1][0] == 5);
  CHECK(inst.dist[0][2] == 4);
  CHECK(inst.dist[1][2] == 3);
  CHECK(inst.dist[0][0] == 0);
}

TEST_CASE("benchmark-shaped files parse to the expected sizes", "[problems]") {
  auto kro = open_data("kroA100.tsp");
  CHECK(parse_tsplib(kro).n == 100);
  auto gr = open_data("gr120.tsp");
  CHECK(parse_tsplib(gr).n == 120);
  auto t80 = open_data("tai80a.dat");
  CHECK(parse_qaplib(t80).n == 80);
  auto t100 = open_data("tai100a.dat");
  CHECK(parse_qaplib(t100).n == 100);
}

TEST_CASE("GEO distances follow the great-circle reference formula",
          "[problems]") {
  auto file = open_data("geo_small.tsp");
  const TspInstance inst = parse_tsplib(file);
  REQUIRE(inst.n == 4);
  // Frozen from an independent evaluation of the reference formula; the
  // coordinates are real airports, so the values also match geography.
  CHECK(inst.dist[0][1] == 9556);
  CHECK(inst.dist[0][2] == 10877);
  CHECK(inst.dist[0][3] == 7843);
  CHECK(inst.dist[1][2] == 5606);
  CHECK(inst.dist[1][3] == 16985);
  CHECK(inst.dist[2][3] == 16035);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) CHECK(inst.dist[i][j] == inst.dist[j][i]);
  }
}

TEST_CASE("explicit layouts of one matrix agree", "[problems]") {
  auto full_file = open_data("explicit_full.tsp");
  auto lower_file = open_data("explicit_lower_diag.tsp");
  auto upper_file = open_data("explicit_upper.tsp");
  const TspInstance full = parse_tsplib(full_file);
  const TspInstance lower = parse_tsplib(lower_file);
  const TspInstance upper = parse_tsplib(upper_file);
  REQUIRE(full.n == 4);
  CHECK(full.dist == lower.dist);
  CHECK(full.dist == upper.dist);
  CHECK(full.dist[0][3] == 9);
}

TEST_CASE("TSPLIB parse failures carry line numbers", "[problems]") {
  SECTION("unsupported edge weight type") {
    std::istringstream in(
        "TYPE: TSP\nDIMENSION: 2\nEDGE_WEIGHT_TYPE: CEIL_2D\n");
    CHECK_THROWS_AS(parse_tsplib(in), UnsupportedFormatError);
  }
  SECTION("unsupported explicit format") {
    std::istringstream in(
        "TYPE: TSP\nDIMENSION: 2\nEDGE_WEIGHT_TYPE: EXPLICIT\n"
        "EDGE_WEIGHT_FORMAT: UPPER_DIAG_ROW\n");
    CHECK_THROWS_AS(parse_tsplib(in), UnsupportedFormatError);
  }
  SECTION("non-TSP type") {
    std::istringstream in("TYPE: ATSP\n");
    CHECK_THROWS_AS(parse_tsplib(in), UnsupportedFormatError);
  }
  SECTION("malformed coordinate line") {
    std::istringstream in(
        "TYPE: TSP\nDIMENSION: 2\nEDGE_WEIGHT_TYPE: EUC_2D\n"
        "NODE_COORD_SECTION\n1 0 0\n2 oops 3\nEOF\n");
    try {
      parse_tsplib(in);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 6);
    }
  }
  SECTION("section before DIMENSION") {
    std::istringstream in(
        "TYPE: TSP\nEDGE_WEIGHT_TYPE: EUC_2D\nNODE_COORD_SECTION\n");
    CHECK_THROWS_AS(parse_tsplib(in), ParseError);
  }
  SECTION("unrecognized keyword") {
    std::istringstream in("TYPE: TSP\nDIMENSION: 2\nFROBNICATE\n");
    CHECK_THROWS_AS(parse_tsplib(in), ParseError);
  }
  SECTION("asymmetric full matrix") {
    std::istringstream in(
        "TYPE: TSP\nDIMENSION: 2\nEDGE_WEIGHT_TYPE: EXPLICIT\n"
        "EDGE_WEIGHT_FORMAT: FULL_MATRIX\nEDGE_WEIGHT_SECTION\n"
        "0 1\n2 0\nEOF\n");
    CHECK_THROWS_AS(parse_tsplib(in), ParseError);
  }
}

TEST_CASE("QAPLIB parsing", "[problems]") {
  SECTION("tiny instance reads back directly") {
    auto file = open_data("qap_tiny.dat");
    const QapInstance inst = parse_qaplib(file);
    REQUIRE(inst.n == 2);
    CHECK(inst.flow[0][1] == 1);
    CHECK(inst.flow[1][0] == 1);
    CHECK(inst.dist[0][1] == 3);
    CHECK(inst.dist[0][0] == 0);
  }
  SECTION("wrong token count is a parse error") {
    std::istringstream in("2 0 1 1 0 0 3 3");  // one token short
    CHECK_THROWS_AS(parse_qaplib(in), ParseError);
  }
  SECTION("non-numeric token is a parse error") {
    std::istringstream in("2 0 1 1 0 0 3 x 0");
    CHECK_THROWS_AS(parse_qaplib(in), ParseError);
  }
}

TEST_CASE("TSP encoding realizes tour lengths", "[problems]") {
  const TspInstance inst = oracles::random_tsp(4, 11);
  const Bqp bqp = encode_tsp(inst);
  REQUIRE(bqp.num_vars == 16);

  oracles::for_each_permutation(4, [&](const std::vector<int>& perm) {
    CHECK(energy(bqp, tsp_assignment(4, perm)) ==
          oracles::tour_length(inst, perm));
  });

  SECTION("no diagonal objective terms") {
    for (const QuboTerm& t : bqp.q_obj.terms()) CHECK(t.i != t.j);
  }
  SECTION("rejects undersized instances") {
    CHECK_THROWS_AS(encode_tsp(oracles::random_tsp(2, 1)),
                    std::invalid_argument);
  }
}

TEST_CASE("3-node TSP: all tours tie at the triangle length", "[problems]") {
  const TspInstance inst = oracles::random_tsp(3, 8);
  const Bqp bqp = encode_tsp(inst);
  const Energy triangle =
      inst.dist[0][1] + inst.dist[1][2] + inst.dist[2][0];

  Energy min_feasible = std::numeric_limits<Energy>::max();
  for (std::uint64_t mask = 0; mask < 512; ++mask) {
    Assignment a(9);
    for (int v = 0; v < 9; ++v) {
      a.bits[v] = static_cast<std::uint8_t>((mask >> v) & 1);
    }
    if (is_feasible(bqp, a)) {
      min_feasible = std::min(min_feasible, energy(bqp, a));
    }
  }
  CHECK(min_feasible == triangle);
}

TEST_CASE("penalty is zero exactly on permutation matrices (n=3)",
          "[problems]") {
  const Bqp tsp = encode_tsp(oracles::random_tsp(3, 17));
  const Bqp qap = encode_qap(oracles::random_qap(3, 18));
  int zero_count_tsp = 0, zero_count_qap = 0;
  for (std::uint64_t mask = 0; mask < 512; ++mask) {
    Assignment a(9);
    int per_row[3] = {0, 0, 0}, per_col[3] = {0, 0, 0};
    for (int v = 0; v < 9; ++v) {
      a.bits[v] = static_cast<std::uint8_t>((mask >> v) & 1);
      if (a.bits[v]) {
        ++per_row[v / 3];
        ++per_col[v % 3];
      }
    }
    bool is_perm = true;
    for (int k = 0; k < 3; ++k) {
      is_perm = is_perm && per_row[k] == 1 && per_col[k] == 1;
    }
    if (penalty_energy(tsp, a) == 0) ++zero_count_tsp;
    if (penalty_energy(qap, a) == 0) ++zero_count_qap;
    CHECK((penalty_energy(tsp, a) == 0) == is_perm);
    CHECK((penalty_energy(qap, a) == 0) == is_perm);
  }
  CHECK(zero_count_tsp == 6);
  CHECK(zero_count_qap == 6);
}

TEST_CASE("QAP encoding realizes the assignment objective", "[problems]") {
  const QapInstance inst = oracles::random_qap(3, 31);
  const Bqp bqp = encode_qap(inst);

  SECTION("identity permutation") {
    Energy direct = 0;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) direct += inst.flow[i][j] * inst.dist[i][j];
    }
    CHECK(energy(bqp, qap_assignment(3, {0, 1, 2})) == direct);
  }

  SECTION("exhaustive minimum matches permutation brute force") {
    Energy min_feasible = std::numeric_limits<Energy>::max();
    for (std::uint64_t mask = 0; mask < 512; ++mask) {
      Assignment a(9);
      for (int v = 0; v < 9; ++v) {
        a.bits[v] = static_cast<std::uint8_t>((mask >> v) & 1);
      }
      if (is_feasible(bqp, a)) {
        min_feasible = std::min(min_feasible, energy(bqp, a));
      }
    }
    CHECK(min_feasible == oracles::brute_force_qap_optimum(inst));
  }

  SECTION("zero flow means zero energy on every feasible point") {
    QapInstance flat = inst;
    for (auto& row : flat.flow) std::fill(row.begin(), row.end(), 0);
    const Bqp zero_bqp = encode_qap(flat);
    oracles::for_each_permutation(3, [&](const std::vector<int>& perm) {
      CHECK(energy(zero_bqp, qap_assignment(3, perm)) == 0);
    });
  }

  SECTION("dimension mismatch is rejected") {
    QapInstance broken = inst;
    broken.dist.pop_back();
    CHECK_THROWS_AS(encode_qap(broken), std::invalid_argument);
  }
}

TEST_CASE("feasible energy multisets equal permutation objective multisets",
          "[problems]") {
  for (int n = 3; n <= 6; ++n) {
    for (int k = 0; k < 5; ++k) {
      const std::uint64_t seed = 1000 * n + k;

      const TspInstance tsp = oracles::random_tsp(n, seed);
      const Bqp tsp_bqp = encode_tsp(tsp);
      std::vector<Energy> via_encoding, via_definition;
      oracles::for_each_permutation(n, [&](const std::vector<int>& perm) {
        via_encoding.push_back(energy(tsp_bqp, tsp_assignment(n, perm)));
        via_definition.push_back(oracles::tour_length(tsp, perm));
      });
      std::sort(via_encoding.begin(), via_encoding.end());
      std::sort(via_definition.begin(), via_definition.end());
      REQUIRE(via_encoding == via_definition);

      const QapInstance qap = oracles::random_qap(n, seed);
      const Bqp qap_bqp = encode_qap(qap);
      via_encoding.clear();
      via_definition.clear();
      oracles::for_each_permutation(n, [&](const std::vector<int>& perm) {
        via_encoding.push_back(energy(qap_bqp, qap_assignment(n, perm)));
        via_definition.push_back(oracles::qap_objective(qap, perm));
      });
      std::sort(via_encoding.begin(), via_encoding.end());
      std::sort(via_definition.begin(), via_definition.end());
      REQUIRE(via_encoding == via_definition);
    }
  }
}

TEST_CASE("kroA100-sized encoding has N^2 variables", "[problems]") {
  auto file = open_data("kroA100.tsp");
  const TspInstance inst = parse_tsplib(file);
  const Bqp bqp = encode_tsp(inst);
  CHECK(bqp.num_vars == 10000);
  CHECK(bqp.q_pen.offset() == 200);
}
