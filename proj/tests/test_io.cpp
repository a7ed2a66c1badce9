#include <doctest.h>

#include <random>

#include "mlc/io.hpp"
#include "mlc/linear.hpp"
#include "mlc/synth_general.hpp"
#include "mlc/varmap.hpp"
#include "oracle_support.hpp"

using namespace mlc;
using namespace mlc::testing;

TEST_CASE("function files round trip") {
  Transformation const sw(Context(2, 2), {0, 2, 1, 3});
  auto const text = write_function(sw);
  CHECK(text == "function q=2 n=2\n0 0\n0 1\n1 0\n1 1\n");
  CHECK(read_function(text).f == sw);
  CHECK(read_function(text).memory_cells == 0);
  CHECK(detect_kind(text) == FileKind::function);

  std::mt19937_64 rng(5);
  for (auto [q, n] : {std::pair{2u, 3u}, {3u, 2u}, {5u, 2u}, {11u, 1u}}) {
    auto const f = random_transformation(Context(q, n), rng);
    auto const t = write_function(f, 2);
    auto const back = read_function(t);
    CHECK(back.f == f);
    CHECK(back.memory_cells == 2);
    CHECK(write_function(back.f, 2) == t);
  }

  CHECK(read_function("# swap\nfunction q=2 n=2  # header\n\n0 0\n0 1\n1 0\n1 1\n").f == sw);
}

TEST_CASE("function files reject malformed input") {
  CHECK_THROWS_AS(read_function(""), Error);
  CHECK_THROWS_AS(read_function("program q=2 n=2\n"), Error);
  CHECK_THROWS_AS(read_function("function n=2\n0 0\n0 1\n1 0\n1 1\n"), Error);
  CHECK_THROWS_AS(read_function("function q=2 n=2\n0 0\n0 1\n1 0\n"), Error);
  CHECK_THROWS_AS(read_function("function q=2 n=2\n0 0\n0 2\n1 0\n1 1\n"), Error);
  CHECK_THROWS_AS(read_function("function q=2 n=2\n0 0\n0 1 1\n1 0\n1 1\n"), Error);
  CHECK_THROWS_AS(read_function("function q=2 n=2\n0 0\n0 x\n1 0\n1 1\n"), Error);
  CHECK_THROWS_AS(read_function("function q=1 n=2\n0 0\n"), Error);
  try {
    read_function("function q=2 n=2\n0 0\n0 7\n1 0\n1 1\n");
    FAIL("expected an error");
  } catch (Error const& e) {
    CHECK(e.kind() == ErrorKind::invalid_input);
    CHECK(std::string(e.what()).starts_with("line 3"));
  }
}

TEST_CASE("program files round trip byte for byte") {
  std::mt19937_64 rng(6);
  for (auto [q, n] : {std::pair{2u, 2u}, {2u, 3u}, {3u, 2u}}) {
    Context const ctx(q, n);
    for (int trial = 0; trial < 20; ++trial) {
      auto const f = random_transformation(ctx, rng);
      auto const p = synth_transformation(f);
      auto const text = write_program(p);
      auto const back = read_program(text);
      CHECK(write_program(back) == text);
      CHECK(back.length() == p.length());
      CHECK(full_transformation(back) == full_transformation(p));
      CHECK(brute_verify(back, f));
    }
  }

  auto const shift = synth_cyclic_shift(Context(3, 3));
  auto const text = write_program(shift);
  CHECK(text.starts_with("program q=3 n=3 m=0\nlin 1: 1 1 1\n"));
  CHECK(write_program(read_program(text)) == text);

  auto const bb = synth_varmap_blackbox(VarMap::parse_image("2 1 4 3 5 5"), 2);
  auto const bbt = write_program(bb);
  CHECK(bbt.find("mov ") != std::string::npos);
  CHECK(write_program(read_program(bbt)) == bbt);
  CHECK(full_transformation(read_program(bbt)) == full_transformation(bb));

  // Tables-only output describes the same map.
  auto const tables = write_program(shift, true);
  CHECK(tables.find("lin") == std::string::npos);
  CHECK(full_transformation(read_program(tables)) == full_transformation(shift));
}

TEST_CASE("program files: every instruction form") {
  auto const p = read_program(
      "program q=3 n=2 m=1\n"
      "lin 3: 1 2 0 + 1\n"
      "mov 1 3\n"
      "upd 2: 0 1 2 0 1 2 0 1 2 0 1 2 0 1 2 0 1 2 0 1 2 0 1 2 0 1 2\n");
  CHECK(p.outputs() == 2);
  CHECK(p.memory_cells() == 1);
  REQUIRE(p.length() == 3);
  Context const ctx(3, 3);
  for (StateIndex s = 0; s < ctx.size(); ++s) {
    auto d = brute_digits(s, 3, 3);
    d[2] = (d[0] + 2 * d[1] + 1) % 3;
    d[0] = d[2];
    d[1] = d[0];
    CHECK(eval_program(p, s) == brute_index(d, 3));
  }
  CHECK(write_program(p).find("lin 3: 1 2 0 + 1\n") != std::string::npos);
}

TEST_CASE("program files reject malformed input") {
  CHECK_THROWS_AS(read_program("program q=2 n=2 m=0\nmov 1 3\n"), Error);
  CHECK_THROWS_AS(read_program("program q=2 n=2 m=0\nmov 0 1\n"), Error);
  CHECK_THROWS_AS(read_program("program q=2 n=2 m=0\nlin 1: 1 1 1\n"), Error);
  CHECK_THROWS_AS(read_program("program q=2 n=2 m=0\nlin 1: 1 1 + 2\n"), Error);
  CHECK_THROWS_AS(read_program("program q=2 n=2 m=0\nlin 1 1 1\n"), Error);
  CHECK_THROWS_AS(read_program("program q=2 n=2 m=0\nupd 1: 0 1 0\n"), Error);
  CHECK_THROWS_AS(read_program("program q=2 n=2 m=0\nupd 1: 0 1 + 1 0\n"), Error);
  CHECK_THROWS_AS(read_program("program q=2 n=2 m=0\nxor 1 2\n"), Error);
  CHECK_THROWS_AS(read_program("function q=2 n=2\n"), Error);
}

TEST_CASE("matrix files") {
  Field const gf(2);
  MatrixGF const m(gf, {{0, 1}, {1, 1}});
  auto const text = write_matrix(m);
  CHECK(text == "matrix q=2 n=2\n0 1\n1 1\n");
  CHECK(read_matrix(text) == m);
  CHECK(detect_kind(text) == FileKind::matrix);

  std::mt19937_64 rng(7);
  for (unsigned q : {2u, 3u, 4u, 5u}) {
    auto const r = random_nonsingular(Field(q), 3, rng);
    CHECK(read_matrix(write_matrix(r)) == r);
  }
  CHECK_THROWS_AS(read_matrix("matrix q=2 n=2\n0 1\n"), Error);
  CHECK_THROWS_AS(read_matrix("matrix q=2 n=2\n0 1\n1 2\n"), Error);
  CHECK_THROWS_AS(read_matrix("matrix q=6 n=1\n1\n"), Error);
  CHECK_FALSE(detect_kind("# nothing\n").has_value());
  CHECK_FALSE(detect_kind("(1 2)").has_value());
}
