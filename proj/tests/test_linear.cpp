#include <doctest.h>

#include <map>
#include <random>
#include <set>

#include "mlc/linear.hpp"
#include "oracle_support.hpp"

using namespace mlc;
using namespace mlc::testing;

namespace {

using Rows = std::vector<std::vector<unsigned>>;

/// Every n x n matrix over Z_p, row-major, first entry most significant.
std::vector<Rows> all_matrices(unsigned p, unsigned n) {
  std::uint64_t total = 1;
  for (unsigned i = 0; i < n * n; ++i) {
    total *= p;
  }
  std::vector<Rows> out;
  for (std::uint64_t code = 0; code < total; ++code) {
    Rows m(n, std::vector<unsigned>(n));
    std::uint64_t rest = code;
    for (unsigned i = n * n; i-- > 0;) {
      m[i / n][i % n] = static_cast<unsigned>(rest % p);
      rest /= p;
    }
    out.push_back(m);
  }
  return out;
}

/// Nonsingular over Z_p: the map x -> Mx is injective on all p^n vectors.
bool brute_nonsingular(Rows const& m, unsigned p) {
  unsigned const n = static_cast<unsigned>(m.size());
  std::set<std::vector<unsigned>> images;
  std::uint64_t total = 1;
  for (unsigned i = 0; i < n; ++i) {
    total *= p;
  }
  for (std::uint64_t s = 0; s < total; ++s) {
    auto const x = brute_digits(s, p, n);
    std::vector<unsigned> y(n, 0);
    for (unsigned r = 0; r < n; ++r) {
      for (unsigned c = 0; c < n; ++c) {
        y[r] = (y[r] + m[r][c] * x[c]) % p;
      }
    }
    images.insert(y);
  }
  return images.size() == total;
}

std::vector<MatrixGF> brute_gl(Field const& f, unsigned n) {
  std::vector<MatrixGF> out;
  for (auto const& rows : all_matrices(f.q(), n)) {
    if (brute_nonsingular(rows, f.q())) {
      std::vector<RowVector> r;
      for (auto const& row : rows) {
        r.emplace_back(row.begin(), row.end());
      }
      out.emplace_back(f, r);
    }
  }
  return out;
}

/// x -> Mx as a state table over Z_p, computed without the library's field.
std::vector<StateIndex> brute_linear_table(MatrixGF const& m) {
  unsigned const p = m.field().q();
  auto const n = static_cast<unsigned>(m.rows());
  std::uint64_t total = 1;
  for (unsigned i = 0; i < n; ++i) {
    total *= p;
  }
  std::vector<StateIndex> out(total);
  for (StateIndex s = 0; s < total; ++s) {
    auto const x = brute_digits(s, p, n);
    std::vector<unsigned> y(n, 0);
    for (unsigned r = 0; r < n; ++r) {
      for (unsigned c = 0; c < n; ++c) {
        y[r] = (y[r] + m(r, c) * x[c]) % p;
      }
    }
    out[s] = brute_index(y, p);
  }
  return out;
}

/// Register matrices after each step, starting from the identity.
std::vector<MatrixGF> running_products(LinearProgram const& p) {
  std::vector<MatrixGF> out{MatrixGF::identity(p.field, p.width())};
  for (auto const& step : p.steps) {
    out.push_back(instruction_matrix(p.field, step) * out.back());
  }
  return out;
}

void check_memoryless(MatrixGF const& m) {
  auto const p = synth_linear(m);
  auto const n = static_cast<unsigned>(m.rows());
  CHECK(p.length() <= 2 * n - 1);
  CHECK(p.memory_cells == 0);
  CHECK(verify_linear(p, m));
  auto const products = running_products(p);
  CHECK(products.back() == m);
  for (auto const& step : p.steps) {
    CHECK(step.is_invertible());
  }
  for (std::size_t i = 0; i + 1 < products.size(); ++i) {
    CHECK(products[i].is_nonsingular());
    // Consecutive running products differ in exactly one row.
    unsigned differing = 0;
    for (unsigned r = 0; r < n; ++r) {
      differing += products[i].row(r) != products[i + 1].row(r) ? 1 : 0;
    }
    CHECK(differing == 1);
  }
}

MatrixGF mat(Field const& f, std::vector<RowVector> const& rows) { return MatrixGF(f, rows); }

}  // namespace

TEST_CASE("prime fields agree with modular arithmetic") {
  for (unsigned p : {2u, 3u, 5u, 7u, 13u}) {
    Field const f(p);
    CHECK(f.is_prime());
    CHECK(f.check_axioms());
    for (Element a = 0; a < p; ++a) {
      for (Element b = 0; b < p; ++b) {
        CHECK(f.add(a, b) == (a + b) % p);
        CHECK(f.mul(a, b) == (a * b) % p);
      }
      if (a != 0) {
        CHECK((a * f.inv(a)) % p == 1);
      }
    }
  }
}

TEST_CASE("GF(4) uses t^2 = t + 1") {
  Field const f(4);
  CHECK(f.characteristic() == 2);
  CHECK(f.degree() == 2);
  CHECK(f.modulus() == std::vector<unsigned>{1, 1});
  // Elements c0 + 2 c1 stand for c0 + c1 t.
  unsigned const product[4][4] = {{0, 0, 0, 0}, {0, 1, 2, 3}, {0, 2, 3, 1}, {0, 3, 1, 2}};
  for (Element a = 0; a < 4; ++a) {
    for (Element b = 0; b < 4; ++b) {
      CHECK(f.add(a, b) == (a ^ b));
      CHECK(f.mul(a, b) == product[a][b]);
    }
  }
}

TEST_CASE("extension fields satisfy the axioms") {
  for (unsigned q : {8u, 9u, 16u, 25u, 27u, 32u, 49u}) {
    Field const f(q);
    CHECK_FALSE(f.is_prime());
    CHECK(f.check_axioms());
  }
  for (unsigned q : {0u, 1u, 6u, 12u, 100u}) {
    CHECK_THROWS_AS(Field{q}, Error);
  }
}

TEST_CASE("inverse and rank") {
  std::mt19937_64 rng(5);
  Field const f(5);
  for (int trial = 0; trial < 50; ++trial) {
    auto const m = random_nonsingular(f, 3, rng);
    CHECK(m * m.inverse() == MatrixGF::identity(f, 3));
    CHECK(m.rank() == 3);
  }
  auto const singular = mat(f, {{1, 2}, {2, 4}});
  CHECK(singular.rank() == 1);
  CHECK_THROWS_AS(singular.inverse(), Error);
}

TEST_CASE("synth_linear small cases") {
  Field const f2(2);
  CHECK(synth_linear(MatrixGF::identity(f2, 3)).steps.empty());

  auto const swap = mat(f2, {{0, 1}, {1, 0}});
  auto const p = synth_linear(swap);
  REQUIRE(p.length() == 3);
  // The XOR swap.
  CHECK(p.steps[0] == LinearInstruction{0, {1, 1}});
  CHECK(p.steps[1] == LinearInstruction{1, {1, 1}});
  CHECK(p.steps[2] == LinearInstruction{0, {1, 1}});
  CHECK(brute_verify(to_program(p), brute_linear_table(swap)));

  CHECK_THROWS_AS(synth_linear(mat(f2, {{1, 1}, {1, 1}})), Error);
}

TEST_CASE("find_helper_row") {
  Field const f2(2);
  auto const swap = mat(f2, {{0, 1}, {1, 0}});
  CHECK(find_helper_row(swap, {}) == RowVector{1, 1});

  auto const id = MatrixGF::identity(f2, 3);
  std::vector<RowVector> helpers;
  for (unsigned k = 0; k < 2; ++k) {
    auto const h = find_helper_row(id, helpers);
    RowVector e(3, 0);
    e[k] = 1;
    CHECK(h == e);
    helpers.push_back(h);
  }

  // 3-cycle permutation matrix.
  auto const cycle = mat(f2, {{0, 1, 0}, {0, 0, 1}, {1, 0, 0}});
  auto const h = find_helper_row(cycle, {});
  CHECK(mat(f2, {h, {0, 1, 0}, {0, 0, 1}}).is_nonsingular());
  CHECK(mat(f2, {h, cycle.row(1), cycle.row(2)}).is_nonsingular());
}

TEST_CASE("synth_linear on all of GL(2,2), GL(3,2), GL(2,3)") {
  for (auto [q, n] : {std::pair{2u, 2u}, {2u, 3u}, {3u, 2u}}) {
    Field const f(q);
    auto const group = brute_gl(f, n);
    CHECK(group.size() == (q == 2 && n == 2 ? 6u : q == 2 ? 168u : 48u));
    for (auto const& m : group) {
      check_memoryless(m);
      CHECK(brute_verify(to_program(synth_linear(m)), brute_linear_table(m)));
    }
  }
}

TEST_CASE("synth_linear over GF(4) and random GL(4,2)") {
  Field const f4(4);
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 40; ++trial) {
    auto const m = random_nonsingular(f4, 2, rng);
    check_memoryless(m);
    CHECK(verify(to_program(synth_linear(m)), linear_transformation(m)));
  }
  Field const f2(2);
  for (int trial = 0; trial < 1000; ++trial) {
    auto const m = random_nonsingular(f2, 4, rng);
    auto const p = synth_linear(m);
    CHECK(p.length() <= 7);
    CHECK(verify_linear(p, m));
  }
}

TEST_CASE("count_increasing matches enumeration") {
  CHECK(count_increasing(2, 2) == 4);
  CHECK(count_increasing(3, 1) == 2);
  CHECK(count_increasing(2, 3) == 64);
  for (auto [q, n] : {std::pair{2u, 2u}, {2u, 3u}, {3u, 2u}, {3u, 1u}, {4u, 2u}}) {
    Field const f(q);
    CHECK(BigInt(count_increasing_brute(f, n)) == count_increasing(q, n));
  }
}

TEST_CASE("scale_decompose") {
  Field const f3(3);
  auto const id = scale_decompose(MatrixGF::identity(f3, 2));
  CHECK(id.scaled == MatrixGF::identity(f3, 2));
  CHECK(id.scalars == RowVector{1, 1});
  CHECK(id.trivial_scaled_rows == 0);

  auto const d = scale_decompose(mat(f3, {{2, 0}, {0, 1}}));
  CHECK(d.scaled == MatrixGF::identity(f3, 2));
  CHECK(d.scalars == RowVector{2, 1});
  CHECK(d.trivial_scaled_rows == 1);

  auto const already = mat(f3, {{1, 2}, {0, 1}});
  CHECK(scale_decompose(already).scaled == already);
  CHECK_THROWS_AS(scale_decompose(mat(f3, {{0, 0}, {1, 1}})), Error);
}

TEST_CASE("generator set size") {
  for (auto [q, n] : {std::pair{2u, 2u}, {2u, 3u}, {3u, 2u}, {4u, 2u}, {3u, 3u}, {2u, 5u}}) {
    Field const f(q);
    auto const gens = linear_generators(f, n);
    CHECK(BigInt(gens.size()) == linear_generator_count(q, n));
  }
}

TEST_CASE("linear distances at n = 2") {
  for (unsigned q : {2u, 3u}) {
    Field const f(q);
    auto const dist = linear_distances(f, 2);
    auto const group = brute_gl(f, 2);
    CHECK(dist.size() == group.size());

    // Independent oracle: products of up to three generators.
    auto const gens = linear_generators(f, 2);
    std::map<std::uint64_t, unsigned> best{{matrix_key(MatrixGF::identity(f, 2)), 0}};
    std::vector<MatrixGF> frontier{MatrixGF::identity(f, 2)};
    for (unsigned len = 1; len <= 3; ++len) {
      std::vector<MatrixGF> next;
      for (auto const& x : frontier) {
        for (auto const& g : gens) {
          auto y = g * x;
          if (best.emplace(matrix_key(y), len).second) {
            next.push_back(y);
          }
        }
      }
      frontier = std::move(next);
    }
    CHECK(best.size() == group.size());
    unsigned diameter = 0;
    for (auto const& [key, d] : dist) {
      CHECK(best.at(key) == d);
      diameter = std::max(diameter, d);
    }
    CHECK(diameter == 3);
  }
}

TEST_CASE("scaled sandwich and conversions") {
  for (unsigned q : {2u, 3u}) {
    Field const f(q);
    auto const dist = linear_distances(f, 2);
    for (auto const& m : brute_gl(f, 2)) {
      auto const d = scale_decompose(m);
      unsigned const lm = dist.at(matrix_key(m));
      unsigned const ls = dist.at(matrix_key(d.scaled));
      CHECK(ls <= lm);
      CHECK(lm <= ls + d.trivial_scaled_rows);

      auto const p = synth_linear(m);
      auto const to_scaled = scaled_program_from(p, d);
      CHECK(to_scaled.length() == p.length());
      CHECK(verify_linear(to_scaled, d.scaled));

      auto const ps = synth_linear(d.scaled);
      auto const back = program_from_scaled(ps, d);
      CHECK(back.length() <= ps.length() + d.trivial_scaled_rows);
      CHECK(verify_linear(back, m));
    }
  }
}

TEST_CASE("synth_linear_memory") {
  Field const f2(2);
  CHECK(linear_memory_cells(4) == 2);
  CHECK(linear_memory_cells(3) == 3);

  auto const swap = mat(f2, {{0, 1}, {1, 0}});
  auto const p = synth_linear_memory(swap);
  CHECK(p.length() == 3);
  CHECK(p.memory_cells == 1);
  CHECK(verify_linear(p, swap));
  CHECK(brute_verify(to_program(p), brute_linear_table(swap)));

  auto const id = synth_linear_memory(MatrixGF::identity(f2, 4));
  CHECK(id.steps.empty());

  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 1000; ++trial) {
    auto const m = random_nonsingular(f2, 4, rng);
    auto const pm = synth_linear_memory(m);
    CHECK(pm.memory_cells == 2);
    CHECK(pm.length() <= 6);
    CHECK(verify_linear(pm, m));
    if (trial < 50) {
      CHECK(brute_verify(to_program(pm), brute_linear_table(m)));
    }
  }

  for (unsigned q : {2u, 3u}) {
    Field const f(q);
    for (auto const& m : brute_gl(f, q == 2 ? 3 : 2)) {
      auto const pm = synth_linear_memory(m);
      unsigned const n = static_cast<unsigned>(m.rows());
      unsigned const half = (n + 1) / 2;
      CHECK(pm.length() <= (n % 2 == 0 ? 3 * half : 3 * (half - 1) + 3));
      CHECK(verify_linear(pm, m));
      CHECK(brute_verify(to_program(pm), brute_linear_table(m)));
    }
  }
}
