#include <doctest.h>

#include <array>
#include <random>

#include "mlc/varmap.hpp"
#include "oracle_support.hpp"

using namespace mlc;
using namespace mlc::testing;

namespace {

VarMap figure_two() { return VarMap::parse_image("2 1 4 3 5 5"); }

/// Digit-shuffling target built straight from the definition.
std::vector<StateIndex> brute_varmap_table(VarMap const& v, unsigned q) {
  unsigned const n = v.n();
  StateIndex total = 1;
  for (unsigned i = 0; i < n; ++i) {
    total *= q;
  }
  std::vector<StateIndex> out(total);
  for (StateIndex s = 0; s < total; ++s) {
    auto const d = brute_digits(s, q, n);
    std::vector<unsigned> e(n);
    for (unsigned i = 0; i < n; ++i) {
      e[i] = d[v[i]];
    }
    out[s] = brute_index(e, q);
  }
  return out;
}

bool all_moves(Program const& p) {
  for (auto const& step : p.steps()) {
    if (step.move_form() == nullptr) {
      return false;
    }
  }
  return true;
}

VarMap transpositions(unsigned m) {
  std::vector<unsigned> phi(2 * m);
  for (unsigned k = 0; k < m; ++k) {
    phi[2 * k] = 2 * k + 1;
    phi[2 * k + 1] = 2 * k;
  }
  return VarMap(phi);
}

VarMap matrix_transpose(unsigned m) {
  std::vector<unsigned> phi(m * m);
  for (unsigned r = 0; r < m; ++r) {
    for (unsigned c = 0; c < m; ++c) {
      phi[r * m + c] = c * m + r;
    }
  }
  return VarMap(phi);
}

VarMap ratio_family(unsigned k) {
  std::vector<unsigned> phi(2 * k + 2);
  for (unsigned j = 0; j < k; ++j) {
    phi[2 * j] = 2 * j + 1;
    phi[2 * j + 1] = 2 * j;
  }
  phi[2 * k] = 2 * k;
  phi[2 * k + 1] = 2 * k;
  return VarMap(phi);
}

VarMap random_varmap(unsigned n, std::mt19937_64& rng) {
  std::uniform_int_distribution<unsigned> pick(0, n - 1);
  std::vector<unsigned> phi(n);
  for (auto& x : phi) {
    x = pick(rng);
  }
  return VarMap(phi);
}

}  // namespace

TEST_CASE("parsing both notations") {
  CHECK(VarMap::parse_cycles("(1 2)(3 4)", 4) == VarMap::parse_image("2 1 4 3"));
  CHECK(VarMap::parse("(1,2,3)", 4) == VarMap::parse_image("2 3 1 4"));
  CHECK(VarMap::parse("2 1", std::nullopt).n() == 2);
  CHECK(VarMap::parse_image("2 1 4 3").to_string() == "2 1 4 3");
  CHECK_THROWS_AS(VarMap::parse_cycles("(1 5)", 4), Error);
  CHECK_THROWS_AS(VarMap::parse_cycles("(1 2)(2 3)", 4), Error);
  CHECK_THROWS_AS(VarMap::parse_image("0 1"), Error);
  CHECK_THROWS_AS(VarMap::parse("(1 2)", std::nullopt), Error);
}

TEST_CASE("analysis of identity and the worked figures") {
  auto const id = analyze(VarMap::parse_image("1 2 3"));
  CHECK(id.fixed_count() == 3);
  CHECK(id.cycles.empty());
  CHECK(id.detached_count() == 0);

  auto const fig2 = analyze(figure_two());
  CHECK(fig2.fixed_count() == 1);
  REQUIRE(fig2.cycles.size() == 2);
  CHECK(fig2.cycles[0].members == std::vector<unsigned>{0, 1});
  CHECK(fig2.cycles[1].members == std::vector<unsigned>{2, 3});
  CHECK(fig2.detached_count() == 2);
  CHECK(fig2.acyclic == std::vector<unsigned>{5});

  auto const fig1 = analyze(VarMap::parse_image("2 3 1 2 6 5"));
  REQUIRE(fig1.cycles.size() == 2);
  CHECK(fig1.cycles[0].members == std::vector<unsigned>{0, 1, 2});
  CHECK_FALSE(fig1.cycles[0].detached);
  CHECK(fig1.cycles[0].entry == 1);
  CHECK(fig1.cycles[0].attachment == 3);
  CHECK(fig1.cycles[1].detached);
}

TEST_CASE("acyclic vertices come before their images") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 200; ++trial) {
    auto const v = random_varmap(8, rng);
    auto const an = analyze(v);
    std::vector<int> pos(8, -1);
    for (std::size_t k = 0; k < an.acyclic.size(); ++k) {
      pos[an.acyclic[k]] = static_cast<int>(k);
    }
    unsigned covered = an.fixed_count() + static_cast<unsigned>(an.acyclic.size());
    for (auto const& c : an.cycles) {
      covered += static_cast<unsigned>(c.members.size());
    }
    CHECK(covered == 8);
    for (unsigned j : an.acyclic) {
      if (pos[v[j]] >= 0) {
        CHECK(pos[v[j]] > pos[j]);
      }
    }
  }
}

TEST_CASE("cyclic shift") {
  Context const ctx(3, 3);
  auto const p = synth_cyclic_shift(ctx);
  CHECK(p.length() == 4);
  std::array<Symbol, 3> const in{1, 2, 0};
  std::array<Symbol, 3> const out{2, 0, 1};
  CHECK(eval_program(p, state_index(in, ctx)) == state_index(out, ctx));
  std::vector<unsigned> schedule;
  for (auto const& s : p.steps()) {
    schedule.push_back(s.target());
  }
  CHECK(schedule == std::vector<unsigned>{0, 2, 1, 0});

  auto const swap = synth_cyclic_shift(Context(2, 2));
  CHECK(swap.length() == 3);
  CHECK(brute_verify(swap, brute_varmap_table(VarMap::parse_image("2 1"), 2)));

  Context const c4(2, 4);
  auto const p4 = synth_cyclic_shift(c4);
  CHECK(p4.length() == 5);
  CHECK(brute_verify(p4, brute_varmap_table(VarMap::parse_image("2 3 4 1"), 2)));
}

TEST_CASE("memoryless lengths on the worked examples") {
  auto const ex3 = synth_varmap(VarMap::parse_cycles("(1 2)(3 4)", 4), 2);
  CHECK(ex3.length() == 6);
  CHECK(brute_verify(ex3, brute_varmap_table(VarMap::parse_image("2 1 4 3"), 2)));

  auto const fig = synth_varmap(figure_two(), 3);
  CHECK(fig.length() == 6);
  CHECK(brute_verify(fig, brute_varmap_table(figure_two(), 3)));

  CHECK(synth_varmap(VarMap::parse_image("1 2 3"), 2).empty());
}

TEST_CASE("the combination program for the figure matches the printed one") {
  auto const p = synth_varmap(figure_two(), 5);
  REQUIRE(p.length() == 6);
  std::vector<unsigned> targets;
  for (auto const& s : p.steps()) {
    targets.push_back(s.target() + 1);
  }
  CHECK(targets == std::vector<unsigned>{6, 1, 2, 3, 4, 6});
  auto const* first = p.steps()[0].linear_form();
  REQUIRE(first != nullptr);
  CHECK(first->coeffs == std::vector<Symbol>{1, 0, 1, 0, 0, 0});
}

TEST_CASE("black box programs") {
  auto const fig = synth_varmap_blackbox(figure_two(), 2);
  CHECK(fig.length() == 7);
  CHECK(all_moves(fig));
  CHECK(brute_verify(fig, brute_varmap_table(figure_two(), 2)));
  std::vector<std::pair<unsigned, unsigned>> printed{{6, 1}, {1, 2}, {2, 6}, {6, 3},
                                                     {3, 4}, {4, 6}, {6, 5}};
  for (std::size_t k = 0; k < printed.size(); ++k) {
    CHECK(fig.steps()[k].target() + 1 == printed[k].first);
    CHECK(fig.steps()[k].move_form()->source + 1 == printed[k].second);
  }

  CHECK(synth_varmap_blackbox(VarMap::parse_image("1 2 3"), 2).empty());
  auto const constant = synth_varmap_blackbox(VarMap::parse_image("1 1 1 1 1 1"), 2);
  CHECK(constant.length() == 5);
  CHECK(brute_verify(constant, brute_varmap_table(VarMap::parse_image("1 1 1 1 1 1"), 2)));

  CHECK_THROWS_AS(synth_varmap_blackbox(VarMap::parse_image("2 1"), 2), Error);
  try {
    synth_varmap_blackbox(VarMap::parse_image("2 1"), 2);
  } catch (Error const& e) {
    CHECK(e.kind() == ErrorKind::not_computable_blackbox);
  }
}

TEST_CASE("closed-form counts") {
  for (unsigned m = 1; m <= 6; ++m) {
    CHECK(varmap_complexity(transpositions(m)).memoryless == 3 * m);
    CHECK(synth_varmap(transpositions(m), 2).length() == 3 * m);
  }
  for (unsigned m = 2; m <= 5; ++m) {
    CHECK(varmap_complexity(matrix_transpose(m)).memoryless == 3 * m * (m - 1) / 2);
    CHECK(synth_varmap(matrix_transpose(m), 2).length() == 3 * m * (m - 1) / 2);
  }
  for (unsigned m = 2; m <= 6; ++m) {
    std::vector<unsigned> phi(2 * m + 1);
    for (unsigned k = 0; k + 1 < m; ++k) {
      phi[2 * k] = 2 * k + 1;
      phi[2 * k + 1] = 2 * k;
    }
    phi[2 * m - 2] = 2 * m - 1;
    phi[2 * m - 1] = 2 * m;
    phi[2 * m] = 2 * m - 2;
    VarMap const v(phi);
    CHECK(varmap_complexity(v).memoryless == 3 * m + 1);
    CHECK(synth_varmap(v, 3).length() == 3 * m + 1);
  }
}

TEST_CASE("random maps hit the formulas exactly and verify") {
  std::mt19937_64 rng(43);
  for (unsigned n : {2u, 3u, 5u, 6u, 9u}) {
    for (int trial = 0; trial < 60; ++trial) {
      auto const v = random_varmap(n, rng);
      auto const expected = varmap_complexity(v);
      unsigned const q = n <= 6 ? 3 : 2;
      auto const p = synth_varmap(v, q);
      CHECK(p.length() == expected.memoryless);
      CHECK(p.is_normal_form());
      CHECK(verify_varmap(p, v));
      if (n <= 6) {
        CHECK(brute_verify(p, brute_varmap_table(v, q)));
      }
      if (v.is_permutation()) {
        for (auto const& step : p.steps()) {
          CHECK(step.is_permutation_instruction());
        }
      } else {
        auto const bb = synth_varmap_blackbox(v, q);
        CHECK(all_moves(bb));
        CHECK(bb.length() == *expected.blackbox);
        CHECK(verify_varmap(bb, v));
        CHECK(3 * p.length() > 2 * bb.length());
      }
    }
  }
}

TEST_CASE("random permutations of variables") {
  std::mt19937_64 rng(47);
  for (unsigned n : {4u, 7u, 12u}) {
    for (int trial = 0; trial < 30; ++trial) {
      std::vector<unsigned> phi(n);
      for (unsigned i = 0; i < n; ++i) {
        phi[i] = i;
      }
      std::shuffle(phi.begin(), phi.end(), rng);
      VarMap const v(phi);
      auto const p = synth_varmap(v, 4);
      CHECK(p.length() == varmap_complexity(v).memoryless);
      CHECK(verify_varmap(p, v));
    }
  }
}

TEST_CASE("ratio family approaches two thirds from above") {
  for (unsigned k = 1; k <= 20; ++k) {
    auto const v = ratio_family(k);
    auto const c = varmap_complexity(v);
    CHECK(c.memoryless == 2 * k + 2);
    REQUIRE(c.blackbox.has_value());
    CHECK(*c.blackbox == 3 * k + 1);
    auto const p = synth_varmap(v, 2);
    auto const bb = synth_varmap_blackbox(v, 2);
    CHECK(p.length() == 2 * k + 2);
    CHECK(bb.length() == 3 * k + 1);
    CHECK(3 * p.length() > 2 * bb.length());
    CHECK(verify_varmap(p, v, 2000, k));
    CHECK(verify_varmap(bb, v, 2000, k));
  }
}
