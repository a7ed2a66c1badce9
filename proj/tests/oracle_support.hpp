#pragma once

// Brute-force helpers shared by the test binaries. Nothing here calls the
// library's own synthesis or search code.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include "mlc/core.hpp"

namespace mlc::testing {

inline std::vector<StateIndex> brute_identity_image(StateIndex size) {
  std::vector<StateIndex> image(size);
  std::iota(image.begin(), image.end(), StateIndex{0});
  return image;
}

inline Transformation random_transformation(Context const& ctx, std::mt19937_64& rng) {
  std::uniform_int_distribution<StateIndex> pick(0, ctx.size() - 1);
  std::vector<StateIndex> image(ctx.size());
  for (auto& v : image) {
    v = pick(rng);
  }
  return Transformation(ctx, std::move(image));
}

inline Transformation random_permutation(Context const& ctx, std::mt19937_64& rng) {
  auto image = brute_identity_image(ctx.size());
  std::shuffle(image.begin(), image.end(), rng);
  return Transformation(ctx, std::move(image));
}

/// Transformation number `code` in base q^n, entry s being the s-th digit.
inline Transformation nth_transformation(Context const& ctx, std::uint64_t code) {
  std::vector<StateIndex> image(ctx.size());
  for (auto& v : image) {
    v = code % ctx.size();
    code /= ctx.size();
  }
  return Transformation(ctx, std::move(image));
}

/// Digits of s, computed independently of Context::digit.
inline std::vector<unsigned> brute_digits(StateIndex s, unsigned q, unsigned n) {
  std::vector<unsigned> d(n);
  for (unsigned i = 0; i < n; ++i) {
    d[i] = static_cast<unsigned>(s % q);
    s /= q;
  }
  return d;
}

inline StateIndex brute_index(std::vector<unsigned> const& d, unsigned q) {
  StateIndex s = 0;
  StateIndex w = 1;
  for (unsigned v : d) {
    s += v * w;
    w *= q;
  }
  return s;
}

/// Evaluates a program step by step on plain digit vectors.
inline std::vector<unsigned> brute_run(Program const& p, std::vector<unsigned> regs) {
  unsigned const q = p.context().q();
  for (auto const& step : p.steps()) {
    regs[step.target()] = step.value(brute_index(regs, q));
  }
  return regs;
}

/// Program output equals f on every input and every scratch initialization.
inline bool brute_verify(Program const& p, std::vector<StateIndex> const& f) {
  unsigned const q = p.context().q();
  unsigned const n = p.outputs();
  unsigned const width = p.context().n();
  StateIndex total = 1;
  for (unsigned i = 0; i < width; ++i) {
    total *= q;
  }
  for (StateIndex s = 0; s < total; ++s) {
    auto regs = brute_run(p, brute_digits(s, q, width));
    regs.resize(n);
    auto in = brute_digits(s, q, width);
    in.resize(n);
    if (brute_index(regs, q) != f[brute_index(in, q)]) {
      return false;
    }
  }
  return true;
}

inline bool brute_verify(Program const& p, Transformation const& f) {
  return brute_verify(p, std::vector<StateIndex>(f.image().begin(), f.image().end()));
}

inline bool is_bijection(std::vector<StateIndex> const& image) {
  std::set<StateIndex> seen(image.begin(), image.end());
  return seen.size() == image.size();
}

/// g(x) = g(x') implies f(x) = f(x'), checked over all pairs.
inline bool brute_dominates(std::vector<StateIndex> const& g, std::vector<StateIndex> const& f) {
  for (std::size_t x = 0; x < g.size(); ++x) {
    for (std::size_t y = x + 1; y < g.size(); ++y) {
      if (g[x] == g[y] && f[x] != f[y]) {
        return false;
      }
    }
  }
  return true;
}

inline std::vector<StateIndex> image_of(Transformation const& t) {
  return {t.image().begin(), t.image().end()};
}

/// No identity step and no two consecutive steps on one register.
inline bool brute_normal_form(Program const& p) {
  for (std::size_t k = 0; k < p.steps().size(); ++k) {
    auto const& step = p.steps()[k];
    bool identity = true;
    for (StateIndex s = 0; s < p.context().size() && identity; ++s) {
      identity = step.value(s) == p.context().digit(s, step.target());
    }
    if (identity || (k > 0 && p.steps()[k - 1].target() == step.target())) {
      return false;
    }
  }
  return true;
}

/// Number of registers an instruction actually reads, by flipping each digit.
inline unsigned essential_variables(Instruction const& instr) {
  Context const& ctx = instr.context();
  unsigned count = 0;
  for (unsigned j = 0; j < ctx.n(); ++j) {
    bool depends = false;
    for (StateIndex s = 0; s < ctx.size() && !depends; ++s) {
      for (Symbol v = 0; v < ctx.q() && !depends; ++v) {
        depends = instr.value(s) != instr.value(ctx.with_digit(s, j, v));
      }
    }
    count += depends ? 1 : 0;
  }
  return count;
}

}  // namespace mlc::testing
