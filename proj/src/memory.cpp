#include "mlc/memory.hpp"

#include <algorithm>
#include <deque>
#include <optional>
#include <set>

#include "mlc/synth_general.hpp"

namespace mlc {

Transformation embed(Transformation const& f, unsigned m, std::vector<Symbol> const& e) {
  require(e.size() == m, ErrorKind::invalid_input, "finalization vector must have m entries");
  Context const& small = f.context();
  Context const wide = small.widened(m);
  StateIndex const tail = m == 0 ? 0 : Context(small.q(), m).index(e) * small.size();
  return Transformation::from_function(wide, [&](StateIndex s) {
    return f(s % small.size()) + tail;
  });
}

Program strip_finalization(Program const& p, unsigned outputs) {
  Context const& ctx = p.context();
  require(p.memory_cells() == 0 && outputs <= ctx.n(), ErrorKind::invalid_input,
          "expects a memoryless program on the widened register file");
  unsigned const m = ctx.n() - outputs;
  auto const& steps = p.steps();
  std::vector<std::size_t> last(m, steps.size());
  for (std::size_t k = 0; k < steps.size(); ++k) {
    if (steps[k].target() >= outputs) {
      last[steps[k].target() - outputs] = k;
    }
  }
  for (std::size_t k : last) {
    require(k < steps.size(), ErrorKind::invalid_input, "every scratch register must be written");
  }
  // Value each scratch register is left holding; constant by assumption.
  StateIndex const final_state = eval_program(p, 0);
  std::vector<Symbol> e(m);
  for (unsigned i = 0; i < m; ++i) {
    e[i] = ctx.digit(final_state, outputs + i);
  }

  Program out(ctx, m, StepPolicy::keep_runs);
  for (std::size_t k = 0; k < steps.size(); ++k) {
    unsigned const t = steps[k].target();
    if (t >= outputs && last[t - outputs] == k) {
      continue;
    }
    // Past its final update a scratch register reads as its constant.
    std::vector<unsigned> frozen;
    for (unsigned i = 0; i < m; ++i) {
      if (last[i] < k) {
        frozen.push_back(i);
      }
    }
    if (frozen.empty()) {
      out.push_back(steps[k]);
      continue;
    }
    Instruction const& step = steps[k];
    out.push_back(Instruction::from_function(ctx, t, [&](StateIndex s) {
      for (unsigned i : frozen) {
        s = ctx.with_digit(s, outputs + i, e[i]);
      }
      return step.value(s);
    }));
  }
  return out;
}

Program finalize(Program const& p, std::vector<Symbol> const& e) {
  Context const& ctx = p.context();
  unsigned const m = p.memory_cells();
  require(e.size() == m, ErrorKind::invalid_input, "finalization vector must have m entries");
  Program out(ctx, 0, StepPolicy::keep_runs);
  for (auto const& step : p.steps()) {
    out.push_back(step);
  }
  for (unsigned i = 0; i < m; ++i) {
    out.push_back(Instruction::linear(ctx, p.outputs() + i, std::vector<Symbol>(ctx.n(), 0), e[i]));
  }
  return out;
}

Program synth_transposition_mem(Context const& ctx, StateIndex a, StateIndex b) {
  require(a != b && a < ctx.size() && b < ctx.size(), ErrorKind::invalid_input,
          "transposition needs two distinct states");
  unsigned const n = ctx.n();
  unsigned const q = ctx.q();
  Context const wide = ctx.widened(1);
  Program out(wide, 1);
  out.push_back(Instruction::from_function(wide, n, [&](StateIndex s) {
    StateIndex const y = s % ctx.size();
    return static_cast<Symbol>(((y == a ? 1 : 0) + (y == b ? q - 1 : 0)) % q);
  }));
  for (unsigned i = 0; i < n; ++i) {
    Symbol const ai = ctx.digit(a, i);
    Symbol const bi = ctx.digit(b, i);
    if (ai == bi) {
      continue;
    }
    std::vector<Symbol> coeffs(n + 1, 0);
    coeffs[i] = 1;
    coeffs[n] = (bi + q - ai) % q;
    out.push_back(Instruction::linear(wide, i, coeffs));
  }
  return out;
}

Program synth_any_mem(Transformation const& f) {
  Context const& ctx = f.context();
  unsigned const n = ctx.n();
  unsigned const m = n - 1;
  Context const wide = ctx.widened(m);
  StateIndex const small = ctx.size();
  auto on_inputs = [&](auto&& fn) {
    CoordinateTable t(wide.table_size());
    for (StateIndex s = 0; s < wide.size(); ++s) {
      t[s] = fn(s % small);
    }
    return t;
  };
  std::vector<ChainStep> chain;
  for (unsigned i = 0; i < m; ++i) {
    chain.push_back({n + i, on_inputs([&](StateIndex x) { return ctx.digit(x, i); })});
  }
  for (unsigned i = 0; i < n; ++i) {
    chain.push_back({i, on_inputs([&](StateIndex x) { return f.coordinate_value(x, i); })});
  }
  return drop_dead_scratch(compile_chain(wide, m, chain));
}

unsigned perm_memory_cells(unsigned n) { return n % 2 == 0 ? n / 2 : (n + 1) / 2 + 1; }

Program synth_perm_mem(Transformation const& f) {
  require(f.is_permutation(), ErrorKind::invalid_input, "target must be a permutation");
  Context const& ctx = f.context();
  unsigned const n = ctx.n();
  unsigned const even = n + n % 2;
  unsigned const half = even / 2;
  Context const padded(ctx.q(), even);
  Context const wide(ctx.q(), even + half);
  StateIndex const block = padded.power(half);
  StateIndex const small = ctx.size();

  // f on the padded coordinates; an odd extra coordinate is left alone.
  auto image = [&](StateIndex x) {
    return f(x % small) + (x / small) * small;
  };
  std::vector<StateIndex> low(padded.table_size());
  std::vector<StateIndex> high(padded.table_size());
  for (StateIndex x = 0; x < padded.size(); ++x) {
    low[x] = image(x) % block;
    high[x] = x / block;
  }
  // g: with f_1..f_m and with x_{m+1}..x_n, both bijective.
  auto const g = complete_permutation_pair(low, high, block);

  auto on_inputs = [&](auto&& fn) {
    CoordinateTable t(wide.table_size());
    for (StateIndex s = 0; s < wide.size(); ++s) {
      t[s] = fn(s % padded.size());
    }
    return t;
  };
  std::vector<ChainStep> chain;
  for (unsigned i = 0; i < half; ++i) {
    chain.push_back(
        {even + i, on_inputs([&](StateIndex x) { return padded.digit(g[x], i); })});
  }
  for (unsigned i = 0; i < even; ++i) {
    chain.push_back({i, on_inputs([&](StateIndex x) { return padded.digit(image(x), i); })});
  }
  Program full = compile_chain(wide, even + half - n, chain);
  return drop_dead_scratch(full);
}

Program synth_varmap_mem(VarMap const& v, unsigned q) {
  if (!v.is_permutation()) {
    return widen(synth_varmap(v, q), 1);
  }
  // Extra vertex n+1 mapped to vertex 1; its final write is dead.
  std::vector<unsigned> pi = v.image();
  pi.push_back(0);
  Program const extended = synth_varmap(VarMap(std::move(pi)), q);
  Program as_memory(extended.context(), 1, extended.policy());
  for (auto const& step : extended.steps()) {
    as_memory.push_back(step);
  }
  return drop_dead_scratch(as_memory);
}

// ------------------------------------------------------------------ binary

bool is_binary(Instruction const& instr) { return instr.support().size() <= 2; }

bool is_affine(Transformation const& f) {
  Context const& ctx = f.context();
  require(ctx.q() == 2, ErrorKind::unsupported, "affine test is defined over GF(2) only");
  StateIndex const c = f(0);
  std::vector<StateIndex> columns(ctx.n());
  for (unsigned j = 0; j < ctx.n(); ++j) {
    columns[j] = f(ctx.power(j)) ^ c;
  }
  for (StateIndex s = 0; s < ctx.size(); ++s) {
    StateIndex y = c;
    for (unsigned j = 0; j < ctx.n(); ++j) {
      if ((s >> j) & 1u) {
        y ^= columns[j];
      }
    }
    if (y != f(s)) {
      return false;
    }
  }
  return true;
}

namespace {

/// XOR-and-constant program for an affine permutation of GF(2)^n.
Program synth_affine_binary(Transformation const& f) {
  Context const& ctx = f.context();
  unsigned const n = ctx.n();
  StateIndex const c = f(0);
  // rows[i] bit j: coefficient of x_j in output i.
  std::vector<StateIndex> rows(n, 0);
  for (unsigned j = 0; j < n; ++j) {
    StateIndex const col = f(ctx.power(j)) ^ c;
    for (unsigned i = 0; i < n; ++i) {
      if ((col >> i) & 1u) {
        rows[i] |= StateIndex{1} << j;
      }
    }
  }
  // Row operations (target, source) reducing M to I.
  std::vector<std::pair<unsigned, unsigned>> ops;
  auto add_row = [&](unsigned target, unsigned source) {
    rows[target] ^= rows[source];
    ops.emplace_back(target, source);
  };
  for (unsigned j = 0; j < n; ++j) {
    unsigned pivot = j;
    while (pivot < n && !((rows[pivot] >> j) & 1u)) {
      ++pivot;
    }
    require(pivot < n, ErrorKind::invalid_input, "affine map is not a permutation");
    if (pivot != j) {
      add_row(pivot, j);
      add_row(j, pivot);
      add_row(pivot, j);
    }
    for (unsigned i = 0; i < n; ++i) {
      if (i != j && ((rows[i] >> j) & 1u)) {
        add_row(i, j);
      }
    }
  }
  // Each operation is an involution, so M is their product in reverse.
  Program out(ctx, 0, StepPolicy::keep_runs);
  for (auto it = ops.rbegin(); it != ops.rend(); ++it) {
    std::vector<Symbol> coeffs(n, 0);
    coeffs[it->first] = 1;
    coeffs[it->second] = 1;
    out.push_back(Instruction::linear(ctx, it->first, coeffs));
  }
  for (unsigned i = 0; i < n; ++i) {
    if ((c >> i) & 1u) {
      std::vector<Symbol> coeffs(n, 0);
      coeffs[i] = 1;
      out.push_back(Instruction::linear(ctx, i, coeffs, 1));
    }
  }
  return out;
}

/// Indicator chain in the cell, then y_coord += shift * cell.
void append_indicator_chain(Program& out, Context const& ctx, unsigned coord, StateIndex u,
                            std::optional<StateIndex> v, Symbol shift) {
  Context const& wide = out.context();
  unsigned const n = ctx.n();
  unsigned const q = ctx.q();
  Symbol const u_c = ctx.digit(u, coord);
  std::optional<Symbol> const v_c = v ? std::optional(ctx.digit(*v, coord)) : std::nullopt;
  out.push_back(Instruction::from_function(wide, n, [&](StateIndex s) {
    Symbol const y = wide.digit(s, coord);
    return static_cast<Symbol>(((y == u_c ? 1 : 0) + (v_c && y == *v_c ? q - 1 : 0)) % q);
  }));
  for (unsigned j = 0; j < n; ++j) {
    if (j == coord) {
      continue;
    }
    Symbol const u_j = ctx.digit(u, j);
    out.push_back(Instruction::from_function(wide, n, [&](StateIndex s) {
      return wide.digit(s, j) == u_j ? wide.digit(s, n) : Symbol{0};
    }));
  }
  std::vector<Symbol> coeffs(n + 1, 0);
  coeffs[coord] = 1;
  coeffs[n] = shift;
  out.push_back(Instruction::linear(wide, coord, coeffs));
}

}  // namespace

Program synth_binary(Transformation const& f) {
  Context const& ctx = f.context();
  if (ctx.q() == 2 && f.is_permutation() && is_affine(f)) {
    return synth_affine_binary(f);
  }
  unsigned const q = ctx.q();
  Program out(ctx.widened(1), 1, StepPolicy::keep_runs);
  for (auto const& gen : generator_factorization(f)) {
    if (gen.kind == Generator::Kind::assignment) {
      append_indicator_chain(out, ctx, 0, 0, std::nullopt, 1);
      continue;
    }
    unsigned coord = 0;
    while (ctx.digit(gen.u, coord) == ctx.digit(gen.v, coord)) {
      ++coord;
    }
    Symbol const shift = (ctx.digit(gen.v, coord) + q - ctx.digit(gen.u, coord)) % q;
    append_indicator_chain(out, ctx, coord, gen.u, gen.v, shift);
  }
  return out;
}

std::vector<Transformation> binary_permutation_instructions(Context const& ctx) {
  unsigned const q = ctx.q();
  unsigned const n = ctx.n();
  // Tables g(y_i, y_j), one permutation of A per value of y_j.
  std::vector<Symbol> perm(q);
  std::vector<std::vector<Symbol>> perms;
  for (unsigned k = 0; k < q; ++k) {
    perm[k] = k;
  }
  do {
    perms.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));

  std::set<std::vector<StateIndex>> seen;
  std::vector<Transformation> out;
  auto consider = [&](Transformation t) {
    std::vector<StateIndex> key(t.image().begin(), t.image().end());
    if (seen.insert(std::move(key)).second) {
      out.push_back(std::move(t));
    }
  };
  consider(Transformation::identity(ctx));
  if (n == 1) {
    for (auto const& p : perms) {
      consider(Transformation::from_function(ctx, [&](StateIndex s) { return StateIndex{p[s]}; }));
    }
  }
  for (unsigned i = 0; i < n && n > 1; ++i) {
    for (unsigned j = 0; j < n; ++j) {
      if (j == i) {
        continue;
      }
      // choice[b] indexes the permutation applied when y_j = b.
      std::vector<std::size_t> choice(q, 0);
      for (;;) {
        consider(Instruction::from_function(ctx, i, [&](StateIndex s) {
                   return perms[choice[ctx.digit(s, j)]][ctx.digit(s, i)];
                 }).transformation());
        std::size_t k = 0;
        while (k < q && ++choice[k] == perms.size()) {
          choice[k++] = 0;
        }
        if (k == q) {
          break;
        }
      }
    }
  }
  return out;
}

std::vector<Transformation> binary_permutation_closure(Context const& ctx) {
  auto const gens = binary_permutation_instructions(ctx);
  std::set<std::vector<StateIndex>> seen;
  std::deque<Transformation> queue{Transformation::identity(ctx)};
  seen.insert(std::vector<StateIndex>(queue.front().image().begin(), queue.front().image().end()));
  std::vector<Transformation> out;
  while (!queue.empty()) {
    Transformation t = std::move(queue.front());
    queue.pop_front();
    for (auto const& g : gens) {
      Transformation next = compose(g, t);
      std::vector<StateIndex> key(next.image().begin(), next.image().end());
      if (seen.insert(std::move(key)).second) {
        queue.push_back(std::move(next));
      }
    }
    out.push_back(std::move(t));
  }
  std::sort(out.begin(), out.end(), [](Transformation const& a, Transformation const& b) {
    return std::lexicographical_compare(a.image().begin(), a.image().end(), b.image().begin(),
                                        b.image().end());
  });
  return out;
}

}  // namespace mlc
