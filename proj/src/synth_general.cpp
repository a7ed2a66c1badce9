#include "mlc/synth_general.hpp"

#include <algorithm>
#include <numeric>
#include <optional>

namespace mlc {

// ------------------------------------------------------------ transpositions

unsigned hamming_distance(Context const& ctx, StateIndex a, StateIndex b) {
  unsigned d = 0;
  for (unsigned i = 0; i < ctx.n(); ++i) {
    d += ctx.digit(a, i) != ctx.digit(b, i) ? 1 : 0;
  }
  return d;
}

Instruction transposition_instruction(Context const& ctx, StateIndex u, StateIndex v) {
  require(u < ctx.size() && v < ctx.size(), ErrorKind::invalid_input, "state out of range");
  require(hamming_distance(ctx, u, v) == 1, ErrorKind::invalid_input,
          "states must differ in exactly one coordinate");
  unsigned coord = 0;
  while (ctx.digit(u, coord) == ctx.digit(v, coord)) {
    ++coord;
  }
  Symbol const ui = ctx.digit(u, coord);
  Symbol const vi = ctx.digit(v, coord);
  return Instruction::from_function(ctx, coord, [&](StateIndex s) {
    if (s == u) {
      return vi;
    }
    if (s == v) {
      return ui;
    }
    return ctx.digit(s, coord);
  });
}

namespace {

/// Ladder v^0 = a, ..., v^d = b changing the differing coordinates in increasing order.
std::vector<StateIndex> transposition_ladder(Context const& ctx, StateIndex a, StateIndex b) {
  std::vector<StateIndex> ladder{a};
  StateIndex cur = a;
  for (unsigned i = 0; i < ctx.n(); ++i) {
    if (ctx.digit(a, i) != ctx.digit(b, i)) {
      cur = ctx.with_digit(cur, i, ctx.digit(b, i));
      ladder.push_back(cur);
    }
  }
  return ladder;
}

/// Order in which the ladder's adjacent transpositions are applied.
std::vector<std::pair<StateIndex, StateIndex>> ladder_word(Context const& ctx, StateIndex a,
                                                           StateIndex b) {
  auto const ladder = transposition_ladder(ctx, a, b);
  std::size_t const d = ladder.size() - 1;
  std::vector<std::pair<StateIndex, StateIndex>> word;
  for (std::size_t k = 0; k < d; ++k) {
    word.emplace_back(ladder[k], ladder[k + 1]);
  }
  for (std::size_t k = d - 1; k-- > 0;) {
    word.emplace_back(ladder[k], ladder[k + 1]);
  }
  return word;
}

}  // namespace

Program synth_transposition(Context const& ctx, StateIndex a, StateIndex b) {
  require(a < ctx.size() && b < ctx.size(), ErrorKind::invalid_input, "state out of range");
  require(a != b, ErrorKind::invalid_input, "transposition needs two distinct states");
  Program program(ctx);
  for (auto const& [u, v] : ladder_word(ctx, a, b)) {
    program.push_back(transposition_instruction(ctx, u, v));
  }
  return program;
}

// ----------------------------------------------------- generator factorization

Instruction Generator::instruction(Context const& ctx) const {
  if (kind == Kind::assignment) {
    return Instruction::from_function(ctx, 0, [&](StateIndex s) {
      return static_cast<Symbol>((ctx.digit(s, 0) + (s == 0 ? 1 : 0)) % ctx.q());
    });
  }
  return transposition_instruction(ctx, u, v);
}

namespace {

using Word = std::vector<Generator>;

/// Transposition of two states differing in one digit, as digit-adjacent swaps.
void append_one_digit_transposition(Context const& ctx, StateIndex u, StateIndex w, Word& out) {
  unsigned coord = 0;
  while (ctx.digit(u, coord) == ctx.digit(w, coord)) {
    ++coord;
  }
  Symbol lo = ctx.digit(u, coord);
  Symbol hi = ctx.digit(w, coord);
  if (lo > hi) {
    std::swap(lo, hi);
  }
  auto adjacent = [&](Symbol k) {
    return Generator{Generator::Kind::transposition, ctx.with_digit(u, coord, k),
                     ctx.with_digit(u, coord, k + 1)};
  };
  for (Symbol k = lo; k < hi; ++k) {
    out.push_back(adjacent(k));
  }
  for (Symbol k = hi - 1; k-- > lo;) {
    out.push_back(adjacent(k));
  }
}

void append_transposition(Context const& ctx, StateIndex a, StateIndex b, Word& out) {
  if (a == b) {
    return;
  }
  for (auto const& [u, v] : ladder_word(ctx, a, b)) {
    append_one_digit_transposition(ctx, u, v, out);
  }
}

void append_permutation(Transformation const& pi, Word& out) {
  Context const& ctx = pi.context();
  std::vector<bool> visited(pi.image().size(), false);
  for (StateIndex c0 = 0; c0 < pi.image().size(); ++c0) {
    if (visited[c0]) {
      continue;
    }
    visited[c0] = true;
    for (StateIndex c = pi(c0); c != c0; c = pi(c)) {
      visited[c] = true;
      append_transposition(ctx, c0, c, out);
    }
  }
}

/// (u -> v) as sigma^-1 o (e^0 -> e^1) o sigma.
void append_assignment(Context const& ctx, StateIndex u, StateIndex v, Word& out) {
  Word sigma;
  append_transposition(ctx, u, 0, sigma);
  StateIndex const moved_v = v == 0 ? u : v;
  append_transposition(ctx, moved_v, 1, sigma);
  out.insert(out.end(), sigma.begin(), sigma.end());
  out.push_back(Generator{Generator::Kind::assignment, 0, 1});
  out.insert(out.end(), sigma.rbegin(), sigma.rend());
}

}  // namespace

std::vector<Generator> generator_factorization(Transformation const& f) {
  Context const& ctx = f.context();
  std::size_t const size = f.image().size();
  constexpr StateIndex none = ~StateIndex{0};
  std::vector<StateIndex> representative(size, none);
  Word word;
  for (StateIndex x = 0; x < size; ++x) {
    StateIndex& rep = representative[f(x)];
    if (rep == none) {
      rep = x;
    } else {
      append_assignment(ctx, x, rep, word);
    }
  }
  std::vector<StateIndex> pi(size, none);
  std::vector<bool> used(size, false);
  for (StateIndex a = 0; a < size; ++a) {
    if (representative[a] != none) {
      pi[representative[a]] = a;
      used[a] = true;
    }
  }
  StateIndex spare = 0;
  for (StateIndex x = 0; x < size; ++x) {
    if (pi[x] == none) {
      while (used[spare]) {
        ++spare;
      }
      pi[x] = spare;
      used[spare] = true;
    }
  }
  append_permutation(Transformation(ctx, std::move(pi)), word);
  return word;
}

Program synth_generator_factorization(Transformation const& f) {
  Program program(f.context(), 0, StepPolicy::keep_runs);
  for (auto const& gen : generator_factorization(f)) {
    program.push_back(gen.instruction(f.context()));
  }
  return program;
}

// ------------------------------------------------------ coordinate completion

std::vector<StateIndex> complete_permutation_pair(std::span<StateIndex const> f,
                                                  std::span<StateIndex const> g,
                                                  StateIndex b_count) {
  require(f.size() == g.size() && b_count > 0 && f.size() % b_count == 0,
          ErrorKind::invalid_input, "domain must be B x C");
  std::size_t const edges = f.size();
  std::size_t const vertices = b_count;
  StateIndex const colours = edges / b_count;
  std::vector<StateIndex> left_degree(vertices, 0);
  std::vector<StateIndex> right_degree(vertices, 0);
  for (std::size_t e = 0; e < edges; ++e) {
    require(f[e] < b_count && g[e] < b_count, ErrorKind::invalid_input, "value outside B");
    ++left_degree[f[e]];
    ++right_degree[g[e]];
  }
  for (std::size_t v = 0; v < vertices; ++v) {
    require(left_degree[v] == colours && right_degree[v] == colours, ErrorKind::invalid_input,
            "both functions must be balanced");
  }

  // Regular bipartite multigraph: left f(x), right g(x), one edge per x.
  std::vector<std::vector<std::size_t>> adjacency(vertices);
  for (std::size_t e = 0; e < edges; ++e) {
    adjacency[f[e]].push_back(e);
  }

  constexpr std::size_t none = ~std::size_t{0};
  std::vector<StateIndex> colour(edges, colours);
  std::vector<std::size_t> right_match(vertices);
  std::vector<std::size_t> left_match(vertices);
  std::vector<std::size_t> visited(vertices);
  std::vector<std::size_t> cursor(vertices);

  for (StateIndex c = 0; c < colours; ++c) {
    std::fill(right_match.begin(), right_match.end(), none);
    std::fill(left_match.begin(), left_match.end(), none);
    std::size_t stamp = 0;
    std::fill(visited.begin(), visited.end(), none);
    for (std::size_t root = 0; root < vertices; ++root) {
      // Iterative augmenting-path search (Kuhn) over uncoloured edges.
      ++stamp;
      std::vector<std::pair<std::size_t, std::size_t>> stack;  // (left vertex, edge taken)
      stack.emplace_back(root, none);
      visited[root] = stamp;
      cursor[root] = 0;
      bool augmented = false;
      while (!stack.empty() && !augmented) {
        std::size_t const u = stack.back().first;
        auto const& adj = adjacency[u];
        bool advanced = false;
        while (cursor[u] < adj.size()) {
          std::size_t const e = adj[cursor[u]++];
          if (colour[e] != colours) {
            continue;
          }
          std::size_t const r = g[e];
          std::size_t const owner = right_match[r];
          if (owner == none) {
            stack.back().second = e;
            // Flip the path.
            for (auto it = stack.rbegin(); it != stack.rend(); ++it) {
              std::size_t const edge = it->second;
              right_match[g[edge]] = edge;
              left_match[it->first] = edge;
            }
            augmented = true;
            break;
          }
          std::size_t const next = f[owner];
          if (visited[next] != stamp) {
            visited[next] = stamp;
            cursor[next] = 0;
            stack.back().second = e;
            stack.emplace_back(next, none);
            advanced = true;
            break;
          }
        }
        if (!augmented && !advanced) {
          stack.pop_back();
        }
      }
      require(augmented, ErrorKind::invalid_input, "no perfect matching in a regular graph");
    }
    for (std::size_t v = 0; v < vertices; ++v) {
      colour[left_match[v]] = c;
    }
  }
  return colour;
}

std::vector<CoordinateTable> permutation_helpers(Transformation const& f) {
  require(f.is_permutation(), ErrorKind::invalid_input, "target must be a permutation");
  Context const& ctx = f.context();
  unsigned const n = ctx.n();
  std::size_t const size = f.image().size();
  std::vector<CoordinateTable> helpers;
  if (n < 2) {
    return helpers;
  }
  StateIndex const b_count = ctx.power(n - 1);
  std::vector<StateIndex> with_inputs(size);
  std::vector<StateIndex> with_targets(size);
  for (unsigned k = 0; k + 1 < n; ++k) {
    for (StateIndex x = 0; x < size; ++x) {
      StateIndex a = 0;
      StateIndex b = 0;
      unsigned pos = 0;
      for (unsigned j = 0; j < k; ++j, ++pos) {
        a += StateIndex{helpers[j][x]} * ctx.power(pos);
      }
      b = a;
      for (unsigned j = k + 1; j < n; ++j, ++pos) {
        a += StateIndex{ctx.digit(x, j)} * ctx.power(pos);
        b += StateIndex{f.coordinate_value(x, j)} * ctx.power(pos);
      }
      with_inputs[x] = a;
      with_targets[x] = b;
    }
    auto const h = complete_permutation_pair(with_inputs, with_targets, b_count);
    helpers.emplace_back(h.begin(), h.end());
  }
  return helpers;
}

Program synth_permutation(Transformation const& f) {
  require(f.is_permutation(), ErrorKind::invalid_input, "target must be a permutation");
  Context const& ctx = f.context();
  unsigned const n = ctx.n();
  auto const helpers = permutation_helpers(f);
  std::vector<ChainStep> chain;
  for (unsigned k = 0; k + 1 < n; ++k) {
    chain.push_back({k, helpers[k]});
  }
  for (unsigned k = n; k-- > 0;) {
    chain.push_back({k, f.coordinate(k)});
  }
  return compile_chain(ctx, 0, chain);
}

// ------------------------------------------------------- proper partitions

std::vector<std::size_t> egz_subset(std::span<unsigned const> residues, unsigned q) {
  require(q >= 1, ErrorKind::invalid_input, "modulus must be positive");
  std::size_t const len = residues.size();
  // reach[j][c * q + s]: c elements from positions j.. can sum to s mod q.
  std::vector<std::vector<bool>> reach(len + 1, std::vector<bool>((q + 1) * q, false));
  reach[len][0] = true;
  for (std::size_t j = len; j-- > 0;) {
    unsigned const r = residues[j] % q;
    for (unsigned c = 0; c <= q; ++c) {
      for (unsigned s = 0; s < q; ++s) {
        bool ok = reach[j + 1][c * q + s];
        if (!ok && c > 0) {
          ok = reach[j + 1][(c - 1) * q + (s + q - r) % q];
        }
        reach[j][c * q + s] = ok;
      }
    }
  }
  require(reach[0][q * q + 0], ErrorKind::invalid_input, "no zero-sum subset of size q");
  std::vector<std::size_t> picked;
  unsigned need = q;
  unsigned target = 0;
  for (std::size_t j = 0; j < len && need > 0; ++j) {
    unsigned const r = residues[j] % q;
    unsigned const rest = (target + q - r) % q;
    if (reach[j + 1][(need - 1) * q + rest]) {
      picked.push_back(j);
      --need;
      target = rest;
    }
  }
  return picked;
}

Partition::Partition(Context ctx, std::vector<StateIndex> counts)
    : ctx_(std::move(ctx)), counts_(std::move(counts)) {
  require(counts_.size() == ctx_.table_size(), ErrorKind::invalid_input,
          "partition needs q^n parts");
  StateIndex const total = std::accumulate(counts_.begin(), counts_.end(), StateIndex{0});
  require(total == ctx_.size(), ErrorKind::invalid_input, "parts must sum to q^n");
}

bool Partition::is_proper() const {
  for (unsigned i = 0; i <= ctx_.n(); ++i) {
    StateIndex const block = ctx_.power(i);
    for (StateIndex start = 0; start < counts_.size(); start += block) {
      StateIndex sum = 0;
      for (StateIndex a = start; a < start + block; ++a) {
        sum += counts_[a];
      }
      if (sum % block != 0) {
        return false;
      }
    }
  }
  return true;
}

ProperSort sort_properly(Partition const& lambda) {
  Context const& ctx = lambda.context();
  unsigned const q = ctx.q();
  struct Node {
    StateIndex value;
    std::vector<StateIndex> leaves;
  };
  std::vector<Node> level;
  level.reserve(lambda.counts().size());
  for (StateIndex a = 0; a < lambda.counts().size(); ++a) {
    level.push_back(Node{lambda[a], {a}});
  }
  for (unsigned i = 0; i < ctx.n(); ++i) {
    std::vector<Node> next;
    std::vector<Node> pool = std::move(level);
    while (!pool.empty()) {
      std::vector<std::size_t> pick;
      if (pool.size() == q) {
        pick.resize(q);
        std::iota(pick.begin(), pick.end(), std::size_t{0});
      } else {
        std::vector<unsigned> residues(2 * q - 1);
        for (std::size_t j = 0; j < residues.size(); ++j) {
          residues[j] = static_cast<unsigned>(pool[j].value % q);
        }
        pick = egz_subset(residues, q);
      }
      Node group{0, {}};
      for (std::size_t j : pick) {
        group.value += pool[j].value;
        group.leaves.insert(group.leaves.end(), pool[j].leaves.begin(), pool[j].leaves.end());
      }
      group.value /= q;
      for (std::size_t j = pick.size(); j-- > 0;) {
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick[j]));
      }
      next.push_back(std::move(group));
    }
    level = std::move(next);
  }
  std::vector<StateIndex> const& order = level.front().leaves;
  std::vector<StateIndex> sorted(order.size());
  for (std::size_t p = 0; p < order.size(); ++p) {
    sorted[p] = lambda[order[p]];
  }
  return ProperSort{Partition(ctx, std::move(sorted)), Transformation(ctx, order)};
}

bool preserves_suffix_blocks(Transformation const& f) {
  Context const& ctx = f.context();
  for (unsigned i = 1; i <= ctx.n(); ++i) {
    StateIndex const block = ctx.power(i);
    std::vector<StateIndex> seen(ctx.power(ctx.n() - i), ctx.size());
    for (StateIndex x = 0; x < f.image().size(); ++x) {
      StateIndex& slot = seen[x / block];
      StateIndex const suffix = f(x) / block;
      if (slot == ctx.size()) {
        slot = suffix;
      } else if (slot != suffix) {
        return false;
      }
    }
  }
  return true;
}

Transformation lambda_transformation(Partition const& lambda) {
  require(lambda.is_proper(), ErrorKind::invalid_input, "partition is not proper");
  Context const& ctx = lambda.context();
  std::vector<StateIndex> image;
  image.reserve(ctx.table_size());
  for (StateIndex a = 0; a < lambda.counts().size(); ++a) {
    image.insert(image.end(), lambda[a], a);
  }
  Transformation out(ctx, std::move(image));
  require(preserves_suffix_blocks(out), ErrorKind::invalid_input,
          "interval map violates the block property");
  return out;
}

namespace {

/// Orders in which the coordinates where `from` and `to` differ can be rewritten
/// one at a time, each new value readable from the registers at that point.
/// Returns the first working order, or nothing.
std::optional<std::vector<unsigned>> hop_order(Context const& ctx,
                                               std::vector<StateIndex> const& from,
                                               std::vector<StateIndex> const& to,
                                               unsigned max_coords) {
  std::size_t const size = from.size();
  std::vector<unsigned> differ;
  for (unsigned c = 0; c < ctx.n(); ++c) {
    for (StateIndex x = 0; x < size; ++x) {
      if (ctx.digit(from[x], c) != ctx.digit(to[x], c)) {
        differ.push_back(c);
        break;
      }
    }
  }
  if (differ.size() > std::max(1u, max_coords)) {
    return std::nullopt;
  }
  do {
    std::vector<StateIndex> image = from;
    bool ok = true;
    for (unsigned c : differ) {
      CoordinateTable next(size);
      for (StateIndex x = 0; x < size; ++x) {
        next[x] = ctx.digit(to[x], c);
      }
      if (!dominates(Transformation(ctx, image), next)) {
        ok = false;
        break;
      }
      for (StateIndex x = 0; x < size; ++x) {
        image[x] = ctx.with_digit(image[x], c, next[x]);
      }
    }
    if (ok) {
      return differ;
    }
  } while (std::next_permutation(differ.begin(), differ.end()));
  return std::nullopt;
}

/// Shortest route through a chain of prefix maps. A hop between two prefixes
/// rewrites each differing coordinate once; hops over more than one coordinate
/// are tried only on small register files.
std::vector<ChainStep> shortcut_chain(Context const& ctx, std::vector<ChainStep> const& chain) {
  std::size_t const size = ctx.table_size();
  unsigned const max_coords = ctx.n() <= 5 ? ctx.n() : 1;
  std::vector<std::vector<StateIndex>> prefix;
  std::vector<StateIndex> image(size);
  std::iota(image.begin(), image.end(), StateIndex{0});
  prefix.push_back(image);
  for (auto const& step : chain) {
    for (StateIndex x = 0; x < size; ++x) {
      image[x] = ctx.with_digit(image[x], step.coord, step.target[x]);
    }
    prefix.push_back(image);
  }
  std::size_t const nodes = prefix.size();
  constexpr std::size_t unreached = ~std::size_t{0};
  std::vector<std::size_t> dist(nodes, unreached);
  std::vector<std::size_t> parent(nodes, unreached);
  std::vector<std::vector<unsigned>> via(nodes);
  dist[0] = 0;
  for (std::size_t i = 0; i < nodes; ++i) {
    if (dist[i] == unreached) {
      continue;
    }
    for (std::size_t j = i + 1; j < nodes; ++j) {
      auto order = hop_order(ctx, prefix[i], prefix[j], max_coords);
      if (order && dist[i] + order->size() < dist[j]) {
        dist[j] = dist[i] + order->size();
        parent[j] = i;
        via[j] = std::move(*order);
      }
    }
  }
  std::vector<ChainStep> out;
  for (std::size_t j = nodes - 1; j != 0; j = parent[j]) {
    for (auto it = via[j].rbegin(); it != via[j].rend(); ++it) {
      CoordinateTable next(size);
      for (StateIndex x = 0; x < size; ++x) {
        next[x] = ctx.digit(prefix[j][x], *it);
      }
      out.push_back({*it, std::move(next)});
    }
  }
  std::reverse(out.begin(), out.end());
  return out;
}

}  // namespace

Program synth_transformation(Transformation const& f) {
  if (f.is_permutation()) {
    return synth_permutation(f);
  }
  Context const& ctx = f.context();
  unsigned const n = ctx.n();
  std::size_t const size = f.image().size();
  if (n == 1) {
    return compile_chain(ctx, 0, {{0, f.coordinate(0)}});
  }

  std::vector<StateIndex> fibre(size, 0);
  for (StateIndex x = 0; x < size; ++x) {
    ++fibre[f(x)];
  }
  auto const [lambda, h] = sort_properly(Partition(ctx, std::move(fibre)));
  Transformation const interval = lambda_transformation(lambda);
  Transformation const h_inv = h.inverse();

  // g sends each fibre of f, in increasing order, onto its interval.
  std::vector<StateIndex> start(size, 0);
  for (StateIndex a = 1; a < size; ++a) {
    start[a] = start[a - 1] + lambda[a - 1];
  }
  std::vector<StateIndex> g_image(size);
  for (StateIndex x = 0; x < size; ++x) {
    g_image[x] = start[h_inv(f(x))]++;
  }
  Transformation const g(ctx, std::move(g_image));
  require(compose(h, compose(interval, g)) == f, ErrorKind::invalid_input,
          "factorization h o Lambda o g does not reproduce the target");

  auto const g_helpers = permutation_helpers(g);
  auto const h_helpers = permutation_helpers(h);
  std::vector<CoordinateTable> h_first(h_helpers);
  h_first.push_back(h.coordinate(n - 1));
  Transformation const h_front = Transformation::from_coordinates(ctx, h_first);
  Transformation const fused = compose(h_front, compose(interval, g));

  std::vector<ChainStep> chain;
  for (unsigned k = 0; k + 1 < n; ++k) {
    chain.push_back({k, g_helpers[k]});
  }
  chain.push_back({n - 1, g.coordinate(n - 1)});
  for (unsigned k = n - 1; k-- > 1;) {
    chain.push_back({k, g.coordinate(k)});
  }
  for (unsigned k = 0; k < n; ++k) {
    chain.push_back({k, fused.coordinate(k)});
  }
  for (unsigned k = n - 1; k-- > 0;) {
    chain.push_back({k, f.coordinate(k)});
  }
  return compile_chain(ctx, 0, shortcut_chain(ctx, chain));
}

// ---------------------------------------------------------- ordered functions

namespace {

/// Symbols listed by increasing fibre minimum; empty when some symbol is missing.
std::vector<Symbol> symbols_by_first_occurrence(Context const& ctx, CoordinateTable const& table) {
  std::vector<bool> seen(ctx.q(), false);
  std::vector<Symbol> order;
  for (Symbol v : table) {
    if (!seen[v]) {
      seen[v] = true;
      order.push_back(v);
    }
  }
  if (order.size() != ctx.q()) {
    order.clear();
  }
  return order;
}

std::vector<Symbol> invert(std::vector<Symbol> const& perm) {
  std::vector<Symbol> inv(perm.size());
  for (Symbol r = 0; r < perm.size(); ++r) {
    inv[perm[r]] = r;
  }
  return inv;
}

bool is_identity_perm(std::vector<Symbol> const& perm) {
  for (Symbol r = 0; r < perm.size(); ++r) {
    if (perm[r] != r) {
      return false;
    }
  }
  return true;
}

/// Rewrites p so that original register j equals relabel[j](new register j).
/// `choose` returns the relabelling applied to the freshly written value.
template <typename Choose>
Program relabel_program(Program const& p, Choose&& choose,
                        std::vector<std::vector<Symbol>>& rho) {
  Context const& ctx = p.context();
  std::size_t const size = ctx.table_size();
  rho.assign(ctx.n(), std::vector<Symbol>(ctx.q()));
  for (auto& r : rho) {
    std::iota(r.begin(), r.end(), Symbol{0});
  }
  Program out(ctx, p.memory_cells(), p.policy());
  auto const& steps = p.steps();
  for (std::size_t k = 0; k < steps.size(); ++k) {
    unsigned const t = steps[k].target();
    CoordinateTable raw(size);
    for (StateIndex y = 0; y < size; ++y) {
      StateIndex original = 0;
      for (unsigned j = 0; j < ctx.n(); ++j) {
        original += StateIndex{rho[j][ctx.digit(y, j)]} * ctx.power(j);
      }
      raw[y] = steps[k].value(original);
    }
    std::vector<Symbol> const tau = choose(k, t, raw);
    for (auto& v : raw) {
      v = tau[v];
    }
    rho[t] = invert(tau);
    out.push_back(Instruction::from_table(ctx, t, std::move(raw)));
  }
  return out;
}

std::vector<std::size_t> final_updates(Program const& p) {
  std::vector<std::size_t> last(p.context().n(), ~std::size_t{0});
  for (std::size_t k = 0; k < p.steps().size(); ++k) {
    last[p.steps()[k].target()] = k;
  }
  return last;
}

}  // namespace

bool is_ordered(Context const& ctx, CoordinateTable const& table) {
  auto const order = symbols_by_first_occurrence(ctx, table);
  return !order.empty() && is_identity_perm(order);
}

OrderedDecomposition ordered_decompose(Transformation const& f) {
  Context const& ctx = f.context();
  std::vector<CoordinateTable> base_coords;
  std::vector<std::vector<Symbol>> scalars;
  unsigned nearly_trivial = 0;
  for (unsigned i = 0; i < ctx.n(); ++i) {
    CoordinateTable fi = f.coordinate(i);
    std::vector<StateIndex> values(fi.begin(), fi.end());
    require(is_balanced(ctx, values, 1), ErrorKind::invalid_input,
            "every coordinate function must be balanced");
    auto const order = symbols_by_first_occurrence(ctx, fi);
    auto const rank = invert(order);
    CoordinateTable base(fi.size());
    bool base_trivial = true;
    bool trivial = true;
    for (StateIndex x = 0; x < fi.size(); ++x) {
      base[x] = rank[fi[x]];
      base_trivial = base_trivial && base[x] == ctx.digit(x, i);
      trivial = trivial && fi[x] == ctx.digit(x, i);
    }
    nearly_trivial += (base_trivial && !trivial) ? 1 : 0;
    base_coords.push_back(std::move(base));
    scalars.push_back(order);
  }
  return OrderedDecomposition{Transformation::from_coordinates(ctx, base_coords),
                              std::move(scalars), nearly_trivial};
}

Program ordered_program_from(Program const& program_for_f, OrderedDecomposition const& dec) {
  require(program_for_f.memory_cells() == 0 &&
              program_for_f.context() == dec.base.context(),
          ErrorKind::invalid_input, "program does not match the decomposition");
  auto const last = final_updates(program_for_f);
  std::vector<std::vector<Symbol>> rho;
  return relabel_program(
      program_for_f,
      [&](std::size_t k, unsigned t, CoordinateTable const&) {
        std::vector<Symbol> tau(dec.scalars[t].size());
        std::iota(tau.begin(), tau.end(), Symbol{0});
        return k == last[t] ? invert(dec.scalars[t]) : tau;
      },
      rho);
}

Program program_from_ordered(Program const& program_for_base, OrderedDecomposition const& dec) {
  require(program_for_base.memory_cells() == 0 &&
              program_for_base.context() == dec.base.context(),
          ErrorKind::invalid_input, "program does not match the decomposition");
  Context const& ctx = program_for_base.context();
  auto const last = final_updates(program_for_base);
  std::vector<std::vector<Symbol>> rho;
  Program out = relabel_program(
      program_for_base,
      [&](std::size_t k, unsigned t, CoordinateTable const&) {
        std::vector<Symbol> tau(dec.scalars[t].size());
        std::iota(tau.begin(), tau.end(), Symbol{0});
        return k == last[t] ? dec.scalars[t] : tau;
      },
      rho);
  for (unsigned i = 0; i < ctx.n(); ++i) {
    if (last[i] == ~std::size_t{0} && !is_identity_perm(dec.scalars[i])) {
      auto const& sigma = dec.scalars[i];
      out.push_back(Instruction::from_function(
          ctx, i, [&](StateIndex s) { return sigma[ctx.digit(s, i)]; }));
    }
  }
  return out;
}

Program with_ordered_instructions(Program const& p) {
  require(p.memory_cells() == 0, ErrorKind::invalid_input, "memoryless programs only");
  for (auto const& step : p.steps()) {
    require(step.is_permutation_instruction(), ErrorKind::invalid_input,
            "every step must be a permutation instruction");
  }
  Context const& ctx = p.context();
  auto const last = final_updates(p);
  auto const prefixes = prefix_transformations(p);
  std::vector<std::vector<Symbol>> rho;
  // Last writes are ordered as functions of the input so the outputs come out
  // ordered; earlier writes are ordered as functions of the registers.
  return relabel_program(
      p,
      [&](std::size_t k, unsigned t, CoordinateTable const& raw) {
        if (k != last[t]) {
          return invert(symbols_by_first_occurrence(ctx, raw));
        }
        return invert(symbols_by_first_occurrence(ctx, prefixes[k].coordinate(t)));
      },
      rho);
}

}  // namespace mlc
