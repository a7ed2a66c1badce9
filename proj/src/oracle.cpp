#include "mlc/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <unordered_map>

#include "mlc/memory.hpp"
#include "mlc/synth_general.hpp"

namespace mlc {

namespace {

constexpr std::uint64_t kMaxTablesPerCoordinate = std::uint64_t{1} << 20;
constexpr std::uint64_t kMaxPermutations = 1'000'000;
constexpr StateIndex kUnset = std::numeric_limits<StateIndex>::max();

/// min(base^exp, cap + 1).
std::uint64_t capped_power(std::uint64_t base, std::uint64_t exp, std::uint64_t cap) {
  std::uint64_t out = 1;
  for (std::uint64_t i = 0; i < exp; ++i) {
    if (out > cap / std::max<std::uint64_t>(base, 1)) {
      return cap + 1;
    }
    out *= base;
  }
  return out;
}

std::uint64_t capped_factorial(std::uint64_t k, std::uint64_t cap) {
  std::uint64_t out = 1;
  for (std::uint64_t i = 2; i <= k; ++i) {
    if (out > cap / i) {
      return cap + 1;
    }
    out *= i;
  }
  return out;
}

/// Images packed at a fixed bit width per entry.
class MapCodec {
public:
  explicit MapCodec(Context const& ctx)
      : size_(ctx.size()),
        bits_(std::max(1, static_cast<int>(std::bit_width(ctx.size() - 1)))) {
    require(bits_ * size_ <= 64, ErrorKind::infeasible, "state space too large for exhaustive search");
  }

  std::uint64_t encode(std::span<StateIndex const> image) const {
    std::uint64_t key = 0;
    for (StateIndex s = 0; s < size_; ++s) {
      key |= image[s] << (bits_ * s);
    }
    return key;
  }

  void decode(std::uint64_t key, std::vector<StateIndex>& out) const {
    out.resize(size_);
    std::uint64_t const mask = (std::uint64_t{1} << bits_) - 1;
    for (StateIndex s = 0; s < size_; ++s) {
      out[s] = (key >> (bits_ * s)) & mask;
    }
  }

private:
  StateIndex size_;
  unsigned bits_;
};

std::uint64_t tables_per_coordinate(Context const& ctx, InstructionKind kind) {
  if (kind == InstructionKind::all) {
    return capped_power(ctx.q(), ctx.size(), kMaxTablesPerCoordinate);
  }
  std::uint64_t const perms = capped_factorial(ctx.q(), kMaxTablesPerCoordinate);
  return capped_power(perms, ctx.size() / ctx.q(), kMaxTablesPerCoordinate);
}

/// Non-identity instructions, coordinate by coordinate.
std::vector<Instruction> nontrivial_instructions(Context const& ctx, InstructionKind kind) {
  std::uint64_t const per = tables_per_coordinate(ctx, kind);
  require(per <= kMaxTablesPerCoordinate, ErrorKind::infeasible, "too many instructions to enumerate");
  unsigned const q = ctx.q();
  std::vector<std::vector<Symbol>> perms;
  if (kind == InstructionKind::permutation) {
    std::vector<Symbol> p(q);
    for (unsigned k = 0; k < q; ++k) {
      p[k] = k;
    }
    do {
      perms.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
  }
  std::vector<Instruction> out;
  CoordinateTable table(ctx.table_size());
  for (unsigned i = 0; i < ctx.n(); ++i) {
    for (std::uint64_t code = 0; code < per; ++code) {
      std::uint64_t rest = code;
      if (kind == InstructionKind::all) {
        for (StateIndex s = 0; s < ctx.size(); ++s) {
          table[s] = static_cast<Symbol>(rest % q);
          rest /= q;
        }
      } else {
        // One permutation of the target digit per value of the other digits.
        std::vector<std::size_t> choice(ctx.size() / q);
        for (auto& c : choice) {
          c = rest % perms.size();
          rest /= perms.size();
        }
        for (StateIndex s = 0; s < ctx.size(); ++s) {
          StateIndex const other = s % ctx.power(i) + (s / ctx.power(i + 1)) * ctx.power(i);
          table[s] = perms[choice[other]][ctx.digit(s, i)];
        }
      }
      bool identity = true;
      for (StateIndex s = 0; s < ctx.size() && identity; ++s) {
        identity = table[s] == ctx.digit(s, i);
      }
      if (!identity) {
        out.push_back(Instruction::from_table(ctx, i, table));
      }
    }
  }
  return out;
}

bool dominates_coordinate(std::span<StateIndex const> p, CoordinateTable const& target,
                          std::vector<StateIndex>& seen) {
  std::fill(seen.begin(), seen.end(), kUnset);
  for (StateIndex s = 0; s < p.size(); ++s) {
    StateIndex& slot = seen[p[s]];
    if (slot == kUnset) {
      slot = target[s];
    } else if (slot != target[s]) {
      return false;
    }
  }
  return true;
}

}  // namespace

struct ReachTable::Impl {
  struct Node {
    std::uint64_t parent;
    std::uint32_t generator;
    std::uint32_t depth;
  };
  static constexpr std::uint32_t kRoot = std::numeric_limits<std::uint32_t>::max();

  Context ctx;
  InstructionKind kind;
  MapCodec codec;
  std::vector<Instruction> generators;
  std::vector<std::vector<StateIndex>> apply;
  std::vector<StateIndex> labels;
  SearchLimits limits;
  std::unordered_map<std::uint64_t, Node> nodes;
  std::vector<std::uint64_t> frontier;
  /// Deepest layer whose every member is stored.
  unsigned complete_depth = 0;
  bool exhausted = false;
  mutable std::vector<StateIndex> scratch;

  Impl(Context c, InstructionKind k, std::vector<StateIndex> l, SearchLimits lim)
      : ctx(std::move(c)), kind(k), codec(ctx), labels(std::move(l)), limits(lim) {
    require(labels.size() == ctx.size(), ErrorKind::invalid_input, "one label per state");
    generators = nontrivial_instructions(ctx, kind);
    for (auto const& g : generators) {
      std::vector<StateIndex> a(ctx.size());
      for (StateIndex s = 0; s < ctx.size(); ++s) {
        a[s] = g.apply(s);
      }
      apply.push_back(std::move(a));
    }
    std::vector<StateIndex> id(ctx.size());
    for (StateIndex s = 0; s < ctx.size(); ++s) {
      id[s] = s;
    }
    std::uint64_t const root = codec.encode(id);
    nodes.emplace(root, Node{root, kRoot, 0});
    frontier.push_back(root);
    scratch.resize(ctx.size());
  }

  bool admissible(std::span<StateIndex const> image) const {
    std::fill(scratch.begin(), scratch.end(), kUnset);
    for (StateIndex s = 0; s < image.size(); ++s) {
      StateIndex& slot = scratch[image[s]];
      if (slot == kUnset) {
        slot = labels[s];
      } else if (slot != labels[s]) {
        return false;
      }
    }
    return true;
  }

  bool can_expand() const {
    return !exhausted && complete_depth < limits.max_depth && nodes.size() < limits.max_states;
  }

  /// Adds the next layer. Stops early when `goal` accepts a new map and returns its key.
  std::optional<std::uint64_t> expand(std::function<bool(std::span<StateIndex const>)> const& goal) {
    std::vector<std::uint64_t> next_frontier;
    std::vector<StateIndex> image;
    std::vector<StateIndex> next(ctx.size());
    unsigned const depth = complete_depth + 1;
    for (std::uint64_t key : frontier) {
      codec.decode(key, image);
      for (std::uint32_t g = 0; g < generators.size(); ++g) {
        auto const& a = apply[g];
        for (StateIndex s = 0; s < ctx.size(); ++s) {
          next[s] = a[image[s]];
        }
        if (!admissible(next)) {
          continue;
        }
        std::uint64_t const nk = codec.encode(next);
        if (!nodes.emplace(nk, Node{key, g, depth}).second) {
          continue;
        }
        next_frontier.push_back(nk);
        if (goal && goal(next)) {
          return nk;
        }
        if (nodes.size() >= limits.max_states) {
          return std::nullopt;  // layer left partial
        }
      }
    }
    frontier = std::move(next_frontier);
    complete_depth = depth;
    exhausted = frontier.empty();
    return std::nullopt;
  }

  void build() {
    while (can_expand()) {
      expand({});
    }
  }

  std::optional<unsigned> depth_of(std::span<StateIndex const> image) const {
    auto it = nodes.find(codec.encode(image));
    if (it == nodes.end()) {
      return std::nullopt;
    }
    return it->second.depth;
  }

  Program path(std::uint64_t key) const {
    std::vector<std::uint32_t> word;
    for (;;) {
      auto const& node = nodes.at(key);
      if (node.generator == kRoot) {
        break;
      }
      word.push_back(node.generator);
      key = node.parent;
    }
    Program out(ctx);
    for (auto it = word.rbegin(); it != word.rend(); ++it) {
      out.push_back(generators[*it]);
    }
    return out;
  }

  /// A stored map at `depth` one instruction before target, tried coordinate by
  /// coordinate over every replacement table. Returns (predecessor, coordinate).
  std::optional<std::pair<std::uint64_t, unsigned>> predecessor_at(
      std::span<StateIndex const> target, unsigned depth) const {
    if (capped_power(ctx.q(), ctx.size(), kMaxTablesPerCoordinate) > (std::uint64_t{1} << 16)) {
      return std::nullopt;
    }
    std::uint64_t const tables = capped_power(ctx.q(), ctx.size(), kMaxTablesPerCoordinate);
    std::vector<StateIndex> p(target.begin(), target.end());
    std::vector<StateIndex> seen(ctx.size());
    for (unsigned i = 0; i < ctx.n(); ++i) {
      CoordinateTable goal_i(ctx.size());
      for (StateIndex s = 0; s < ctx.size(); ++s) {
        goal_i[s] = ctx.digit(target[s], i);
      }
      for (std::uint64_t code = 0; code < tables; ++code) {
        std::uint64_t rest = code;
        for (StateIndex s = 0; s < ctx.size(); ++s) {
          p[s] = ctx.with_digit(target[s], i, static_cast<Symbol>(rest % ctx.q()));
          rest /= ctx.q();
        }
        auto it = nodes.find(codec.encode(p));
        if (it == nodes.end() || it->second.depth != depth) {
          continue;
        }
        if (dominates_coordinate(p, goal_i, seen)) {
          return std::pair{it->first, i};
        }
      }
    }
    return std::nullopt;
  }
};

ReachTable::ReachTable(Context ctx, InstructionKind kind, std::vector<StateIndex> labels,
                       SearchLimits limits) {
  auto impl = std::make_shared<Impl>(std::move(ctx), kind, std::move(labels), limits);
  impl->build();
  impl_ = std::move(impl);
}

Context const& ReachTable::context() const { return impl_->ctx; }
bool ReachTable::exhausted() const { return impl_->exhausted; }
unsigned ReachTable::depth() const { return impl_->complete_depth; }
std::size_t ReachTable::size() const { return impl_->nodes.size(); }

std::optional<unsigned> ReachTable::distance(Transformation const& g) const {
  require(g.context() == impl_->ctx, ErrorKind::invalid_input, "context mismatch");
  return impl_->depth_of(g.image());
}

std::optional<unsigned> ReachTable::distance_with_final_step(Transformation const& g) const {
  if (auto d = distance(g)) {
    return d;
  }
  if (!impl_->exhausted && impl_->predecessor_at(g.image(), impl_->complete_depth)) {
    return impl_->complete_depth + 1;
  }
  return std::nullopt;
}

std::optional<unsigned> ReachTable::distance_to_outputs(Transformation const& f) const {
  Context const& wide = impl_->ctx;
  StateIndex const small = f.context().size();
  require(f.context().q() == wide.q() && f.context().n() <= wide.n(), ErrorKind::invalid_input,
          "target must act on the leading registers");
  std::optional<unsigned> best;
  std::vector<StateIndex> image;
  for (auto const& [key, node] : impl_->nodes) {
    if (best && node.depth >= *best) {
      continue;
    }
    impl_->codec.decode(key, image);
    bool ok = true;
    for (StateIndex s = 0; s < wide.size() && ok; ++s) {
      ok = image[s] % small == f(s % small);
    }
    if (ok) {
      best = node.depth;
    }
  }
  return best;
}

Program ReachTable::path_to(Transformation const& g) const {
  auto key = impl_->codec.encode(g.image());
  require(impl_->nodes.count(key) == 1, ErrorKind::invalid_input, "map not in the table");
  return impl_->path(key);
}

Histogram ReachTable::histogram() const {
  Histogram h;
  for (auto const& [key, node] : impl_->nodes) {
    ++h[node.depth];
  }
  return h;
}

std::vector<Transformation> ReachTable::at_depth(unsigned d) const {
  std::vector<std::uint64_t> keys;
  for (auto const& [key, node] : impl_->nodes) {
    if (node.depth == d) {
      keys.push_back(key);
    }
  }
  std::sort(keys.begin(), keys.end());
  std::vector<Transformation> out;
  std::vector<StateIndex> image;
  for (auto key : keys) {
    impl_->codec.decode(key, image);
    out.emplace_back(impl_->ctx, image);
  }
  return out;
}

// ------------------------------------------------------------------ counting

BigInt count_instructions(unsigned q, unsigned n, InstructionKind kind) {
  require(q >= 2 && n >= 1, ErrorKind::invalid_input, "need q >= 2 and n >= 1");
  BigInt per = 1;
  if (kind == InstructionKind::all) {
    BigInt states = boost::multiprecision::pow(BigInt(q), n);
    require(states <= 1'000'000, ErrorKind::infeasible, "count too large to represent");
    per = boost::multiprecision::pow(BigInt(q), states.convert_to<unsigned>());
  } else {
    BigInt fact = 1;
    for (unsigned k = 2; k <= q; ++k) {
      fact *= k;
    }
    BigInt rows = boost::multiprecision::pow(BigInt(q), n - 1);
    require(rows <= 1'000'000, ErrorKind::infeasible, "count too large to represent");
    per = boost::multiprecision::pow(fact, rows.convert_to<unsigned>());
  }
  return per * n - (n - 1);
}

std::vector<Transformation> enumerate_instructions(Context const& ctx, InstructionKind kind) {
  std::vector<Transformation> out{Transformation::identity(ctx)};
  for (auto const& instr : nontrivial_instructions(ctx, kind)) {
    out.push_back(instr.transformation());
  }
  return out;
}

// ---------------------------------------------------------------- complexity

namespace {

ComplexityReport bracket_only(Program const& fallback, unsigned lower, std::string method,
                              std::size_t explored) {
  ComplexityReport r;
  r.lower = std::min<unsigned>(lower, static_cast<unsigned>(fallback.length()));
  r.upper = static_cast<unsigned>(fallback.length());
  if (r.lower == r.upper) {
    r.exact = r.upper;
  }
  r.certificate = fallback;
  r.method = std::move(method);
  r.explored = explored;
  return r;
}

ComplexityReport found(Program certificate, std::string method, std::size_t explored) {
  ComplexityReport r;
  r.exact = static_cast<unsigned>(certificate.length());
  r.lower = *r.exact;
  r.upper = *r.exact;
  r.certificate = std::move(certificate);
  r.method = std::move(method);
  r.explored = explored;
  return r;
}

}  // namespace

ComplexityReport exact_complexity(Transformation const& f, SearchLimits limits) {
  Context const& ctx = f.context();
  if (f.is_identity()) {
    return found(Program(ctx), "identity", 0);
  }
  bool const perm = f.is_permutation();
  Program const fallback = perm ? synth_permutation(f) : synth_transformation(f);
  InstructionKind const kind = perm ? InstructionKind::permutation : InstructionKind::all;

  std::string method = "pruned-search";
  if (perm && capped_factorial(ctx.size(), kMaxPermutations) <= kMaxPermutations) {
    method = "permutation-bfs";
  } else if (!perm && capped_power(ctx.size(), ctx.size(), kMaxTablesPerCoordinate) <=
                          kMaxTablesPerCoordinate) {
    method = "monoid-bfs";
  }
  if (tables_per_coordinate(ctx, kind) > kMaxTablesPerCoordinate ||
      std::bit_width(ctx.size() - 1) * ctx.size() > 64) {
    return bracket_only(fallback, 1, "synthesis-only", 0);
  }

  ReachTable::Impl search(ctx, kind, std::vector<StateIndex>(f.image().begin(), f.image().end()),
                          limits);
  std::vector<StateIndex> const target(f.image().begin(), f.image().end());
  auto goal = [&](std::span<StateIndex const> image) {
    return std::equal(image.begin(), image.end(), target.begin());
  };
  for (;;) {
    // One instruction past the current layer, without materializing the next one.
    if (auto pred = search.predecessor_at(target, search.complete_depth)) {
      Program p = search.path(pred->first);
      std::vector<StateIndex> image;
      search.codec.decode(pred->first, image);
      Transformation const before(ctx, image);
      p.push_back(Instruction::from_table(ctx, pred->second,
                                          express_through(before, f.coordinate(pred->second),
                                                          pred->second)));
      return found(std::move(p), method, search.nodes.size());
    }
    if (!search.can_expand()) {
      return bracket_only(fallback, search.complete_depth + 2, method, search.nodes.size());
    }
    if (auto key = search.expand(goal)) {
      return found(search.path(*key), method, search.nodes.size());
    }
    if (search.exhausted) {
      // Every admissible map was reached without f: cannot happen for a valid f.
      return bracket_only(fallback, search.complete_depth + 1, method, search.nodes.size());
    }
  }
}

ComplexityReport memory_complexity(Transformation const& f, unsigned m, SearchLimits limits) {
  if (m == 0) {
    return exact_complexity(f, limits);
  }
  Context const& small = f.context();
  Context const wide = small.widened(m);
  Program const fallback = m + 1 == small.n() ? synth_any_mem(f) : widen(synth_transformation(f), m);
  if (f.is_identity()) {
    return found(Program(wide, m), "identity", 0);
  }
  if (tables_per_coordinate(wide, InstructionKind::all) > kMaxTablesPerCoordinate ||
      std::bit_width(wide.size() - 1) * wide.size() > 64) {
    return bracket_only(fallback, 1, "synthesis-only", 0);
  }
  std::vector<StateIndex> labels(wide.size());
  for (StateIndex s = 0; s < wide.size(); ++s) {
    labels[s] = f(s % small.size());
  }
  ReachTable::Impl search(wide, InstructionKind::all, labels, limits);
  auto goal = [&](std::span<StateIndex const> image) {
    for (StateIndex s = 0; s < image.size(); ++s) {
      if (image[s] % small.size() != labels[s]) {
        return false;
      }
    }
    return true;
  };
  auto as_memory = [&](Program const& p) {
    Program out(wide, m);
    for (auto const& step : p.steps()) {
      out.push_back(step);
    }
    return out;
  };
  while (search.can_expand()) {
    if (auto key = search.expand(goal)) {
      return found(as_memory(search.path(*key)), "pruned-search", search.nodes.size());
    }
  }
  return bracket_only(fallback, search.complete_depth + 1, "pruned-search", search.nodes.size());
}

unsigned word_distance(Transformation const& f, Transformation const& g, SearchLimits limits) {
  require(f.is_permutation() && g.is_permutation(), ErrorKind::invalid_input,
          "word distance is defined on permutations");
  auto const r = exact_complexity(compose(f, g.inverse()), limits);
  require(r.exact.has_value(), ErrorKind::infeasible, "distance not determined within limits");
  return *r.exact;
}

Histogram census(unsigned q, unsigned n, bool perm_only) {
  Context const ctx(q, n);
  SearchLimits const unlimited{std::numeric_limits<unsigned>::max(),
                               std::numeric_limits<std::size_t>::max()};
  if (perm_only) {
    require(capped_factorial(ctx.size(), kMaxPermutations) <= kMaxPermutations,
            ErrorKind::infeasible, "more than 10^6 permutations");
    std::vector<StateIndex> distinct(ctx.size());
    for (StateIndex s = 0; s < ctx.size(); ++s) {
      distinct[s] = s;
    }
    return ReachTable(ctx, InstructionKind::permutation, distinct, unlimited).histogram();
  }
  require(capped_power(ctx.size(), ctx.size(), kMaxTablesPerCoordinate) <= kMaxTablesPerCoordinate,
          ErrorKind::infeasible, "more than 2^20 transformations");
  return ReachTable(ctx, InstructionKind::all, std::vector<StateIndex>(ctx.size(), 0), unlimited)
      .histogram();
}

CountingBound counting_bound(unsigned q, unsigned n) {
  require(q >= 2 && n >= 2, ErrorKind::invalid_input, "need q >= 2 and n >= 2");
  double const lq = std::log(static_cast<double>(q));
  double const qn = std::pow(static_cast<double>(q), static_cast<double>(n));
  CountingBound out;
  out.b = (n * lq - 1.0) /
          (std::lgamma(static_cast<double>(q) + 1.0) / q + std::log(static_cast<double>(n)) / qn);
  out.proportion_bound = 1.0 / std::sqrt(2.0 * std::numbers::pi * qn);
  out.threshold = static_cast<unsigned>(std::floor(out.b)) + 1;
  return out;
}

Histogram linear_census(unsigned q, unsigned n) {
  Field const field(q);
  // |GL(n,q)| = prod (q^n - q^i).
  double order = 1;
  for (unsigned i = 0; i < n; ++i) {
    order *= std::pow(q, n) - std::pow(q, i);
  }
  require(order <= 1e6, ErrorKind::infeasible, "more than 10^6 matrices");
  Histogram h;
  for (auto const& [key, d] : linear_distances(field, n)) {
    ++h[d];
  }
  return h;
}

unsigned histogram_max(Histogram const& h) { return h.empty() ? 0 : h.rbegin()->first; }

}  // namespace mlc
