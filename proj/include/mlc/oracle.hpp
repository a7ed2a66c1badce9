#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mlc/core.hpp"
#include "mlc/linear.hpp"

namespace mlc {

enum class InstructionKind { permutation, all };

/// Distinct instructions, identity counted once: n (q!)^(q^(n-1)) - (n-1) for
/// permutations, n q^(q^n) - (n-1) for all.
BigInt count_instructions(unsigned q, unsigned n, InstructionKind kind);

/// Distinct instruction transformations, identity first. Refuses more than 2^20 per coordinate.
std::vector<Transformation> enumerate_instructions(Context const& ctx, InstructionKind kind);

struct SearchLimits {
  unsigned max_depth = 12;
  std::size_t max_states = 20'000'000;
};

using Histogram = std::map<unsigned, std::uint64_t>;

/// Breadth-first distances from the identity under single-coordinate
/// instructions. Only maps g with g(s) = g(t) => label(s) = label(t) are kept,
/// which is sound when searching for a target with that kernel.
class ReachTable {
public:
  ReachTable(Context ctx, InstructionKind kind, std::vector<StateIndex> labels, SearchLimits limits);

  Context const& context() const;
  /// All reachable maps were expanded (not cut by the limits).
  bool exhausted() const;
  /// Deepest layer stored.
  unsigned depth() const;
  std::size_t size() const;

  std::optional<unsigned> distance(Transformation const& g) const;
  /// L(g) when g is stored or one instruction past the deepest complete layer.
  std::optional<unsigned> distance_with_final_step(Transformation const& g) const;
  /// Smallest distance of a stored map whose first n coordinates equal f(x),
  /// whatever the remaining registers hold; f acts on the first n coordinates.
  std::optional<unsigned> distance_to_outputs(Transformation const& f) const;
  /// Shortest program reaching g; throws invalid_input when g is not stored.
  Program path_to(Transformation const& g) const;
  Histogram histogram() const;
  std::vector<Transformation> at_depth(unsigned d) const;

  struct Impl;

private:
  std::shared_ptr<Impl const> impl_;
};

struct ComplexityReport {
  std::optional<unsigned> exact;
  unsigned lower = 0;
  unsigned upper = 0;
  /// Verifies and has length `upper`.
  std::optional<Program> certificate;
  std::string method;
  std::size_t explored = 0;
};

/// L(f). Permutation BFS when |Sym(A^n)| <= 10^6, full monoid BFS for q^(n q^n) <= 2^20,
/// otherwise dominance-pruned layered search up to the limits.
ComplexityReport exact_complexity(Transformation const& f, SearchLimits limits = {});

/// L(f|m): shortest program on A^(n+m) whose first n outputs equal f for every
/// scratch initialization.
ComplexityReport memory_complexity(Transformation const& f, unsigned m, SearchLimits limits = {});

/// L(f o g^-1) for permutations.
unsigned word_distance(Transformation const& f, Transformation const& g, SearchLimits limits = {});

/// Histogram of L over Sym(A^n) (perm_only) or all of A^n -> A^n.
/// Throws infeasible beyond 10^6 permutations or 2^20 transformations.
Histogram census(unsigned q, unsigned n, bool perm_only);

struct CountingBound {
  double b = 0;
  double proportion_bound = 0;
  /// floor(b) + 1.
  unsigned threshold = 0;
};

/// b = (n ln q - 1) / (ln(q!)/q + ln(n)/q^n), proportion bound (2 pi q^n)^(-1/2).
CountingBound counting_bound(unsigned q, unsigned n);

/// Histogram of L' over GL(n,q). Throws infeasible beyond 10^6 matrices.
Histogram linear_census(unsigned q, unsigned n);

unsigned histogram_max(Histogram const& h);

}  // namespace mlc
