#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mlc/core.hpp"

namespace mlc {

// ------------------------------------------------------------ transpositions

/// The instruction swapping two states that differ in exactly one coordinate.
Instruction transposition_instruction(Context const& ctx, StateIndex u, StateIndex v);

/// Hamming distance between two states.
unsigned hamming_distance(Context const& ctx, StateIndex a, StateIndex b);

/// Program of exactly 2d-1 permutation instructions for the transposition (a, b).
Program synth_transposition(Context const& ctx, StateIndex a, StateIndex b);

// ----------------------------------------------------- generator factorization

/// One element of the two-kind generating set of the full transformation monoid:
/// a transposition (u, v) of states adjacent in one digit, or the fixed
/// assignment e^0 -> e^1.
struct Generator {
  enum class Kind { transposition, assignment };
  Kind kind = Kind::transposition;
  StateIndex u = 0;
  StateIndex v = 0;

  Instruction instruction(Context const& ctx) const;
  bool operator==(Generator const&) const = default;
};

/// Word over the generators, applied left to right, composing to f.
std::vector<Generator> generator_factorization(Transformation const& f);

/// The generator word as a program. Runs are kept so each step stays a generator.
Program synth_generator_factorization(Transformation const& f);

// ------------------------------------------------------ coordinate completion

/// Given balanced f, g : B x C -> B (values in [0, b_count), inputs indexed
/// 0..|B||C|-1), returns h : B x C -> C with (f, h) and (g, h) both bijective.
std::vector<StateIndex> complete_permutation_pair(std::span<StateIndex const> f,
                                                  std::span<StateIndex const> g,
                                                  StateIndex b_count);

/// Helper coordinate functions h_1..h_{n-1} such that (h_1..h_k, x_{k+1}..x_n)
/// and (h_1..h_k, f_{k+1}..f_n) are permutations for every k.
std::vector<CoordinateTable> permutation_helpers(Transformation const& f);

/// At most 2n-1 permutation instructions; schedule y_1..y_{n-1}, y_n, y_{n-1}..y_1.
Program synth_permutation(Transformation const& f);

// ------------------------------------------------------- proper partitions

/// Lexicographically first q-subset of `residues` summing to 0 mod q.
std::vector<std::size_t> egz_subset(std::span<unsigned const> residues, unsigned q);

class Partition {
public:
  Partition(Context ctx, std::vector<StateIndex> counts);

  Context const& context() const noexcept { return ctx_; }
  std::vector<StateIndex> const& counts() const noexcept { return counts_; }
  StateIndex operator[](StateIndex a) const { return counts_[a]; }

  /// Every level-i block sums to a multiple of q^i.
  bool is_proper() const;

  bool operator==(Partition const&) const = default;

private:
  Context ctx_;
  std::vector<StateIndex> counts_;
};

struct ProperSort {
  Partition sorted;
  /// order(p) is the original state placed at position p: sorted = counts o order.
  Transformation order;
};

ProperSort sort_properly(Partition const& lambda);

/// Interval map sending the a-th run of |lambda_a| consecutive states to a.
Transformation lambda_transformation(Partition const& lambda);

/// True iff states agreeing on coordinates i..n always have images agreeing there.
bool preserves_suffix_blocks(Transformation const& f);

/// At most 4n-3 instructions for any transformation.
Program synth_transformation(Transformation const& f);

// ---------------------------------------------------------- ordered functions

/// Fiber minima appear in symbol order. Requires every symbol to be hit.
bool is_ordered(Context const& ctx, CoordinateTable const& table);

struct OrderedDecomposition {
  Transformation base;
  /// scalars[i][r]: symbol that ordered value r of coordinate i stands for.
  std::vector<std::vector<Symbol>> scalars;
  /// Coordinates with base_i = x_i but f_i != x_i.
  unsigned nearly_trivial = 0;
};

OrderedDecomposition ordered_decompose(Transformation const& f);

/// Program for f -> program for the ordered base, same length.
Program ordered_program_from(Program const& program_for_f, OrderedDecomposition const& dec);

/// Program for the ordered base -> program for f, at most nearly_trivial steps longer.
Program program_from_ordered(Program const& program_for_base, OrderedDecomposition const& dec);

/// Rewrites a program of permutation instructions so every step is ordered.
Program with_ordered_instructions(Program const& p);

}  // namespace mlc
