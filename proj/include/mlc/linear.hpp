#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "mlc/core.hpp"
#include "mlc/gf.hpp"

namespace mlc {

using BigInt = boost::multiprecision::cpp_int;
using RowVector = std::vector<Element>;

/// y_target <- sum_j coeffs[j] y_j over GF(q); coeffs spans outputs and scratch.
struct LinearInstruction {
  unsigned target = 0;
  RowVector coeffs;

  /// a_target != 0.
  bool is_invertible() const { return coeffs.at(target) != 0; }
  bool operator==(LinearInstruction const&) const = default;
};

/// Linear straight-line program over n outputs and m scratch registers.
struct LinearProgram {
  Field field;
  unsigned outputs = 0;
  unsigned memory_cells = 0;
  std::vector<LinearInstruction> steps;

  unsigned width() const noexcept { return outputs + memory_cells; }
  std::size_t length() const noexcept { return steps.size(); }
};

/// S(i, a): identity with row i replaced by a.
MatrixGF instruction_matrix(Field const& field, LinearInstruction const& instr);

/// Register-file map of the whole program: S_L ... S_1.
MatrixGF linear_program_matrix(LinearProgram const& p);

/// Outputs equal M x for every scratch initialization.
bool verify_linear(LinearProgram const& p, MatrixGF const& m);

/// x -> M x on A^n with digits as field elements.
Transformation linear_transformation(MatrixGF const& m);

/// Core program computing the same map: linear forms for prime q, tables otherwise.
Program to_program(LinearProgram const& p);

/// Lexicographically smallest h (first entry most significant) making both
/// [helpers; h; units[k+1..]] and [helpers; h; rows of M from k+1] nonsingular,
/// where k = helpers.size().
RowVector find_helper_row(MatrixGF const& m, std::vector<RowVector> const& helpers);

/// At most 2n-1 invertible instructions with every running product nonsingular.
/// Throws unsupported when M is singular.
LinearProgram synth_linear(MatrixGF const& m);

/// (q-1)^n q^(n(n-1)).
BigInt count_increasing(unsigned q, unsigned n);

/// Members of GL(n,q) reachable by updating rows 1..n once each, in order, with
/// every intermediate matrix nonsingular. Exhaustive over all q^(n^2) matrices.
std::uint64_t count_increasing_brute(Field const& field, unsigned n);

struct ScaledDecomposition {
  MatrixGF scaled;
  /// Row i of M is scalars[i] times row i of the scaled matrix.
  RowVector scalars;
  /// Rows with f_i != e_i whose scaled row is e_i.
  unsigned trivial_scaled_rows = 0;
};

/// Throws invalid_input on a zero row.
ScaledDecomposition scale_decompose(MatrixGF const& m);

/// Program for M (same length) turned into a program for the scaled matrix.
LinearProgram scaled_program_from(LinearProgram const& p, ScaledDecomposition const& d);

/// Program for the scaled matrix turned into one for M, at most
/// trivial_scaled_rows steps longer.
LinearProgram program_from_scaled(LinearProgram const& p, ScaledDecomposition const& d);

/// Distinct matrices S(i, v) with v_i != 0, identity included once.
std::vector<MatrixGF> linear_generators(Field const& field, unsigned n);

/// n q^(n-1) (q-1) - n + 1.
BigInt linear_generator_count(unsigned q, unsigned n);

/// Entries read as base-q digits, row-major. Requires q^(n^2) < 2^64.
std::uint64_t matrix_key(MatrixGF const& m);
MatrixGF matrix_from_key(Field const& field, unsigned n, std::uint64_t key);

/// Exact linear complexity of every member of GL(n,q), by BFS from the identity.
std::unordered_map<std::uint64_t, unsigned> linear_distances(Field const& field, unsigned n);

/// Scratch registers used by synth_linear_memory: n/2 for even n, (n+1)/2 + 1 for odd n.
unsigned linear_memory_cells(unsigned n);

/// At most 3m instructions for n = 2m with m cells; odd n goes through diag(M, 1).
/// Throws unsupported when M is singular.
LinearProgram synth_linear_memory(MatrixGF const& m);

/// Uniform member of GL(n,q) by rejection sampling.
template <class Rng>
MatrixGF random_nonsingular(Field const& field, unsigned n, Rng& rng) {
  for (;;) {
    MatrixGF m(field, n, n);
    for (unsigned r = 0; r < n; ++r) {
      for (unsigned c = 0; c < n; ++c) {
        m.at(r, c) = static_cast<Element>(rng() % field.q());
      }
    }
    if (m.is_nonsingular()) {
      return m;
    }
  }
}

}  // namespace mlc
