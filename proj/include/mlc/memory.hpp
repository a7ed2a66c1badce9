#pragma once

#include <vector>

#include "mlc/core.hpp"
#include "mlc/varmap.hpp"

namespace mlc {

/// h^e on A^(n+m): (x, z) -> (f(x), e).
Transformation embed(Transformation const& f, unsigned m, std::vector<Symbol> const& e);

/// Turns a memoryless program for h^e (outputs n..n+m-1 ending constant) into a
/// program for f with m scratch cells, exactly m steps shorter.
/// Throws invalid_input when some scratch register is never written.
Program strip_finalization(Program const& p, unsigned outputs);

/// Appends y_{n+i} <- e_i to a program with m scratch cells; the result is a
/// memoryless program for h^e on the same register file.
Program finalize(Program const& p, std::vector<Symbol> const& e);

/// d+1 steps, one cell: the cell gets delta(y,a) - delta(y,b), then each
/// differing coordinate is shifted by (b_i - a_i) times the cell.
Program synth_transposition_mem(Context const& ctx, StateIndex a, StateIndex b);

/// n-1 copies into scratch, then y_i <- f_i for every i; at most 2n-1 steps.
/// Scratch writes nobody reads are removed.
Program synth_any_mem(Transformation const& f);

/// Cells used by synth_perm_mem: n/2 for even n, (n+1)/2 + 1 for odd n.
unsigned perm_memory_cells(unsigned n);

/// At most 3m steps for n = 2m; odd n is padded with an untouched coordinate
/// (at most 3m+3 steps). Throws invalid_input unless f is a permutation.
Program synth_perm_mem(Transformation const& f);

/// One cell, at most n - F + 1 steps.
Program synth_varmap_mem(VarMap const& v, unsigned q);

/// Reads at most two coordinates.
bool is_binary(Instruction const& instr);

/// f(x) = Mx + c over GF(2). Throws unsupported for q != 2.
bool is_affine(Transformation const& f);

/// Binary instructions only. Affine permutations over GF(2) need no memory;
/// everything else uses one cell.
Program synth_binary(Transformation const& f);

/// Every binary permutation instruction on A^n, identity included once.
std::vector<Transformation> binary_permutation_instructions(Context const& ctx);

/// Group generated by binary permutation instructions, sorted by image.
std::vector<Transformation> binary_permutation_closure(Context const& ctx);

}  // namespace mlc
