#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "mlc/core.hpp"
#include "mlc/gf.hpp"

namespace mlc {

// Text formats. Lines may carry '#' comments; blank lines are ignored.
// Registers are numbered from 1 in files, coordinate 1 being the least
// significant digit of a state index.
//
//   function q=<q> n=<n> [m=<m>]       then q^n lines "d_1 ... d_n", the image of state 0, 1, ...
//   program q=<q> n=<n> m=<m>          then one instruction per line:
//     upd <i>: v_0 ... v_{q^(n+m)-1}   table of the new register i value per state
//     lin <i>: a_1 ... a_{n+m} [+ c]   y_i <- sum a_j y_j + c (mod q)
//     mov <i> <j>                      y_i <- y_j
//   matrix q=<q> n=<n>                 then n rows of n field elements

enum class FileKind { function, program, matrix };

struct FunctionFile {
  Transformation f;
  unsigned memory_cells = 0;
};

/// Kind named by the first non-comment line, if any.
std::optional<FileKind> detect_kind(std::string_view text);

std::string write_function(Transformation const& f, unsigned memory_cells = 0);
FunctionFile read_function(std::string_view text);

/// Linear and move steps keep their short forms unless `tables_only`.
std::string write_program(Program const& p, bool tables_only = false);
/// Steps are kept as written (StepPolicy::keep_runs).
Program read_program(std::string_view text);

std::string write_matrix(MatrixGF const& m);
MatrixGF read_matrix(std::string_view text);

std::string read_text_file(std::string const& path);
void write_text_file(std::string const& path, std::string const& text);

}  // namespace mlc
