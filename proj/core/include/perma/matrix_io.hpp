#ifndef PERMA_MATRIX_IO_HPP
#define PERMA_MATRIX_IO_HPP

#include <string>

#include "perma/matrix.hpp"

namespace perma {

/// Reads a matrix from either supported format, auto-detected:
///   JSON   {"n": 2, "matrix": [[2,-1],[-1,2]]}
///   text   first line n, then n whitespace-separated rows
/// Throws ParseError with a reason on malformed input.
SquareMatrix read_matrix_file(const std::string& path);

SquareMatrix parse_matrix(const std::string& content);

/// JSON form of a matrix, numbers at 17 significant digits.
std::string matrix_to_json(const SquareMatrix& M);

}  // namespace perma

#endif
