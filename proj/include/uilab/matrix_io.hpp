#pragma once

#include <cstdint>
#include <string>

#include "uilab/types.hpp"

namespace uilab {

// CSV: one line per matrix row, values with 17 significant digits (lossless
// for doubles when read back with strtod).
void save_matrix_csv(const std::string& path, const Matrix& m);
Matrix load_matrix_csv(const std::string& path);

// Raw binary: magic "UILAB1", little-endian u64 rows, u64 cols, then f64
// payload in column-major order.
void save_matrix_binary(const std::string& path, const Matrix& m);
Matrix load_matrix_binary(const std::string& path);

// Dispatch on extension: ".csv" -> CSV, anything else -> binary.
void save_matrix(const std::string& path, const Matrix& m);
Matrix load_matrix(const std::string& path);

// FNV-1a over dims and payload bytes; identifies a matrix in experiment
// outputs so paired runs can be checked for identical A.
std::uint64_t matrix_hash(const Matrix& m);
std::string matrix_hash_hex(const Matrix& m);

// 17-significant-digit rendering used by every CSV writer in the project.
std::string format_double(double v);

}  // namespace uilab
