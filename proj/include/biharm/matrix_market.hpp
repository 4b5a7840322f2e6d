#pragma once

#include "biharm/types.hpp"

#include <string>

namespace biharm {

// MatrixMarket exchange files. Matrices use the `coordinate real general`
// layout with 1-based indices, vectors the `array real general` layout.
// Values are written with 17 significant digits so they reload bit-identically.

void write_matrix_market(const std::string& path, const SparseMatrix& A);
void write_matrix_market(const std::string& path, const Vector& v);

SparseMatrix read_matrix_market_matrix(const std::string& path);
Vector read_matrix_market_vector(const std::string& path);

} // namespace biharm
