#pragma once

#include <cstddef>

#include "packsell/matrix.hpp"

namespace packsell {

/// 5-point Laplacian on an nx x ny grid with Dirichlet boundaries. Row index
/// is x + nx * y. Diagonal 4, neighbours -1.
CsrMatrix poisson2d(std::size_t nx, std::size_t ny);

/// 7-point Laplacian on an nx x ny x nz grid, row index x + nx * (y + ny * z).
/// Diagonal 6, neighbours -1.
CsrMatrix poisson3d(std::size_t nx, std::size_t ny, std::size_t nz);

}  // namespace packsell
