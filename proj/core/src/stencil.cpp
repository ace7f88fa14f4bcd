#include "packsell/stencil.hpp"

#include "packsell/errors.hpp"

namespace packsell {

namespace {

CsrMatrix laplacian(std::size_t nx, std::size_t ny, std::size_t nz, double centre) {
  if (nx == 0 || ny == 0 || nz == 0) throw DimensionError("stencil dimensions must be positive");
  constexpr std::size_t limit = std::size_t{1} << 31;
  if (nx >= limit || ny >= limit / nx || nz >= limit / (nx * ny)) {
    throw DimensionError("stencil grid has too many points");
  }
  const std::size_t n = nx * ny * nz;
  std::vector<offset_t> ptr{0};
  std::vector<index_t> cols;
  std::vector<double> vals;
  ptr.reserve(n + 1);
  cols.reserve(7 * n);
  vals.reserve(7 * n);
  for (std::size_t z = 0; z < nz; ++z) {
    for (std::size_t y = 0; y < ny; ++y) {
      for (std::size_t x = 0; x < nx; ++x) {
        const std::size_t i = x + nx * (y + ny * z);
        auto push = [&](std::size_t j, double v) {
          cols.push_back(static_cast<index_t>(j));
          vals.push_back(v);
        };
        // Ascending column order.
        if (z > 0) push(i - nx * ny, -1.0);
        if (y > 0) push(i - nx, -1.0);
        if (x > 0) push(i - 1, -1.0);
        push(i, centre);
        if (x + 1 < nx) push(i + 1, -1.0);
        if (y + 1 < ny) push(i + nx, -1.0);
        if (z + 1 < nz) push(i + nx * ny, -1.0);
        ptr.push_back(cols.size());
      }
    }
  }
  return CsrMatrix(n, n, std::move(ptr), std::move(cols), std::move(vals));
}

}  // namespace

CsrMatrix poisson2d(std::size_t nx, std::size_t ny) { return laplacian(nx, ny, 1, 4.0); }

CsrMatrix poisson3d(std::size_t nx, std::size_t ny, std::size_t nz) { return laplacian(nx, ny, nz, 6.0); }

}  // namespace packsell
