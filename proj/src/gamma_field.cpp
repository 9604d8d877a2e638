#include <string>

#include "mwt/dyadic.hpp"
#include "mwt/errors.hpp"
#include "mwt/parallel.hpp"
#include "mwt/reducing.hpp"
#include "mwt/weights.hpp"

namespace mwt {

ScalarField gamma_field(const MatrixWeight& w, const ReducingFamily& family, double p, int level,
                        const Grid& grid) {
  if (!family.covers_level(level))
    throw CoverageError("reducing family does not cover level " + std::to_string(level));
  if (grid.n != w.space_dim()) throw InvalidArgumentError("grid dimension does not match the weight");
  ScalarField out = ScalarField::zeros(grid);
  const Box& base = family.window().base;
  parallel_for(grid.size(), [&](std::size_t node) {
    const Point x = grid.midpoint(node);
    const auto q = locate(x, level, base);
    if (!q) throw CoverageError("grid node lies outside the family's base domain");
    out.values[node] = op_norm(w.power(x, 1.0 / p) * family.inverse_at(*q));
  });
  return out;
}

}  // namespace mwt
