#include "papevo/quadrature.hpp"

#include <cmath>

#include "papevo/field.hpp"

namespace papevo {

HistoryQuadrature::HistoryQuadrature(double H_, double sigma_, double t_floor_, int max_cells_)
    : H(H_), sigma(sigma_), t_floor(t_floor_), max_cells(max_cells_) {
  if (!(H > 0.0)) throw InvalidArgument("HistoryQuadrature: H must be positive");
  if (!(sigma > 0.0 && sigma < 1.0)) throw InvalidArgument("HistoryQuadrature: sigma must lie in (0,1)");
  if (!(t_floor > 0.0)) throw InvalidArgument("HistoryQuadrature: t_floor must be positive");
  if (max_cells < 1) throw InvalidArgument("HistoryQuadrature: max_cells must be positive");
}

std::vector<QuadNode> graded_nodes(const HistoryQuadrature& q, double H) {
  if (!(H > 0.0)) throw InvalidArgument("graded_nodes: H must be positive");
  std::vector<QuadNode> nodes;
  if (H <= q.t_floor) {
    nodes.push_back({0.75 * H, 0.5 * H, 0.5 * H, H});
    return nodes;
  }
  double hi = H;
  while (hi > q.t_floor) {
    double lo = hi * q.sigma;
    if (lo < q.t_floor || static_cast<int>(nodes.size()) + 1 == q.max_cells) lo = q.t_floor;
    nodes.push_back({0.5 * (lo + hi), hi - lo, lo, hi});
    hi = lo;
  }
  return nodes;
}

std::vector<QuadNode> graded_nodes(const HistoryQuadrature& q) { return graded_nodes(q, q.H); }

}  // namespace papevo
