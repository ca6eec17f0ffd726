#pragma once

#include <vector>

namespace papevo {

/// Geometric midpoint mesh on [t_floor, H]: cells [H s^{j+1}, H s^j].
struct HistoryQuadrature {
  double H = 1.0;
  double sigma = 0.85;
  double t_floor = 1e-6;
  int max_cells = 100000;

  HistoryQuadrature() = default;
  HistoryQuadrature(double H, double sigma = 0.85, double t_floor = 1e-6, int max_cells = 100000);
};

struct QuadNode {
  double s;  ///< cell midpoint
  double w;  ///< cell width
  double lo;
  double hi;
};

/// Nodes ordered from the outermost cell (near H) inward. The last cell
/// ends at t_floor; if H <= t_floor a single cell (H/2, H) is used.
std::vector<QuadNode> graded_nodes(const HistoryQuadrature& q);

/// Same mesh with H replaced by `H` (used for forward integrals over [0, t]).
std::vector<QuadNode> graded_nodes(const HistoryQuadrature& q, double H);

}  // namespace papevo
