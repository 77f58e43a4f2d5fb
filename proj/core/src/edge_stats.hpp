#pragma once

#include "cohsmix/types.hpp"

namespace cohsmix::detail {

/// Expected pair counts for an undirected graph under soft memberships t,
/// summed over ordered vertex pairs i != j:
///   linked(q, l)   = sum tau_iq tau_jl x_ij
///   unlinked(q, l) = sum tau_iq tau_jl (1 - x_ij)
/// `xt` must be adjacency * t.
struct EdgeStats {
  Matrix linked;
  Matrix unlinked;
};

inline EdgeStats edge_stats(const Matrix& t, const Matrix& xt) {
  EdgeStats s;
  s.linked = t.transpose() * xt;
  const Eigen::RowVectorXd mass = t.colwise().sum();
  const Matrix pairs = mass.transpose() * mass - t.transpose() * t;
  s.unlinked = (pairs - s.linked).cwiseMax(0.0);
  return s;
}

}  // namespace cohsmix::detail
