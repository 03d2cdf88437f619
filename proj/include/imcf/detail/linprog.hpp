#pragma once

#include <Eigen/Dense>

namespace imcf::detail {

struct LpResult {
  enum class Status { optimal, unbounded } status = Status::optimal;
  Eigen::VectorXd x;
  double value = 0.0;
};

/// Dense simplex for  max c.x  s.t.  A x <= b  with x unrestricted in sign.
/// Requires b >= 0 so that x = 0 is feasible (slack basis); callers shift
/// their origin to an interior point first. Bland's rule, so no cycling.
LpResult maximize_free(const Eigen::VectorXd& c, const Eigen::MatrixXd& A, const Eigen::VectorXd& b);

}  // namespace imcf::detail
