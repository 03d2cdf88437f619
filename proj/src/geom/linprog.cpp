#include "imcf/detail/linprog.hpp"

#include "imcf/error.hpp"

#include <limits>
#include <vector>

namespace imcf::detail {

LpResult maximize_free(const Eigen::VectorXd& c, const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  const Eigen::Index m = A.rows();
  const Eigen::Index n = A.cols();
  if (c.size() != n || b.size() != m) throw MalformedInput("linear program: dimension mismatch");
  if ((b.array() < 0.0).any()) throw DomainError("linear program: right-hand side must be nonnegative");

  // Columns: x+ (n), x- (n), slacks (m), rhs.
  const Eigen::Index cols = 2 * n + m;
  Eigen::MatrixXd tab = Eigen::MatrixXd::Zero(m + 1, cols + 1);
  tab.block(0, 0, m, n) = A;
  tab.block(0, n, m, n) = -A;
  tab.block(0, 2 * n, m, m).setIdentity();
  tab.col(cols).head(m) = b;
  tab.block(m, 0, 1, n) = -c.transpose();
  tab.block(m, n, 1, n) = c.transpose();

  std::vector<Eigen::Index> basis(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) basis[static_cast<std::size_t>(i)] = 2 * n + i;

  constexpr double eps = 1e-12;
  constexpr double pivot_tol = 1e-9;
  LpResult out;
  for (int iter = 0; iter < 100000; ++iter) {
    Eigen::Index enter = -1;
    for (Eigen::Index j = 0; j < cols; ++j) {
      if (tab(m, j) < -eps) {
        enter = j;
        break;
      }
    }
    if (enter < 0) break;

    Eigen::Index leave = -1;
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < m; ++i) {
      const double a = tab(i, enter);
      if (a > pivot_tol) {
        const double ratio = tab(i, cols) / a;
        if (ratio < best - 1e-15 ||
            (ratio <= best + 1e-15 && leave >= 0 &&
             basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leave)])) {
          best = ratio;
          leave = i;
        }
      }
    }
    if (leave < 0) {
      out.status = LpResult::Status::unbounded;
      return out;
    }
    tab.row(leave) /= tab(leave, enter);
    for (Eigen::Index i = 0; i <= m; ++i) {
      if (i != leave && tab(i, enter) != 0.0) tab.row(i) -= tab(i, enter) * tab.row(leave);
    }
    basis[static_cast<std::size_t>(leave)] = enter;
    for (Eigen::Index i = 0; i < m; ++i)
      if (tab(i, cols) < 0.0) tab(i, cols) = 0.0;
  }

  Eigen::VectorXd split = Eigen::VectorXd::Zero(cols);
  for (Eigen::Index i = 0; i < m; ++i) split(basis[static_cast<std::size_t>(i)]) = tab(i, cols);
  out.x = split.head(n) - split.segment(n, n);
  out.value = c.dot(out.x);
  return out;
}

}  // namespace imcf::detail
