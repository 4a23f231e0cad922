#pragma once
#include <Eigen/Dense>

namespace lensflow {

// Thomas solve of a tridiagonal system; lo(0) and up(n-1) are ignored.
// rhs is overwritten with the solution.
inline void tridiag_solve(const Eigen::VectorXd& lo, Eigen::VectorXd di,
                          const Eigen::VectorXd& up, Eigen::VectorXd& rhs) {
  const int n = static_cast<int>(di.size());
  for (int i = 1; i < n; ++i) {
    double w = lo(i) / di(i - 1);
    di(i) -= w * up(i - 1);
    rhs(i) -= w * rhs(i - 1);
  }
  rhs(n - 1) /= di(n - 1);
  for (int i = n - 2; i >= 0; --i) rhs(i) = (rhs(i) - up(i) * rhs(i + 1)) / di(i);
}

}  // namespace lensflow
