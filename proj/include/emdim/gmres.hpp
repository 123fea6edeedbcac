#pragma once

#include <Eigen/Core>

#include <cmath>
#include <string>
#include <vector>

namespace emdim {

struct GmresOptions {
  double tol = 1e-10;  // relative residual ‖b - Ax‖ / ‖b‖
  int restart = 200;
  int max_iter = 5000;
};

template <typename Scalar>
struct GmresResult {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> x;
  bool converged = false;
  int iterations = 0;
  int restarts = 0;
  double residual = 0.0;  // true relative residual of x
  std::string message;
  std::vector<double> history;  // true relative residual after each cycle
};

/// Restarted GMRES with right preconditioning: solves A M y = b and returns
/// x = M y. `apply_a` and `apply_m` map a vector to a vector. Each cycle
/// orthogonalizes with modified Gram-Schmidt and tracks the residual through
/// Givens rotations; the true residual is recomputed at every restart. A
/// cycle that does not reduce the true residual ends the solve with the best
/// iterate found.
template <typename Scalar, typename ApplyA, typename ApplyM>
GmresResult<Scalar> gmres(const ApplyA& apply_a, const ApplyM& apply_m,
                          const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& b,
                          const GmresOptions& options,
                          const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>* x0 = nullptr) {
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  GmresResult<Scalar> out;
  const Eigen::Index n = b.size();
  const double bnorm = static_cast<double>(b.norm());
  out.x = x0 ? *x0 : Vec::Zero(n);
  if (bnorm == 0.0) {
    out.x.setZero();
    out.converged = true;
    out.message = "zero right-hand side";
    return out;
  }

  const int m = std::max(1, options.restart);
  Vec r = b - apply_a(out.x);
  double beta = static_cast<double>(r.norm());
  out.residual = beta / bnorm;
  out.history.push_back(out.residual);

  Mat v(n, m + 1);
  Mat h = Mat::Zero(m + 1, m);
  Vec cs(m), sn(m), g(m + 1);

  while (true) {
    if (out.residual <= options.tol) {
      out.converged = true;
      out.message = "converged";
      return out;
    }
    if (out.iterations >= options.max_iter) {
      out.message = "maximum iteration count reached";
      return out;
    }

    h.setZero();
    g.setZero();
    v.col(0) = r / static_cast<Scalar>(beta);
    g(0) = static_cast<Scalar>(beta);
    int k = 0;
    for (int j = 0; j < m && out.iterations < options.max_iter; ++j) {
      Vec w = apply_a(apply_m(v.col(j)));
      for (int i = 0; i <= j; ++i) {
        h(i, j) = v.col(i).dot(w);
        w -= h(i, j) * v.col(i);
      }
      h(j + 1, j) = w.norm();
      if (h(j + 1, j) != Scalar(0)) v.col(j + 1) = w / h(j + 1, j);
      const double column = static_cast<double>(h.col(j).head(j + 2).norm());

      for (int i = 0; i < j; ++i) {
        const Scalar t = cs(i) * h(i, j) + sn(i) * h(i + 1, j);
        h(i + 1, j) = -sn(i) * h(i, j) + cs(i) * h(i + 1, j);
        h(i, j) = t;
      }
      const Scalar denom = std::hypot(h(j, j), h(j + 1, j));
      ++out.iterations;
      if (!(static_cast<double>(denom) > 1e-14 * column)) break;  // direction adds nothing new
      cs(j) = h(j, j) / denom;
      sn(j) = h(j + 1, j) / denom;
      h(j, j) = cs(j) * h(j, j) + sn(j) * h(j + 1, j);
      h(j + 1, j) = 0;
      g(j + 1) = -sn(j) * g(j);
      g(j) = cs(j) * g(j);

      k = j + 1;
      if (std::abs(static_cast<double>(g(j + 1))) <= options.tol * bnorm) break;
    }

    Vec y = h.topLeftCorner(k, k).template triangularView<Eigen::Upper>().solve(g.head(k));
    Vec candidate = out.x + apply_m(v.leftCols(k) * y);
    const Vec r_new = b - apply_a(candidate);
    const double beta_new = static_cast<double>(r_new.norm());
    ++out.restarts;
    out.history.push_back(beta_new / bnorm);
    if (!(beta_new < beta)) {
      out.message = "stagnation: a full cycle did not reduce the residual";
      return out;
    }
    out.x = std::move(candidate);
    r = r_new;
    beta = beta_new;
    out.residual = beta / bnorm;
  }
}

}  // namespace emdim
