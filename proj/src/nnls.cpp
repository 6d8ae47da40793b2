#include "geosep/nnls.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace geosep {
namespace {

Eigen::MatrixXd columns(const Eigen::MatrixXd& E, const std::vector<Eigen::Index>& idx) {
  Eigen::MatrixXd out(E.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = E.col(idx[k]);
  return out;
}

}  // namespace

NnlsResult nnls(const Eigen::MatrixXd& E, const Eigen::VectorXd& f, int max_iterations) {
  const Eigen::Index n = E.cols();
  if (max_iterations <= 0) max_iterations = static_cast<int>(3 * n + 10);
  const double tol = 10.0 * std::numeric_limits<double>::epsilon() * std::max<double>(1.0, E.norm()) *
                     static_cast<double>(std::max(E.rows(), n));

  NnlsResult res;
  res.solution = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd& u = res.solution;
  std::vector<bool> passive(static_cast<std::size_t>(n), false);
  Eigen::VectorXd w = E.transpose() * f;

  int iter = 0;
  for (;;) {
    Eigen::Index t = -1;
    double wmax = tol;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!passive[static_cast<std::size_t>(j)] && w(j) > wmax) {
        wmax = w(j);
        t = j;
      }
    }
    if (t < 0) break;
    passive[static_cast<std::size_t>(t)] = true;

    for (;;) {
      if (++iter > max_iterations) {
        res.converged = false;
        res.residual_norm = (E * u - f).norm();
        return res;
      }
      std::vector<Eigen::Index> idx;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[static_cast<std::size_t>(j)]) idx.push_back(j);
      }
      const Eigen::MatrixXd Ep = columns(E, idx);
      const Eigen::VectorXd zp = Ep.colPivHouseholderQr().solve(f);

      bool all_positive = true;
      for (Eigen::Index k = 0; k < zp.size(); ++k) {
        if (zp(k) <= 0.0) all_positive = false;
      }
      if (all_positive) {
        u.setZero();
        for (std::size_t k = 0; k < idx.size(); ++k) u(idx[k]) = zp(static_cast<Eigen::Index>(k));
        break;
      }
      // Step from u toward z until the first passive coordinate hits zero.
      double alpha = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < idx.size(); ++k) {
        const double zk = zp(static_cast<Eigen::Index>(k));
        if (zk <= 0.0) {
          const double uk = u(idx[k]);
          alpha = std::min(alpha, uk / (uk - zk));
        }
      }
      for (std::size_t k = 0; k < idx.size(); ++k) {
        const double uk = u(idx[k]);
        u(idx[k]) = uk + alpha * (zp(static_cast<Eigen::Index>(k)) - uk);
      }
      for (std::size_t k = 0; k < idx.size(); ++k) {
        if (u(idx[k]) <= tol) {
          u(idx[k]) = 0.0;
          passive[static_cast<std::size_t>(idx[k])] = false;
        }
      }
    }
    w = E.transpose() * (f - E * u);
  }
  res.residual_norm = (E * u - f).norm();
  return res;
}

std::optional<Eigen::VectorXd> least_distance(const Eigen::MatrixXd& G, const Eigen::VectorXd& h) {
  const Eigen::Index dim = G.cols();
  const Eigen::Index m = G.rows();
  if (m == 0) return Eigen::VectorXd::Zero(dim);
  Eigen::MatrixXd E(dim + 1, m);
  E.topRows(dim) = G.transpose();
  E.row(dim) = h.transpose();
  Eigen::VectorXd f = Eigen::VectorXd::Zero(dim + 1);
  f(dim) = 1.0;
  const auto sol = nnls(E, f);
  const Eigen::VectorXd r = E * sol.solution - f;
  // A zero residual means h lies in the cone of G's rows: no feasible point.
  if (r.norm() <= 1e-12 || r(dim) >= 0.0) return std::nullopt;
  return Eigen::VectorXd(-r.head(dim) / r(dim));
}

}  // namespace geosep
