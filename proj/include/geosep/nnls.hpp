#pragma once

#include <Eigen/Dense>
#include <optional>

namespace geosep {

struct NnlsResult {
  Eigen::VectorXd solution;
  double residual_norm = 0.0;
  bool converged = true;
};

// Lawson-Hanson active-set solver for min ||E u - f|| subject to u >= 0.
NnlsResult nnls(const Eigen::MatrixXd& E, const Eigen::VectorXd& f, int max_iterations = 0);

// Least-distance program: the minimum-norm z with G z >= h (Lawson & Hanson,
// ch. 23, via NNLS on [G^T; h^T]). Returns nullopt when infeasible.
std::optional<Eigen::VectorXd> least_distance(const Eigen::MatrixXd& G, const Eigen::VectorXd& h);

}  // namespace geosep
