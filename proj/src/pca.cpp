#include <Eigen/Dense>

#include "geosep/error.hpp"
#include "geosep/reduction.hpp"

namespace geosep {

ReducedSpace pca_fit(const Dataset& train, std::size_t t) {
  if (t < 1) throw Error(ErrorCode::ParameterError, "reduction parameter t must be >= 1");
  const std::size_t n = train.rows();
  const std::size_t d = train.cols();
  const std::size_t k = d / (t * t);
  if (k < 1) {
    throw Error(ErrorCode::ReductionTooAggressive,
                "t^2 = " + std::to_string(t * t) + " exceeds the feature count " + std::to_string(d));
  }
  if (n < 2) throw Error(ErrorCode::DegenerateFit, "PCA needs at least two training rows");

  const Eigen::Map<const Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> raw(
      train.features().data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  const Eigen::MatrixXd X = raw.cast<double>();
  const Eigen::RowVectorXd mean = X.colwise().mean();
  const Eigen::MatrixXd centered = X.rowwise() - mean;
  const Eigen::MatrixXd cov = (centered.adjoint() * centered) / static_cast<double>(n - 1);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::NumericError, "covariance eigendecomposition failed");

  ReducedSpace space;
  space.config = {ReductionMethod::Pca, t, 0};
  space.input_dim = d;
  space.input_shape = train.shape();
  space.pca_mean.resize(d);
  for (std::size_t j = 0; j < d; ++j) space.pca_mean[j] = static_cast<float>(mean(static_cast<Eigen::Index>(j)));
  space.pca_basis.resize(k * d);
  // Eigenvalues come back ascending; take them from the top.
  for (std::size_t a = 0; a < k; ++a) {
    Eigen::VectorXd v = solver.eigenvectors().col(static_cast<Eigen::Index>(d - 1 - a));
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0) v = -v;
    for (std::size_t j = 0; j < d; ++j) space.pca_basis[a * d + j] = static_cast<float>(v(static_cast<Eigen::Index>(j)));
  }
  return space;
}

Dataset pca_project(const ReducedSpace& space, const Dataset& ds) {
  if (space.config.method != ReductionMethod::Pca) throw Error(ErrorCode::ConfigError, "space is not a PCA space");
  return space.map(ds);
}

}  // namespace geosep
