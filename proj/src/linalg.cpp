#include "qmitm/linalg.hpp"

#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include <Eigen/Eigenvalues>

#include "qmitm/errors.hpp"
#include "qmitm/kernels.hpp"
#include "qmitm/rng.hpp"

namespace qmitm {

namespace {

constexpr int kMaxPowerIterations = 4000;
constexpr double kResidualTolerance = 1e-9;

}  // namespace

bool is_symmetric(const Eigen::MatrixXd& a, double tolerance) {
  if (a.rows() != a.cols()) return false;
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = j + 1; i < a.rows(); ++i)
      if (std::abs(a(i, j) - a(j, i)) > tolerance) return false;
  return true;
}

double spectral_norm_reference(const Eigen::MatrixXd& a) {
  if (!is_symmetric(a)) throw ParameterError("spectral_norm needs a symmetric matrix");
  if (a.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

double spectral_norm(const Eigen::MatrixXd& a, bool parallel_kernel) {
  if (!is_symmetric(a)) throw ParameterError("spectral_norm needs a symmetric matrix");
  const auto n = static_cast<std::size_t>(a.rows());
  if (n == 0) return 0.0;
  const double scale = a.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;

  auto matvec = parallel_kernel ? kernels::parallel::symmetric_matvec : kernels::serial::symmetric_matvec;
  std::vector<double> v(n), av(n), aav(n);
  Rng rng(0x5eed);
  for (auto& x : v) x = rng.uniform01() + 0.5;  // positive start overlaps any Perron vector
  double norm_v = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
  for (auto& x : v) x /= norm_v;

  for (int it = 0; it < kMaxPowerIterations; ++it) {
    matvec(a.data(), n, v, av);
    matvec(a.data(), n, av, aav);
    // Rayleigh quotient of A^2 at unit v is |Av|^2.
    const double mu = std::inner_product(av.begin(), av.end(), av.begin(), 0.0);
    if (mu == 0.0) return 0.0;
    double residual = 0.0;
    for (std::size_t i = 0; i < n; ++i) residual += (aav[i] - mu * v[i]) * (aav[i] - mu * v[i]);
    const double norm_aav = std::sqrt(std::inner_product(aav.begin(), aav.end(), aav.begin(), 0.0));
    if (std::sqrt(residual) <= kResidualTolerance * mu) return std::sqrt(mu);
    for (std::size_t i = 0; i < n; ++i) v[i] = aav[i] / norm_aav;
  }
  return spectral_norm_reference(a);
}

}  // namespace qmitm
