#pragma once

#include <Eigen/Dense>

namespace qmitm {

bool is_symmetric(const Eigen::MatrixXd& a, double tolerance = 0.0);

// Largest |eigenvalue| of a symmetric matrix. Power iteration on A^2 using the
// dense matvec kernel; falls back to a full eigensolve when the iteration has
// not converged (nearly tied leading eigenvalues).
double spectral_norm(const Eigen::MatrixXd& a, bool parallel_kernel = true);

// Full symmetric eigensolve; the oracle for spectral_norm.
double spectral_norm_reference(const Eigen::MatrixXd& a);

}  // namespace qmitm
