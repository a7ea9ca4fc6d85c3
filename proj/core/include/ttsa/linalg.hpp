#pragma once

#include <Eigen/Dense>

namespace ttsa {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Index = Eigen::Index;

// Throws std::invalid_argument naming `what` if the argument contains a NaN
// or an infinity.
void require_finite(const Vec& v, const char* what);
void require_finite(const Mat& m, const char* what);
void require_finite(double x, const char* what);

// Throws std::invalid_argument if v.size() != n.
void require_size(const Vec& v, Index n, const char* what);

// Largest singular value (operator 2-norm).  Intended for setup-time constant
// extraction, not inner loops.
double spectral_norm(const Mat& m);

// Smallest/largest eigenvalue of a symmetric matrix.
double min_eigenvalue_sym(const Mat& m);
double max_eigenvalue_sym(const Mat& m);

}  // namespace ttsa
