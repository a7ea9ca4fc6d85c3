#include "ttsa/linalg.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ttsa {

void require_finite(const Vec& v, const char* what) {
  if (!v.allFinite()) {
    throw std::invalid_argument(std::string(what) + ": contains NaN or Inf");
  }
}

void require_finite(const Mat& m, const char* what) {
  if (!m.allFinite()) {
    throw std::invalid_argument(std::string(what) + ": contains NaN or Inf");
  }
}

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) {
    throw std::invalid_argument(std::string(what) + ": not finite");
  }
}

void require_size(const Vec& v, Index n, const char* what) {
  if (v.size() != n) {
    throw std::invalid_argument(std::string(what) + ": expected size " +
                                std::to_string(n) + ", got " +
                                std::to_string(v.size()));
  }
}

double spectral_norm(const Mat& m) {
  if (m.size() == 0) return 0.0;
  return m.jacobiSvd().singularValues()(0);
}

double min_eigenvalue_sym(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double max_eigenvalue_sym(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

}  // namespace ttsa
