#pragma once

#include <complex>
#include <string>

#include <Eigen/Dense>

namespace gtdet {

inline constexpr double kMaxCondition = 1e12;

// 1-norm condition number ||A|| ||A^{-1}|| with A^{-1} from partial-pivot LU.
struct CheckedInverse {
    Eigen::MatrixXd inverse;
    double condition = 0.0;
};

// Throws NumericError naming `what` and the condition number when cond > kMaxCondition.
CheckedInverse inverse_checked(const Eigen::MatrixXd& a, const std::string& what);

double det_lu(const Eigen::MatrixXd& a);
std::complex<double> det_lu(const Eigen::MatrixXcd& a);

}  // namespace gtdet
