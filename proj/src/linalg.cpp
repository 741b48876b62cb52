#include "gtdet/linalg.hpp"

#include <cmath>
#include <sstream>

#include "gtdet/errors.hpp"

namespace gtdet {

namespace {
double norm1(const Eigen::MatrixXd& a) { return a.cwiseAbs().colwise().sum().maxCoeff(); }
}  // namespace

CheckedInverse inverse_checked(const Eigen::MatrixXd& a, const std::string& what) {
    if (a.rows() != a.cols()) throw ArgumentError(what + ": matrix not square");
    CheckedInverse r;
    if (a.rows() == 0) {
        r.inverse = a;
        r.condition = 1.0;
        return r;
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
    r.inverse = lu.inverse();
    const double na = norm1(a);
    r.condition = r.inverse.allFinite() ? na * norm1(r.inverse) : INFINITY;
    if (!(r.condition <= kMaxCondition)) {
        std::ostringstream os;
        os << what << ": matrix is singular or ill-conditioned (cond_1 = " << r.condition << " > " << kMaxCondition
           << ")";
        throw NumericError(os.str());
    }
    return r;
}

double det_lu(const Eigen::MatrixXd& a) {
    if (a.rows() == 0) return 1.0;
    return a.partialPivLu().determinant();
}

std::complex<double> det_lu(const Eigen::MatrixXcd& a) {
    if (a.rows() == 0) return 1.0;
    return a.partialPivLu().determinant();
}

}  // namespace gtdet
