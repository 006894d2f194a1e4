#include "rtlab/fit.hpp"

#include <stdexcept>

namespace rtlab {

LeastSquares least_squares(const Eigen::MatrixXd& A, const Eigen::VectorXd& y) {
    if (A.rows() != y.size()) throw std::invalid_argument("least_squares: shape mismatch");
    Eigen::VectorXd scale = A.colwise().norm().transpose();
    for (Eigen::Index k = 0; k < scale.size(); ++k)
        if (scale(k) == 0.0) scale(k) = 1.0;
    const Eigen::MatrixXd As = A * scale.cwiseInverse().asDiagonal();
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(As);
    qr.setThreshold(1e-12);
    LeastSquares out;
    out.rank = static_cast<int>(qr.rank());
    out.rank_deficient = out.rank < A.cols();
    out.coeffs = qr.solve(y).cwiseQuotient(scale);
    out.residual = (A * out.coeffs - y).norm();
    return out;
}

double linear_slope(const Eigen::VectorXd& x, const Eigen::VectorXd& y, double* intercept) {
    Eigen::MatrixXd A(x.size(), 2);
    A.col(0).setOnes();
    A.col(1) = x;
    LeastSquares ls = least_squares(A, y);
    if (intercept) *intercept = ls.coeffs(0);
    return ls.coeffs(1);
}

} // namespace rtlab
