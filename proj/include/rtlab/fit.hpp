#pragma once

#include <Eigen/Dense>

namespace rtlab {

struct LeastSquares {
    Eigen::VectorXd coeffs;
    double residual = 0.0; // ||A c - y||_2
    int rank = 0;
    bool rank_deficient = false;
};

/// Column-pivoted QR least squares; columns are scaled to unit norm first.
LeastSquares least_squares(const Eigen::MatrixXd& A, const Eigen::VectorXd& y);

/// Slope of y against x by ordinary least squares with intercept.
double linear_slope(const Eigen::VectorXd& x, const Eigen::VectorXd& y, double* intercept = nullptr);

} // namespace rtlab
