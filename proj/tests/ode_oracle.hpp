#pragma once

#include <Eigen/Dense>

namespace fblin::test {

// exp(M) by scaling and squaring of a truncated Taylor series.
inline Eigen::MatrixXd expm(const Eigen::MatrixXd& M) {
    int k = 0;
    double n = M.lpNorm<Eigen::Infinity>();
    while (n > 0.5) {
        n /= 2;
        ++k;
    }
    Eigen::MatrixXd A = M / std::ldexp(1.0, k);
    Eigen::MatrixXd term = Eigen::MatrixXd::Identity(M.rows(), M.cols()), sum = term;
    for (int i = 1; i < 30; ++i) {
        term = term * A / double(i);
        sum += term;
    }
    for (int i = 0; i < k; ++i) sum = sum * sum;
    return sum;
}

// x'' = -a x + C x' on R^2 as a first order system in (x, x').
inline Eigen::Vector4d constant_subspace_solution(double a, const Eigen::Matrix2d& C, const Eigen::Vector4d& y0,
                                                  double t) {
    Eigen::Matrix4d M = Eigen::Matrix4d::Zero();
    M.block<2, 2>(0, 2) = Eigen::Matrix2d::Identity();
    M.block<2, 2>(2, 0) = -a * Eigen::Matrix2d::Identity();
    M.block<2, 2>(2, 2) = C;
    return expm(M * t) * y0;
}

}  // namespace fblin::test
