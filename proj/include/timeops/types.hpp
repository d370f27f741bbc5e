#pragma once

#include <complex>

#include <Eigen/Dense>

namespace timeops {

using Index = Eigen::Index;

template <typename Scalar>
using ComplexT = std::complex<Scalar>;

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using VectorXc = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;

template <typename Scalar>
using MatrixXc = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

using Complex = std::complex<double>;
using VectorXd = Eigen::VectorXd;
using VectorXcd = Eigen::VectorXcd;
using MatrixXcd = Eigen::MatrixXcd;

/// Largest dense block accepted by any constructor that ends in an O(N^3) solve.
inline constexpr Index kMaxDenseDimension = 4096;

}  // namespace timeops
