#pragma once

#include <complex>
#include <cstdint>

#include <Eigen/Dense>

namespace mmwcs {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kPi = 3.14159265358979323846;

}  // namespace mmwcs
