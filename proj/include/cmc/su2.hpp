#pragma once

#include <Eigen/Dense>

#include "cmc/loop.hpp"

namespace cmc {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Basis of su(2) identified with Euclidean 3-space:
/// e1 = (0 -i; -i 0), e2 = (0 1; -1 0), e3 = (i 0; 0 -i), with
/// <X, Y> = -tr(XY)/2 making it orthonormal. e1 e2 = e3 (quaternion rules).
Mat2 su2_basis(int i);  // i in {0, 1, 2}

Mat2 to_su2(const Vec3& v);
/// Coordinates -tr(X e_i)/2; for anti-Hermitian trace-free X they are real,
/// and the real part is returned in general.
Vec3 from_su2(const Mat2& x);
/// Largest deviation of X from being anti-Hermitian and trace-free.
double su2_defect(const Mat2& x);

/// Rotation matrix of Ad(F): column j holds the coordinates of F e_j F^{-1}.
Mat3 rotation_of(const Mat2& f);

/// Unit quaternion lift of a rotation matrix (one of the two signs); the
/// result is F = w I + x e1 + y e2 + z e3 with Ad(F) = R.
Mat2 su2_from_rotation(const Mat3& r);

/// Same, with the sign chosen so that F is closest to `previous`.
Mat2 su2_from_rotation(const Mat3& r, const Mat2& previous);

}  // namespace cmc
