#include "cmc/su2.hpp"

#include <Eigen/Geometry>
#include <stdexcept>

namespace cmc {

Mat2 su2_basis(int i) {
  const cplx I(0.0, 1.0);
  Mat2 m;
  switch (i) {
    case 0: m << 0.0, -I, -I, 0.0; break;
    case 1: m << 0.0, 1.0, -1.0, 0.0; break;
    case 2: m << I, 0.0, 0.0, -I; break;
    default: throw std::out_of_range("su(2) basis index must be 0, 1 or 2");
  }
  return m;
}

Mat2 to_su2(const Vec3& v) {
  const cplx I(0.0, 1.0);
  Mat2 m;
  m << I * v.z(), -I * v.x() + v.y(), -I * v.x() - v.y(), -I * v.z();
  return m;
}

Vec3 from_su2(const Mat2& x) {
  // -tr(X e_i)/2 written out entrywise.
  const cplx I(0.0, 1.0);
  const cplx c0 = 0.5 * I * (x(0, 1) + x(1, 0));
  const cplx c1 = 0.5 * (x(0, 1) - x(1, 0));
  const cplx c2 = -0.5 * I * (x(0, 0) - x(1, 1));
  return {c0.real(), c1.real(), c2.real()};
}

double su2_defect(const Mat2& x) {
  return std::max((x + x.adjoint()).norm(), std::abs(x.trace()));
}

Mat3 rotation_of(const Mat2& f) {
  const Mat2 inv = f.adjoint() / std::abs(f.determinant());
  Mat3 r;
  for (int j = 0; j < 3; ++j) r.col(j) = from_su2(f * su2_basis(j) * inv);
  return r;
}

Mat2 su2_from_rotation(const Mat3& r) {
  const Eigen::Quaterniond q(r);
  const cplx I(0.0, 1.0);
  Mat2 m;
  m << cplx(q.w(), q.z()), -I * q.x() + q.y(), -I * q.x() - q.y(), cplx(q.w(), -q.z());
  return m;
}

Mat2 su2_from_rotation(const Mat3& r, const Mat2& previous) {
  Mat2 f = su2_from_rotation(r);
  if ((previous.adjoint() * f).trace().real() < 0.0) f = -f;
  return f;
}

}  // namespace cmc
