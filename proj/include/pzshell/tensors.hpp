#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>

#include "pzshell/errors.hpp"

// Small dense tensor types for in-plane (2D) constitutive data.
//
// All contractions are done in full index form; the Voigt view (pair order
// 11, 22, 12, shear entries unscaled) exists only at the reporting boundary.

namespace pzshell {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;

// Voigt pair order used for reports and for enumerating unit cell loads.
inline constexpr std::array<std::array<int, 2>, 3> kVoigtPairs = {
    {{0, 0}, {1, 1}, {0, 1}}};

inline Mat2 sym(const Mat2& m) { return 0.5 * (m + m.transpose()); }

// Unit symmetric tensor E^{tth}: the (tth)-th basis element of symmetric
// 2x2 matrices, with halves off the diagonal so that a symmetric tensor X
// expands as X = X11 E^0 + X22 E^1 + 2 X12 E^2.
inline Mat2 unit_sym(int voigt_index) {
  const auto [t, h] = kVoigtPairs[static_cast<std::size_t>(voigt_index)];
  Mat2 e = Mat2::Zero();
  e(t, h) += 0.5;
  e(h, t) += 0.5;
  return e;
}

// Expansion coefficients of a symmetric tensor in the unit_sym basis.
inline Vec3 sym_coeffs(const Mat2& x) {
  return Vec3(x(0, 0), x(1, 1), x(0, 1) + x(1, 0));
}

// Rank-4 tensor c^{ablm} with minor symmetries in (ab) and (lm).
class Tensor4 {
 public:
  Tensor4() { data_.fill(0.0); }

  double& operator()(int a, int b, int l, int m) { return data_[idx(a, b, l, m)]; }
  double operator()(int a, int b, int l, int m) const { return data_[idx(a, b, l, m)]; }

  static Tensor4 zero() { return Tensor4(); }

  static Tensor4 isotropic(double lambda, double mu) {
    Tensor4 c;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int l = 0; l < 2; ++l)
          for (int m = 0; m < 2; ++m)
            c(a, b, l, m) = lambda * (a == b) * (l == m) +
                            mu * ((a == l) * (b == m) + (a == m) * (b == l));
    return c;
  }

  // Voigt view, pairs (11, 22, 12), no scaling of shear entries.
  Mat3 voigt() const {
    Mat3 v;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        v(i, j) = (*this)(kVoigtPairs[i][0], kVoigtPairs[i][1],
                          kVoigtPairs[j][0], kVoigtPairs[j][1]);
    return v;
  }

  static Tensor4 from_voigt(const Mat3& v) {
    Tensor4 c;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        const int a = kVoigtPairs[i][0], b = kVoigtPairs[i][1];
        const int l = kVoigtPairs[j][0], m = kVoigtPairs[j][1];
        c(a, b, l, m) = v(i, j);
        c(b, a, l, m) = v(i, j);
        c(a, b, m, l) = v(i, j);
        c(b, a, m, l) = v(i, j);
      }
    return c;
  }

  // (c : X)_{ab} = c^{ablm} X_{lm}
  Mat2 contract(const Mat2& x) const {
    Mat2 r = Mat2::Zero();
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int l = 0; l < 2; ++l)
          for (int m = 0; m < 2; ++m) r(a, b) += (*this)(a, b, l, m) * x(l, m);
    return r;
  }

  // X : c : Y
  double contract2(const Mat2& x, const Mat2& y) const {
    return (contract(y).array() * x.array()).sum();
  }

  Tensor4& operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
  }
  Tensor4 operator*(double s) const {
    Tensor4 r = *this;
    r *= s;
    return r;
  }
  Tensor4& operator+=(const Tensor4& o) {
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (double v : data_) s += v * v;
    return std::sqrt(s);
  }

  bool has_minor_symmetry(double tol = 1e-12) const {
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int l = 0; l < 2; ++l)
          for (int m = 0; m < 2; ++m) {
            if (std::abs((*this)(a, b, l, m) - (*this)(b, a, l, m)) > tol) return false;
            if (std::abs((*this)(a, b, l, m) - (*this)(a, b, m, l)) > tol) return false;
          }
    return true;
  }

  bool has_major_symmetry(double tol = 1e-12) const {
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int l = 0; l < 2; ++l)
          for (int m = 0; m < 2; ++m)
            if (std::abs((*this)(a, b, l, m) - (*this)(l, m, a, b)) > tol) return false;
    return true;
  }

  double min_voigt_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Mat3> es(sym3(voigt()));
    return es.eigenvalues().minCoeff();
  }

 private:
  static Mat3 sym3(const Mat3& m) { return 0.5 * (m + m.transpose()); }
  static int idx(int a, int b, int l, int m) { return ((a * 2 + b) * 2 + l) * 2 + m; }
  std::array<double, 16> data_;
};

// Rank-3 coupling tensor e^{lab}, symmetric in (ab).
class Tensor3 {
 public:
  Tensor3() { data_.fill(0.0); }

  double& operator()(int l, int a, int b) { return data_[idx(l, a, b)]; }
  double operator()(int l, int a, int b) const { return data_[idx(l, a, b)]; }

  // (e : X)_l = e^{lab} X_{ab}
  Vec2 contract(const Mat2& x) const {
    Vec2 r = Vec2::Zero();
    for (int l = 0; l < 2; ++l)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) r(l) += (*this)(l, a, b) * x(a, b);
    return r;
  }

  // (g . e)_{ab} = g_l e^{lab}
  Mat2 applied(const Vec2& g) const {
    Mat2 r = Mat2::Zero();
    for (int l = 0; l < 2; ++l)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) r(a, b) += g(l) * (*this)(l, a, b);
    return r;
  }

  // Voigt view: rows l, columns pairs (11, 22, 12).
  Eigen::Matrix<double, 2, 3> voigt() const {
    Eigen::Matrix<double, 2, 3> v;
    for (int l = 0; l < 2; ++l)
      for (int j = 0; j < 3; ++j) v(l, j) = (*this)(l, kVoigtPairs[j][0], kVoigtPairs[j][1]);
    return v;
  }

  static Tensor3 from_voigt(const Eigen::Matrix<double, 2, 3>& v) {
    Tensor3 e;
    for (int l = 0; l < 2; ++l)
      for (int j = 0; j < 3; ++j) {
        const int a = kVoigtPairs[j][0], b = kVoigtPairs[j][1];
        e(l, a, b) = v(l, j);
        e(l, b, a) = v(l, j);
      }
    return e;
  }

  Tensor3& operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
  }

  bool has_minor_symmetry(double tol = 1e-12) const {
    for (int l = 0; l < 2; ++l)
      if (std::abs((*this)(l, 0, 1) - (*this)(l, 1, 0)) > tol) return false;
    return true;
  }

 private:
  static int idx(int l, int a, int b) { return (l * 2 + a) * 2 + b; }
  std::array<double, 8> data_;
};

inline double min_sym_eigenvalue(const Mat2& m) {
  Eigen::SelfAdjointEigenSolver<Mat2> es(sym(m));
  return es.eigenvalues().minCoeff();
}

}  // namespace pzshell
