#pragma once

#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "alk/error.hpp"

namespace alk {

// Small dense row-major matrix over an exact field type T. T must provide
// + - * /, ==, and be constructible from a prototype element; zero and one
// are passed explicitly because tower elements carry their parent.
template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, const T& fill) : r_(r), c_(c), a_(r * c, fill) {}

  std::size_t rows() const { return r_; }
  std::size_t cols() const { return c_; }
  T& operator()(std::size_t i, std::size_t j) { return a_[i * c_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return a_[i * c_ + j]; }

  bool operator==(const Matrix& o) const { return r_ == o.r_ && c_ == o.c_ && a_ == o.a_; }

  template <class F>
  auto map(F f) const -> Matrix<decltype(f(std::declval<T>()))> {
    using U = decltype(f(std::declval<T>()));
    Matrix<U> m(r_, c_, f(a_.at(0)));
    for (std::size_t i = 0; i < r_; ++i)
      for (std::size_t j = 0; j < c_; ++j) m(i, j) = f((*this)(i, j));
    return m;
  }

 private:
  std::size_t r_ = 0, c_ = 0;
  std::vector<T> a_;
};

template <class T>
Matrix<T> identity(std::size_t n, const T& zero, const T& one) {
  Matrix<T> m(n, n, zero);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = one;
  return m;
}

template <class T>
Matrix<T> operator*(const Matrix<T>& a, const Matrix<T>& b) {
  if (a.cols() != b.rows()) throw std::logic_error("matrix shape mismatch");
  Matrix<T> c(a.rows(), b.cols(), a(0, 0) - a(0, 0));
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k)
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) = c(i, j) + a(i, k) * b(k, j);
  return c;
}

template <class T>
Matrix<T> operator+(const Matrix<T>& a, const Matrix<T>& b) {
  Matrix<T> c = a;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) + b(i, j);
  return c;
}

template <class T>
Matrix<T> operator-(const Matrix<T>& a, const Matrix<T>& b) {
  Matrix<T> c = a;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) - b(i, j);
  return c;
}

template <class T>
Matrix<T> transpose(const Matrix<T>& a) {
  Matrix<T> t(a.cols(), a.rows(), a(0, 0));
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

template <class T>
T det(Matrix<T> m, const T& zero, const T& one) {
  const std::size_t n = m.rows();
  T d = one;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    while (piv < n && m(piv, k) == zero) ++piv;
    if (piv == n) return zero;
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(piv, j));
      d = zero - d;
    }
    d = d * m(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      if (m(i, k) == zero) continue;
      T f = m(i, k) / m(k, k);
      for (std::size_t j = k; j < n; ++j) m(i, j) = m(i, j) - f * m(k, j);
    }
  }
  return d;
}

template <class T>
Matrix<T> inverse(const Matrix<T>& a, const T& zero, const T& one) {
  const std::size_t n = a.rows();
  Matrix<T> m = a, inv = identity(n, zero, one);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    while (piv < n && m(piv, k) == zero) ++piv;
    if (piv == n) throw InputError("singular matrix");
    if (piv != k)
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(m(k, j), m(piv, j));
        std::swap(inv(k, j), inv(piv, j));
      }
    T s = one / m(k, k);
    for (std::size_t j = 0; j < n; ++j) {
      m(k, j) = m(k, j) * s;
      inv(k, j) = inv(k, j) * s;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i == k || m(i, k) == zero) continue;
      T f = m(i, k);
      for (std::size_t j = 0; j < n; ++j) {
        m(i, j) = m(i, j) - f * m(k, j);
        inv(i, j) = inv(i, j) - f * inv(k, j);
      }
    }
  }
  return inv;
}

}  // namespace alk
