#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace clab {

// Truncated bivariate Taylor polynomial of total degree <= N around a base
// point. coeff(i, j) multiplies du^i dv^j; arithmetic is exact up to order N.
template <int N>
class Jet {
  static_assert(N >= 0, "jet order must be non-negative");

 public:
  static constexpr int kOrder = N;
  static constexpr int kSize = (N + 1) * (N + 2) / 2;

  static constexpr int index(int i, int j) {
    const int d = i + j;
    return d * (d + 1) / 2 + j;
  }

  constexpr Jet() = default;
  constexpr Jet(double constant) { c_[0] = constant; }  // NOLINT: implicit by intent

  // The coordinate functions u and v as jets at (u0, v0).
  static Jet variable_u(double u0) {
    Jet j(u0);
    if constexpr (N >= 1) j.c_[index(1, 0)] = 1.0;
    return j;
  }
  static Jet variable_v(double v0) {
    Jet j(v0);
    if constexpr (N >= 1) j.c_[index(0, 1)] = 1.0;
    return j;
  }

  double value() const { return c_[0]; }
  double coeff(int i, int j) const { return c_[index(i, j)]; }
  double& coeff(int i, int j) { return c_[index(i, j)]; }
  const std::array<double, kSize>& coefficients() const { return c_; }

  // Partial derivative d^{i+j} / du^i dv^j at the base point.
  double derivative(int i, int j) const {
    return c_[index(i, j)] * factorial(i) * factorial(j);
  }

  Jet<(N > 0 ? N - 1 : 0)> du() const requires(N >= 1) {
    Jet<N - 1> r;
    for (int d = 0; d < N; ++d)
      for (int j = 0; j <= d; ++j) r.coeff(d - j, j) = (d - j + 1) * coeff(d - j + 1, j);
    return r;
  }
  Jet<(N > 0 ? N - 1 : 0)> dv() const requires(N >= 1) {
    Jet<N - 1> r;
    for (int d = 0; d < N; ++d)
      for (int j = 0; j <= d; ++j) r.coeff(d - j, j) = (j + 1) * coeff(d - j, j + 1);
    return r;
  }

  template <int M>
  Jet<M> truncate() const {
    static_assert(M <= N);
    Jet<M> r;
    for (int k = 0; k < Jet<M>::kSize; ++k) r.raw(k) = c_[k];
    return r;
  }

  // Evaluate the truncated polynomial at an offset from the base point.
  double eval_offset(double du, double dv) const {
    double s = 0.0;
    for (int d = N; d >= 0; --d)
      for (int j = 0; j <= d; ++j) s += coeff(d - j, j) * std::pow(du, d - j) * std::pow(dv, j);
    return s;
  }

  double& raw(int k) { return c_[k]; }
  double raw(int k) const { return c_[k]; }

  Jet& operator+=(const Jet& o) {
    for (int k = 0; k < kSize; ++k) c_[k] += o.c_[k];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    for (int k = 0; k < kSize; ++k) c_[k] -= o.c_[k];
    return *this;
  }
  Jet& operator*=(double s) {
    for (auto& x : c_) x *= s;
    return *this;
  }
  Jet& operator*=(const Jet& o) { return *this = *this * o; }
  Jet& operator/=(const Jet& o) { return *this = *this / o; }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator-(Jet a) {
    for (auto& x : a.c_) x = -x;
    return a;
  }
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }
  friend Jet operator+(Jet a, double s) {
    a.c_[0] += s;
    return a;
  }
  friend Jet operator+(double s, Jet a) { return a + s; }
  friend Jet operator-(Jet a, double s) {
    a.c_[0] -= s;
    return a;
  }
  friend Jet operator-(double s, const Jet& a) { return -a + s; }
  friend Jet operator/(Jet a, double s) { return a *= 1.0 / s; }

  friend Jet operator*(const Jet& a, const Jet& b) {
    Jet r;
    for (int da = 0; da <= N; ++da)
      for (int ja = 0; ja <= da; ++ja) {
        const double ca = a.coeff(da - ja, ja);
        if (ca == 0.0) continue;
        for (int db = 0; db + da <= N; ++db)
          for (int jb = 0; jb <= db; ++jb) r.coeff(da - ja + db - jb, ja + jb) += ca * b.coeff(db - jb, jb);
      }
    return r;
  }
  friend Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }
  friend Jet operator/(double s, const Jet& b) { return s * reciprocal(b); }

  // h(f) given the Taylor coefficients h^{(k)}(f0)/k!, k = 0..N.
  static Jet compose(const Jet& f, const std::array<double, N + 1>& taylor) {
    Jet g = f;
    g.c_[0] = 0.0;
    Jet r(taylor[N]);
    for (int k = N - 1; k >= 0; --k) r = r * g + taylor[k];
    return r;
  }

  friend Jet reciprocal(const Jet& f) {
    std::array<double, N + 1> t{};
    const double inv = 1.0 / f.value();
    double p = inv;
    for (int k = 0; k <= N; ++k, p *= -inv) t[k] = p;
    return compose(f, t);
  }
  friend Jet sqrt(const Jet& f) {
    std::array<double, N + 1> t{};
    const double f0 = f.value();
    double binom = 1.0;
    for (int k = 0; k <= N; ++k) {
      t[k] = binom * std::pow(f0, 0.5 - k);
      binom *= (0.5 - k) / (k + 1);
    }
    return compose(f, t);
  }
  friend Jet sin(const Jet& f) {
    std::array<double, N + 1> t{};
    const double s = std::sin(f.value()), c = std::cos(f.value());
    const double cyc[4] = {s, c, -s, -c};
    double fact = 1.0;
    for (int k = 0; k <= N; ++k) {
      if (k > 0) fact *= k;
      t[k] = cyc[k % 4] / fact;
    }
    return compose(f, t);
  }
  friend Jet cos(const Jet& f) {
    std::array<double, N + 1> t{};
    const double s = std::sin(f.value()), c = std::cos(f.value());
    const double cyc[4] = {c, -s, -c, s};
    double fact = 1.0;
    for (int k = 0; k <= N; ++k) {
      if (k > 0) fact *= k;
      t[k] = cyc[k % 4] / fact;
    }
    return compose(f, t);
  }

 private:
  static constexpr double factorial(int k) { return k <= 1 ? 1.0 : k * factorial(k - 1); }
  std::array<double, kSize> c_{};
};

inline double value_of(double x) { return x; }
template <int N>
double value_of(const Jet<N>& j) { return j.value(); }

}  // namespace clab
