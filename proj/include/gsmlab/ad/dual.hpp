#pragma once

// Forward-mode AD value types.
//
//   Dual<T, N>      value plus N first-order tangents (vector mode, N = 1 is
//                   plain forward mode).
//   Dual2<T, N, M>  value, N tangents of a first direction family, M tangents
//                   of a second family and the N x M block of mixed second
//                   derivatives. Written out explicitly rather than by nesting.
//
// Both are restricted to floating-point payloads, so nesting (and with it any
// third derivative) does not type-check.

#include <array>
#include <cmath>
#include <concepts>
#include <ostream>
#include <type_traits>

namespace gsmlab::ad {

namespace detail {
// Multiplies a tangent by a local partial, treating an exactly zero tangent as
// inactive so that infinite partials (sqrt at 0) do not poison it.
template <class T>
inline T scale_tangent(const T& partial, const T& tangent) {
  return tangent == T(0) ? T(0) : partial * tangent;
}
}  // namespace detail

template <std::floating_point T, int N>
struct Dual {
  static_assert(N >= 1, "Dual needs at least one tangent direction");
  using value_type = T;
  static constexpr int kWidth = N;

  T v{};
  std::array<T, N> d{};

  constexpr Dual() = default;
  constexpr Dual(T value) : v(value) {}  // NOLINT: implicit lift of constants
  template <std::integral I>
  constexpr Dual(I value) : v(static_cast<T>(value)) {}  // NOLINT

  static Dual variable(T value, int direction) {
    Dual x(value);
    x.d[static_cast<std::size_t>(direction)] = T(1);
    return x;
  }

  Dual& operator+=(const Dual& o) {
    v += o.v;
    for (int i = 0; i < N; ++i) d[i] += o.d[i];
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    v -= o.v;
    for (int i = 0; i < N; ++i) d[i] -= o.d[i];
    return *this;
  }
  Dual& operator*=(const Dual& o) {
    for (int i = 0; i < N; ++i) d[i] = d[i] * o.v + v * o.d[i];
    v *= o.v;
    return *this;
  }
  // Primal part equals the plain quotient v / o.v bit for bit.
  Dual& operator/=(const Dual& o) {
    const T inv = T(1) / o.v;
    const T q = v / o.v;
    for (int i = 0; i < N; ++i) d[i] = (d[i] - q * o.d[i]) * inv;
    v = q;
    return *this;
  }
  Dual& operator+=(T c) { v += c; return *this; }
  Dual& operator-=(T c) { v -= c; return *this; }
  Dual& operator*=(T c) {
    v *= c;
    for (auto& x : d) x *= c;
    return *this;
  }
  Dual& operator/=(T c) {
    v /= c;
    for (auto& x : d) x /= c;
    return *this;
  }
};

template <std::floating_point T, int N, int M>
struct Dual2 {
  static_assert(N >= 1 && M >= 1, "Dual2 needs two non-empty direction families");
  using value_type = T;

  T v{};
  std::array<T, N> d1{};
  std::array<T, M> d2{};
  std::array<std::array<T, M>, N> d12{};

  constexpr Dual2() = default;
  constexpr Dual2(T value) : v(value) {}  // NOLINT
  template <std::integral I>
  constexpr Dual2(I value) : v(static_cast<T>(value)) {}  // NOLINT

  Dual2& operator+=(const Dual2& o) {
    v += o.v;
    for (int i = 0; i < N; ++i) d1[i] += o.d1[i];
    for (int j = 0; j < M; ++j) d2[j] += o.d2[j];
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < M; ++j) d12[i][j] += o.d12[i][j];
    return *this;
  }
  Dual2& operator-=(const Dual2& o) {
    v -= o.v;
    for (int i = 0; i < N; ++i) d1[i] -= o.d1[i];
    for (int j = 0; j < M; ++j) d2[j] -= o.d2[j];
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < M; ++j) d12[i][j] -= o.d12[i][j];
    return *this;
  }
  Dual2& operator*=(const Dual2& o) {
    Dual2 r;
    r.v = v * o.v;
    for (int i = 0; i < N; ++i) r.d1[i] = d1[i] * o.v + v * o.d1[i];
    for (int j = 0; j < M; ++j) r.d2[j] = d2[j] * o.v + v * o.d2[j];
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < M; ++j)
        r.d12[i][j] = d12[i][j] * o.v + d1[i] * o.d2[j] + o.d1[i] * d2[j] + v * o.d12[i][j];
    return *this = r;
  }
  Dual2& operator/=(const Dual2& o);
  Dual2& operator+=(T c) { v += c; return *this; }
  Dual2& operator-=(T c) { v -= c; return *this; }
  Dual2& operator*=(T c) {
    v *= c;
    for (auto& x : d1) x *= c;
    for (auto& x : d2) x *= c;
    for (auto& row : d12)
      for (auto& x : row) x *= c;
    return *this;
  }
  Dual2& operator/=(T c) {
    v /= c;
    for (auto& x : d1) x /= c;
    for (auto& x : d2) x /= c;
    for (auto& row : d12)
      for (auto& x : row) x /= c;
    return *this;
  }
};

// ---------------------------------------------------------------------------
// traits

template <class S>
struct ScalarTraits {
  static constexpr bool kIsAd = false;
};
template <std::floating_point T, int N>
struct ScalarTraits<Dual<T, N>> {
  static constexpr bool kIsAd = true;
};
template <std::floating_point T, int N, int M>
struct ScalarTraits<Dual2<T, N, M>> {
  static constexpr bool kIsAd = true;
};

template <std::floating_point T>
inline T primal(T x) { return x; }
template <std::floating_point T, int N>
inline T primal(const Dual<T, N>& x) { return x.v; }
template <std::floating_point T, int N, int M>
inline T primal(const Dual2<T, N, M>& x) { return x.v; }

template <std::floating_point T>
inline bool is_zero(T x) { return x == T(0); }
template <std::floating_point T, int N>
inline bool is_zero(const Dual<T, N>& x) {
  if (x.v != T(0)) return false;
  for (const T& t : x.d)
    if (t != T(0)) return false;
  return true;
}
template <std::floating_point T, int N, int M>
inline bool is_zero(const Dual2<T, N, M>& x) {
  if (x.v != T(0)) return false;
  for (const T& t : x.d1)
    if (t != T(0)) return false;
  for (const T& t : x.d2)
    if (t != T(0)) return false;
  for (const auto& row : x.d12)
    for (const T& t : row)
      if (t != T(0)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Dual arithmetic

#define GSMLAB_DUAL_BINARY(OP)                                                          \
  template <std::floating_point T, int N>                                               \
  inline Dual<T, N> operator OP(Dual<T, N> a, const Dual<T, N>& b) { return a OP##= b; } \
  template <std::floating_point T, int N>                                               \
  inline Dual<T, N> operator OP(Dual<T, N> a, T b) { return a OP##= b; }                 \
  template <std::floating_point T, int N>                                               \
  inline Dual<T, N> operator OP(T a, const Dual<T, N>& b) { return Dual<T, N>(a) OP##= b; }

GSMLAB_DUAL_BINARY(+)
GSMLAB_DUAL_BINARY(-)
GSMLAB_DUAL_BINARY(*)
GSMLAB_DUAL_BINARY(/)
#undef GSMLAB_DUAL_BINARY

template <std::floating_point T, int N>
inline Dual<T, N> operator-(Dual<T, N> a) {
  a.v = -a.v;
  for (auto& x : a.d) x = -x;
  return a;
}
template <std::floating_point T, int N>
inline Dual<T, N> operator+(const Dual<T, N>& a) { return a; }

// Applies a scalar function with known first derivative.
template <std::floating_point T, int N>
inline Dual<T, N> chain(const Dual<T, N>& x, T value, T first) {
  Dual<T, N> r(value);
  for (int i = 0; i < N; ++i) r.d[i] = detail::scale_tangent(first, x.d[i]);
  return r;
}

// ---------------------------------------------------------------------------
// Dual2 arithmetic

template <std::floating_point T, int N, int M>
inline Dual2<T, N, M> chain(const Dual2<T, N, M>& x, T value, T first, T second) {
  Dual2<T, N, M> r(value);
  for (int i = 0; i < N; ++i) r.d1[i] = detail::scale_tangent(first, x.d1[i]);
  for (int j = 0; j < M; ++j) r.d2[j] = detail::scale_tangent(first, x.d2[j]);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < M; ++j)
      r.d12[i][j] = detail::scale_tangent(first, x.d12[i][j]) +
                    detail::scale_tangent(second, x.d1[i] * x.d2[j]);
  return r;
}

template <std::floating_point T, int N, int M>
inline Dual2<T, N, M>& Dual2<T, N, M>::operator/=(const Dual2& o) {
  const T inv = T(1) / o.v;
  Dual2 r;
  r.v = v / o.v;
  for (int i = 0; i < N; ++i) r.d1[i] = (d1[i] - r.v * o.d1[i]) * inv;
  for (int j = 0; j < M; ++j) r.d2[j] = (d2[j] - r.v * o.d2[j]) * inv;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < M; ++j)
      r.d12[i][j] = (d12[i][j] - r.d2[j] * o.d1[i] - r.v * o.d12[i][j] - r.d1[i] * o.d2[j]) * inv;
  return *this = r;
}

#define GSMLAB_DUAL2_BINARY(OP)                                                      \
  template <std::floating_point T, int N, int M>                                     \
  inline Dual2<T, N, M> operator OP(Dual2<T, N, M> a, const Dual2<T, N, M>& b) {     \
    return a OP##= b;                                                                \
  }                                                                                  \
  template <std::floating_point T, int N, int M>                                     \
  inline Dual2<T, N, M> operator OP(Dual2<T, N, M> a, T b) { return a OP##= b; }     \
  template <std::floating_point T, int N, int M>                                     \
  inline Dual2<T, N, M> operator OP(T a, const Dual2<T, N, M>& b) {                  \
    return Dual2<T, N, M>(a) OP##= b;                                                \
  }

GSMLAB_DUAL2_BINARY(+)
GSMLAB_DUAL2_BINARY(-)
GSMLAB_DUAL2_BINARY(*)
GSMLAB_DUAL2_BINARY(/)
#undef GSMLAB_DUAL2_BINARY

template <std::floating_point T, int N, int M>
inline Dual2<T, N, M> operator-(Dual2<T, N, M> a) {
  a *= T(-1);
  return a;
}
template <std::floating_point T, int N, int M>
inline Dual2<T, N, M> operator+(const Dual2<T, N, M>& a) { return a; }

// ---------------------------------------------------------------------------
// Elementary functions. The double overloads make generic code uniform.

inline double pos(double x) { return x > 0.0 ? x : 0.0; }
inline float pos(float x) { return x > 0.0f ? x : 0.0f; }

template <std::floating_point T, int N>
inline Dual<T, N> sqrt(const Dual<T, N>& x) {
  const T s = std::sqrt(x.v);
  return chain(x, s, T(0.5) / s);
}
template <std::floating_point T, int N>
inline Dual<T, N> exp(const Dual<T, N>& x) {
  const T e = std::exp(x.v);
  return chain(x, e, e);
}
template <std::floating_point T, int N>
inline Dual<T, N> log(const Dual<T, N>& x) {
  return chain(x, std::log(x.v), T(1) / x.v);
}
template <std::floating_point T, int N>
inline Dual<T, N> sin(const Dual<T, N>& x) {
  return chain(x, std::sin(x.v), std::cos(x.v));
}
template <std::floating_point T, int N>
inline Dual<T, N> cos(const Dual<T, N>& x) {
  return chain(x, std::cos(x.v), -std::sin(x.v));
}
template <std::floating_point T, int N>
inline Dual<T, N> pow(const Dual<T, N>& x, T p) {
  return chain(x, std::pow(x.v, p), p * std::pow(x.v, p - T(1)));
}
template <std::floating_point T, int N>
inline Dual<T, N> abs(const Dual<T, N>& x) {
  return chain(x, std::abs(x.v), x.v < T(0) ? T(-1) : T(1));
}
// Positive part; the derivative at 0 is taken as 0.
template <std::floating_point T, int N>
inline Dual<T, N> pos(const Dual<T, N>& x) {
  return x.v > T(0) ? x : Dual<T, N>(T(0));
}

template <std::floating_point T, int N, int M>
inline Dual2<T, N, M> sqrt(const Dual2<T, N, M>& x) {
  const T s = std::sqrt(x.v);
  return chain(x, s, T(0.5) / s, T(-0.25) / (s * x.v));
}
template <std::floating_point T, int N, int M>
inline Dual2<T, N, M> exp(const Dual2<T, N, M>& x) {
  const T e = std::exp(x.v);
  return chain(x, e, e, e);
}
template <std::floating_point T, int N, int M>
inline Dual2<T, N, M> log(const Dual2<T, N, M>& x) {
  const T inv = T(1) / x.v;
  return chain(x, std::log(x.v), inv, -inv * inv);
}
template <std::floating_point T, int N, int M>
inline Dual2<T, N, M> sin(const Dual2<T, N, M>& x) {
  const T s = std::sin(x.v);
  return chain(x, s, std::cos(x.v), -s);
}
template <std::floating_point T, int N, int M>
inline Dual2<T, N, M> cos(const Dual2<T, N, M>& x) {
  const T c = std::cos(x.v);
  return chain(x, c, -std::sin(x.v), -c);
}
template <std::floating_point T, int N, int M>
inline Dual2<T, N, M> pow(const Dual2<T, N, M>& x, T p) {
  return chain(x, std::pow(x.v, p), p * std::pow(x.v, p - T(1)),
               p * (p - T(1)) * std::pow(x.v, p - T(2)));
}
template <std::floating_point T, int N, int M>
inline Dual2<T, N, M> abs(const Dual2<T, N, M>& x) {
  return chain(x, std::abs(x.v), x.v < T(0) ? T(-1) : T(1), T(0));
}
template <std::floating_point T, int N, int M>
inline Dual2<T, N, M> pos(const Dual2<T, N, M>& x) {
  return x.v > T(0) ? x : Dual2<T, N, M>(T(0));
}

// Comparisons act on primal values only.
#define GSMLAB_AD_COMPARE(OP)                                                                 \
  template <class A, class B>                                                                 \
    requires(ScalarTraits<A>::kIsAd || ScalarTraits<B>::kIsAd)                                \
  inline bool operator OP(const A& a, const B& b) { return primal(a) OP primal(b); }

GSMLAB_AD_COMPARE(<)
GSMLAB_AD_COMPARE(<=)
GSMLAB_AD_COMPARE(>)
GSMLAB_AD_COMPARE(>=)
#undef GSMLAB_AD_COMPARE

template <std::floating_point T, int N>
inline bool operator==(const Dual<T, N>& a, const Dual<T, N>& b) {
  return a.v == b.v && a.d == b.d;
}
template <std::floating_point T, int N, int M>
inline bool operator==(const Dual2<T, N, M>& a, const Dual2<T, N, M>& b) {
  return a.v == b.v && a.d1 == b.d1 && a.d2 == b.d2 && a.d12 == b.d12;
}

template <std::floating_point T, int N>
std::ostream& operator<<(std::ostream& os, const Dual<T, N>& x) {
  os << x.v << "[";
  for (int i = 0; i < N; ++i) os << (i ? "," : "") << x.d[i];
  return os << "]";
}

using std::abs;
using std::cos;
using std::exp;
using std::log;
using std::pow;
using std::sin;
using std::sqrt;

}  // namespace gsmlab::ad
