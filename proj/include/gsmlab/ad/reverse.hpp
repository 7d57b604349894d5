#pragma once

// Expression-level reverse mode.
//
// Operator overloads build a tree of nodes (held by value; leaves by
// reference). Every node implements
//
//   S    v() const               forward evaluation
//   void back(const S& bv) const adjoint propagation
//
// Nothing is cached: back() re-invokes v() on the subtrees whose values it
// needs. The scalar S can be double or a forward type (Dual), in which case a
// single sweep yields adjoints carrying tangents (adjoints of tangents).
//
// Subtrees made only of Passive leaves are pruned from the reverse sweep at
// compile time.

#include <type_traits>
#include <utility>

#include "gsmlab/ad/dual.hpp"

namespace gsmlab::ad {

template <class Derived>
struct RevExpr {
  const Derived& self() const { return static_cast<const Derived&>(*this); }
};

// Differentiable leaf. The adjoint accumulates across back() calls.
template <class S>
class Active : public RevExpr<Active<S>> {
 public:
  using Scalar = S;
  static constexpr bool kActive = true;
  static constexpr bool kLeaf = true;

  Active() = default;
  explicit Active(const S& value) : v_(value) {}

  S v() const { return v_; }
  void back(const S& bv) const {
    if (enabled_) bv_ += bv;
  }

  const S& value() const { return v_; }
  const S& adjoint() const { return bv_; }
  void set_value(const S& value) { v_ = value; }
  void reset_adjoint() { bv_ = S(0); }
  void set_seed(const S& seed) { bv_ = seed; }
  // A disabled leaf discards incoming adjoints.
  void set_enabled(bool enabled) { enabled_ = enabled; }

  // Seeded assignment: evaluates the expression and pushes this leaf's
  // current adjoint (the seed) back into its arguments.
  template <class E>
  Active& operator=(const RevExpr<E>& expr) {
    v_ = expr.self().v();
    if constexpr (E::kActive) expr.self().back(bv_);
    return *this;
  }

 private:
  S v_{};
  mutable S bv_{};
  bool enabled_ = true;
};

// Constant leaf: participates in forward evaluation only.
template <class S>
class Passive : public RevExpr<Passive<S>> {
 public:
  using Scalar = S;
  static constexpr bool kActive = false;
  static constexpr bool kLeaf = true;

  Passive() = default;
  explicit Passive(const S& value) : v_(value) {}
  S v() const { return v_; }
  void back(const S&) const {}
  void set_value(const S& value) { v_ = value; }

 private:
  S v_{};
};

namespace detail {
template <class E>
using stored_t = std::conditional_t<E::kLeaf, const E&, E>;

template <class S>
inline S mul(const S& a, const S& b) { return a * b; }
}  // namespace detail

// ---------------------------------------------------------------------------
// binary nodes

template <class L, class R>
class AddNode : public RevExpr<AddNode<L, R>> {
 public:
  using Scalar = typename L::Scalar;
  static_assert(std::is_same_v<Scalar, typename R::Scalar>);
  static constexpr bool kActive = L::kActive || R::kActive;
  static constexpr bool kLeaf = false;
  AddNode(const L& l, const R& r) : l_(l), r_(r) {}
  Scalar v() const { return l_.v() + r_.v(); }
  void back(const Scalar& bv) const {
    if (is_zero(bv)) return;
    if constexpr (L::kActive) l_.back(bv);
    if constexpr (R::kActive) r_.back(bv);
  }

 private:
  detail::stored_t<L> l_;
  detail::stored_t<R> r_;
};

template <class L, class R>
class SubNode : public RevExpr<SubNode<L, R>> {
 public:
  using Scalar = typename L::Scalar;
  static_assert(std::is_same_v<Scalar, typename R::Scalar>);
  static constexpr bool kActive = L::kActive || R::kActive;
  static constexpr bool kLeaf = false;
  SubNode(const L& l, const R& r) : l_(l), r_(r) {}
  Scalar v() const { return l_.v() - r_.v(); }
  void back(const Scalar& bv) const {
    if (is_zero(bv)) return;
    if constexpr (L::kActive) l_.back(bv);
    if constexpr (R::kActive) r_.back(-bv);
  }

 private:
  detail::stored_t<L> l_;
  detail::stored_t<R> r_;
};

template <class L, class R>
class MulNode : public RevExpr<MulNode<L, R>> {
 public:
  using Scalar = typename L::Scalar;
  static_assert(std::is_same_v<Scalar, typename R::Scalar>);
  static constexpr bool kActive = L::kActive || R::kActive;
  static constexpr bool kLeaf = false;
  MulNode(const L& l, const R& r) : l_(l), r_(r) {}
  Scalar v() const { return l_.v() * r_.v(); }
  void back(const Scalar& bv) const {
    if (is_zero(bv)) return;
    if constexpr (L::kActive) l_.back(bv * r_.v());
    if constexpr (R::kActive) r_.back(bv * l_.v());
  }

 private:
  detail::stored_t<L> l_;
  detail::stored_t<R> r_;
};

template <class L, class R>
class DivNode : public RevExpr<DivNode<L, R>> {
 public:
  using Scalar = typename L::Scalar;
  static_assert(std::is_same_v<Scalar, typename R::Scalar>);
  static constexpr bool kActive = L::kActive || R::kActive;
  static constexpr bool kLeaf = false;
  DivNode(const L& l, const R& r) : l_(l), r_(r) {}
  Scalar v() const { return l_.v() / r_.v(); }
  void back(const Scalar& bv) const {
    if (is_zero(bv)) return;
    const Scalar inv = Scalar(1.0) / r_.v();
    if constexpr (L::kActive) l_.back(bv * inv);
    if constexpr (R::kActive) r_.back(-bv * l_.v() * inv * inv);
  }

 private:
  detail::stored_t<L> l_;
  detail::stored_t<R> r_;
};

// ---------------------------------------------------------------------------
// unary nodes; Op supplies value(x) and partial(x)

template <class E, class Op>
class UnaryNode : public RevExpr<UnaryNode<E, Op>> {
 public:
  using Scalar = typename E::Scalar;
  static constexpr bool kActive = E::kActive;
  static constexpr bool kLeaf = false;
  UnaryNode(const E& e, Op op) : e_(e), op_(op) {}
  Scalar v() const { return op_.value(e_.v()); }
  void back(const Scalar& bv) const {
    if constexpr (E::kActive) {
      if (is_zero(bv)) return;
      const Scalar x = e_.v();
      if (!op_.propagates(x)) return;
      e_.back(bv * op_.partial(x));
    }
  }

 private:
  detail::stored_t<E> e_;
  Op op_;
};

namespace op {
struct Affine {  // a * x + b
  double a, b;
  template <class S> S value(const S& x) const { return a * x + b; }
  template <class S> S partial(const S&) const { return S(a); }
  template <class S> bool propagates(const S&) const { return a != 0.0; }
};
struct Recip {  // c / x
  double c;
  template <class S> S value(const S& x) const { return c / x; }
  template <class S> S partial(const S& x) const { return -c / (x * x); }
  template <class S> bool propagates(const S&) const { return true; }
};
struct Square {
  template <class S> S value(const S& x) const { return x * x; }
  template <class S> S partial(const S& x) const { return 2.0 * x; }
  template <class S> bool propagates(const S&) const { return true; }
};
struct Sqrt {
  template <class S> S value(const S& x) const { using std::sqrt; return sqrt(x); }
  template <class S> S partial(const S& x) const { using std::sqrt; return 0.5 / sqrt(x); }
  template <class S> bool propagates(const S&) const { return true; }
};
struct Exp {
  template <class S> S value(const S& x) const { using std::exp; return exp(x); }
  template <class S> S partial(const S& x) const { using std::exp; return exp(x); }
  template <class S> bool propagates(const S&) const { return true; }
};
struct Log {
  template <class S> S value(const S& x) const { using std::log; return log(x); }
  template <class S> S partial(const S& x) const { return 1.0 / x; }
  template <class S> bool propagates(const S&) const { return true; }
};
struct Sin {
  template <class S> S value(const S& x) const { using std::sin; return sin(x); }
  template <class S> S partial(const S& x) const { using std::cos; return cos(x); }
  template <class S> bool propagates(const S&) const { return true; }
};
struct Cos {
  template <class S> S value(const S& x) const { using std::cos; return cos(x); }
  template <class S> S partial(const S& x) const { using std::sin; return -sin(x); }
  template <class S> bool propagates(const S&) const { return true; }
};
struct Pow {
  double p;
  template <class S> S value(const S& x) const { using std::pow; return pow(x, p); }
  template <class S> S partial(const S& x) const { using std::pow; return p * pow(x, p - 1.0); }
  template <class S> bool propagates(const S&) const { return true; }
};
struct Abs {
  template <class S> S value(const S& x) const { using std::abs; return abs(x); }
  template <class S> S partial(const S& x) const { return S(primal(x) < 0.0 ? -1.0 : 1.0); }
  template <class S> bool propagates(const S&) const { return true; }
};
// Positive part; no flow of adjoints on the closed elastic side x <= 0.
struct Pos {
  template <class S> S value(const S& x) const { return pos(x); }
  template <class S> S partial(const S&) const { return S(1.0); }
  template <class S> bool propagates(const S& x) const { return primal(x) > 0.0; }
};
}  // namespace op

// ---------------------------------------------------------------------------
// operator overloads

template <class L, class R>
AddNode<L, R> operator+(const RevExpr<L>& l, const RevExpr<R>& r) { return {l.self(), r.self()}; }
template <class L, class R>
SubNode<L, R> operator-(const RevExpr<L>& l, const RevExpr<R>& r) { return {l.self(), r.self()}; }
template <class L, class R>
MulNode<L, R> operator*(const RevExpr<L>& l, const RevExpr<R>& r) { return {l.self(), r.self()}; }
template <class L, class R>
DivNode<L, R> operator/(const RevExpr<L>& l, const RevExpr<R>& r) { return {l.self(), r.self()}; }

template <class E>
UnaryNode<E, op::Affine> operator-(const RevExpr<E>& e) { return {e.self(), {-1.0, 0.0}}; }
template <class E>
UnaryNode<E, op::Affine> operator*(double c, const RevExpr<E>& e) { return {e.self(), {c, 0.0}}; }
template <class E>
UnaryNode<E, op::Affine> operator*(const RevExpr<E>& e, double c) { return {e.self(), {c, 0.0}}; }
template <class E>
UnaryNode<E, op::Affine> operator/(const RevExpr<E>& e, double c) { return {e.self(), {1.0 / c, 0.0}}; }
template <class E>
UnaryNode<E, op::Affine> operator+(const RevExpr<E>& e, double c) { return {e.self(), {1.0, c}}; }
template <class E>
UnaryNode<E, op::Affine> operator+(double c, const RevExpr<E>& e) { return {e.self(), {1.0, c}}; }
template <class E>
UnaryNode<E, op::Affine> operator-(const RevExpr<E>& e, double c) { return {e.self(), {1.0, -c}}; }
template <class E>
UnaryNode<E, op::Affine> operator-(double c, const RevExpr<E>& e) { return {e.self(), {-1.0, c}}; }
template <class E>
UnaryNode<E, op::Recip> operator/(double c, const RevExpr<E>& e) { return {e.self(), {c}}; }

template <class E>
UnaryNode<E, op::Square> square(const RevExpr<E>& e) { return {e.self(), {}}; }
template <class E>
UnaryNode<E, op::Sqrt> sqrt(const RevExpr<E>& e) { return {e.self(), {}}; }
template <class E>
UnaryNode<E, op::Exp> exp(const RevExpr<E>& e) { return {e.self(), {}}; }
template <class E>
UnaryNode<E, op::Log> log(const RevExpr<E>& e) { return {e.self(), {}}; }
template <class E>
UnaryNode<E, op::Sin> sin(const RevExpr<E>& e) { return {e.self(), {}}; }
template <class E>
UnaryNode<E, op::Cos> cos(const RevExpr<E>& e) { return {e.self(), {}}; }
template <class E>
UnaryNode<E, op::Pow> pow(const RevExpr<E>& e, double p) { return {e.self(), {p}}; }
template <class E>
UnaryNode<E, op::Abs> abs(const RevExpr<E>& e) { return {e.self(), {}}; }
template <class E>
UnaryNode<E, op::Pos> pos(const RevExpr<E>& e) { return {e.self(), {}}; }

// square() for plain and forward scalars so potentials can be written once.
inline double square(double x) { return x * x; }
template <class S>
  requires ScalarTraits<S>::kIsAd
S square(const S& x) { return x * x; }

}  // namespace gsmlab::ad
