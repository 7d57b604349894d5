#pragma once

// Coefficient sets of the embedded schemes in the general linearly-implicit
// form
//
//   (I - g_ii h J) K_i = h f(t + c_i h, y + sum_{j<i} a_ij K_j)
//                        + h J sum_{j<i} g_ij K_j + h^2 (sum_{j<=i} g_ij) f_t
//   y_new = y + sum b_j K_j,   y_emb = y + sum bhat_j K_j
//
// y_new is propagated; y_new - y_emb is the local error estimate.
//
// Explicit Runge-Kutta pairs have g == 0.

#include <array>
#include <string>
#include <string_view>

namespace gsmlab::odeint {

enum class Integrator { implicit_euler, ode12, ode23, ode23s };

enum class SchemeKind { explicit_rk, linearly_implicit };

inline constexpr int kMaxStages = 4;

struct SchemeSpec {
  std::string name;
  SchemeKind kind = SchemeKind::explicit_rk;
  int stages = 0;
  std::array<std::array<double, kMaxStages>, kMaxStages> a{};
  std::array<std::array<double, kMaxStages>, kMaxStages> gamma{};
  std::array<double, kMaxStages> b{};
  std::array<double, kMaxStages> bhat{};
  std::array<double, kMaxStages> c{};
  int order = 0;           // propagated result
  int order_embedded = 0;  // comparison result
  bool fsal = false;   // last stage is f at the new point

  // q in the step-size update exponent 1/(q+1).
  int controller_order() const { return order < order_embedded ? order : order_embedded; }
  bool linearly_implicit() const { return kind == SchemeKind::linearly_implicit; }
  double gamma_sum(int i) const {
    double s = 0.0;
    for (int j = 0; j <= i; ++j) s += gamma[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    return s;
  }
};

const SchemeSpec& scheme(Integrator which);

// Checks the order conditions of both results on polynomial right-hand sides
// (dy/dt = t^k and dy/dt = y for the linear-test function); throws
// std::logic_error naming the first violated condition.
void verify_order_conditions(const SchemeSpec& spec);

std::string_view to_string(Integrator which);
Integrator parse_integrator(std::string_view text);

}  // namespace gsmlab::odeint
