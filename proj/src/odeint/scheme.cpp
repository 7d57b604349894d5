#include "gsmlab/odeint/scheme.hpp"

#include <cmath>
#include <stdexcept>

namespace gsmlab::odeint {

namespace {

SchemeSpec make_ode12() {
  SchemeSpec s;
  s.name = "ode12";
  s.stages = 2;
  s.a[1][0] = 1.0;
  s.c = {0.0, 1.0};
  s.b = {0.5, 0.5};     // Heun
  s.bhat = {1.0, 0.0};  // explicit Euler
  s.order = 2;
  s.order_embedded = 1;
  return s;
}

SchemeSpec make_ode23() {
  SchemeSpec s;
  s.name = "ode23";
  s.stages = 4;
  s.a[1][0] = 0.5;
  s.a[2][1] = 0.75;
  s.a[3] = {2.0 / 9.0, 1.0 / 3.0, 4.0 / 9.0, 0.0};
  s.c = {0.0, 0.5, 0.75, 1.0};
  s.b = {2.0 / 9.0, 1.0 / 3.0, 4.0 / 9.0, 0.0};
  s.bhat = {7.0 / 24.0, 0.25, 1.0 / 3.0, 0.125};
  s.order = 3;
  s.order_embedded = 2;
  s.fsal = true;
  return s;
}

SchemeSpec make_ode23s() {
  const double d = 1.0 / (2.0 + std::sqrt(2.0));
  const double e32 = 6.0 + std::sqrt(2.0);
  SchemeSpec s;
  s.name = "ode23s";
  s.kind = SchemeKind::linearly_implicit;
  s.stages = 3;
  s.a[1][0] = 0.5;
  s.a[2][1] = 1.0;
  s.c = {0.0, 0.5, 1.0};
  s.gamma[0][0] = d;
  s.gamma[1][0] = -d;
  s.gamma[1][1] = d;
  s.gamma[2][0] = (e32 - 2.0) * d;
  s.gamma[2][1] = -e32 * d;
  s.gamma[2][2] = d;
  s.b = {0.0, 1.0, 0.0};
  s.bhat = {1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0};
  s.order = 2;
  s.order_embedded = 3;
  return s;
}

// One step of the scheme on the scalar problem y' = lambda y + sum_k w_k t^k,
// evaluated exactly in the general form (J = lambda, f_t from the polynomial).
struct ScalarProblem {
  double lambda;
  std::array<double, 4> w;
  double f(double t, double y) const { return lambda * y + w[0] + t * (w[1] + t * (w[2] + t * w[3])); }
  double ft(double t) const { return w[1] + t * (2.0 * w[2] + t * 3.0 * w[3]); }
};

std::pair<double, double> scalar_step(const SchemeSpec& s, const ScalarProblem& p, double t, double y, double h) {
  std::array<double, kMaxStages> k{};
  for (int i = 0; i < s.stages; ++i) {
    double yi = y, gsum = 0.0;
    for (int j = 0; j < i; ++j) {
      yi += s.a[i][j] * k[j];
      gsum += s.gamma[i][j] * k[j];
    }
    double rhs = h * p.f(t + s.c[i] * h, yi) + h * p.lambda * gsum + h * h * s.gamma_sum(i) * p.ft(t);
    k[i] = rhs / (1.0 - s.gamma[i][i] * h * p.lambda);
  }
  double hi = y, lo = y;
  for (int j = 0; j < s.stages; ++j) {
    hi += s.b[j] * k[j];
    lo += s.bhat[j] * k[j];
  }
  return {hi, lo};
}

// Local error of one step from y(0) = 1 on y' = t^deg (exact: 1 + h^{deg+1}/(deg+1)).
void check_quadrature(const SchemeSpec& s, int order, bool high) {
  for (int deg = 0; deg < order; ++deg) {
    ScalarProblem p{0.0, {0, 0, 0, 0}};
    p.w[static_cast<std::size_t>(deg)] = 1.0;
    for (double h : {0.5, 0.25}) {
      const auto [hi, lo] = scalar_step(s, p, 0.0, 1.0, h);
      const double exact = 1.0 + std::pow(h, deg + 1) / (deg + 1);
      const double got = high ? hi : lo;
      if (std::abs(got - exact) > 1e-13)
        throw std::logic_error(s.name + ": quadrature condition of degree " + std::to_string(deg) + " fails for the " +
                               (high ? "propagated" : "embedded") + " result");
    }
  }
}

// Empirical local order on y' = -y.
void check_linear(const SchemeSpec& s, int order, bool high) {
  const ScalarProblem p{-1.0, {0, 0, 0, 0}};
  auto err = [&](double h) {
    const auto [hi, lo] = scalar_step(s, p, 0.0, 1.0, h);
    return std::abs((high ? hi : lo) - std::exp(-h));
  };
  const double e1 = err(0.02), e2 = err(0.01);
  const double local = std::log2(e1 / e2);
  if (std::abs(local - (order + 1)) > 0.2)
    throw std::logic_error(s.name + ": local order " + std::to_string(local) + " on y' = -y, expected " +
                           std::to_string(order + 1));
}

}  // namespace

const SchemeSpec& scheme(Integrator which) {
  static const SchemeSpec k12 = make_ode12();
  static const SchemeSpec k23 = make_ode23();
  static const SchemeSpec k23s = make_ode23s();
  switch (which) {
    case Integrator::ode12: return k12;
    case Integrator::ode23: return k23;
    case Integrator::ode23s: return k23s;
    case Integrator::implicit_euler: break;
  }
  throw std::invalid_argument("scheme: implicit Euler has no embedded tableau");
}

void verify_order_conditions(const SchemeSpec& spec) {
  for (int i = 0; i < spec.stages; ++i) {
    double row = 0.0;
    for (int j = 0; j < i; ++j) row += spec.a[i][j];
    if (std::abs(row - spec.c[i]) > 1e-15) throw std::logic_error(spec.name + ": c_i != sum_j a_ij");
    for (int j = i + 1; j < kMaxStages; ++j)
      if (spec.a[i][j] != 0.0 || spec.gamma[i][j] != 0.0)
        throw std::logic_error(spec.name + ": coefficients above the diagonal");
    if (spec.a[i][i] != 0.0) throw std::logic_error(spec.name + ": diagonal a_ii must vanish");
  }
  check_quadrature(spec, spec.order, true);
  check_quadrature(spec, spec.order_embedded, false);
  check_linear(spec, spec.order, true);
  check_linear(spec, spec.order_embedded, false);
}

std::string_view to_string(Integrator which) {
  switch (which) {
    case Integrator::implicit_euler: return "implicit-euler";
    case Integrator::ode12: return "ode12";
    case Integrator::ode23: return "ode23";
    case Integrator::ode23s: return "ode23s";
  }
  return "?";
}

Integrator parse_integrator(std::string_view text) {
  if (text == "implicit-euler") return Integrator::implicit_euler;
  if (text == "ode12") return Integrator::ode12;
  if (text == "ode23") return Integrator::ode23;
  if (text == "ode23s") return Integrator::ode23s;
  throw std::invalid_argument("unknown integrator '" + std::string(text) + "'");
}

}  // namespace gsmlab::odeint
