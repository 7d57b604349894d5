#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace gsmlab::odeint {

enum class ErrorMeasure { internal, stress };

class IntegrationError : public std::runtime_error {
 public:
  enum class Kind { newton_diverged, newton_max_iterations, too_many_substeps, step_underflow, singular };
  IntegrationError(Kind kind, const std::string& what, std::vector<double> residuals = {})
      : std::runtime_error(what), kind_(kind), residuals_(std::move(residuals)) {}
  Kind kind() const { return kind_; }
  const std::vector<double>& residuals() const { return residuals_; }

 private:
  Kind kind_;
  std::vector<double> residuals_;
};

// Step sizes are plain doubles computed from plain error norms; nothing here
// ever sees a derivative type.
struct StepController {
  double atol = 1e-6;
  double rtol = 1e-3;
  double safety = 0.9;
  double min_factor = 0.2;
  double max_factor = 5.0;
  double reject_factor = 0.5;  // upper bound on the shrink factor after a rejection
  int max_substeps = 10000;
  double min_step_fraction = 1e-14;

  double factor(double err, int q) const {
    if (!(err > 0.0)) return max_factor;
    return safety * std::pow(err, -1.0 / (q + 1));
  }
  double after_accept(double h, double err, int q, bool previous_rejected) const {
    const double f = std::clamp(factor(err, q), min_factor, previous_rejected ? 1.0 : max_factor);
    return h * f;
  }
  double after_reject(double h, double err, int q) const {
    if (!std::isfinite(err)) return h * min_factor;
    return h * std::clamp(factor(err, q), min_factor, reject_factor);
  }
};

// Running scaled RMS norm: components (hi - lo) / (atol + rtol max(|ref0|, |ref1|)).
class ScaledRms {
 public:
  ScaledRms(double atol, double rtol) : atol_(atol), rtol_(rtol) {}
  void add(double hi, double lo, double ref0, double ref1) {
    const double scale = atol_ + rtol_ * std::max(std::abs(ref0), std::abs(ref1));
    const double r = (hi - lo) / scale;
    sum_ += r * r;
    ++count_;
  }
  double value() const { return count_ == 0 ? 0.0 : std::sqrt(sum_ / count_); }

 private:
  double atol_, rtol_;
  double sum_ = 0.0;
  int count_ = 0;
};

struct IntegrationStats {
  int substeps = 0;
  int rejected = 0;
  int newton_iterations = 0;
};

// Accepted substep (start time, size) of an adaptive integration.
struct Substep {
  double t;
  double h;
};

}  // namespace gsmlab::odeint
