#pragma once

#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "sleeping_cb.hpp"

namespace cbce {

using Decision = std::vector<double>;

/// Loss revealed to a learner: evaluable at any decision.
template <class F>
concept LossFunction = requires(const F& f, std::span<const double> x) {
  { f.value(x) } -> std::convertible_to<double>;
};

/// Loss that also exposes its gradient (online convex optimization).
template <class F>
concept DifferentiableLoss = LossFunction<F> && requires(const F& f, std::span<const double> x) {
  { f.gradient(x) } -> std::convertible_to<std::vector<double>>;
};

/// Run-lifecycle contract shared by all black boxes: predict() then
/// observe(f), strictly alternating, only at steps inside the run.
template <class B, class F>
concept BlackBox = LossFunction<F> && requires(B& b, const F& f) {
  { b.predict() } -> std::convertible_to<Decision>;
  b.observe(f);
};

/// Linear loss <losses, p> over the simplex (learning with expert advice).
struct LinearLoss {
  std::span<const double> losses;

  double value(std::span<const double> p) const {
    if (p.size() != losses.size()) throw std::invalid_argument("decision size mismatch");
    double v = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) v += p[i] * losses[i];
    return v;
  }
};

inline double norm2(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

/// Parameters of an OCO problem over the origin-centred ball of diameter B.
struct OCOConfig {
  double diameter = 2.0;     // B
  double lipschitz = 1.0;    // G
  double smoothness = 1.0;   // L, FTRL regularizer floor
  std::size_t dimension = 1; // d

  void validate() const {
    if (!(diameter > 0.0 && lipschitz > 0.0 && smoothness > 0.0) || dimension == 0)
      throw std::invalid_argument("OCO config needs B, G, L > 0 and d >= 1");
  }
  double radius() const { return diameter / 2.0; }
};

/// Radial projection onto the ball of the given radius.
inline void project_ball(std::span<double> x, double radius) {
  const double n = norm2(x);
  if (n > radius)
    for (double& v : x) v *= radius / n;
}

/// Coin-betting LEA black box: Sleeping CB with every expert awake.
class CbLea {
 public:
  CbLea(std::size_t n, PotentialKind kind, std::optional<std::vector<double>> prior = std::nullopt)
      : cb_(prior ? std::move(*prior) : uniform_prior(n), kind), all_awake_(n, true) {
    if (cb_.size() != n) throw std::invalid_argument("prior size mismatch");
  }

  std::size_t size() const { return cb_.size(); }
  const SleepingCB& aggregator() const { return cb_; }

  const Decision& predict() {
    pred_ = cb_.predict(all_awake_);
    return pred_.weights;
  }

  /// Feeds a loss vector and returns the next weights.
  const Decision& step(std::span<const double> losses) {
    if (pred_.weights.empty()) predict();
    cb_.update(pred_, losses);
    pred_.weights.clear();
    return predict();
  }

  void observe(const LinearLoss& f) {
    if (pred_.weights.empty()) predict();
    cb_.update(pred_, f.losses);
    pred_.weights.clear();
  }

 private:
  SleepingCB cb_;
  std::vector<bool> all_awake_;
  ExpertPrediction pred_;
};

/// Projected online gradient descent with step B / (G sqrt(tau)), where tau
/// counts the run's own steps.
class Ogd {
 public:
  explicit Ogd(OCOConfig cfg, std::optional<std::vector<double>> start = std::nullopt) : cfg_(cfg) {
    cfg_.validate();
    x_ = start ? std::move(*start) : std::vector<double>(cfg_.dimension, 0.0);
    if (x_.size() != cfg_.dimension) throw std::invalid_argument("start point dimension mismatch");
    project_ball(x_, cfg_.radius());
  }

  const Decision& predict() const { return x_; }
  std::uint64_t steps() const { return tau_; }

  const Decision& step(std::span<const double> gradient) {
    if (gradient.size() != x_.size()) throw std::invalid_argument("gradient dimension mismatch");
    if (norm2(gradient) > cfg_.lipschitz * (1.0 + 1e-12))
      throw std::domain_error("gradient norm exceeds the Lipschitz constant");
    ++tau_;
    const double eta = cfg_.diameter / (cfg_.lipschitz * std::sqrt(static_cast<double>(tau_)));
    for (std::size_t i = 0; i < x_.size(); ++i) x_[i] -= eta * gradient[i];
    project_ball(x_, cfg_.radius());
    return x_;
  }

  template <DifferentiableLoss F>
  void observe(const F& f) {
    const std::vector<double> g = f.gradient(x_);
    step(g);
  }

 private:
  OCOConfig cfg_;
  Decision x_;
  std::uint64_t tau_ = 0;
};

/// FTRL on linearized losses with regularizer
/// sqrt(L^2 + sum ||g_s||^2) / 2 * ||x - center||^2, projected on the ball.
class Ftrl {
 public:
  explicit Ftrl(OCOConfig cfg, std::optional<std::vector<double>> center = std::nullopt) : cfg_(cfg) {
    cfg_.validate();
    center_ = center ? std::move(*center) : std::vector<double>(cfg_.dimension, 0.0);
    if (center_.size() != cfg_.dimension) throw std::invalid_argument("center dimension mismatch");
    project_ball(center_, cfg_.radius());
    grad_sum_.assign(cfg_.dimension, 0.0);
    recompute();
  }

  const Decision& predict() const { return x_; }

  const Decision& step(std::span<const double> gradient) {
    if (gradient.size() != grad_sum_.size()) throw std::invalid_argument("gradient dimension mismatch");
    for (std::size_t i = 0; i < gradient.size(); ++i) {
      grad_sum_[i] += gradient[i];
      sq_norm_sum_ += gradient[i] * gradient[i];
    }
    recompute();
    return x_;
  }

  template <DifferentiableLoss F>
  void observe(const F& f) {
    const std::vector<double> g = f.gradient(x_);
    step(g);
  }

 private:
  void recompute() {
    const double scale = std::sqrt(cfg_.smoothness * cfg_.smoothness + sq_norm_sum_);
    x_.resize(center_.size());
    for (std::size_t i = 0; i < x_.size(); ++i) x_[i] = center_[i] - grad_sum_[i] / scale;
    project_ball(x_, cfg_.radius());
  }

  OCOConfig cfg_;
  Decision center_;
  Decision grad_sum_;
  double sq_norm_sum_ = 0.0;
  Decision x_;
};

}  // namespace cbce
