#pragma once

/**
 * @file model.hpp
 * @brief Single-layer perceptron, dense multilayer network, and the two
 *        forward-mode gradient engines built on Dual.
 *
 * grad_paper() perturbs every input by the same eps, runs ONE dual pass and
 * recovers dL/dW by dividing the eps part by sum(w). It is only defined when
 * |sum(w)| >= kOnesGuard.
 *
 * grad_forward_seeded() runs one dual pass per parameter with only that
 * parameter seeded. It costs P passes for P parameters, never divides, and
 * works for any depth.
 */

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dualprop/dual.hpp"
#include "dualprop/rng.hpp"

namespace dualprop {

enum class Activation { Sigmoid, Tanh, Identity };

std::string_view to_string(Activation act) noexcept;
/// Accepts "sigmoid", "tanh", "identity"; throws ConfigError otherwise.
Activation parse_activation(std::string_view name);

double activate(Activation act, double z);
Dual activate(Activation act, const Dual& z);

/// Squared error (y - yhat)^2.
double loss(double yhat, double y) noexcept;
Dual loss(const Dual& yhat, double y) noexcept;

struct Sample {
  std::vector<double> x;
  double y = 0.0;
};

/// yhat = act(W x + b) with W a 1 x n row vector.
class Perceptron {
 public:
  /// Throws ShapeError for an empty weight vector, NonFiniteError for
  /// non-finite entries.
  Perceptron(std::vector<double> weights, double bias, Activation act);

  std::size_t width() const noexcept { return weights_.size(); }
  std::size_t parameter_count() const noexcept { return weights_.size() + 1; }
  std::span<const double> weights() const noexcept { return weights_; }
  double bias() const noexcept { return bias_; }
  Activation activation() const noexcept { return act_; }

  friend bool operator==(const Perceptron&, const Perceptron&) = default;

 private:
  std::vector<double> weights_;
  double bias_;
  Activation act_;
};

/// Fully connected layer; weights are outputs x inputs, row-major.
struct DenseLayer {
  std::size_t inputs = 0;
  std::size_t outputs = 0;
  std::vector<double> weights;
  std::vector<double> bias;
  Activation activation = Activation::Sigmoid;

  double weight(std::size_t out, std::size_t in) const { return weights[out * inputs + in]; }
  std::size_t parameter_count() const noexcept { return weights.size() + bias.size(); }

  friend bool operator==(const DenseLayer&, const DenseLayer&) = default;
};

/// Ordered stack of dense layers ending in a single output unit.
class Mlp {
 public:
  /// Validates chaining of widths, buffer sizes, a final width of 1 and
  /// finiteness of every entry.
  explicit Mlp(std::vector<DenseLayer> layers);

  std::span<const DenseLayer> layers() const noexcept { return layers_; }
  std::size_t input_width() const noexcept { return layers_.front().inputs; }
  std::size_t parameter_count() const noexcept;

  friend bool operator==(const Mlp&, const Mlp&) = default;

 private:
  std::vector<DenseLayer> layers_;
};

struct LayerGradient {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> dW;  // rows x cols, row-major
  std::vector<double> db;  // rows

  friend bool operator==(const LayerGradient&, const LayerGradient&) = default;
};

/// dL/dparameters laid out exactly like the model. A perceptron gradient is
/// one 1 x n layer.
struct Gradient {
  std::vector<LayerGradient> layers;

  static Gradient zeros_like(const Perceptron& m);
  static Gradient zeros_like(const Mlp& m);

  std::size_t size() const noexcept;
  /// Entries in parameter order: per layer, weights row-major then biases.
  std::vector<double> flatten() const;
  double& at(std::size_t flat_index);
  double at(std::size_t flat_index) const;
  /// Human-readable location of a flat entry, e.g. "layer0.W[0][3]".
  std::string path(std::size_t flat_index) const;

  /// Perceptron view (first layer, first row).
  std::span<const double> dW() const { return layers.at(0).dW; }
  double db() const { return layers.at(0).db.at(0); }

  bool same_shape(const Gradient& other) const noexcept;
  double max_abs() const noexcept;
  bool all_finite() const noexcept;

  Gradient& operator+=(const Gradient& other);
  Gradient& operator*=(double s) noexcept;

  friend bool operator==(const Gradient&, const Gradient&) = default;
};

/// Throws ShapeError unless g mirrors the parameters of m.
void check_shape(const Gradient& g, const Perceptron& m);
void check_shape(const Gradient& g, const Mlp& m);

double forward(const Perceptron& m, std::span<const double> x);
double forward(const Mlp& m, std::span<const double> x);

/// f(x + eps 1): every input x_i replaced by x_i + eps. The eps part equals
/// sum(w) * act'(W x + b).
Dual forward_dual_ones(const Perceptron& m, std::span<const double> x);

/// Minimum |sum(w)| accepted by grad_paper().
inline constexpr double kOnesGuard = 1e-6;

/// Ones-seeded rule:
///   dL/dW = 2 (R(yhat_eps) - y) * E(yhat_eps) / sum(w) * x,
///   dL/db = 2 (R(yhat_eps) - y) * E(yhat_eps) / sum(w).
/// One dual pass. Throws SingularSeed when |sum(w)| < kOnesGuard.
Gradient grad_paper(const Perceptron& m, const Sample& s);

/// Per-parameter seeding: exactly parameter_count() dual passes.
Gradient grad_forward_seeded(const Perceptron& m, const Sample& s);
Gradient grad_forward_seeded(const Mlp& m, const Sample& s);

/// Weights and biases drawn uniformly from [-range, range].
Perceptron random_perceptron(std::size_t width, Activation act, double range, SplitMix64& rng);
/// widths = {input, hidden..., 1}; every layer uses act.
Mlp random_mlp(std::span<const std::size_t> widths, Activation act, double range, SplitMix64& rng);

}  // namespace dualprop
