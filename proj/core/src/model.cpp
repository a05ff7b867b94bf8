#include "dualprop/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dualprop/instrument.hpp"
#include "dualprop/transcendental.hpp"

namespace dualprop {

namespace {

void require_finite(std::span<const double> values, const char* what) {
  for (double v : values) {
    if (!std::isfinite(v)) throw NonFiniteError(std::string(what) + ": non-finite entry");
  }
}

void require_width(std::size_t expected, std::size_t got) {
  if (expected != got) {
    throw ShapeError("input has " + std::to_string(got) + " features, model expects " +
                     std::to_string(expected));
  }
}

void require_finite_gradient(const Gradient& g) {
  if (!g.all_finite()) throw NonFiniteError("gradient has non-finite entries");
}

}  // namespace

std::string_view to_string(Activation act) noexcept {
  switch (act) {
    case Activation::Sigmoid: return "sigmoid";
    case Activation::Tanh: return "tanh";
    case Activation::Identity: return "identity";
  }
  return "unknown";
}

Activation parse_activation(std::string_view name) {
  if (name == "sigmoid") return Activation::Sigmoid;
  if (name == "tanh") return Activation::Tanh;
  if (name == "identity") return Activation::Identity;
  throw ConfigError("unknown activation '" + std::string(name) + "'");
}

double activate(Activation act, double z) {
  switch (act) {
    case Activation::Sigmoid: return sigmoid(z);
    case Activation::Tanh: return std::tanh(z);
    case Activation::Identity: return z;
  }
  return z;
}

Dual activate(Activation act, const Dual& z) {
  switch (act) {
    case Activation::Sigmoid: return sigmoid(z);
    case Activation::Tanh: return tanh(z);
    case Activation::Identity: return z;
  }
  return z;
}

double loss(double yhat, double y) noexcept {
  const double r = y - yhat;
  return r * r;
}

Dual loss(const Dual& yhat, double y) noexcept {
  const Dual r = y - yhat;
  return r * r;
}

// ---------------------------------------------------------------------------
// Models

Perceptron::Perceptron(std::vector<double> weights, double bias, Activation act)
    : weights_(std::move(weights)), bias_(bias), act_(act) {
  if (weights_.empty()) throw ShapeError("Perceptron: needs at least one weight");
  require_finite(weights_, "Perceptron weights");
  if (!std::isfinite(bias_)) throw NonFiniteError("Perceptron bias: non-finite");
}

Mlp::Mlp(std::vector<DenseLayer> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) throw ShapeError("Mlp: needs at least one layer");
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    const DenseLayer& layer = layers_[k];
    const std::string where = "Mlp layer " + std::to_string(k);
    if (layer.inputs == 0 || layer.outputs == 0) throw ShapeError(where + ": zero width");
    if (layer.weights.size() != layer.inputs * layer.outputs) {
      throw ShapeError(where + ": weight buffer does not match outputs x inputs");
    }
    if (layer.bias.size() != layer.outputs) throw ShapeError(where + ": bias length mismatch");
    if (k > 0 && layer.inputs != layers_[k - 1].outputs) {
      throw ShapeError(where + ": input width differs from previous layer's output width");
    }
    require_finite(layer.weights, where.c_str());
    require_finite(layer.bias, where.c_str());
  }
  if (layers_.back().outputs != 1) throw ShapeError("Mlp: final layer must have one output");
}

std::size_t Mlp::parameter_count() const noexcept {
  std::size_t total = 0;
  for (const auto& layer : layers_) total += layer.parameter_count();
  return total;
}

// ---------------------------------------------------------------------------
// Gradient

Gradient Gradient::zeros_like(const Perceptron& m) {
  Gradient g;
  g.layers.push_back({1, m.width(), std::vector<double>(m.width(), 0.0), {0.0}});
  return g;
}

Gradient Gradient::zeros_like(const Mlp& m) {
  Gradient g;
  for (const auto& layer : m.layers()) {
    g.layers.push_back({layer.outputs, layer.inputs,
                        std::vector<double>(layer.weights.size(), 0.0),
                        std::vector<double>(layer.outputs, 0.0)});
  }
  return g;
}

std::size_t Gradient::size() const noexcept {
  std::size_t n = 0;
  for (const auto& l : layers) n += l.dW.size() + l.db.size();
  return n;
}

std::vector<double> Gradient::flatten() const {
  std::vector<double> out;
  out.reserve(size());
  for (const auto& l : layers) {
    out.insert(out.end(), l.dW.begin(), l.dW.end());
    out.insert(out.end(), l.db.begin(), l.db.end());
  }
  return out;
}

double& Gradient::at(std::size_t flat_index) {
  for (auto& l : layers) {
    if (flat_index < l.dW.size()) return l.dW[flat_index];
    flat_index -= l.dW.size();
    if (flat_index < l.db.size()) return l.db[flat_index];
    flat_index -= l.db.size();
  }
  throw ShapeError("Gradient: flat index out of range");
}

double Gradient::at(std::size_t flat_index) const { return const_cast<Gradient&>(*this).at(flat_index); }

std::string Gradient::path(std::size_t flat_index) const {
  for (std::size_t k = 0; k < layers.size(); ++k) {
    const auto& l = layers[k];
    const std::string prefix = "layer" + std::to_string(k);
    if (flat_index < l.dW.size()) {
      return prefix + ".W[" + std::to_string(flat_index / l.cols) + "][" +
             std::to_string(flat_index % l.cols) + "]";
    }
    flat_index -= l.dW.size();
    if (flat_index < l.db.size()) return prefix + ".b[" + std::to_string(flat_index) + "]";
    flat_index -= l.db.size();
  }
  throw ShapeError("Gradient: flat index out of range");
}

bool Gradient::same_shape(const Gradient& other) const noexcept {
  if (layers.size() != other.layers.size()) return false;
  for (std::size_t k = 0; k < layers.size(); ++k) {
    const auto& a = layers[k];
    const auto& b = other.layers[k];
    if (a.rows != b.rows || a.cols != b.cols || a.dW.size() != b.dW.size() ||
        a.db.size() != b.db.size()) {
      return false;
    }
  }
  return true;
}

double Gradient::max_abs() const noexcept {
  double m = 0.0;
  for (const auto& l : layers) {
    for (double v : l.dW) m = std::max(m, std::fabs(v));
    for (double v : l.db) m = std::max(m, std::fabs(v));
  }
  return m;
}

bool Gradient::all_finite() const noexcept {
  for (const auto& l : layers) {
    for (double v : l.dW) if (!std::isfinite(v)) return false;
    for (double v : l.db) if (!std::isfinite(v)) return false;
  }
  return true;
}

Gradient& Gradient::operator+=(const Gradient& other) {
  if (!same_shape(other)) throw ShapeError("Gradient +=: shape mismatch");
  for (std::size_t k = 0; k < layers.size(); ++k) {
    auto& a = layers[k];
    const auto& b = other.layers[k];
    for (std::size_t i = 0; i < a.dW.size(); ++i) a.dW[i] += b.dW[i];
    for (std::size_t i = 0; i < a.db.size(); ++i) a.db[i] += b.db[i];
  }
  return *this;
}

Gradient& Gradient::operator*=(double s) noexcept {
  for (auto& l : layers) {
    for (double& v : l.dW) v *= s;
    for (double& v : l.db) v *= s;
  }
  return *this;
}

void check_shape(const Gradient& g, const Perceptron& m) {
  if (!g.same_shape(Gradient::zeros_like(m))) throw ShapeError("gradient shape does not match perceptron");
}

void check_shape(const Gradient& g, const Mlp& m) {
  if (!g.same_shape(Gradient::zeros_like(m))) throw ShapeError("gradient shape does not match network");
}

// ---------------------------------------------------------------------------
// Forward passes

double forward(const Perceptron& m, std::span<const double> x) {
  require_width(m.width(), x.size());
  instrument::count_pass();
  double z = m.bias();
  const auto w = m.weights();
  for (std::size_t i = 0; i < w.size(); ++i) z += w[i] * x[i];
  return activate(m.activation(), z);
}

double forward(const Mlp& m, std::span<const double> x) {
  require_width(m.input_width(), x.size());
  instrument::count_pass();
  std::vector<double> current(x.begin(), x.end());
  std::vector<double> next;
  for (const auto& layer : m.layers()) {
    next.assign(layer.outputs, 0.0);
    for (std::size_t j = 0; j < layer.outputs; ++j) {
      double z = layer.bias[j];
      for (std::size_t i = 0; i < layer.inputs; ++i) z += layer.weight(j, i) * current[i];
      next[j] = activate(layer.activation, z);
    }
    current.swap(next);
  }
  return current.front();
}

Dual forward_dual_ones(const Perceptron& m, std::span<const double> x) {
  require_width(m.width(), x.size());
  instrument::count_pass();
  Dual z = Dual::unchecked(m.bias(), 0.0);
  const auto w = m.weights();
  for (std::size_t i = 0; i < w.size(); ++i) z += Dual::unchecked(x[i], 1.0) * w[i];
  return activate(m.activation(), z);
}

// ---------------------------------------------------------------------------
// Gradient engines

Gradient grad_paper(const Perceptron& m, const Sample& s) {
  require_width(m.width(), s.x.size());
  // Same summation order as the eps part accumulated in forward_dual_ones,
  // so E(yhat_eps) / sum(w) recovers act'(z) to within one rounding.
  double weight_sum = 0.0;
  for (double w : m.weights()) weight_sum += w;
  if (!(std::fabs(weight_sum) >= kOnesGuard)) {
    throw SingularSeed("ones-seeded gradient undefined: |sum(w)| = " + std::to_string(std::fabs(weight_sum)) +
                       " is below the guard " + std::to_string(kOnesGuard) +
                       "; use grad_forward_seeded instead");
  }

  const Dual yhat_eps = forward_dual_ones(m, s.x);
  const double factor = 2.0 * (real_part(yhat_eps) - s.y) * dual_part(yhat_eps) / weight_sum;

  Gradient g = Gradient::zeros_like(m);
  auto& layer = g.layers.front();
  for (std::size_t i = 0; i < m.width(); ++i) layer.dW[i] = factor * s.x[i];
  layer.db[0] = factor;
  require_finite_gradient(g);
  return g;
}

Gradient grad_forward_seeded(const Perceptron& m, const Sample& s) {
  require_width(m.width(), s.x.size());
  const auto w = m.weights();
  const std::size_t n = w.size();

  Gradient g = Gradient::zeros_like(m);
  auto& layer = g.layers.front();
  // Parameter k < n is w_k, k == n is the bias.
  for (std::size_t k = 0; k <= n; ++k) {
    instrument::count_pass();
    Dual z = Dual::unchecked(m.bias(), k == n ? 1.0 : 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      z += Dual::unchecked(w[i], i == k ? 1.0 : 0.0) * s.x[i];
    }
    const Dual l = loss(activate(m.activation(), z), s.y);
    if (k < n) {
      layer.dW[k] = dual_part(l);
    } else {
      layer.db[0] = dual_part(l);
    }
  }
  require_finite_gradient(g);
  return g;
}

Gradient grad_forward_seeded(const Mlp& m, const Sample& s) {
  require_width(m.input_width(), s.x.size());
  Gradient g = Gradient::zeros_like(m);
  const std::size_t total = m.parameter_count();

  std::vector<Dual> current;
  std::vector<Dual> next;
  for (std::size_t seeded = 0; seeded < total; ++seeded) {
    instrument::count_pass();
    current.clear();
    for (double xi : s.x) current.push_back(Dual::unchecked(xi, 0.0));

    std::size_t base = 0;  // flat index of this layer's first weight
    for (const auto& layer : m.layers()) {
      const std::size_t bias_base = base + layer.weights.size();
      next.assign(layer.outputs, Dual{});
      for (std::size_t j = 0; j < layer.outputs; ++j) {
        Dual z = Dual::unchecked(layer.bias[j], bias_base + j == seeded ? 1.0 : 0.0);
        const std::size_t row = base + j * layer.inputs;
        for (std::size_t i = 0; i < layer.inputs; ++i) {
          z += Dual::unchecked(layer.weight(j, i), row + i == seeded ? 1.0 : 0.0) * current[i];
        }
        next[j] = activate(layer.activation, z);
      }
      current.swap(next);
      base = bias_base + layer.outputs;
    }
    g.at(seeded) = dual_part(loss(current.front(), s.y));
  }
  require_finite_gradient(g);
  return g;
}

// ---------------------------------------------------------------------------
// Initialization

Perceptron random_perceptron(std::size_t width, Activation act, double range, SplitMix64& rng) {
  std::vector<double> w(width);
  for (double& v : w) v = rng.uniform(-range, range);
  const double b = rng.uniform(-range, range);
  return Perceptron(std::move(w), b, act);
}

Mlp random_mlp(std::span<const std::size_t> widths, Activation act, double range, SplitMix64& rng) {
  if (widths.size() < 2) throw ShapeError("random_mlp: need at least input and output widths");
  std::vector<DenseLayer> layers;
  for (std::size_t k = 0; k + 1 < widths.size(); ++k) {
    DenseLayer layer;
    layer.inputs = widths[k];
    layer.outputs = widths[k + 1];
    layer.activation = act;
    layer.weights.resize(layer.inputs * layer.outputs);
    layer.bias.resize(layer.outputs);
    for (double& v : layer.weights) v = rng.uniform(-range, range);
    for (double& v : layer.bias) v = rng.uniform(-range, range);
    layers.push_back(std::move(layer));
  }
  return Mlp(std::move(layers));
}

}  // namespace dualprop
