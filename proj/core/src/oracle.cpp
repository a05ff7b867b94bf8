#include "dualprop/oracle.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "dualprop/errors.hpp"
#include "dualprop/instrument.hpp"

#if defined(DUALPROP_HAVE_QUADMATH)
extern "C" {
#include <quadmath.h>
}
#endif

namespace dualprop {

namespace {

// Activation values and slopes, written independently of transcendental.cpp.

double logistic(double z) {
  return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

double act_value(Activation act, double z) {
  switch (act) {
    case Activation::Sigmoid: return logistic(z);
    case Activation::Tanh: return std::tanh(z);
    case Activation::Identity: return z;
  }
  return z;
}

double act_slope(Activation act, double z) {
  switch (act) {
    // sigma(z)(1 - sigma(z)) with 1 - sigma(z) = sigma(-z).
    case Activation::Sigmoid: return logistic(z) * logistic(-z);
    case Activation::Tanh: {
      const double e = std::exp(-2.0 * std::fabs(z));
      const double d = 1.0 + e;
      return 4.0 * e / (d * d);
    }
    case Activation::Identity: return 1.0;
  }
  return 1.0;
}

void require_width(std::size_t expected, std::size_t got) {
  if (expected != got) throw ShapeError("oracle: sample width does not match model");
}

#if defined(DUALPROP_HAVE_QUADMATH)
using wide = __float128;
wide wide_exp(wide v) { return expq(v); }
wide wide_tanh(wide v) { return tanhq(v); }
bool wide_finite(wide v) { return finiteq(v) != 0; }
#else
using wide = long double;
wide wide_exp(wide v) { return std::exp(v); }
wide wide_tanh(wide v) { return std::tanh(v); }
bool wide_finite(wide v) { return std::isfinite(v); }
#endif

wide wide_act(Activation act, wide z) {
  switch (act) {
    case Activation::Sigmoid:
      if (z >= 0) return wide(1) / (wide(1) + wide_exp(-z));
      return wide_exp(z) / (wide(1) + wide_exp(z));
    case Activation::Tanh: return wide_tanh(z);
    case Activation::Identity: return z;
  }
  return z;
}

// Flat parameter vector in Gradient order plus a loss evaluated at any
// perturbation of it.
struct WideLayer {
  std::size_t inputs;
  std::size_t outputs;
  Activation act;
};

wide wide_loss(const std::vector<WideLayer>& shape, const std::vector<wide>& params, const Sample& s) {
  instrument::count_pass();
  std::vector<wide> current(s.x.begin(), s.x.end());
  std::vector<wide> next;
  std::size_t offset = 0;
  for (const auto& layer : shape) {
    const std::size_t bias_offset = offset + layer.inputs * layer.outputs;
    next.assign(layer.outputs, wide(0));
    for (std::size_t j = 0; j < layer.outputs; ++j) {
      wide z = params[bias_offset + j];
      for (std::size_t i = 0; i < layer.inputs; ++i) z += params[offset + j * layer.inputs + i] * current[i];
      next[j] = wide_act(layer.act, z);
    }
    current.swap(next);
    offset = bias_offset + layer.outputs;
  }
  const wide r = wide(s.y) - current.front();
  return r * r;
}

Gradient central_differences(const std::vector<WideLayer>& shape, std::vector<wide> params, Gradient g,
                             const Sample& s, double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw ConfigError("finite difference step must be positive");
  const wide step = h;
  for (std::size_t p = 0; p < params.size(); ++p) {
    const wide saved = params[p];
    params[p] = saved + step;
    const wide up = wide_loss(shape, params, s);
    params[p] = saved - step;
    const wide down = wide_loss(shape, params, s);
    params[p] = saved;
    if (!wide_finite(up) || !wide_finite(down)) {
      throw NonFiniteError("finite difference: non-finite loss at " + g.path(p));
    }
    g.at(p) = static_cast<double>((up - down) / (wide(2) * step));
  }
  return g;
}

}  // namespace

Gradient grad_backprop_analytic(const Perceptron& m, const Sample& s) {
  require_width(m.width(), s.x.size());
  instrument::count_pass();
  const auto w = m.weights();
  double z = m.bias();
  for (std::size_t i = 0; i < w.size(); ++i) z += w[i] * s.x[i];
  const double yhat = act_value(m.activation(), z);
  const double delta = 2.0 * (yhat - s.y) * act_slope(m.activation(), z);

  Gradient g = Gradient::zeros_like(m);
  auto& layer = g.layers.front();
  for (std::size_t i = 0; i < w.size(); ++i) layer.dW[i] = delta * s.x[i];
  layer.db[0] = delta;
  return g;
}

Gradient grad_backprop_analytic(const Mlp& m, const Sample& s) {
  require_width(m.input_width(), s.x.size());
  instrument::count_pass();
  const auto layers = m.layers();

  // Forward sweep keeping every layer's input activations and pre-activations.
  std::vector<std::vector<double>> inputs{s.x};
  std::vector<std::vector<double>> pre;
  for (const auto& layer : layers) {
    const auto& a = inputs.back();
    std::vector<double> z(layer.outputs);
    std::vector<double> out(layer.outputs);
    for (std::size_t j = 0; j < layer.outputs; ++j) {
      double acc = layer.bias[j];
      for (std::size_t i = 0; i < layer.inputs; ++i) acc += layer.weights[j * layer.inputs + i] * a[i];
      z[j] = acc;
      out[j] = act_value(layer.activation, acc);
    }
    pre.push_back(std::move(z));
    inputs.push_back(std::move(out));
  }

  Gradient g = Gradient::zeros_like(m);
  const double yhat = inputs.back().front();
  std::vector<double> upstream{2.0 * (yhat - s.y)};  // dL/d(output of layer k)
  for (std::size_t k = layers.size(); k-- > 0;) {
    const auto& layer = layers[k];
    const auto& a = inputs[k];
    auto& lg = g.layers[k];
    std::vector<double> delta(layer.outputs);
    for (std::size_t j = 0; j < layer.outputs; ++j) delta[j] = upstream[j] * act_slope(layer.activation, pre[k][j]);
    std::vector<double> below(layer.inputs, 0.0);
    for (std::size_t j = 0; j < layer.outputs; ++j) {
      for (std::size_t i = 0; i < layer.inputs; ++i) {
        lg.dW[j * layer.inputs + i] = delta[j] * a[i];
        below[i] += layer.weights[j * layer.inputs + i] * delta[j];
      }
      lg.db[j] = delta[j];
    }
    upstream.swap(below);
  }
  return g;
}

Gradient grad_finite_difference(const Perceptron& m, const Sample& s, double h) {
  require_width(m.width(), s.x.size());
  std::vector<wide> params(m.weights().begin(), m.weights().end());
  params.push_back(m.bias());
  return central_differences({{m.width(), 1, m.activation()}}, std::move(params), Gradient::zeros_like(m), s, h);
}

Gradient grad_finite_difference(const Mlp& m, const Sample& s, double h) {
  require_width(m.input_width(), s.x.size());
  std::vector<WideLayer> shape;
  std::vector<wide> params;
  for (const auto& layer : m.layers()) {
    shape.push_back({layer.inputs, layer.outputs, layer.activation});
    params.insert(params.end(), layer.weights.begin(), layer.weights.end());
    params.insert(params.end(), layer.bias.begin(), layer.bias.end());
  }
  return central_differences(shape, std::move(params), Gradient::zeros_like(m), s, h);
}

double scaled_error(double a, double b) noexcept {
  const double diff = std::fabs(a - b);
  const double scale = std::fmax(std::fabs(a), std::fabs(b));
  if (scale < kAbsoluteFallback) return diff;
  return diff / scale;
}

GradReport compare(const Gradient& a, const Gradient& b, double tol) {
  if (!a.same_shape(b)) throw ShapeError("compare: gradients have different shapes");
  GradReport report;
  report.grad_a = a;
  report.grad_b = b;
  report.tolerance = tol;
  const auto fa = a.flatten();
  const auto fb = b.flatten();
  std::size_t worst = 0;
  for (std::size_t i = 0; i < fa.size(); ++i) {
    const double abs_err = std::fabs(fa[i] - fb[i]);
    const double err = scaled_error(fa[i], fb[i]);
    report.max_abs_err = std::fmax(report.max_abs_err, abs_err);
    // NaN must not hide behind a false comparison.
    if (err > report.max_rel_err || std::isnan(err)) {
      report.max_rel_err = std::isnan(err) ? std::numeric_limits<double>::infinity() : err;
      worst = i;
    }
  }
  if (!fa.empty()) report.worst_index = a.path(worst);
  report.pass = report.max_rel_err <= tol;
  return report;
}

}  // namespace dualprop
