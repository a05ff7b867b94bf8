#include "dualprop/trainer.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "dualprop/errors.hpp"
#include "dualprop/oracle.hpp"

namespace dualprop {

namespace {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

bool parse_number(std::string_view field, double& out) {
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  const auto res = std::from_chars(field.data(), field.data() + field.size(), out);
  return res.ec == std::errc{} && res.ptr == field.data() + field.size() && !field.empty();
}

Dataset truth_table(std::string name, double t00, double t01, double t10, double t11) {
  Dataset d;
  d.name = std::move(name);
  d.feature_width = 2;
  d.samples = {{{0.0, 0.0}, t00}, {{0.0, 1.0}, t01}, {{1.0, 0.0}, t10}, {{1.0, 1.0}, t11}};
  return d;
}

// Root stream layout: first split initializes weights, second drives shuffling.
struct Streams {
  SplitMix64 init;
  SplitMix64 shuffle;
};

Streams make_streams(std::uint64_t seed) {
  SplitMix64 root(seed);
  SplitMix64 init = root.split();
  SplitMix64 shuffle = root.split();
  return {init, shuffle};
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

std::string_view to_string(Engine e) noexcept {
  switch (e) {
    case Engine::Paper: return "paper";
    case Engine::Seeded: return "seeded";
    case Engine::Backprop: return "backprop";
  }
  return "unknown";
}

Engine parse_engine(std::string_view name) {
  if (name == "paper") return Engine::Paper;
  if (name == "seeded") return Engine::Seeded;
  if (name == "backprop") return Engine::Backprop;
  throw ConfigError("unknown engine '" + std::string(name) + "' (expected paper, seeded or backprop)");
}

std::string_view to_string(BatchMode m) noexcept {
  return m == BatchMode::PerSample ? "per_sample" : "full_batch";
}

BatchMode parse_batch_mode(std::string_view name) {
  if (name == "per_sample") return BatchMode::PerSample;
  if (name == "full_batch") return BatchMode::FullBatch;
  throw ConfigError("unknown batch mode '" + std::string(name) + "' (expected per_sample or full_batch)");
}

// ---------------------------------------------------------------------------
// Datasets

void validate(const Dataset& d) {
  if (d.samples.empty()) throw ConfigError("dataset '" + d.name + "' is empty");
  if (d.feature_width == 0) throw ConfigError("dataset '" + d.name + "' has zero features");
  for (std::size_t i = 0; i < d.samples.size(); ++i) {
    const Sample& s = d.samples[i];
    if (s.x.size() != d.feature_width) {
      throw ConfigError("dataset '" + d.name + "': sample " + std::to_string(i) + " has " +
                        std::to_string(s.x.size()) + " features, expected " + std::to_string(d.feature_width));
    }
    for (double v : s.x) {
      if (!std::isfinite(v)) throw NonFiniteError("dataset '" + d.name + "': non-finite feature");
    }
    if (!std::isfinite(s.y)) throw NonFiniteError("dataset '" + d.name + "': non-finite target");
  }
}

bool is_builtin_dataset(std::string_view name) noexcept {
  return name == "and" || name == "or" || name == "nand" || name == "xor" || name == "line2d";
}

Dataset builtin_dataset(std::string_view name) {
  if (name == "and") return truth_table("and", 0, 0, 0, 1);
  if (name == "or") return truth_table("or", 0, 1, 1, 1);
  if (name == "nand") return truth_table("nand", 1, 1, 1, 0);
  if (name == "xor") return truth_table("xor", 0, 1, 1, 0);
  if (name == "line2d") {
    // 8 x 8 grid on [-1,1]^2; label 1 above the line x2 = 0.5 x1 + 0.1.
    // No grid point lies on the line, so the classes are strictly separable.
    Dataset d;
    d.name = "line2d";
    d.feature_width = 2;
    for (int i = 0; i < 8; ++i) {
      for (int j = 0; j < 8; ++j) {
        const double x1 = -1.0 + 2.0 * i / 7.0;
        const double x2 = -1.0 + 2.0 * j / 7.0;
        d.samples.push_back({{x1, x2}, x2 - 0.5 * x1 - 0.1 > 0.0 ? 1.0 : 0.0});
      }
    }
    return d;
  }
  throw ConfigError("unknown builtin dataset '" + std::string(name) + "'");
}

Dataset parse_csv_dataset(std::string_view text, std::string name) {
  Dataset d;
  d.name = std::move(name);
  std::size_t columns = 0;
  bool have_header = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty()) continue;

    const auto fields = split_commas(line);
    const std::string where = d.name + ":" + std::to_string(line_no);
    if (!have_header) {
      double probe = 0.0;
      if (std::all_of(fields.begin(), fields.end(), [&](auto f) { return parse_number(f, probe); })) {
        throw IoError(where + ": header row required (x1..xn,y)");
      }
      if (fields.size() < 2) throw IoError(where + ": need at least one feature column and a target column");
      columns = fields.size();
      have_header = true;
      continue;
    }
    if (fields.size() != columns) {
      throw IoError(where + ": ragged row with " + std::to_string(fields.size()) + " columns, header has " +
                    std::to_string(columns));
    }
    Sample s;
    s.x.resize(columns - 1);
    for (std::size_t c = 0; c < columns; ++c) {
      double v = 0.0;
      if (!parse_number(fields[c], v) || !std::isfinite(v)) {
        throw IoError(where + ": cannot parse '" + std::string(fields[c]) + "' as a finite number");
      }
      if (c + 1 < columns) {
        s.x[c] = v;
      } else {
        s.y = v;
      }
    }
    d.samples.push_back(std::move(s));
  }
  if (!have_header) throw IoError(d.name + ": empty file");
  d.feature_width = columns - 1;
  if (d.samples.empty()) throw IoError(d.name + ": no data rows");
  return d;
}

Dataset load_csv_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open dataset file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv_dataset(buf.str(), path.string());
}

std::string dataset_to_csv(const Dataset& d) {
  std::string out;
  for (std::size_t i = 0; i < d.feature_width; ++i) out += "x" + std::to_string(i + 1) + ",";
  out += "y\n";
  for (const auto& s : d.samples) {
    for (double v : s.x) out += format_double(v) + ",";
    out += format_double(s.y) + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Training

void validate(const TrainConfig& cfg) {
  if (!(cfg.learning_rate > 0.0) || !std::isfinite(cfg.learning_rate)) {
    throw ConfigError("learning rate must be positive");
  }
  if (cfg.epochs == 0) throw ConfigError("epochs must be at least 1");
  if (!(cfg.init_range > 0.0) || !std::isfinite(cfg.init_range)) throw ConfigError("init range must be positive");
  for (std::size_t h : cfg.hidden) {
    if (h == 0) throw ConfigError("hidden layer widths must be positive");
  }
  if (cfg.engine == Engine::Paper && !cfg.hidden.empty()) {
    throw ConfigError("engine 'paper' is defined for single-layer perceptrons only");
  }
}

Model initial_model(const TrainConfig& cfg, std::size_t feature_width) {
  Streams streams = make_streams(cfg.rng_seed);
  if (cfg.hidden.empty()) return random_perceptron(feature_width, cfg.activation, cfg.init_range, streams.init);
  std::vector<std::size_t> widths{feature_width};
  widths.insert(widths.end(), cfg.hidden.begin(), cfg.hidden.end());
  widths.push_back(1);
  return random_mlp(widths, cfg.activation, cfg.init_range, streams.init);
}

Gradient compute_gradient(Engine e, const Model& m, const Sample& s) {
  return std::visit(overloaded{
                        [&](const Perceptron& p) -> Gradient {
                          switch (e) {
                            case Engine::Paper: return grad_paper(p, s);
                            case Engine::Seeded: return grad_forward_seeded(p, s);
                            case Engine::Backprop: return grad_backprop_analytic(p, s);
                          }
                          throw ConfigError("unknown engine");
                        },
                        [&](const Mlp& net) -> Gradient {
                          switch (e) {
                            case Engine::Paper:
                              throw ConfigError("engine 'paper' is defined for single-layer perceptrons only");
                            case Engine::Seeded: return grad_forward_seeded(net, s);
                            case Engine::Backprop: return grad_backprop_analytic(net, s);
                          }
                          throw ConfigError("unknown engine");
                        },
                    },
                    m);
}

double mean_loss(const Model& m, const Dataset& d) {
  double total = 0.0;
  for (const auto& s : d.samples) {
    const double yhat = std::visit([&](const auto& model) { return forward(model, s.x); }, m);
    total += loss(yhat, s.y);
  }
  return total / static_cast<double>(d.samples.size());
}

Perceptron sgd_step(const Perceptron& m, const Gradient& g, double lr) {
  check_shape(g, m);
  if (!(lr > 0.0)) throw ConfigError("learning rate must be positive");
  std::vector<double> w(m.weights().begin(), m.weights().end());
  const auto dW = g.dW();
  for (std::size_t i = 0; i < w.size(); ++i) w[i] -= lr * dW[i];
  return Perceptron(std::move(w), m.bias() - lr * g.db(), m.activation());
}

Mlp sgd_step(const Mlp& m, const Gradient& g, double lr) {
  check_shape(g, m);
  if (!(lr > 0.0)) throw ConfigError("learning rate must be positive");
  std::vector<DenseLayer> layers(m.layers().begin(), m.layers().end());
  for (std::size_t k = 0; k < layers.size(); ++k) {
    auto& layer = layers[k];
    const auto& lg = g.layers[k];
    for (std::size_t i = 0; i < layer.weights.size(); ++i) layer.weights[i] -= lr * lg.dW[i];
    for (std::size_t j = 0; j < layer.bias.size(); ++j) layer.bias[j] -= lr * lg.db[j];
  }
  return Mlp(std::move(layers));
}

Model sgd_step(const Model& m, const Gradient& g, double lr) {
  return std::visit([&](const auto& model) -> Model { return sgd_step(model, g, lr); }, m);
}

TrainLog train(const TrainConfig& cfg) {
  if (is_builtin_dataset(cfg.dataset)) return train(cfg, builtin_dataset(cfg.dataset));
  return train(cfg, load_csv_dataset(cfg.dataset));
}

TrainLog train(const TrainConfig& cfg, const Dataset& data) {
  validate(cfg);
  validate(data);
  return train(cfg, data, initial_model(cfg, data.feature_width));
}

TrainLog train(const TrainConfig& cfg, const Dataset& data, Model start) {
  validate(cfg);
  validate(data);
  const std::size_t width = std::visit(
      overloaded{[](const Perceptron& p) { return p.width(); }, [](const Mlp& m) { return m.input_width(); }}, start);
  if (width != data.feature_width) {
    throw ShapeError("model expects " + std::to_string(width) + " features, dataset '" + data.name + "' has " +
                     std::to_string(data.feature_width));
  }
  if (cfg.engine == Engine::Paper && std::holds_alternative<Mlp>(start)) {
    throw ConfigError("engine 'paper' is defined for single-layer perceptrons only");
  }

  TrainLog log{cfg, data.name, {}, std::move(start), 0, false};
  Streams streams = make_streams(cfg.rng_seed);
  Model& model = log.final_model;

  std::vector<std::size_t> order(data.samples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  using clock = std::chrono::steady_clock;
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const auto start = clock::now();
    if (cfg.shuffle) {
      for (std::size_t i = order.size(); i > 1; --i) {
        std::swap(order[i - 1], order[streams.shuffle.below(i)]);
      }
    }

    double grad_norm = 0.0;
    try {
      if (cfg.batch_mode == BatchMode::PerSample) {
        for (std::size_t idx : order) {
          Gradient g;
          try {
            g = compute_gradient(cfg.engine, model, data.samples[idx]);
          } catch (const SingularSeed&) {
            ++log.engine_failures;
            continue;
          }
          grad_norm = std::max(grad_norm, g.max_abs());
          model = sgd_step(model, g, cfg.learning_rate);
        }
      } else {
        Gradient sum = std::visit([](const auto& m) { return Gradient::zeros_like(m); }, model);
        bool skipped = false;
        for (std::size_t idx : order) {
          try {
            sum += compute_gradient(cfg.engine, model, data.samples[idx]);
          } catch (const SingularSeed&) {
            skipped = true;
            break;
          }
        }
        if (skipped) {
          ++log.engine_failures;
        } else {
          sum *= 1.0 / static_cast<double>(order.size());
          grad_norm = sum.max_abs();
          model = sgd_step(model, sum, cfg.learning_rate);
        }
      }
    } catch (const NonFiniteError&) {
      log.diverged = true;
    } catch (const DomainError&) {
      log.diverged = true;
    }

    const double mean = log.diverged ? std::numeric_limits<double>::quiet_NaN() : mean_loss(model, data);
    const double wall_ms = std::chrono::duration<double, std::milli>(clock::now() - start).count();
    log.epochs.push_back({epoch, mean, grad_norm, wall_ms});
    if (!std::isfinite(mean)) {
      log.diverged = true;
      break;
    }
  }
  return log;
}

std::string train_log_csv(const TrainLog& log) {
  std::string out = "epoch,mean_loss,grad_norm,wall_ms\n";
  for (const auto& r : log.epochs) {
    out += std::to_string(r.epoch) + "," + format_double(r.mean_loss) + "," + format_double(r.grad_norm) + "," +
           format_double(r.wall_ms) + "\n";
  }
  return out;
}

}  // namespace dualprop
