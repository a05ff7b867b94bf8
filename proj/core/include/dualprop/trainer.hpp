#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dualprop/model.hpp"

namespace dualprop {

/// Gradient engine used by the trainer, gradcheck and the benchmark.
enum class Engine { Paper, Seeded, Backprop };

std::string_view to_string(Engine e) noexcept;
Engine parse_engine(std::string_view name);

enum class BatchMode { PerSample, FullBatch };

std::string_view to_string(BatchMode m) noexcept;
BatchMode parse_batch_mode(std::string_view name);

struct Dataset {
  std::string name;
  std::size_t feature_width = 0;
  std::vector<Sample> samples;
};

/// Throws ConfigError if empty or if a sample's width differs from
/// feature_width; NonFiniteError on non-finite values.
void validate(const Dataset& d);

/// "and", "or", "nand", "xor" (4-point truth tables) and "line2d" (64 grid
/// points in [-1,1]^2 labelled by a fixed half-plane).
Dataset builtin_dataset(std::string_view name);
bool is_builtin_dataset(std::string_view name) noexcept;

/// CSV with a header row, columns x1..xn,y. Throws IoError on a missing
/// file, ragged rows or unparsable numbers.
Dataset load_csv_dataset(const std::filesystem::path& path);
Dataset parse_csv_dataset(std::string_view text, std::string name);
std::string dataset_to_csv(const Dataset& d);

using Model = std::variant<Perceptron, Mlp>;

struct TrainConfig {
  Engine engine = Engine::Seeded;
  double learning_rate = 0.5;
  std::size_t epochs = 2000;
  BatchMode batch_mode = BatchMode::PerSample;
  std::uint64_t rng_seed = 0;
  double init_range = 0.5;
  Activation activation = Activation::Sigmoid;
  /// Builtin dataset name or a CSV path.
  std::string dataset = "and";
  /// Hidden layer widths; empty trains a single-layer perceptron.
  std::vector<std::size_t> hidden;
  /// Seeded per-epoch permutation of the sample order.
  bool shuffle = false;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

/// Throws ConfigError for lr <= 0, epochs == 0, init_range <= 0, zero
/// hidden widths, or engine=paper with hidden layers.
void validate(const TrainConfig& cfg);

struct EpochRecord {
  std::size_t epoch = 0;    // 1-based
  double mean_loss = 0.0;   // dataset mean after the epoch's updates
  double grad_norm = 0.0;   // largest |gradient entry| seen during the epoch
  double wall_ms = 0.0;

  friend bool operator==(const EpochRecord&, const EpochRecord&) = default;
};

struct TrainLog {
  TrainConfig config;
  std::string dataset_name;
  std::vector<EpochRecord> epochs;
  Model final_model;
  /// Updates skipped because the ones-seeded rule raised SingularSeed.
  std::size_t engine_failures = 0;
  bool diverged = false;

  double final_loss() const { return epochs.empty() ? 0.0 : epochs.back().mean_loss; }
};

Model initial_model(const TrainConfig& cfg, std::size_t feature_width);

/// Gradient of the squared error on one sample with the selected engine.
/// engine=paper on an Mlp is a ConfigError.
Gradient compute_gradient(Engine e, const Model& m, const Sample& s);

double mean_loss(const Model& m, const Dataset& d);

/// p <- p - lr * dp for every parameter.
Perceptron sgd_step(const Perceptron& m, const Gradient& g, double lr);
Mlp sgd_step(const Mlp& m, const Gradient& g, double lr);
Model sgd_step(const Model& m, const Gradient& g, double lr);

/// Loads cfg.dataset (builtin name or CSV path) and trains.
TrainLog train(const TrainConfig& cfg);
TrainLog train(const TrainConfig& cfg, const Dataset& data);
/// Starts from the given model instead of initial_model().
TrainLog train(const TrainConfig& cfg, const Dataset& data, Model start);

/// epoch,mean_loss,grad_norm,wall_ms with shortest round-trip numbers.
std::string train_log_csv(const TrainLog& log);

}  // namespace dualprop
