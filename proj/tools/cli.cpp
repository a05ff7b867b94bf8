#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "dualprop/bench.hpp"
#include "dualprop/errors.hpp"
#include "dualprop/oracle.hpp"
#include "dualprop/serialize.hpp"
#include "dualprop/trainer.hpp"

namespace dualprop::cli {

namespace {

const std::vector<std::string> kGradEngines{"paper", "seeded", "backprop", "fd"};

Gradient gradient_by_tag(const std::string& tag, const Perceptron& m, const Sample& s) {
  if (tag == "paper") return grad_paper(m, s);
  if (tag == "seeded") return grad_forward_seeded(m, s);
  if (tag == "backprop") return grad_backprop_analytic(m, s);
  if (tag == "fd") return grad_finite_difference(m, s);
  throw ConfigError("unknown gradient engine '" + tag + "'");
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write '" + path.string() + "'");
  f << contents;
  if (!f) throw IoError("failed writing '" + path.string() + "'");
}

struct GradcheckOptions {
  std::size_t n = 2;
  std::size_t trials = 100;
  std::string engine_a = "paper";
  std::string engine_b = "backprop";
  double tol = 1e-10;
  std::uint64_t seed = 0;
  std::string activation = "sigmoid";
  std::string out;
};

int cmd_gradcheck(const GradcheckOptions& o, std::ostream& out) {
  if (o.n == 0) throw ConfigError("--n must be at least 1");
  if (o.trials == 0) throw ConfigError("--trials must be at least 1");
  if (!(o.tol >= 0.0)) throw ConfigError("--tol must be non-negative");
  const Activation act = parse_activation(o.activation);

  SplitMix64 rng(o.seed);
  GradReport aggregate;
  bool first = true;
  for (std::size_t t = 0; t < o.trials; ++t) {
    const Perceptron m = guarded_perceptron(o.n, act, rng);
    const Sample s = random_sample(o.n, rng);
    GradReport r = compare(gradient_by_tag(o.engine_a, m, s), gradient_by_tag(o.engine_b, m, s), o.tol);
    const double abs_so_far = first ? 0.0 : aggregate.max_abs_err;
    if (first || r.max_rel_err > aggregate.max_rel_err) aggregate = std::move(r);
    aggregate.max_abs_err = std::max(aggregate.max_abs_err, abs_so_far);
    first = false;
  }
  aggregate.tolerance = o.tol;
  aggregate.pass = aggregate.max_rel_err <= o.tol;

  const std::string json = to_json(aggregate);
  out << json << "\n";
  if (!o.out.empty()) write_file(o.out, json + "\n");
  return aggregate.pass ? kExitOk : kExitCheckFailed;
}

struct TrainOptions {
  std::string dataset = "and";
  std::string engine = "seeded";
  double lr = 0.5;
  std::size_t epochs = 2000;
  std::string batch = "per_sample";
  std::uint64_t seed = 0;
  std::string out = ".";
  std::string activation = "sigmoid";
  double init_range = 0.5;
  std::vector<std::size_t> hidden;
  bool shuffle = false;
};

int cmd_train(const TrainOptions& o, std::ostream& out) {
  TrainConfig cfg;
  cfg.dataset = o.dataset;
  cfg.engine = parse_engine(o.engine);
  cfg.learning_rate = o.lr;
  cfg.epochs = o.epochs;
  cfg.batch_mode = parse_batch_mode(o.batch);
  cfg.rng_seed = o.seed;
  cfg.activation = parse_activation(o.activation);
  cfg.init_range = o.init_range;
  cfg.hidden = o.hidden;
  cfg.shuffle = o.shuffle;
  validate(cfg);

  const Dataset data = is_builtin_dataset(cfg.dataset) ? builtin_dataset(cfg.dataset) : load_csv_dataset(cfg.dataset);
  const TrainLog log = train(cfg, data);

  const std::filesystem::path dir(o.out);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
  write_file(dir / "log.json", to_json(log) + "\n");
  write_file(dir / "log.csv", train_log_csv(log));

  out << "dataset " << log.dataset_name << ", engine " << to_string(cfg.engine) << ", " << log.epochs.size()
      << " epochs, " << log.engine_failures << " skipped updates\n";
  out.precision(10);
  out << "final mean loss: " << log.final_loss() << "\n";
  if (log.diverged) {
    out << "training diverged (non-finite loss)\n";
    return kExitCheckFailed;
  }
  return kExitOk;
}

struct BenchOptions {
  std::vector<std::size_t> widths{8, 16, 32, 64, 128, 256};
  std::vector<std::string> engines{"paper", "seeded", "backprop"};
  std::size_t reps = 10;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_bench(const BenchOptions& o, std::ostream& out) {
  BenchConfig cfg;
  cfg.widths = o.widths;
  cfg.engines.clear();
  for (const auto& e : o.engines) cfg.engines.push_back(parse_engine(e));
  cfg.reps = o.reps;
  cfg.seed = o.seed;
  const auto results = run_bench(cfg);
  out << bench_table(results);
  out << "(CPU only; no GPU baseline is measured)\n";
  if (!o.out.empty()) write_file(o.out, bench_csv(results));
  return kExitOk;
}

struct DatasetOptions {
  std::string name;
  std::string inspect;
  std::string out;
};

int cmd_dataset(const DatasetOptions& o, std::ostream& out) {
  if (!o.inspect.empty()) {
    const Dataset d = load_csv_dataset(o.inspect);
    out << d.name << ": " << d.samples.size() << " samples, " << d.feature_width << " features\n";
    return kExitOk;
  }
  if (o.name.empty()) throw ConfigError("dataset: give --name <builtin> or --inspect <csv>");
  const std::string csv = dataset_to_csv(builtin_dataset(o.name));
  if (o.out.empty()) {
    out << csv;
  } else {
    write_file(o.out, csv);
  }
  return kExitOk;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Removes "--config <path>" / "--config=<path>" and returns the path.
std::string extract_config_path(std::vector<std::string>& args) {
  std::string path;
  for (std::size_t i = 0; i < args.size();) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw ConfigError("--config requires a path");
      path = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
    } else {
      ++i;
    }
  }
  return path;
}

}  // namespace

std::vector<std::string> merge_config_file(std::vector<std::string> args, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  auto given = [&](const std::string& key) {
    const std::string flag = "--" + key;
    return std::any_of(args.begin(), args.end(),
                       [&](const std::string& a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
  };
  std::vector<std::string> extra;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw IoError(path + ":" + std::to_string(line_no) + ": expected key=value");
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (!given(key)) extra.push_back("--" + key + "=" + value);
  }
  args.insert(args.end(), extra.begin(), extra.end());
  return args;
}

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"dualprop: forward-mode (dual number) gradients for perceptrons"};
  app.require_subcommand(1, 1);

  GradcheckOptions gc;
  auto* gradcheck = app.add_subcommand("gradcheck", "Compare two gradient engines on random perceptrons");
  gradcheck->add_option("--n", gc.n, "Input width")->capture_default_str();
  gradcheck->add_option("--trials", gc.trials, "Number of random models")->capture_default_str();
  gradcheck->add_option("--engine-a", gc.engine_a, "paper|seeded|backprop|fd")
      ->check(CLI::IsMember(kGradEngines))
      ->capture_default_str();
  gradcheck->add_option("--engine-b", gc.engine_b, "paper|seeded|backprop|fd")
      ->check(CLI::IsMember(kGradEngines))
      ->capture_default_str();
  gradcheck->add_option("--tol", gc.tol, "Relative tolerance")->capture_default_str();
  gradcheck->add_option("--seed", gc.seed, "Random seed")->capture_default_str();
  gradcheck->add_option("--activation", gc.activation, "sigmoid|tanh|identity")->capture_default_str();
  gradcheck->add_option("--out", gc.out, "Also write the JSON report here");

  TrainOptions tr;
  auto* train_cmd = app.add_subcommand("train", "Train by gradient descent and write log.json/log.csv");
  train_cmd->add_option("--dataset", tr.dataset, "Builtin name (and, or, nand, xor, line2d) or CSV path")
      ->capture_default_str();
  train_cmd->add_option("--engine", tr.engine, "paper|seeded|backprop")->capture_default_str();
  train_cmd->add_option("--lr", tr.lr, "Learning rate")->capture_default_str();
  train_cmd->add_option("--epochs", tr.epochs, "Number of epochs")->capture_default_str();
  train_cmd->add_option("--batch", tr.batch, "per_sample|full_batch")->capture_default_str();
  train_cmd->add_option("--seed", tr.seed, "Random seed")->capture_default_str();
  train_cmd->add_option("--out", tr.out, "Output directory")->capture_default_str();
  train_cmd->add_option("--activation", tr.activation, "sigmoid|tanh|identity")->capture_default_str();
  train_cmd->add_option("--init-range", tr.init_range, "Initial weights uniform in [-r, r]")->capture_default_str();
  train_cmd->add_option("--hidden", tr.hidden, "Hidden layer widths, comma separated")->delimiter(',');
  train_cmd->add_flag("--shuffle", tr.shuffle, "Seeded per-epoch shuffling");

  BenchOptions bo;
  auto* bench = app.add_subcommand("bench", "Time gradient engines against parameter count");
  bench->add_option("--widths", bo.widths, "Comma separated widths")->delimiter(',')->capture_default_str();
  bench->add_option("--engines", bo.engines, "Comma separated engines")->delimiter(',')->capture_default_str();
  bench->add_option("--reps", bo.reps, "Timed repetitions (>= 10)")->capture_default_str();
  bench->add_option("--seed", bo.seed, "Random seed")->capture_default_str();
  bench->add_option("--out", bo.out, "CSV output path");

  DatasetOptions dso;
  auto* dataset = app.add_subcommand("dataset", "Export a builtin dataset as CSV or inspect a CSV file");
  dataset->add_option("--name", dso.name, "Builtin dataset name");
  dataset->add_option("--inspect", dso.inspect, "CSV file to validate and summarize");
  dataset->add_option("--out", dso.out, "CSV output path (default: stdout)");

  try {
    std::vector<std::string> args = raw_args;
    const std::string config_path = extract_config_path(args);
    if (!config_path.empty()) args = merge_config_file(std::move(args), config_path);
    std::reverse(args.begin(), args.end());
    app.parse(std::move(args));
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*gradcheck) return cmd_gradcheck(gc, out);
    if (*train_cmd) return cmd_train(tr, out);
    if (*bench) return cmd_bench(bo, out);
    if (*dataset) return cmd_dataset(dso, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitCheckFailed;
  }
  return kExitUsage;
}

}  // namespace dualprop::cli
