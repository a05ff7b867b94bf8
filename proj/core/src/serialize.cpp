#include "dualprop/serialize.hpp"

#include <limits>

#include "dualprop/errors.hpp"
#include "json.hpp"

namespace dualprop {

using nlohmann::json;

namespace {

// JSON has no NaN/Inf; they are written as null and read back as NaN.
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double read_number(const json& j) {
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  return j.get<double>();
}

json model_json(const Model& m) {
  if (const auto* p = std::get_if<Perceptron>(&m)) {
    return {{"kind", "perceptron"},
            {"weights", std::vector<double>(p->weights().begin(), p->weights().end())},
            {"bias", p->bias()},
            {"activation", to_string(p->activation())}};
  }
  const auto& net = std::get<Mlp>(m);
  json layers = json::array();
  for (const auto& layer : net.layers()) {
    layers.push_back({{"inputs", layer.inputs},
                      {"outputs", layer.outputs},
                      {"weights", layer.weights},
                      {"bias", layer.bias},
                      {"activation", to_string(layer.activation)}});
  }
  return {{"kind", "mlp"}, {"layers", layers}};
}

Model model_from(const json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "perceptron") {
    return Perceptron(j.at("weights").get<std::vector<double>>(), j.at("bias").get<double>(),
                      parse_activation(j.at("activation").get<std::string>()));
  }
  if (kind != "mlp") throw IoError("unknown model kind '" + kind + "'");
  std::vector<DenseLayer> layers;
  for (const auto& l : j.at("layers")) {
    DenseLayer layer;
    layer.inputs = l.at("inputs").get<std::size_t>();
    layer.outputs = l.at("outputs").get<std::size_t>();
    layer.weights = l.at("weights").get<std::vector<double>>();
    layer.bias = l.at("bias").get<std::vector<double>>();
    layer.activation = parse_activation(l.at("activation").get<std::string>());
    layers.push_back(std::move(layer));
  }
  return Mlp(std::move(layers));
}

json gradient_json(const Gradient& g) {
  json layers = json::array();
  for (const auto& l : g.layers) {
    json dW = json::array();
    json db = json::array();
    for (double v : l.dW) dW.push_back(number(v));
    for (double v : l.db) db.push_back(number(v));
    layers.push_back({{"rows", l.rows}, {"cols", l.cols}, {"dW", dW}, {"db", db}});
  }
  return {{"layers", layers}};
}

Gradient gradient_from(const json& j) {
  Gradient g;
  for (const auto& l : j.at("layers")) {
    LayerGradient lg;
    lg.rows = l.at("rows").get<std::size_t>();
    lg.cols = l.at("cols").get<std::size_t>();
    for (const auto& v : l.at("dW")) lg.dW.push_back(read_number(v));
    for (const auto& v : l.at("db")) lg.db.push_back(read_number(v));
    if (lg.dW.size() != lg.rows * lg.cols || lg.db.size() != lg.rows) {
      throw IoError("gradient layer buffers do not match rows x cols");
    }
    g.layers.push_back(std::move(lg));
  }
  return g;
}

json config_json(const TrainConfig& c) {
  return {{"engine", to_string(c.engine)},
          {"learning_rate", c.learning_rate},
          {"epochs", c.epochs},
          {"batch_mode", to_string(c.batch_mode)},
          {"rng_seed", c.rng_seed},
          {"init_range", c.init_range},
          {"activation", to_string(c.activation)},
          {"dataset", c.dataset},
          {"hidden", c.hidden},
          {"shuffle", c.shuffle}};
}

TrainConfig config_from(const json& j) {
  TrainConfig c;
  c.engine = parse_engine(j.at("engine").get<std::string>());
  c.learning_rate = j.at("learning_rate").get<double>();
  c.epochs = j.at("epochs").get<std::size_t>();
  c.batch_mode = parse_batch_mode(j.at("batch_mode").get<std::string>());
  c.rng_seed = j.at("rng_seed").get<std::uint64_t>();
  c.init_range = j.at("init_range").get<double>();
  c.activation = parse_activation(j.at("activation").get<std::string>());
  c.dataset = j.at("dataset").get<std::string>();
  c.hidden = j.at("hidden").get<std::vector<std::size_t>>();
  c.shuffle = j.at("shuffle").get<bool>();
  return c;
}

template <class F>
auto parse_or_throw(std::string_view text, F&& build) {
  try {
    return build(json::parse(text));
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace

std::string to_json(const Gradient& g, int indent) { return gradient_json(g).dump(indent); }

Gradient gradient_from_json(std::string_view text) {
  return parse_or_throw(text, [](const json& j) { return gradient_from(j); });
}

std::string to_json(const GradReport& r, int indent) {
  const json j = {{"grad_a", gradient_json(r.grad_a)},
                  {"grad_b", gradient_json(r.grad_b)},
                  {"max_abs_err", number(r.max_abs_err)},
                  {"max_rel_err", number(r.max_rel_err)},
                  {"worst_index", r.worst_index},
                  {"tolerance", r.tolerance},
                  {"pass", r.pass}};
  return j.dump(indent);
}

GradReport grad_report_from_json(std::string_view text) {
  return parse_or_throw(text, [](const json& j) {
    GradReport r;
    r.grad_a = gradient_from(j.at("grad_a"));
    r.grad_b = gradient_from(j.at("grad_b"));
    r.max_abs_err = read_number(j.at("max_abs_err"));
    r.max_rel_err = read_number(j.at("max_rel_err"));
    r.worst_index = j.at("worst_index").get<std::string>();
    r.tolerance = j.at("tolerance").get<double>();
    r.pass = j.at("pass").get<bool>();
    return r;
  });
}

std::string to_json(const TrainLog& log, int indent) {
  json epochs = json::array();
  for (const auto& e : log.epochs) {
    epochs.push_back({{"epoch", e.epoch},
                      {"mean_loss", number(e.mean_loss)},
                      {"grad_norm", number(e.grad_norm)},
                      {"wall_ms", e.wall_ms}});
  }
  const json j = {{"config", config_json(log.config)},
                  {"dataset_name", log.dataset_name},
                  {"epochs", epochs},
                  {"final_model", model_json(log.final_model)},
                  {"engine_failures", log.engine_failures},
                  {"diverged", log.diverged}};
  return j.dump(indent);
}

TrainLog train_log_from_json(std::string_view text) {
  return parse_or_throw(text, [](const json& j) {
    TrainLog log{config_from(j.at("config")), j.at("dataset_name").get<std::string>(), {},
                 model_from(j.at("final_model")), j.at("engine_failures").get<std::size_t>(),
                 j.at("diverged").get<bool>()};
    for (const auto& e : j.at("epochs")) {
      log.epochs.push_back({e.at("epoch").get<std::size_t>(), read_number(e.at("mean_loss")),
                            read_number(e.at("grad_norm")), e.at("wall_ms").get<double>()});
    }
    return log;
  });
}

}  // namespace dualprop
