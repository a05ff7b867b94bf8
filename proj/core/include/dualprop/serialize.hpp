#pragma once

// JSON encodings of gradients, gradient reports and training logs. Parsing
// an emitted document reproduces the record it came from.

#include <string>
#include <string_view>

#include "dualprop/oracle.hpp"
#include "dualprop/trainer.hpp"

namespace dualprop {

std::string to_json(const Gradient& g, int indent = 2);
Gradient gradient_from_json(std::string_view text);

std::string to_json(const GradReport& r, int indent = 2);
GradReport grad_report_from_json(std::string_view text);

/// Full log: config echo, dataset name, per-epoch records, final model,
/// engine failure count and divergence flag.
std::string to_json(const TrainLog& log, int indent = 2);
TrainLog train_log_from_json(std::string_view text);

}  // namespace dualprop
