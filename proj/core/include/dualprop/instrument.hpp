#pragma once

#include <cstdint>

namespace dualprop::instrument {

// Per-thread count of full network evaluations (real or dual). Gradient
// engines bump it once per forward pass so tests and the benchmark can
// check how many passes a gradient costs.

void count_pass() noexcept;
std::uint64_t passes() noexcept;
void reset_passes() noexcept;

}  // namespace dualprop::instrument
