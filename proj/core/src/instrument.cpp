#include "dualprop/instrument.hpp"

namespace dualprop::instrument {

namespace {
thread_local std::uint64_t pass_counter = 0;
}

void count_pass() noexcept { ++pass_counter; }
std::uint64_t passes() noexcept { return pass_counter; }
void reset_passes() noexcept { pass_counter = 0; }

}  // namespace dualprop::instrument
