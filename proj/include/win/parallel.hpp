#pragma once

#include <cstdint>
#include <functional>

namespace win {

// Worker count: hardware_concurrency capped by the WIN_THREADS env var.
int thread_count();

// Runs body over contiguous chunks of [0, count). Each index is processed by
// exactly one worker, so results are identical for any thread count as long
// as body(i) touches only state owned by index i.
void parallel_for(std::int64_t count, const std::function<void(std::int64_t begin, std::int64_t end)>& body);

}  // namespace win
