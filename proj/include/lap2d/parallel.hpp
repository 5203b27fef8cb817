#pragma once

#include <cstddef>
#include <functional>

namespace lap2d {

// Worker-thread budget: an explicit request (see set_thread_request) wins,
// then the LAP2D_THREADS environment variable (values < 1 mean serial),
// otherwise the hardware concurrency capped at 8.
unsigned thread_budget();

// Explicit budget request from configuration; 0 restores the automatic rule.
void set_thread_request(unsigned n);

// Runs fn(0..count-1) across the thread budget.  Each index must be
// independent of the others, so results are identical for any budget.
// The first exception thrown by any index is rethrown to the caller.
void parallel_for(size_t count, const std::function<void(size_t)>& fn);

}  // namespace lap2d
