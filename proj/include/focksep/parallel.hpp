#pragma once

#include <cstdint>
#include <exception>
#include <functional>

namespace focksep::par {

// Worker count used by every parallel loop in the library. 0 = hardware.
void set_workers(int n);
int workers();

// Deterministic parallel map over [0, n): each index writes its own slot and
// no reduction happens inside the parallel region, so results are identical
// for any worker count. Exceptions are captured and rethrown on the caller.
void for_index(std::int64_t n, const std::function<void(std::int64_t)>& body);

// Serial twin of for_index, kept as the reference implementation for the
// equality tests and the benchmark.
void for_index_serial(std::int64_t n, const std::function<void(std::int64_t)>& body);

}  // namespace focksep::par
