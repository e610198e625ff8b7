#pragma once

#include <cstddef>
#include <functional>

namespace kghopf {

/// Caps the worker count used by grid sweeps (0 = hardware concurrency).
void set_thread_count(unsigned n);
[[nodiscard]] unsigned thread_count();

/// Calls body(i) for i in [0, n), spread over the configured workers.
/// Results must be written to per-index slots; ordering is unspecified.
/// The first exception thrown by any body is rethrown after all workers stop.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace kghopf
