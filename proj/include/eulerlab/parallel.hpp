#pragma once

#include <cstddef>
#include <functional>

namespace eulerlab {

/// Upper bound on worker threads used by parallel_for (default: hardware concurrency).
void set_max_jobs(int jobs);
int max_jobs();

/// Run body(i) for i in [0, count) on up to max_jobs() threads. Callers write results by
/// index, so output does not depend on scheduling. The first exception is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace eulerlab
