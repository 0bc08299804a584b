#pragma once

#include <cstddef>
#include <functional>

namespace hawkes_mf {

/// Worker count from HAWKES_MF_JOBS, else hardware concurrency (at least 1).
[[nodiscard]] std::size_t default_jobs();

/// Calls body(i) for i in [0, count) on up to `jobs` threads. Work items must
/// write only to their own slot; the first exception thrown is rethrown here
/// after all workers stop.
void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& body);

} // namespace hawkes_mf
