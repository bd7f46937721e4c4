// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>

namespace risne {

/// Name of the environment variable that caps worker threads.
inline constexpr const char* kThreadsEnvVar = "RISNE_THREADS";

/// Worker count: $RISNE_THREADS if set and positive, else hardware concurrency.
std::size_t worker_threads();

/// Runs fn(i) for i in [0, n). Work items must be independent; results are
/// expected to be written to per-index slots so the outcome is order-free.
/// The first exception thrown by any item is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn, std::size_t threads = 0);

} // namespace risne
