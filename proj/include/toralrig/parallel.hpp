// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>

namespace toralrig {

// Worker count: TORALRIG_THREADS if set, otherwise hardware concurrency.
int thread_count();
void set_thread_count(int n);  // 0 restores the default

// Calls body(begin, end) on disjoint chunks of [0, n).
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace toralrig
