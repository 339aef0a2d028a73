// Copyright 2026 The Vesseltree Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef VESSELTREE_PARALLEL_HPP_
#define VESSELTREE_PARALLEL_HPP_

#include <atomic>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace vesseltree {

//! Worker count: explicit request, else hardware concurrency, both capped
//! by the VESSELTREE_THREADS environment variable when it is set.
inline int effective_threads(int requested = 0) {
  int n = requested > 0 ? requested
                        : static_cast<int>(std::thread::hardware_concurrency());
  if (n < 1) n = 1;
  if (const char* env = std::getenv("VESSELTREE_THREADS")) {
    int cap = std::atoi(env);
    if (cap >= 1 && cap < n) n = cap;
  }
  return n;
}

//! Runs fn(i) for i in [0, count) on up to `threads` workers. Tasks must
//! write to disjoint outputs; the work distribution carries no ordering
//! guarantees, so results must not depend on scheduling.
template <typename Fn>
void parallel_for(std::size_t count, Fn&& fn, int threads = 0) {
  const int n = std::min<std::size_t>(effective_threads(threads), count);
  if (n <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  pool.reserve(n);
  for (int t = 0; t < n; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count || failed.load()) return;
        try {
          fn(i);
        } catch (...) {
          if (!failed.exchange(true)) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failed.load() && error) std::rethrow_exception(error);
}

}  // namespace vesseltree

#endif  // VESSELTREE_PARALLEL_HPP_
