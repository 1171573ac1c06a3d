// Copyright 2026 The dqec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DQEC_SRC_PARALLEL_H
#define DQEC_SRC_PARALLEL_H

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace dqec {

/// Runs fn(b) for b in [0, blocks) on up to `threads` workers; rethrows the first failure.
template <typename Fn>
void parallel_blocks(size_t blocks, unsigned threads, Fn fn) {
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(blocks)));
    if (threads <= 1) {
        for (size_t b = 0; b < blocks; b++) {
            fn(b);
        }
        return;
    }
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    for (unsigned t = 0; t < threads; t++) {
        pool.emplace_back([&]() {
            try {
                for (size_t b; (b = next++) < blocks && !failed;) {
                    fn(b);
                }
            } catch (...) {
                if (!failed.exchange(true)) {
                    error = std::current_exception();
                }
            }
        });
    }
    for (auto &th : pool) {
        th.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }
}


}  // namespace dqec

#endif
