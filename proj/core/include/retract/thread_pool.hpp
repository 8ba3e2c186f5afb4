// Copyright 2026 The Retract Authors
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

#pragma once

#include <atomic>
#include <condition_variable>
#include <cstddef>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace retract {

// Fixed-size pool for data-parallel loops. Work is partitioned by the caller
// into indexed tasks that write to disjoint slots; any cross-task reduction
// happens on the calling thread in task-index order, so results do not depend
// on the number of workers.
class ThreadPool {
 public:
  explicit ThreadPool(unsigned workers = 0);
  ~ThreadPool();

  ThreadPool(const ThreadPool&) = delete;
  ThreadPool& operator=(const ThreadPool&) = delete;

  unsigned workerCount() const { return static_cast<unsigned>(threads_.size() + 1); }

  // Runs fn(i) for i in [0, count). Blocks until all tasks finish. The
  // calling thread participates. Exceptions from tasks are rethrown (first
  // one wins).
  void parallelFor(size_t count, const std::function<void(size_t)>& fn);

  // Reads RETRACT_THREADS if set, else hardware concurrency.
  static unsigned defaultWorkerCount();

 private:
  void workerLoop();

  std::vector<std::thread> threads_;
  std::mutex mutex_;
  std::condition_variable wake_;
  std::condition_variable done_;

  const std::function<void(size_t)>* job_ = nullptr;
  size_t job_count_ = 0;
  std::atomic<size_t> next_{0};
  size_t remaining_ = 0;
  uint64_t generation_ = 0;
  bool stop_ = false;
  std::exception_ptr error_;
};

}  // namespace retract
