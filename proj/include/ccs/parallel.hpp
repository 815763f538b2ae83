#pragma once

#include <atomic>
#include <condition_variable>
#include <cstddef>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace ccs {

// Minimal fork-join pool. Work items are dealt by index and every item
// writes disjoint state, so results are bitwise independent of the pool
// size; only the execution order varies.
class ThreadPool {
 public:
  explicit ThreadPool(int threads);
  ~ThreadPool();

  ThreadPool(const ThreadPool&) = delete;
  ThreadPool& operator=(const ThreadPool&) = delete;

  int thread_count() const { return int(workers_.size()) + 1; }

  // Runs fn(i) for every i in [0, count); blocks until all are done.
  void for_each_index(size_t count, const std::function<void(size_t)>& fn);

 private:
  void worker_loop();

  std::vector<std::thread> workers_;
  std::mutex mutex_;
  std::condition_variable start_cv_;
  std::condition_variable done_cv_;
  const std::function<void(size_t)>* job_ = nullptr;
  size_t job_count_ = 0;
  std::atomic<size_t> next_index_{0};
  size_t pending_ = 0;
  uint64_t generation_ = 0;
  bool stop_ = false;
};

// Convenience: serial fallback when pool is null.
inline void parallel_for(ThreadPool* pool, size_t count, const std::function<void(size_t)>& fn) {
  if (pool == nullptr || pool->thread_count() <= 1 || count <= 1) {
    for (size_t i = 0; i < count; ++i) fn(i);
  } else {
    pool->for_each_index(count, fn);
  }
}

}  // namespace ccs
