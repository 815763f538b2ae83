#include "ccs/parallel.hpp"

namespace ccs {

ThreadPool::ThreadPool(int threads) {
  int extra = threads - 1;
  if (extra < 0) extra = 0;
  workers_.reserve(size_t(extra));
  for (int i = 0; i < extra; ++i) workers_.emplace_back([this] { worker_loop(); });
}

ThreadPool::~ThreadPool() {
  {
    std::unique_lock lock(mutex_);
    stop_ = true;
  }
  start_cv_.notify_all();
  for (auto& w : workers_) w.join();
}

void ThreadPool::worker_loop() {
  uint64_t seen = 0;
  for (;;) {
    const std::function<void(size_t)>* job = nullptr;
    size_t count = 0;
    {
      std::unique_lock lock(mutex_);
      start_cv_.wait(lock, [&] { return stop_ || generation_ != seen; });
      if (stop_) return;
      seen = generation_;
      job = job_;
      count = job_count_;
    }
    for (;;) {
      size_t i = next_index_.fetch_add(1, std::memory_order_relaxed);
      if (i >= count) break;
      (*job)(i);
    }
    {
      std::unique_lock lock(mutex_);
      if (--pending_ == 0) done_cv_.notify_all();
    }
  }
}

void ThreadPool::for_each_index(size_t count, const std::function<void(size_t)>& fn) {
  if (count == 0) return;
  if (workers_.empty() || count == 1) {
    for (size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  {
    std::unique_lock lock(mutex_);
    job_ = &fn;
    job_count_ = count;
    next_index_.store(0, std::memory_order_relaxed);
    pending_ = workers_.size();
    ++generation_;
  }
  start_cv_.notify_all();
  // The calling thread works too.
  for (;;) {
    size_t i = next_index_.fetch_add(1, std::memory_order_relaxed);
    if (i >= count) break;
    fn(i);
  }
  std::unique_lock lock(mutex_);
  done_cv_.wait(lock, [&] { return pending_ == 0; });
  job_ = nullptr;
}

}  // namespace ccs
