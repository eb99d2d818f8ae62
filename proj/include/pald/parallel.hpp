// Shared-memory parallel execution of the blocked algorithms.
//
// Pairwise: fork/join over z-ranges. Pass one gives each worker a private
// focus-size block which is combined by summation; pass two partitions z
// so workers write disjoint column ranges of C and need no locks.
//
// Triplet: each block triple is a task with a declared write-set (the
// unordered block pairs it touches). A ticket scheduler serializes tasks
// that share a block, in task-list order, so per-block update order is
// the sequential one and the output is bit-identical to blocked_triplet.
#pragma once

#include <atomic>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

#include "pald/blocked.hpp"
#include "pald/types.hpp"

namespace pald {

// Worker count plus a flag forcing a fixed combination order. Both
// implementations here are deterministic by construction at fixed p, so
// the flag changes nothing observable; it is kept as part of the plan
// contract.
struct ParallelPlan {
  int workers = 1;
  bool deterministic = false;
};

// Fixed pool of p workers. run(fn) executes fn(worker_id) on every worker
// and blocks until all have finished. With one worker, runs inline.
class ThreadPool {
 public:
  explicit ThreadPool(int workers) : p_(workers < 1 ? 1 : workers) {
    for (int w = 1; w < p_; ++w)
      threads_.emplace_back([this, w] { worker_loop(w); });
  }

  ~ThreadPool() {
    {
      std::lock_guard<std::mutex> lk(mu_);
      stop_ = true;
    }
    cv_work_.notify_all();
    for (auto& t : threads_) t.join();
  }

  int size() const { return p_; }

  void run(const std::function<void(int)>& fn) {
    if (p_ == 1) {
      fn(0);
      return;
    }
    {
      std::lock_guard<std::mutex> lk(mu_);
      fn_ = &fn;
      pending_ = p_ - 1;
      ++generation_;
    }
    cv_work_.notify_all();
    fn(0);
    std::unique_lock<std::mutex> lk(mu_);
    cv_done_.wait(lk, [this] { return pending_ == 0; });
    fn_ = nullptr;
  }

 private:
  void worker_loop(int id) {
    std::uint64_t seen = 0;
    for (;;) {
      const std::function<void(int)>* fn;
      {
        std::unique_lock<std::mutex> lk(mu_);
        cv_work_.wait(lk, [&] { return stop_ || generation_ != seen; });
        if (stop_) return;
        seen = generation_;
        fn = fn_;
      }
      (*fn)(id);
      {
        std::lock_guard<std::mutex> lk(mu_);
        if (--pending_ == 0) cv_done_.notify_one();
      }
    }
  }

  int p_;
  std::vector<std::thread> threads_;
  std::mutex mu_;
  std::condition_variable cv_work_, cv_done_;
  const std::function<void(int)>* fn_ = nullptr;
  int pending_ = 0;
  std::uint64_t generation_ = 0;
  bool stop_ = false;
};

namespace detail {

// Static contiguous partition of [0, total) for worker w of p.
inline std::pair<std::size_t, std::size_t> worker_range(std::size_t total, int p, int w) {
  const std::size_t lo = total * static_cast<std::size_t>(w) / static_cast<std::size_t>(p);
  const std::size_t hi = total * static_cast<std::size_t>(w + 1) / static_cast<std::size_t>(p);
  return {lo, hi};
}

}  // namespace detail

// Runs tasks on `workers` threads such that two tasks sharing any
// resource id never execute concurrently, and each resource sees its
// tasks in task-index order. Deadlock is impossible: a task only ever
// waits on lower-indexed tasks. The body may be entered concurrently for
// conflict-free tasks.
inline void run_conflict_tasks(const std::vector<std::vector<int>>& writesets, int workers,
                               const std::function<void(int)>& body) {
  const int ntasks = static_cast<int>(writesets.size());
  int max_res = 0;
  for (const auto& ws : writesets)
    for (int r : ws) max_res = std::max(max_res, r + 1);

  // Per-(task, resource) ticket: how many earlier tasks touch the resource.
  std::vector<int> next_ticket(max_res, 0);
  std::vector<std::vector<int>> tickets(ntasks);
  for (int t = 0; t < ntasks; ++t) {
    tickets[t].reserve(writesets[t].size());
    for (int r : writesets[t]) tickets[t].push_back(next_ticket[r]++);
  }

  std::vector<std::atomic<int>> done(max_res);
  for (auto& a : done) a.store(0, std::memory_order_relaxed);
  std::atomic<int> next_task{0};

  ThreadPool pool(workers);
  pool.run([&](int) {
    for (;;) {
      const int t = next_task.fetch_add(1, std::memory_order_relaxed);
      if (t >= ntasks) return;
      for (std::size_t i = 0; i < writesets[t].size(); ++i) {
        std::atomic<int>& d = done[writesets[t][i]];
        while (d.load(std::memory_order_acquire) != tickets[t][i]) std::this_thread::yield();
      }
      body(t);
      for (int r : writesets[t]) done[r].fetch_add(1, std::memory_order_release);
    }
  });
}

// Parallel blocked pairwise. For each block pair the z-loop of pass one
// is split across workers into private partial focus blocks, combined in
// worker-rank order (integer sums, exact); pass two splits z so each
// worker owns a disjoint column range of C. Bit-identical across runs at
// fixed p.
template <class Real = double>
PaldResult parallel_pairwise(const DistanceMatrix& d, std::size_t b, const ParallelPlan& plan,
                             Policy policy = Policy::Strict, PhaseTimes* times = nullptr,
                             UpdateStyle style = UpdateStyle::Masked) {
  if (plan.workers < 1) throw ValidationError("worker count must be >= 1");
  if (b < 1) throw ValidationError("pairwise block size must be >= 1");
  const int p = plan.workers;
  const std::size_t n = d.size();
  detail::PhaseClock clock(times);

  detail::ScopedPhase conv;
  const std::vector<Real> dd = detail::to_real<Real>(d);
  std::vector<Real> c(n * n, Real(0));
  std::vector<std::int32_t> u(n * n, 0);
  std::vector<std::vector<std::int32_t>> partial(p, std::vector<std::int32_t>(b * b));
  std::vector<Real> recip(b * b);
  ThreadPool pool(p);
  clock.overhead(conv.elapsed());

  for (std::size_t x0 = 0; x0 < n; x0 += b) {
    const std::size_t x1 = std::min(x0 + b, n);
    for (std::size_t y0 = x0; y0 < n; y0 += b) {
      const std::size_t y1 = std::min(y0 + b, n);
      const std::size_t ys = y1 - y0;
      const std::size_t cells = (x1 - x0) * ys;

      detail::ScopedPhase pf;
      pool.run([&](int w) {
        auto [z0, z1] = detail::worker_range(n, p, w);
        std::fill(partial[w].begin(), partial[w].begin() + cells, 0);
        detail::pair_block_focus(dd.data(), n, policy, x0, x1, y0, y1, z0, z1,
                                 partial[w].data());
      });
      clock.focus(pf.elapsed());

      detail::ScopedPhase pr;
      for (int w = 1; w < p; ++w)
        for (std::size_t i = 0; i < cells; ++i) partial[0][i] += partial[w][i];
      for (std::size_t x = x0; x < x1; ++x) {
        const std::size_t ybeg = (y0 > x + 1) ? y0 : x + 1;
        for (std::size_t y = ybeg; y < y1; ++y) {
          const std::int32_t cnt = partial[0][(x - x0) * ys + (y - y0)];
          u[x * n + y] = u[y * n + x] = cnt;
          recip[(x - x0) * ys + (y - y0)] = Real(1) / static_cast<Real>(cnt);
        }
      }
      clock.overhead(pr.elapsed());

      detail::ScopedPhase pc;
      pool.run([&](int w) {
        auto [z0, z1] = detail::worker_range(n, p, w);
        detail::pair_block_cohesion(dd.data(), n, policy, style, x0, x1, y0, y1, z0, z1,
                                    recip.data(), c.data());
      });
      clock.cohesion(pc.elapsed());
    }
  }

  detail::ScopedPhase out;
  PaldResult r = detail::collect_result(n, std::move(u), c);
  clock.overhead(out.elapsed());
  clock.finish();
  return r;
}

namespace detail {

struct BlockTriple {
  std::size_t x0, y0, z0;
};

// Unordered block-pair resource id for blocks i <= j of nb total.
inline int block_pair_id(std::size_t i, std::size_t j, std::size_t nb) {
  return static_cast<int>(i * nb + j);
}

inline void enumerate_triples(std::size_t n, std::size_t b, std::vector<BlockTriple>& triples,
                              std::vector<std::vector<int>>& writesets) {
  const std::size_t nb = (n + b - 1) / b;
  for (std::size_t x0 = 0; x0 < n; x0 += b)
    for (std::size_t y0 = x0; y0 < n; y0 += b)
      for (std::size_t z0 = y0; z0 < n; z0 += b) {
        triples.push_back({x0, y0, z0});
        const std::size_t bi = x0 / b, bj = y0 / b, bk = z0 / b;
        std::vector<int> ws{block_pair_id(bi, bj, nb), block_pair_id(bj, bk, nb),
                            block_pair_id(bi, bk, nb)};
        std::sort(ws.begin(), ws.end());
        ws.erase(std::unique(ws.begin(), ws.end()), ws.end());
        writesets.push_back(std::move(ws));
      }
}

}  // namespace detail

// Parallel blocked triplet. Each block triple is an independent task;
// tasks sharing a U block (pass one) or C block pair (pass two) are
// serialized by the conflict scheduler in loop order, so the result is
// bit-identical to blocked_triplet for any p.
template <class Real = double>
PaldResult parallel_triplet(const DistanceMatrix& d, std::size_t b_focus,
                            std::size_t b_cohesion, const ParallelPlan& plan,
                            Policy policy = Policy::Strict, PhaseTimes* times = nullptr,
                            UpdateStyle style = UpdateStyle::Masked) {
  if (policy != Policy::Strict)
    throw UnsupportedPolicyError("the triplet algorithm supports the strict policy only");
  if (plan.workers < 1) throw ValidationError("worker count must be >= 1");
  if (b_focus < 1 || b_cohesion < 1) throw ValidationError("triplet block sizes must be >= 1");
  const std::size_t n = d.size();
  detail::PhaseClock clock(times);

  detail::ScopedPhase conv;
  const std::vector<Real> dd = detail::to_real<Real>(d);
  std::vector<Real> c(n * n, Real(0));
  std::vector<std::int32_t> u(n * n, 0);
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = x + 1; y < n; ++y) u[x * n + y] = 2;

  std::vector<detail::BlockTriple> focus_tasks, cohesion_tasks;
  std::vector<std::vector<int>> focus_ws, cohesion_ws;
  detail::enumerate_triples(n, b_focus, focus_tasks, focus_ws);
  detail::enumerate_triples(n, b_cohesion, cohesion_tasks, cohesion_ws);
  clock.overhead(conv.elapsed());

  detail::ScopedPhase pf;
  run_conflict_tasks(focus_ws, plan.workers, [&](int t) {
    const auto [x0, y0, z0] = focus_tasks[t];
    detail::triple_block_focus(dd.data(), n, style, {x0, std::min(x0 + b_focus, n)},
                               {y0, std::min(y0 + b_focus, n)},
                               {z0, std::min(z0 + b_focus, n)}, u.data());
  });
  clock.focus(pf.elapsed());

  detail::ScopedPhase pr;
  detail::mirror_upper(u.data(), n);
  std::vector<Real> recip(n * n, Real(0));
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y)
      if (y != x) recip[x * n + y] = Real(1) / static_cast<Real>(u[x * n + y]);
  clock.overhead(pr.elapsed());

  detail::ScopedPhase pc;
  // ct rows are covered by the same unordered block-pair write-sets as the
  // c blocks they mirror, so the conflict tickets need no extension.
  std::vector<Real> ct(n * n, Real(0));
  run_conflict_tasks(cohesion_ws, plan.workers, [&](int t) {
    const auto [x0, y0, z0] = cohesion_tasks[t];
    detail::triple_block_cohesion(dd.data(), n, style, {x0, std::min(x0 + b_cohesion, n)},
                                  {y0, std::min(y0 + b_cohesion, n)},
                                  {z0, std::min(z0 + b_cohesion, n)}, recip.data(), c.data(),
                                  ct.data());
  });
  // Each entry is touched exactly once here, so any worker partition of the
  // rows would give identical bits; a single pass keeps it simple.
  detail::fold_transposed(c.data(), ct.data(), n);
  clock.cohesion(pc.elapsed());

  detail::ScopedPhase out;
  PaldResult r = detail::collect_result(n, std::move(u), c);
  clock.overhead(out.elapsed());
  clock.finish();
  return r;
}

}  // namespace pald
