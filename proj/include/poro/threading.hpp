#ifndef PORO_THREADING_HPP
#define PORO_THREADING_HPP

#include <atomic>
#include <condition_variable>
#include <cstddef>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace poro {

// Persistent worker pool shared by assembly and the Krylov kernels.
// All loops use static chunk boundaries that depend only on problem size,
// never on the worker count, so floating-point results are reproducible
// across thread counts.
class ThreadPool {
public:
    static ThreadPool& instance() {
        static ThreadPool pool;
        return pool;
    }

    void resize(int nthreads) {
        if (nthreads < 1) nthreads = 1;
        if (nthreads == nthreads_) return;
        shutdown();
        nthreads_ = nthreads;
        stop_ = false;
        for (int i = 0; i + 1 < nthreads_; ++i)
            workers_.emplace_back([this] { worker_loop(); });
    }

    int size() const { return nthreads_; }

    // Runs fn(chunk) for chunk in [0, nchunks). The caller thread
    // participates. Chunks are claimed through an atomic counter; output
    // of each chunk must be disjoint from the others.
    void run_chunks(int nchunks, const std::function<void(int)>& fn) {
        if (nchunks <= 0) return;
        if (nthreads_ == 1 || nchunks == 1) {
            for (int c = 0; c < nchunks; ++c) fn(c);
            return;
        }
        {
            std::unique_lock<std::mutex> lk(mtx_);
            task_ = &fn;
            next_chunk_ = 0;
            chunks_total_ = nchunks;
            pending_ = nchunks;
            ++generation_;
        }
        cv_work_.notify_all();
        work([&] {});
        std::unique_lock<std::mutex> lk(mtx_);
        cv_done_.wait(lk, [this] { return pending_ == 0; });
        task_ = nullptr;
    }

    ~ThreadPool() { shutdown(); }

private:
    ThreadPool() = default;

    void work(const std::function<void()>&) {
        while (true) {
            int c = next_chunk_.fetch_add(1);
            if (c >= chunks_total_) break;
            (*task_)(c);
            if (pending_.fetch_sub(1) == 1) {
                std::lock_guard<std::mutex> lk(mtx_);
                cv_done_.notify_all();
            }
        }
    }

    void worker_loop() {
        std::uint64_t seen = 0;
        while (true) {
            {
                std::unique_lock<std::mutex> lk(mtx_);
                cv_work_.wait(lk, [&] { return stop_ || generation_ != seen; });
                if (stop_) return;
                seen = generation_;
            }
            if (task_) work([] {});
        }
    }

    void shutdown() {
        {
            std::lock_guard<std::mutex> lk(mtx_);
            stop_ = true;
        }
        cv_work_.notify_all();
        for (auto& w : workers_) w.join();
        workers_.clear();
    }

    std::vector<std::thread> workers_;
    int nthreads_ = 1;
    std::mutex mtx_;
    std::condition_variable cv_work_, cv_done_;
    const std::function<void(int)>* task_ = nullptr;
    std::atomic<int> next_chunk_{0};
    int chunks_total_ = 0;
    std::atomic<int> pending_{0};
    std::uint64_t generation_ = 0;
    bool stop_ = false;
};

inline void set_threads(int n) { ThreadPool::instance().resize(n); }
inline int num_threads() { return ThreadPool::instance().size(); }

// Static range split: fn(begin, end) on [0, n) with chunk boundaries that
// depend only on n and grain.
template <class Fn>
void parallel_for(std::size_t n, std::size_t grain, const Fn& fn) {
    if (n == 0) return;
    std::size_t nchunks = (n + grain - 1) / grain;
    ThreadPool::instance().run_chunks(static_cast<int>(nchunks), [&](int c) {
        std::size_t b = std::size_t(c) * grain;
        std::size_t e = std::min(n, b + grain);
        fn(b, e);
    });
}

// Deterministic parallel reduction: partial sums over fixed-size chunks,
// combined serially in chunk order.
template <class Fn>
double parallel_sum(std::size_t n, const Fn& term_block) {
    constexpr std::size_t grain = 8192;
    if (n == 0) return 0.0;
    std::size_t nchunks = (n + grain - 1) / grain;
    std::vector<double> partial(nchunks, 0.0);
    ThreadPool::instance().run_chunks(static_cast<int>(nchunks), [&](int c) {
        std::size_t b = std::size_t(c) * grain;
        std::size_t e = std::min(n, b + grain);
        partial[std::size_t(c)] = term_block(b, e);
    });
    double s = 0.0;
    for (double p : partial) s += p;
    return s;
}

} // namespace poro

#endif
