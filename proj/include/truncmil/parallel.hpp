#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace truncmil {

/// Runs fn(chunk_index, begin, end) over fixed-size chunks of [0, n).
///
/// The chunk layout depends only on (n, chunk_size), never on the worker
/// count, and chunks write to disjoint outputs; callers then reduce chunk
/// results in index order. That is what makes every driver's output
/// byte-identical for any number of workers. The first exception thrown by
/// a chunk is rethrown on the calling thread once all workers have joined.
inline void parallel_chunks(std::size_t n, std::size_t chunk_size, std::size_t workers,
                            const std::function<void(std::size_t, std::size_t, std::size_t)>& fn) {
    if (n == 0) return;
    if (chunk_size == 0) chunk_size = 1;
    const std::size_t n_chunks = (n + chunk_size - 1) / chunk_size;
    if (workers <= 1 || n_chunks == 1) {
        for (std::size_t c = 0; c < n_chunks; ++c)
            fn(c, c * chunk_size, std::min(n, (c + 1) * chunk_size));
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        try {
            for (;;) {
                const std::size_t c = next.fetch_add(1);
                if (c >= n_chunks) return;
                fn(c, c * chunk_size, std::min(n, (c + 1) * chunk_size));
            }
        } catch (...) {
            const std::lock_guard<std::mutex> lock(error_mutex);
            if (!error) error = std::current_exception();
        }
    };
    std::vector<std::thread> pool;
    const std::size_t count = std::min(workers, n_chunks);
    pool.reserve(count);
    for (std::size_t w = 0; w < count; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

} // namespace truncmil
