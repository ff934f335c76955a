#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace vcore {

/// Splits [0, count) into `threads` contiguous chunks and calls
/// fn(chunk_index, begin, end) for each, one thread per chunk. The first
/// exception thrown by any chunk is rethrown after all threads join.
template <class Fn>
void parallel_chunks(std::size_t count, unsigned threads, Fn&& fn) {
    threads = std::max(1u, threads);
    if (threads == 1 || count <= 1) {
        fn(std::size_t{0}, std::size_t{0}, count);
        return;
    }
    const std::size_t chunks = std::min<std::size_t>(threads, count);
    std::vector<std::exception_ptr> errors(chunks);
    std::vector<std::thread> workers;
    workers.reserve(chunks);
    for (std::size_t c = 0; c < chunks; ++c) {
        const std::size_t begin = c * count / chunks;
        const std::size_t end = (c + 1) * count / chunks;
        workers.emplace_back([&, c, begin, end] {
            try {
                fn(c, begin, end);
            } catch (...) {
                errors[c] = std::current_exception();
            }
        });
    }
    for (auto& w : workers) w.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

/// Runs fn(i) for every i in [0, count) on up to `threads` workers, pulling
/// items from a shared cursor. fn must not depend on execution order.
template <class Fn>
void parallel_for_each_index(std::size_t count, unsigned threads, Fn&& fn) {
    parallel_chunks(count, threads, [&](std::size_t, std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) fn(i);
    });
}

}  // namespace vcore
