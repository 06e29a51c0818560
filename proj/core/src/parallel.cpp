#include "psde/parallel.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace psde {

std::size_t default_thread_count() {
    if (const char* env = std::getenv("PSDE_THREADS")) {
        std::size_t v = 0;
        const char* end = env + std::strlen(env);
        auto [ptr, ec] = std::from_chars(env, end, v);
        if (ec == std::errc{} && ptr == end && v > 0) {
            return v;
        }
    }
    return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, std::size_t threads,
                  const std::function<void(std::size_t)>& body) {
    threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(n, 1));
    if (threads == 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::exception_ptr first_error;
    std::mutex error_mutex;
    {
        std::vector<std::jthread> workers;
        workers.reserve(threads);
        const std::size_t block = (n + threads - 1) / threads;
        for (std::size_t w = 0; w < threads; ++w) {
            const std::size_t begin = w * block;
            const std::size_t end = std::min(n, begin + block);
            if (begin >= end) break;
            workers.emplace_back([&, begin, end] {
                try {
                    for (std::size_t i = begin; i < end; ++i) body(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            });
        }
    }
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace psde
