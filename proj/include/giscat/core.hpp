#pragma once

#include <complex>
#include <cstdlib>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace giscat {

using Complex = std::complex<double>;

inline constexpr Complex kI{0.0, 1.0};
inline constexpr double kPi = 3.14159265358979323846;

// Error taxonomy maps onto CLI exit codes: config -> 2, numerical -> 3, io -> 4.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};
struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

inline int hardware_threads() {
    if (const char* env = std::getenv("GISCAT_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
    unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : static_cast<int>(n);
}

// Keep BLAS single-threaded; we parallelize at task granularity instead.
inline void pin_blas_threads() {
    ::setenv("OPENBLAS_NUM_THREADS", "1", /*overwrite=*/0);
    ::setenv("OMP_NUM_THREADS", "1", /*overwrite=*/0);
}

// Static block partition so results land in caller-owned slots; iteration
// order inside a worker is ascending, which keeps outputs deterministic.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn, int num_threads = 0) {
    if (n == 0) return;
    int workers = num_threads > 0 ? num_threads : hardware_threads();
    if (workers > static_cast<int>(n)) workers = static_cast<int>(n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::exception_ptr first_error;
    std::mutex err_mutex;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = static_cast<std::size_t>(w); i < n;
                     i += static_cast<std::size_t>(workers)) {
                    fn(i);
                }
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace giscat
