#include "adsec/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace adsec {

namespace {

std::atomic<std::size_t> g_override{0};

std::size_t env_default()
{
    if (const char* v = std::getenv("ADSEC_THREADS")) {
        try {
            const long n = std::stol(v);
            if (n > 0)
                return static_cast<std::size_t>(n);
        } catch (...) {
        }
    }
    const unsigned h = std::thread::hardware_concurrency();
    return h ? h : 1;
}

}  // namespace

std::size_t worker_count()
{
    const std::size_t o = g_override.load();
    return o ? o : env_default();
}

void set_worker_count(std::size_t n) { g_override.store(n); }

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& f)
{
    const std::size_t workers = std::min(worker_count(), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i)
            f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex err_mu;
    auto body = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n)
                return;
            try {
                f(i);
            } catch (...) {
                std::lock_guard<std::mutex> lk(err_mu);
                if (!err)
                    err = std::current_exception();
                next.store(n);
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < workers; ++w)
        pool.emplace_back(body);
    body();
    for (auto& t : pool)
        t.join();
    if (err)
        std::rethrow_exception(err);
}

}  // namespace adsec
