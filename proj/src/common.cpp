#include "magschro/common.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <memory>
#include <mutex>
#include <thread>

namespace magschro {

namespace {
template <class T>
T pairwise(const T* v, std::size_t n) {
    if (n <= 32) {
        T s{};
        for (std::size_t i = 0; i < n; ++i) s += v[i];
        return s;
    }
    std::size_t h = n / 2;
    return pairwise(v, h) + pairwise(v + h, n - h);
}
}  // namespace

double pairwise_sum(std::span<const double> v) { return pairwise(v.data(), v.size()); }
cplx pairwise_sum(std::span<const cplx> v) { return pairwise(v.data(), v.size()); }

namespace {
std::atomic<int> g_threads{1};
}

void set_thread_count(int k) {
    if (k < 1) throw InvalidArgument("thread count must be >= 1");
    g_threads = k;
}

int thread_count() { return g_threads; }

namespace {
thread_local bool t_in_pool = false;  // nested calls run inline
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
    const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(g_threads.load()), count);
    if (k <= 1 || t_in_pool) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errs(k);
    for (std::size_t w = 0; w < k; ++w)
        pool.emplace_back([&, w] {
            t_in_pool = true;
            try {
                for (std::size_t i = w * count / k; i < (w + 1) * count / k; ++i) fn(i);
            } catch (...) {
                errs[w] = std::current_exception();
            }
        });
    for (auto& t : pool) t.join();
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
}

const GaussRule& gauss_legendre(int points) {
    if (points < 1) throw InvalidArgument("Gauss rule needs at least one point");
    static std::mutex m;
    static std::map<int, std::unique_ptr<GaussRule>> cache;
    std::lock_guard lock(m);
    auto& slot = cache[points];
    if (slot) return *slot;
    auto r = std::make_unique<GaussRule>();
    r->nodes.resize(points);
    r->weights.resize(points);
    for (int i = 0; i < points; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (points + 0.5)), dp = 1;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1, p1 = x;
            for (int j = 2; j <= points; ++j) {
                double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = points * (x * p1 - p0) / (x * x - 1);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        r->nodes[i] = x;
        r->weights[i] = 2 / ((1 - x * x) * dp * dp);
    }
    slot = std::move(r);
    return *slot;
}

}  // namespace magschro
