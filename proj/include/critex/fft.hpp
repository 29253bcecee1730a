#pragma once

// Process-wide FFTW plan cache. Planning is serialized; executing a cached
// plan on caller-owned arrays through the new-array interface is thread-safe.

#include <complex>
#include <map>
#include <mutex>
#include <tuple>
#include <vector>

#include <fftw3.h>

namespace critex::fft {

enum class Direction { Forward, Backward };

class PlanCache {
public:
    static PlanCache& instance() {
        static PlanCache cache;
        return cache;
    }

    fftw_plan get(int dim, int points, Direction dir) {
        const Key key{dim, points, dir};
        std::lock_guard lock(mutex_);
        if (auto it = plans_.find(key); it != plans_.end()) return it->second;

        int shape[3] = {points, points, points};
        std::size_t total = 1;
        for (int a = 0; a < dim; ++a) total *= static_cast<std::size_t>(points);
        std::vector<std::complex<double>> in(total), out(total);
        const int sign = dir == Direction::Forward ? FFTW_FORWARD : FFTW_BACKWARD;
        fftw_plan plan = fftw_plan_dft(dim, shape, reinterpret_cast<fftw_complex*>(in.data()),
                                       reinterpret_cast<fftw_complex*>(out.data()), sign,
                                       FFTW_ESTIMATE | FFTW_UNALIGNED);
        plans_.emplace(key, plan);
        return plan;
    }

    PlanCache(const PlanCache&) = delete;
    PlanCache& operator=(const PlanCache&) = delete;

private:
    using Key = std::tuple<int, int, Direction>;

    PlanCache() = default;
    ~PlanCache() {
        for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    }

    std::mutex mutex_;
    std::map<Key, fftw_plan> plans_;
};

/// Unnormalized transform of `in` into `out` (distinct buffers of N^dim entries).
inline void execute(int dim, int points, Direction dir, const std::complex<double>* in,
                    std::complex<double>* out) {
    fftw_plan plan = PlanCache::instance().get(dim, points, dir);
    // FFTW does not write through `in` for out-of-place c2c transforms.
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
}

}  // namespace critex::fft
