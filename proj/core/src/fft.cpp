#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>

#include "cirad/error.hpp"

namespace cirad::detail {

namespace {

class PlanCache {
public:
    ~PlanCache() {
        for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    }

    fftw_plan get(std::size_t n, FftDirection dir) {
        std::lock_guard lock(mutex_);
        const auto key = std::make_pair(n, dir);
        if (auto it = plans_.find(key); it != plans_.end()) return it->second;
        // Planning touches global FFTW state and must be serialized. The
        // unaligned flag lets one plan run on any buffer with the same
        // algorithm, which keeps results independent of allocation.
        auto* in = fftw_alloc_complex(n);
        const int sign = dir == FftDirection::Forward ? FFTW_FORWARD : FFTW_BACKWARD;
        fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), in, in, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftw_free(in);
        if (plan == nullptr) throw RuntimeError("FFTW failed to create a plan of length " + std::to_string(n));
        plans_.emplace(key, plan);
        return plan;
    }

private:
    std::mutex mutex_;
    std::map<std::pair<std::size_t, FftDirection>, fftw_plan> plans_;
};

PlanCache& cache() {
    static PlanCache instance;
    return instance;
}

}  // namespace

void fft_inplace(std::span<cd> data, FftDirection dir) {
    if (data.empty()) return;
    fftw_plan plan = cache().get(data.size(), dir);
    auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(plan, ptr, ptr);
}

}  // namespace cirad::detail
