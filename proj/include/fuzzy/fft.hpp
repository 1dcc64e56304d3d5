#pragma once

#include <complex>
#include <map>
#include <mutex>
#include <vector>

#include <fftw3.h>

#include "fuzzy/grid.hpp"

namespace fuzzy {

// Cached FFTW plans, keyed by (dimension, N, sign). Plans are created with
// FFTW_ESTIMATE (deterministic) and FFTW_UNALIGNED so they can execute on any
// buffer via the new-array interface. Creation is serialized; execution on
// distinct buffers is safe from multiple threads.
class FftPlans {
public:
    static FftPlans& instance() {
        static FftPlans cache;
        return cache;
    }

    void execute(const GridSpec& g, int sign,
                 const std::vector<std::complex<double>>& in,
                 std::vector<std::complex<double>>& out) {
        fftw_plan p = plan_for(g, sign);
        out.resize(in.size());
        // new-array execute: const_cast is safe, FFTW does not write to `in`
        // for out-of-place c2c transforms.
        fftw_execute_dft(p,
                         reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in.data())),
                         reinterpret_cast<fftw_complex*>(out.data()));
    }

    FftPlans(const FftPlans&) = delete;
    FftPlans& operator=(const FftPlans&) = delete;

private:
    FftPlans() = default;
    ~FftPlans() {
        for (auto& [k, p] : plans_) fftw_destroy_plan(p);
    }

    fftw_plan plan_for(const GridSpec& g, int sign) {
        std::scoped_lock lock(mutex_);
        auto key = std::tuple{g.dimension, g.points, sign};
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;

        std::vector<std::complex<double>> a(g.node_count()), b(g.node_count());
        unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        fftw_plan p = g.dimension == 1
            ? fftw_plan_dft_1d(g.points,
                               reinterpret_cast<fftw_complex*>(a.data()),
                               reinterpret_cast<fftw_complex*>(b.data()), sign, flags)
            : fftw_plan_dft_2d(g.points, g.points,
                               reinterpret_cast<fftw_complex*>(a.data()),
                               reinterpret_cast<fftw_complex*>(b.data()), sign, flags);
        plans_.emplace(key, p);
        return p;
    }

    std::mutex mutex_;
    std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

} // namespace fuzzy
