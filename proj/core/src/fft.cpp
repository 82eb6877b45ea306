#include "dbar/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace dbar::fft {

namespace {

struct PlanPair {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
};

std::mutex g_plan_mutex;
std::map<int, PlanPair>& plan_cache() {
    static std::map<int, PlanPair> cache;
    return cache;
}

PlanPair get_plans(int n) {
    std::lock_guard<std::mutex> lock(g_plan_mutex);
    auto& cache = plan_cache();
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    // Plan on a scratch buffer; FFTW_UNALIGNED lets the plan run on any
    // caller buffer via the new-array interface.
    std::vector<std::complex<double>> scratch(std::size_t(n) * n);
    auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
    PlanPair pp;
    pp.fwd = fftw_plan_dft_2d(n, n, p, p, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    pp.bwd = fftw_plan_dft_2d(n, n, p, p, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    cache.emplace(n, pp);
    return pp;
}

std::map<int, PlanPair>& plan_cache_1d() {
    static std::map<int, PlanPair> cache;
    return cache;
}

PlanPair get_plans_1d(int n) {
    std::lock_guard<std::mutex> lock(g_plan_mutex);
    auto& cache = plan_cache_1d();
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    std::vector<std::complex<double>> scratch(n);
    auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
    PlanPair pp;
    pp.fwd = fftw_plan_dft_1d(n, p, p, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    pp.bwd = fftw_plan_dft_1d(n, p, p, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    cache.emplace(n, pp);
    return pp;
}

}  // namespace

void forward(std::complex<double>* data, int n) {
    PlanPair pp = get_plans(n);
    auto* p = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(pp.fwd, p, p);
}

void inverse(std::complex<double>* data, int n) {
    PlanPair pp = get_plans(n);
    auto* p = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(pp.bwd, p, p);
    const double s = 1.0 / (double(n) * double(n));
    const std::size_t total = std::size_t(n) * n;
    for (std::size_t i = 0; i < total; ++i) data[i] *= s;
}

void forward_1d(std::complex<double>* data, int n) {
    PlanPair pp = get_plans_1d(n);
    auto* p = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(pp.fwd, p, p);
}

void inverse_1d(std::complex<double>* data, int n) {
    PlanPair pp = get_plans_1d(n);
    auto* p = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(pp.bwd, p, p);
    const double s = 1.0 / double(n);
    for (int i = 0; i < n; ++i) data[i] *= s;
}

}  // namespace dbar::fft
