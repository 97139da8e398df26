#pragma once
#include <fftw3.h>

#include <complex>
#include <cstring>
#include <map>
#include <mutex>
#include <utility>

namespace kdvlab::detail {

inline std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

/** Per-thread cache of FFTW plans and their aligned buffers.
 *
 * FFTW's planner is not thread-safe, so plan creation and destruction are
 * serialized; execution on thread-private buffers is safe.  Plans use
 * FFTW_ESTIMATE on purpose: measured planning picks algorithms by timing,
 * which would make results depend on machine load and break byte-identical
 * reruns.
 */
class FftCache {
 public:
  static FftCache& local() {
    thread_local FftCache cache;
    return cache;
  }

  void dft(int n, int sign, const std::complex<double>* in,
           std::complex<double>* out) {
    Entry& e = entry(n, sign);
    // std::complex<double> is layout-compatible with fftw_complex
    std::memcpy(e.in, static_cast<const void*>(in),
                sizeof(fftw_complex) * static_cast<size_t>(n));
    fftw_execute(e.plan);
    std::memcpy(static_cast<void*>(out), e.out,
                sizeof(fftw_complex) * static_cast<size_t>(n));
  }

  FftCache() = default;
  FftCache(const FftCache&) = delete;
  FftCache& operator=(const FftCache&) = delete;

  ~FftCache() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    for (auto& [key, e] : entries_) {
      fftw_destroy_plan(e.plan);
      fftw_free(e.in);
      fftw_free(e.out);
    }
  }

 private:
  struct Entry {
    fftw_plan plan = nullptr;
    fftw_complex* in = nullptr;
    fftw_complex* out = nullptr;
  };

  Entry& entry(int n, int sign) {
    auto key = std::make_pair(n, sign);
    auto it = entries_.find(key);
    if (it != entries_.end()) return it->second;
    Entry e;
    {
      std::lock_guard<std::mutex> lock(planner_mutex());
      e.in = fftw_alloc_complex(static_cast<size_t>(n));
      e.out = fftw_alloc_complex(static_cast<size_t>(n));
      e.plan = fftw_plan_dft_1d(n, e.in, e.out, sign, FFTW_ESTIMATE);
    }
    return entries_.emplace(key, e).first->second;
  }

  std::map<std::pair<int, int>, Entry> entries_;
};

// Unnormalized DFT, length n; sign -1 forward (e^{-i...}), +1 backward.
inline void dft(int n, int sign, const std::complex<double>* in,
                std::complex<double>* out) {
  FftCache::local().dft(n, sign, in, out);
}

}  // namespace kdvlab::detail
