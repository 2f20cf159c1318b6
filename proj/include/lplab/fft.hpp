#pragma once

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <map>
#include <mutex>
#include <tuple>

namespace lplab::fft {

using cplx = std::complex<double>;

namespace detail {

// FFTW planning is not thread-safe; execution with new arrays is. Plans are
// created once per (dim, m, sign) and executed on caller-owned buffers.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(int dim, int m, int sign) {
    std::lock_guard lock(mutex_);
    auto key = std::make_tuple(dim, m, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    std::size_t total = 1;
    int shape[3] = {m, m, m};
    for (int a = 0; a < dim; ++a) total *= static_cast<std::size_t>(m);
    auto* in = fftw_alloc_complex(total);
    auto* out = fftw_alloc_complex(total);
    fftw_plan plan =
        fftw_plan_dft(dim, shape, in, out, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(in);
    fftw_free(out);
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

inline PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

inline void execute(int dim, int m, int sign, const cplx* in, cplx* out) {
  fftw_plan plan = plan_cache().get(dim, m, sign);
  // Out-of-place complex transforms leave the input untouched.
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

}  // namespace detail

/// Unnormalized forward transform sum_x f(x) e^{-ik.x} on an m^dim cube. `in` and `out` must not alias.
inline void forward(int dim, int m, const cplx* in, cplx* out) {
  detail::execute(dim, m, FFTW_FORWARD, in, out);
}

/// Unnormalized inverse transform sum_k c(k) e^{ik.x}.
inline void backward(int dim, int m, const cplx* in, cplx* out) {
  detail::execute(dim, m, FFTW_BACKWARD, in, out);
}

}  // namespace lplab::fft
