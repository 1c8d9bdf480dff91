#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>

namespace ptycho {
namespace {

// Plans are cached per (nx, ny, sign). Creation is serialized (FFTW planning
// is not thread-safe); fftw_execute_dft on distinct buffers is.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(int nx, int ny, int sign) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto key = std::make_tuple(nx, ny, sign);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;

    std::vector<cdouble> a(static_cast<size_t>(nx) * ny);
    std::vector<cdouble> b(a.size());
    // FFTW_UNALIGNED: the plan must accept whatever buffers callers hand in.
    fftw_plan plan = fftw_plan_dft_2d(
        ny, nx, reinterpret_cast<fftw_complex*>(a.data()),
        reinterpret_cast<fftw_complex*>(b.data()), sign,
        FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!plan) throw_numeric("fftw plan creation failed");
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  PlanCache() = default;
  std::mutex mutex_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

void execute(int nx, int ny, int sign, const cdouble* in, cdouble* out) {
  fftw_plan plan = PlanCache::instance().get(nx, ny, sign);
  fftw_execute_dft(plan,
                   reinterpret_cast<fftw_complex*>(const_cast<cdouble*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

}  // namespace

void fft2_forward_raw(int nx, int ny, const cdouble* in, cdouble* out) {
  execute(nx, ny, FFTW_FORWARD, in, out);
}

void fft2_backward_raw(int nx, int ny, const cdouble* in, cdouble* out) {
  execute(nx, ny, FFTW_BACKWARD, in, out);
}

ComplexField dft2(const ComplexField& f) {
  f.grid.validate();
  ComplexField out(f.grid);
  fft2_forward_raw(f.grid.nx, f.grid.ny, f.values.data(), out.values.data());
  return out;
}

ComplexField idft2(const ComplexField& F) {
  F.grid.validate();
  ComplexField out(F.grid);
  fft2_backward_raw(F.grid.nx, F.grid.ny, F.values.data(), out.values.data());
  const double scale = 1.0 / F.grid.pixel_count();
  for (cdouble& v : out.values) v *= scale;
  return out;
}

}  // namespace ptycho
