#include "nlsfp/dft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <vector>

namespace nlsfp {
namespace {

struct PlanPair {
  fftw_plan fwd = nullptr;
  fftw_plan inv = nullptr;
};

// Plan creation is not thread-safe in FFTW; new-array execution is.
std::mutex g_plan_mutex;
std::map<int, PlanPair>& plan_cache() {
  static std::map<int, PlanPair> cache;
  return cache;
}

const PlanPair& plans_for(int n) {
  std::lock_guard<std::mutex> lock(g_plan_mutex);
  auto& cache = plan_cache();
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  std::vector<std::complex<double>> a(n), b(n);
  auto* ap = reinterpret_cast<fftw_complex*>(a.data());
  auto* bp = reinterpret_cast<fftw_complex*>(b.data());
  PlanPair p;
  // FFTW_UNALIGNED so the plans accept any caller buffer via the
  // new-array interface.
  p.fwd = fftw_plan_dft_1d(n, ap, bp, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  p.inv = fftw_plan_dft_1d(n, ap, bp, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  return cache.emplace(n, p).first->second;
}

}  // namespace

void dft_forward(int n, const std::complex<double>* in, std::complex<double>* out) {
  const PlanPair& p = plans_for(n);
  fftw_execute_dft(p.fwd,
                   reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

void dft_inverse(int n, const std::complex<double>* in, std::complex<double>* out) {
  const PlanPair& p = plans_for(n);
  fftw_execute_dft(p.inv,
                   reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

}  // namespace nlsfp
