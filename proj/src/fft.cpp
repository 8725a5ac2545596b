#include "conoshock/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>

#include "conoshock/errors.hpp"

namespace conoshock {

namespace {

// Plans are cached per (size, direction); FFTW plan creation is not
// thread-safe, execution via fftw_execute_dft on caller buffers is.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    fftw_cleanup();
  }

  fftw_plan get(int n, int sign) {
    std::lock_guard<std::mutex> lock(mu_);
    auto key = std::make_pair(n, sign);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    std::vector<fftw_complex> buf(static_cast<std::size_t>(n));
    fftw_plan p = fftw_plan_dft_1d(n, buf.data(), buf.data(), sign,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!p) throw SolverError("fftw plan creation failed");
    plans_[key] = p;
    return p;
  }

 private:
  std::mutex mu_;
  std::map<std::pair<int, int>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

void run(std::vector<std::complex<double>>& a, int sign) {
  const int n = static_cast<int>(a.size());
  if (n == 0) return;
  fftw_plan p = cache().get(n, sign);
  auto* d = reinterpret_cast<fftw_complex*>(a.data());
  fftw_execute_dft(p, d, d);
}

}  // namespace

void fft_forward(std::vector<std::complex<double>>& a) { run(a, FFTW_FORWARD); }

void fft_inverse(std::vector<std::complex<double>>& a) {
  run(a, FFTW_BACKWARD);
  const double s = 1.0 / static_cast<double>(a.size());
  for (auto& z : a) z *= s;
}

double fft_frequency(int m, int n, double h) {
  int mm = (m <= n / 2) ? m : m - n;
  return 2.0 * M_PI * mm / (n * h);
}

}  // namespace conoshock
