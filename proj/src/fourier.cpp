#include "flipchain/fourier.hpp"

#include <fftw3.h>

#include <mutex>
#include <stdexcept>

namespace flipchain {

namespace {

// FFTW planning is not thread safe; execution on a private plan is.
std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

cvec run_plan(const cvec& in, int rank, int N, int sign) {
  cvec out(in.size());
  cvec work(in);
  auto* pin = reinterpret_cast<fftw_complex*>(work.data());
  auto* pout = reinterpret_cast<fftw_complex*>(out.data());
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lk(plan_mutex());
    plan = rank == 1 ? fftw_plan_dft_1d(N, pin, pout, sign, FFTW_ESTIMATE)
                     : fftw_plan_dft_2d(N, N, pin, pout, sign, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lk(plan_mutex());
    fftw_destroy_plan(plan);
  }
  return out;
}

}  // namespace

cvec dft_forward(const cvec& f) {
  if (f.empty()) throw std::invalid_argument("dft_forward: empty input");
  return run_plan(f, 1, static_cast<int>(f.size()), FFTW_FORWARD);
}

cvec dft_inverse(const cvec& fhat) {
  if (fhat.empty()) throw std::invalid_argument("dft_inverse: empty input");
  cvec f = run_plan(fhat, 1, static_cast<int>(fhat.size()), FFTW_BACKWARD);
  const double s = 1.0 / static_cast<double>(fhat.size());
  for (auto& v : f) v *= s;
  return f;
}

cvec dft_forward(const cvec& f, int n) {
  if (static_cast<int>(f.size()) != n + 1) throw std::invalid_argument("dft_forward: length must be n+1");
  return dft_forward(f);
}

cvec dft_inverse(const cvec& fhat, int n) {
  if (static_cast<int>(fhat.size()) != n + 1) throw std::invalid_argument("dft_inverse: length must be n+1");
  return dft_inverse(fhat);
}

cvec dft2_forward(const cvec& f, int N) {
  if (static_cast<int>(f.size()) != N * N) throw std::invalid_argument("dft2_forward: size must be N*N");
  return run_plan(f, 2, N, FFTW_FORWARD);
}

}  // namespace flipchain
