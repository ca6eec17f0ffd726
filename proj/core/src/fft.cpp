#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>

namespace papevo::detail {

namespace {

std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

fftw_plan get_plan(const std::vector<int>& dims, bool forward) {
  static std::map<std::pair<std::vector<int>, bool>, fftw_plan> cache;
  std::lock_guard<std::mutex> lock(plan_mutex());
  auto key = std::make_pair(dims, forward);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  std::size_t total = 1;
  for (int d : dims) total *= static_cast<std::size_t>(d);
  CVec scratch(total);
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  fftw_plan plan = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), buf, buf,
                                 forward ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE);
  if (plan == nullptr) throw std::runtime_error("fftw: plan creation failed");
  cache.emplace(std::move(key), plan);
  return plan;
}

}  // namespace

void fft_inplace(CVec& data, const std::vector<int>& dims, bool forward) {
  fftw_plan plan = get_plan(dims, forward);
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, buf, buf);
}

}  // namespace papevo::detail
