#pragma once

#include <complex>
#include <cstddef>
#include <new>
#include <vector>

namespace papevo {

/// 64-byte aligned allocator (FFT buffers must share one alignment).
template <class T>
struct AlignedAllocator {
  using value_type = T;
  static constexpr std::align_val_t alignment{64};

  AlignedAllocator() = default;
  template <class U>
  AlignedAllocator(const AlignedAllocator<U>&) {}

  T* allocate(std::size_t n) { return static_cast<T*>(::operator new(n * sizeof(T), alignment)); }
  void deallocate(T* p, std::size_t) { ::operator delete(p, alignment); }

  template <class U>
  bool operator==(const AlignedAllocator<U>&) const { return true; }
};

using CVec = std::vector<std::complex<double>, AlignedAllocator<std::complex<double>>>;

}  // namespace papevo
