#pragma once

// Dense matrix-matrix product kernels, C += alpha * A * B (row-major).
//
// The complex<double> path packs A and B into planar (real/imag) panels and
// runs a register-blocked micro-kernel; other scalar types use a plain
// i-k-j loop. Both are the ordinary cubic algorithm.

#include <algorithm>
#include <complex>
#include <cstddef>
#include <cstring>
#include <type_traits>
#include <vector>

namespace lindex::linalg::detail {

template <class T>
void gemm_naive(std::size_t m, std::size_t n, std::size_t k, T alpha, const T* a, const T* b,
                T* c) {
  for (std::size_t i = 0; i < m; ++i) {
    T* crow = c + i * n;
    const T* arow = a + i * k;
    for (std::size_t p = 0; p < k; ++p) {
      const T aip = alpha * arow[p];
      if (aip == T{}) continue;
      const T* brow = b + p * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += aip * brow[j];
    }
  }
}

#if defined(__GNUC__) || defined(__clang__)

namespace packed {

typedef double vec8 __attribute__((vector_size(64)));

inline constexpr std::size_t kMr = 6;
inline constexpr std::size_t kVecs = 2;
inline constexpr std::size_t kNr = 8 * kVecs;
inline constexpr std::size_t kKc = 256;
inline constexpr std::size_t kMc = kMr * 24;
inline constexpr std::size_t kNc = kNr * 64;

inline std::size_t round_up(std::size_t x, std::size_t to) { return (x + to - 1) / to * to; }

// Panel layouts, per k: A -> [re(MR) | im(MR)], B -> [re(NR) | im(NR)].
inline void micro_kernel(std::size_t kc, const double* __restrict a, const double* __restrict b,
                         double* __restrict out_re, double* __restrict out_im) {
  vec8 cr[kMr][kVecs] = {};
  vec8 ci[kMr][kVecs] = {};
  for (std::size_t p = 0; p < kc; ++p) {
    vec8 br[kVecs];
    vec8 bi[kVecs];
    for (std::size_t v = 0; v < kVecs; ++v) {
      std::memcpy(&br[v], b + v * 8, sizeof(vec8));
      std::memcpy(&bi[v], b + kNr + v * 8, sizeof(vec8));
    }
    for (std::size_t i = 0; i < kMr; ++i) {
      const double ar = a[i];
      const double ai = a[kMr + i];
      for (std::size_t v = 0; v < kVecs; ++v) {
        cr[i][v] += ar * br[v];
        cr[i][v] -= ai * bi[v];
        ci[i][v] += ar * bi[v];
        ci[i][v] += ai * br[v];
      }
    }
    a += 2 * kMr;
    b += 2 * kNr;
  }
  for (std::size_t i = 0; i < kMr; ++i) {
    for (std::size_t v = 0; v < kVecs; ++v) {
      std::memcpy(out_re + i * kNr + v * 8, &cr[i][v], sizeof(vec8));
      std::memcpy(out_im + i * kNr + v * 8, &ci[i][v], sizeof(vec8));
    }
  }
}

inline void gemm(std::size_t m, std::size_t n, std::size_t k, std::complex<double> alpha,
                 const std::complex<double>* a, const std::complex<double>* b,
                 std::complex<double>* c) {
  using cd = std::complex<double>;
  // Per-thread scratch reused across calls; large fresh buffers cost a page
  // fault storm on every product.
  thread_local std::vector<double> pack_a;
  thread_local std::vector<double> pack_b;
  const std::size_t need_a = 2 * kKc * std::min(round_up(m, kMr), kMc);
  const std::size_t need_b = 2 * kKc * std::min(round_up(n, kNr), kNc);
  if (pack_a.size() < need_a) pack_a.resize(need_a);
  if (pack_b.size() < need_b) pack_b.resize(need_b);
  double tile_re[kMr * kNr];
  double tile_im[kMr * kNr];

  for (std::size_t jc = 0; jc < n; jc += kNc) {
    const std::size_t nc = std::min(kNc, n - jc);
    for (std::size_t pc = 0; pc < k; pc += kKc) {
      const std::size_t kc = std::min(kKc, k - pc);
      for (std::size_t jr = 0; jr < nc; jr += kNr) {
        double* dst = pack_b.data() + jr * 2 * kc;
        const std::size_t width = std::min(kNr, nc - jr);
        for (std::size_t p = 0; p < kc; ++p) {
          const cd* src = b + (pc + p) * n + jc + jr;
          for (std::size_t j = 0; j < kNr; ++j) {
            const cd v = j < width ? src[j] : cd{};
            dst[j] = v.real();
            dst[kNr + j] = v.imag();
          }
          dst += 2 * kNr;
        }
      }
      for (std::size_t ic = 0; ic < m; ic += kMc) {
        const std::size_t mc = std::min(kMc, m - ic);
        for (std::size_t ir = 0; ir < mc; ir += kMr) {
          double* dst = pack_a.data() + ir * 2 * kc;
          const std::size_t height = std::min(kMr, mc - ir);
          for (std::size_t p = 0; p < kc; ++p) {
            for (std::size_t i = 0; i < kMr; ++i) {
              const cd v = i < height ? a[(ic + ir + i) * k + pc + p] : cd{};
              dst[i] = v.real();
              dst[kMr + i] = v.imag();
            }
            dst += 2 * kMr;
          }
        }
        for (std::size_t jr = 0; jr < nc; jr += kNr) {
          const std::size_t width = std::min(kNr, nc - jr);
          for (std::size_t ir = 0; ir < mc; ir += kMr) {
            const std::size_t height = std::min(kMr, mc - ir);
            micro_kernel(kc, pack_a.data() + ir * 2 * kc, pack_b.data() + jr * 2 * kc, tile_re,
                         tile_im);
            for (std::size_t i = 0; i < height; ++i) {
              cd* crow = c + (ic + ir + i) * n + jc + jr;
              for (std::size_t j = 0; j < width; ++j)
                crow[j] += alpha * cd(tile_re[i * kNr + j], tile_im[i * kNr + j]);
            }
          }
        }
      }
    }
  }
}

}  // namespace packed

#endif

/// C += alpha * A(m x k) * B(k x n), all contiguous row-major.
template <class T>
void gemm_accumulate(std::size_t m, std::size_t n, std::size_t k, T alpha, const T* a, const T* b,
                     T* c) {
#if defined(__GNUC__) || defined(__clang__)
  if constexpr (std::is_same_v<T, std::complex<double>>) {
    // Packing overhead dominates below this size.
    if (m * n * k >= 24 * 24 * 24) {
      packed::gemm(m, n, k, alpha, a, b, c);
      return;
    }
  }
#endif
  gemm_naive(m, n, k, alpha, a, b, c);
}

}  // namespace lindex::linalg::detail
