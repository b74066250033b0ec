// Built with -mavx2 (no -mfma); only reached after a runtime CPU check.

#include <immintrin.h>

#include "variants.hpp"

namespace negtopic::kernels::avx2 {

namespace {

inline __m256d load_counts(const int32_t* p) {
  return _mm256_cvtepi32_pd(_mm_loadu_si128(reinterpret_cast<const __m128i*>(p)));
}

inline double reduce(__m256d acc, const double* out, size_t tail_from, size_t n) {
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  return finish_lanes(lanes, out, tail_from, n);
}

}  // namespace

double gibbs_weights(const int32_t* doc, const int32_t* word, const int32_t* totals, size_t n, double alpha,
                     double beta, double vbeta, double* out) {
  const __m256d va = _mm256_set1_pd(alpha);
  const __m256d vb = _mm256_set1_pd(beta);
  const __m256d vvb = _mm256_set1_pd(vbeta);
  __m256d acc = _mm256_setzero_pd();
  size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d num = _mm256_mul_pd(_mm256_add_pd(load_counts(doc + k), va),
                                      _mm256_add_pd(load_counts(word + k), vb));
    const __m256d w = _mm256_div_pd(num, _mm256_add_pd(load_counts(totals + k), vvb));
    _mm256_storeu_pd(out + k, w);
    acc = _mm256_add_pd(acc, w);
  }
  const size_t tail = k;
  for (; k < n; ++k) {
    out[k] = (static_cast<double>(doc[k]) + alpha) * (static_cast<double>(word[k]) + beta) /
             (static_cast<double>(totals[k]) + vbeta);
  }
  return reduce(acc, out, tail, n);
}

double mixture_weights(const int32_t* counts, const double* phi, size_t n, double alpha, double* out) {
  const __m256d va = _mm256_set1_pd(alpha);
  __m256d acc = _mm256_setzero_pd();
  size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d w = _mm256_mul_pd(_mm256_add_pd(load_counts(counts + k), va), _mm256_loadu_pd(phi + k));
    _mm256_storeu_pd(out + k, w);
    acc = _mm256_add_pd(acc, w);
  }
  const size_t tail = k;
  for (; k < n; ++k) out[k] = (static_cast<double>(counts[k]) + alpha) * phi[k];
  return reduce(acc, out, tail, n);
}

double lane_sum(const double* x, size_t n) {
  __m256d acc = _mm256_setzero_pd();
  size_t k = 0;
  for (; k + 4 <= n; k += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + k));
  return reduce(acc, x, k, n);
}

}  // namespace negtopic::kernels::avx2
