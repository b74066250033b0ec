// AArch64 variant: two float64x2 accumulators hold lanes (0,1) and (2,3).

#include <arm_neon.h>

#include "variants.hpp"

namespace negtopic::kernels::neon {

namespace {

inline float64x2_t load_counts(const int32_t* p) { return vcvtq_f64_s64(vmovl_s32(vld1_s32(p))); }

inline double reduce(float64x2_t lo, float64x2_t hi, const double* out, size_t tail_from, size_t n) {
  double lanes[4];
  vst1q_f64(lanes, lo);
  vst1q_f64(lanes + 2, hi);
  return finish_lanes(lanes, out, tail_from, n);
}

}  // namespace

double gibbs_weights(const int32_t* doc, const int32_t* word, const int32_t* totals, size_t n, double alpha,
                     double beta, double vbeta, double* out) {
  const float64x2_t va = vdupq_n_f64(alpha);
  const float64x2_t vb = vdupq_n_f64(beta);
  const float64x2_t vvb = vdupq_n_f64(vbeta);
  float64x2_t lo = vdupq_n_f64(0.0);
  float64x2_t hi = vdupq_n_f64(0.0);
  size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const float64x2_t w0 = vdivq_f64(
        vmulq_f64(vaddq_f64(load_counts(doc + k), va), vaddq_f64(load_counts(word + k), vb)),
        vaddq_f64(load_counts(totals + k), vvb));
    const float64x2_t w1 = vdivq_f64(
        vmulq_f64(vaddq_f64(load_counts(doc + k + 2), va), vaddq_f64(load_counts(word + k + 2), vb)),
        vaddq_f64(load_counts(totals + k + 2), vvb));
    vst1q_f64(out + k, w0);
    vst1q_f64(out + k + 2, w1);
    lo = vaddq_f64(lo, w0);
    hi = vaddq_f64(hi, w1);
  }
  const size_t tail = k;
  for (; k < n; ++k) {
    out[k] = (static_cast<double>(doc[k]) + alpha) * (static_cast<double>(word[k]) + beta) /
             (static_cast<double>(totals[k]) + vbeta);
  }
  return reduce(lo, hi, out, tail, n);
}

double mixture_weights(const int32_t* counts, const double* phi, size_t n, double alpha, double* out) {
  const float64x2_t va = vdupq_n_f64(alpha);
  float64x2_t lo = vdupq_n_f64(0.0);
  float64x2_t hi = vdupq_n_f64(0.0);
  size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const float64x2_t w0 = vmulq_f64(vaddq_f64(load_counts(counts + k), va), vld1q_f64(phi + k));
    const float64x2_t w1 = vmulq_f64(vaddq_f64(load_counts(counts + k + 2), va), vld1q_f64(phi + k + 2));
    vst1q_f64(out + k, w0);
    vst1q_f64(out + k + 2, w1);
    lo = vaddq_f64(lo, w0);
    hi = vaddq_f64(hi, w1);
  }
  const size_t tail = k;
  for (; k < n; ++k) out[k] = (static_cast<double>(counts[k]) + alpha) * phi[k];
  return reduce(lo, hi, out, tail, n);
}

double lane_sum(const double* x, size_t n) {
  float64x2_t lo = vdupq_n_f64(0.0);
  float64x2_t hi = vdupq_n_f64(0.0);
  size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    lo = vaddq_f64(lo, vld1q_f64(x + k));
    hi = vaddq_f64(hi, vld1q_f64(x + k + 2));
  }
  return reduce(lo, hi, x, k, n);
}

}  // namespace negtopic::kernels::neon
