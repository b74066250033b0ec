#pragma once

// Variant entry points. Kept free of standard-library headers beyond the
// freestanding ones so the NEON unit can be syntax-checked on any host.

#include <stddef.h>
#include <stdint.h>

namespace negtopic::kernels {

namespace scalar {
double gibbs_weights(const int32_t* doc, const int32_t* word, const int32_t* totals, size_t n, double alpha,
                     double beta, double vbeta, double* out);
double mixture_weights(const int32_t* counts, const double* phi, size_t n, double alpha, double* out);
double lane_sum(const double* x, size_t n);
}  // namespace scalar

namespace avx2 {
double gibbs_weights(const int32_t* doc, const int32_t* word, const int32_t* totals, size_t n, double alpha,
                     double beta, double vbeta, double* out);
double mixture_weights(const int32_t* counts, const double* phi, size_t n, double alpha, double* out);
double lane_sum(const double* x, size_t n);
}  // namespace avx2

namespace neon {
double gibbs_weights(const int32_t* doc, const int32_t* word, const int32_t* totals, size_t n, double alpha,
                     double beta, double vbeta, double* out);
double mixture_weights(const int32_t* counts, const double* phi, size_t n, double alpha, double* out);
double lane_sum(const double* x, size_t n);
}  // namespace neon

// Lane tail shared by every variant: element i joins lane i % 4.
inline double finish_lanes(double* lanes, const double* x, size_t from, size_t n) {
  for (size_t i = from; i < n; ++i) lanes[i % 4] += x[i];
  return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

}  // namespace negtopic::kernels
