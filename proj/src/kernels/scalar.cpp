#include "variants.hpp"

namespace negtopic::kernels::scalar {

double gibbs_weights(const int32_t* doc, const int32_t* word, const int32_t* totals, size_t n, double alpha,
                     double beta, double vbeta, double* out) {
  for (size_t k = 0; k < n; ++k) {
    out[k] = (static_cast<double>(doc[k]) + alpha) * (static_cast<double>(word[k]) + beta) /
             (static_cast<double>(totals[k]) + vbeta);
  }
  return lane_sum(out, n);
}

double mixture_weights(const int32_t* counts, const double* phi, size_t n, double alpha, double* out) {
  for (size_t k = 0; k < n; ++k) {
    out[k] = (static_cast<double>(counts[k]) + alpha) * phi[k];
  }
  return lane_sum(out, n);
}

double lane_sum(const double* x, size_t n) {
  double lanes[4] = {0.0, 0.0, 0.0, 0.0};
  return finish_lanes(lanes, x, 0, n);
}

}  // namespace negtopic::kernels::scalar
