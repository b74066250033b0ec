#pragma once

// Inner-loop arithmetic of the sampler and the held-out estimator.
//
// Every variant in a KernelTable computes the same result bit for bit:
// elementwise steps are single IEEE operations (int32 -> double conversion,
// add, multiply, divide) with no FMA contraction, and every reduction
// accumulates element i into lane i % 4 in index order, then returns
// (lane0 + lane1) + (lane2 + lane3). The scalar table is the reference; the
// vector tables are selected at runtime and only change speed.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace negtopic::kernels {

enum class Isa { kScalar, kAvx2, kNeon };

std::string_view isa_name(Isa isa);

struct KernelTable {
  Isa isa;

  // out[k] = (doc[k] + alpha) * (word[k] + beta) / (totals[k] + vbeta); returns the lane sum of out.
  double (*gibbs_weights)(const int32_t* doc, const int32_t* word, const int32_t* totals, size_t n,
                          double alpha, double beta, double vbeta, double* out);

  // out[k] = (counts[k] + alpha) * phi[k]; returns the lane sum of out.
  double (*mixture_weights)(const int32_t* counts, const double* phi, size_t n, double alpha, double* out);

  double (*lane_sum)(const double* x, size_t n);
};

const KernelTable& scalar_table();
// nullptr when the variant was not compiled in or the CPU lacks it.
const KernelTable* table_for(Isa isa);
std::vector<Isa> available_isas();

// Best supported table, unless NEGTOPIC_KERNELS=scalar|avx2|neon overrides it.
const KernelTable& active();
// Test hook; throws if the ISA is unavailable.
void force_isa(Isa isa);

inline double gibbs_weights(std::span<const int32_t> doc, std::span<const int32_t> word,
                            std::span<const int32_t> totals, double alpha, double beta, double vbeta,
                            std::span<double> out) {
  return active().gibbs_weights(doc.data(), word.data(), totals.data(), out.size(), alpha, beta, vbeta,
                                out.data());
}

inline double mixture_weights(std::span<const int32_t> counts, std::span<const double> phi, double alpha,
                              std::span<double> out) {
  return active().mixture_weights(counts.data(), phi.data(), out.size(), alpha, out.data());
}

inline double lane_sum(std::span<const double> x) { return active().lane_sum(x.data(), x.size()); }

}  // namespace negtopic::kernels
