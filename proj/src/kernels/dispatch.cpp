#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "negtopic/kernels.hpp"
#include "variants.hpp"

namespace negtopic::kernels {

namespace {

constexpr KernelTable kScalar{Isa::kScalar, scalar::gibbs_weights, scalar::mixture_weights, scalar::lane_sum};

#if defined(NEGTOPIC_HAVE_AVX2)
constexpr KernelTable kAvx2{Isa::kAvx2, avx2::gibbs_weights, avx2::mixture_weights, avx2::lane_sum};
#endif

#if defined(NEGTOPIC_HAVE_NEON)
constexpr KernelTable kNeon{Isa::kNeon, neon::gibbs_weights, neon::mixture_weights, neon::lane_sum};
#endif

bool cpu_supports(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return true;
    case Isa::kAvx2:
#if defined(NEGTOPIC_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Isa::kNeon:
#if defined(NEGTOPIC_HAVE_NEON)
      return true;  // mandatory on AArch64
#else
      return false;
#endif
  }
  return false;
}

const KernelTable* best_table() {
  if (const char* env = std::getenv("NEGTOPIC_KERNELS")) {
    const std::string want(env);
    for (Isa isa : {Isa::kScalar, Isa::kAvx2, Isa::kNeon}) {
      if (want == isa_name(isa)) {
        if (const auto* table = table_for(isa)) return table;
        throw std::runtime_error("NEGTOPIC_KERNELS=" + want + " is not supported on this CPU");
      }
    }
    throw std::runtime_error("unknown NEGTOPIC_KERNELS value '" + want + "'");
  }
  const auto isas = available_isas();
  return table_for(isas.back());
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> table{best_table()};
  return table;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
    case Isa::kNeon:
      return "neon";
  }
  return "unknown";
}

const KernelTable& scalar_table() { return kScalar; }

const KernelTable* table_for(Isa isa) {
  if (!cpu_supports(isa)) return nullptr;
  switch (isa) {
    case Isa::kScalar:
      return &kScalar;
    case Isa::kAvx2:
#if defined(NEGTOPIC_HAVE_AVX2)
      return &kAvx2;
#else
      return nullptr;
#endif
    case Isa::kNeon:
#if defined(NEGTOPIC_HAVE_NEON)
      return &kNeon;
#else
      return nullptr;
#endif
  }
  return nullptr;
}

std::vector<Isa> available_isas() {
  std::vector<Isa> out;
  for (Isa isa : {Isa::kScalar, Isa::kAvx2, Isa::kNeon}) {
    if (table_for(isa)) out.push_back(isa);
  }
  return out;
}

const KernelTable& active() { return *current().load(std::memory_order_acquire); }

void force_isa(Isa isa) {
  const auto* table = table_for(isa);
  if (!table) throw std::runtime_error("kernel variant '" + std::string(isa_name(isa)) + "' unavailable");
  current().store(table, std::memory_order_release);
}

}  // namespace negtopic::kernels
