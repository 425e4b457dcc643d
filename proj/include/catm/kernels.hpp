#pragma once

// Data-parallel inner loops of the radio model. Each kernel has a scalar
// reference implementation and, where the CPU supports it, an AVX2 variant.
// The variant is picked once at startup; tests compare every variant against
// the scalar reference.

#include <span>
#include <string_view>

namespace catm::kernels {

enum class Isa { Scalar, Avx2 };

std::string_view isa_name(Isa isa);

struct KernelTable {
  Isa isa;
  /// out[i] = 10^(db[i]/10).
  void (*db_to_linear)(std::span<const double> db, std::span<double> out);
  /// Sum of 10^(dbm[i]/10), i.e. total power in mW.
  double (*sum_dbm_as_mw)(std::span<const double> dbm);
  /// out[i] = 1 / (1 + exp((x[i] - threshold[i]) / slope[i])), kept inside (0, 1).
  void (*logistic_waterfall)(std::span<const double> x, std::span<const double> threshold,
                             std::span<const double> slope, std::span<double> out);
};

const KernelTable& scalar();
/// nullptr when the running CPU lacks AVX2/FMA or the build has no AVX2 support.
const KernelTable* avx2();

/// The table used by the simulator. Honours CATM_ISA=scalar in the environment.
const KernelTable& active();

// Convenience wrappers over active().
inline void db_to_linear(std::span<const double> db, std::span<double> out) {
  active().db_to_linear(db, out);
}
inline double sum_dbm_as_mw(std::span<const double> dbm) { return active().sum_dbm_as_mw(dbm); }
inline void logistic_waterfall(std::span<const double> x, std::span<const double> threshold,
                               std::span<const double> slope, std::span<double> out) {
  active().logistic_waterfall(x, threshold, slope, out);
}

namespace detail {
// Smallest and largest values the waterfall may return.
inline constexpr double kProbFloor = 1e-300;
inline constexpr double kProbCeil = 1.0 - 0x1p-53;
}  // namespace detail

}  // namespace catm::kernels
