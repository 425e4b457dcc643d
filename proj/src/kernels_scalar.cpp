#include "catm/kernels.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace catm::kernels {
namespace {

constexpr double kDbToLn = 0.23025850929940456840;  // ln(10) / 10

void db_to_linear_scalar(std::span<const double> db, std::span<double> out) {
  assert(out.size() >= db.size());
  for (std::size_t i = 0; i < db.size(); ++i) out[i] = std::exp(db[i] * kDbToLn);
}

double sum_dbm_as_mw_scalar(std::span<const double> dbm) {
  double acc = 0.0;
  for (double v : dbm) acc += std::exp(v * kDbToLn);
  return acc;
}

void logistic_waterfall_scalar(std::span<const double> x, std::span<const double> threshold,
                               std::span<const double> slope, std::span<double> out) {
  assert(threshold.size() >= x.size() && slope.size() >= x.size() && out.size() >= x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double z = std::clamp((x[i] - threshold[i]) / slope[i], -700.0, 700.0);
    out[i] = std::clamp(1.0 / (1.0 + std::exp(z)), detail::kProbFloor, detail::kProbCeil);
  }
}

}  // namespace

const KernelTable& scalar() {
  static const KernelTable table{Isa::Scalar, &db_to_linear_scalar, &sum_dbm_as_mw_scalar,
                                 &logistic_waterfall_scalar};
  return table;
}

}  // namespace catm::kernels
