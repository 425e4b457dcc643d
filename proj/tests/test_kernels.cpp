#include <cmath>
#include <cstdlib>
#include <string_view>
#include <random>
#include <vector>

#include "catm/kernels.hpp"
#include "doctest.h"

using namespace catm::kernels;

namespace {

std::vector<double> uniform(std::size_t n, double lo, double hi, unsigned seed) {
  std::mt19937_64 g(seed);
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = d(g);
  return v;
}

// Lengths that exercise full vectors, tails and the empty case.
const std::size_t kLengths[] = {0, 1, 3, 4, 5, 7, 8, 17, 64, 1001};

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("scalar reference matches the closed forms") {
  const auto& k = scalar();
  std::vector<double> db{-30.0, 0.0, 3.0, 10.0, 46.02}, out(db.size());
  k.db_to_linear(db, out);
  for (std::size_t i = 0; i < db.size(); ++i) CHECK(out[i] == doctest::Approx(std::pow(10.0, db[i] / 10.0)));
  std::vector<double> two{0.0, 0.0};
  CHECK(k.sum_dbm_as_mw(two) == doctest::Approx(2.0));
  std::vector<double> x{0.0}, thr{0.0}, slope{1.5}, p(1);
  k.logistic_waterfall(x, thr, slope, p);
  CHECK(p[0] == doctest::Approx(0.5));
}

TEST_CASE("waterfall stays strictly inside (0, 1)") {
  std::vector<double> x{-1e6, 1e6, -800.0, 800.0}, thr(4, 0.0), slope(4, 1.0), p(4);
  for (const KernelTable* k : {&scalar(), avx2()}) {
    if (!k) continue;
    k->logistic_waterfall(x, thr, slope, p);
    for (double v : p) {
      CHECK(v > 0.0);
      CHECK(v < 1.0);
    }
  }
}

TEST_CASE("AVX2 variant agrees with the scalar reference") {
  const KernelTable* v = avx2();
  if (!v) {
    MESSAGE("AVX2 unavailable on this CPU; equivalence not exercised");
    return;
  }
  const auto& s = scalar();
  for (std::size_t n : kLengths) {
    CAPTURE(n);
    auto db = uniform(n, -150.0, 60.0, 11 + n);
    std::vector<double> a(n), b(n);
    s.db_to_linear(db, a);
    v->db_to_linear(db, b);
    for (std::size_t i = 0; i < n; ++i) CHECK(b[i] == doctest::Approx(a[i]).epsilon(1e-12));
    CHECK(v->sum_dbm_as_mw(db) == doctest::Approx(s.sum_dbm_as_mw(db)).epsilon(1e-12));

    auto x = uniform(n, -40.0, 40.0, 23 + n);
    auto thr = uniform(n, -10.0, 15.0, 37 + n);
    auto slope = uniform(n, 0.3, 3.0, 41 + n);
    s.logistic_waterfall(x, thr, slope, a);
    v->logistic_waterfall(x, thr, slope, b);
    for (std::size_t i = 0; i < n; ++i) {
      // Relative agreement on both tails: compare p and 1 - p.
      CHECK(b[i] == doctest::Approx(a[i]).epsilon(1e-12));
      CHECK(1.0 - b[i] == doctest::Approx(1.0 - a[i]).epsilon(1e-9));
    }
  }
}

TEST_CASE("active table honours the runtime selection") {
  const auto& a = active();
  CHECK((a.isa == Isa::Scalar || a.isa == Isa::Avx2));
  CHECK(!isa_name(a.isa).empty());
  if (!avx2()) CHECK(a.isa == Isa::Scalar);
  const char* env = std::getenv("CATM_ISA");
  if (env && std::string_view(env) == "scalar") CHECK(a.isa == Isa::Scalar);
}

}
