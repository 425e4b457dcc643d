#include "catm/kernels.hpp"

#include <cstdlib>
#include <string>

namespace catm::kernels {

std::string_view isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

const KernelTable& active() {
  static const KernelTable& table = []() -> const KernelTable& {
    const char* env = std::getenv("CATM_ISA");
    if (env != nullptr && std::string(env) == "scalar") return scalar();
    if (const KernelTable* t = avx2()) return *t;
    return scalar();
  }();
  return table;
}

}  // namespace catm::kernels
