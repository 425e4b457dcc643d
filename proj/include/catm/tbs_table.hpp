#pragma once

#include <array>
#include <string>

#include "json.hpp"

namespace catm {

inline constexpr int kMaxNarrowbandPrbs = 6;

/// Transport block size lookup for Cat-M allocations (1..6 PRBs).
class TbsTable {
 public:
  static constexpr int kNumMcs = 16;

  static TbsTable builtin();
  static TbsTable from_json(const nlohmann::json& doc);
  static TbsTable load(const std::string& path);
  nlohmann::json to_json() const;

  /// Table entry capped at max_tbs(). Throws ConfigError on out-of-range indices.
  int tbs(int mcs, int n_prbs) const;
  int raw_tbs(int mcs, int n_prbs) const;
  int max_tbs() const { return max_tbs_; }
  void set_max_tbs(int bits);

  /// Smallest PRB count whose TBS holds `bits`, or 0 when none does.
  int prbs_for(int mcs, int bits) const;

  bool operator==(const TbsTable&) const = default;

 private:
  std::array<std::array<int, kMaxNarrowbandPrbs>, kNumMcs> bits_{};
  int max_tbs_ = 1000;
};

}  // namespace catm
