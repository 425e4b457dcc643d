#include "catm/tbs_table.hpp"

#include <fstream>

#include "catm/common.hpp"

namespace catm {

namespace {
// TBS in bits for I_TBS 0..15 and 1..6 PRBs.
constexpr std::array<std::array<int, kMaxNarrowbandPrbs>, TbsTable::kNumMcs> kBuiltinTbs{{
    {16, 32, 56, 88, 120, 152},
    {24, 56, 88, 144, 176, 208},
    {32, 72, 144, 176, 208, 256},
    {40, 104, 176, 208, 256, 328},
    {56, 120, 208, 256, 328, 408},
    {72, 144, 224, 328, 424, 504},
    {88, 176, 256, 392, 504, 600},
    {104, 224, 328, 472, 584, 712},
    {120, 256, 392, 536, 680, 808},
    {136, 296, 456, 616, 776, 936},
    {144, 328, 504, 680, 872, 1032},
    {176, 376, 584, 776, 1000, 1192},
    {208, 440, 680, 904, 1128, 1352},
    {224, 488, 744, 1000, 1256, 1544},
    {256, 552, 840, 1128, 1416, 1736},
    {280, 600, 904, 1224, 1544, 1800},
}};
}  // namespace

TbsTable TbsTable::builtin() {
  TbsTable t;
  t.bits_ = kBuiltinTbs;
  return t;
}

TbsTable TbsTable::from_json(const nlohmann::json& doc) {
  for (const auto& [key, _] : doc.items())
    if (key != "version" && key != "max_tbs_bits" && key != "tbs_bits")
      throw ConfigError("tbs table: unknown key '" + key + "'");
  TbsTable t;
  const auto& rows = doc.at("tbs_bits");
  if (!rows.is_array() || rows.size() != kNumMcs)
    throw ConfigError("tbs table: tbs_bits must have " + std::to_string(kNumMcs) + " rows");
  for (int m = 0; m < kNumMcs; ++m) {
    const auto& row = rows.at(m);
    if (!row.is_array() || row.size() != kMaxNarrowbandPrbs)
      throw ConfigError("tbs table: row " + std::to_string(m) + " must have 6 entries");
    for (int n = 0; n < kMaxNarrowbandPrbs; ++n) {
      t.bits_[m][n] = row.at(n).get<int>();
      if (t.bits_[m][n] <= 0) throw ConfigError("tbs table: entries must be positive");
      if (n > 0 && t.bits_[m][n] < t.bits_[m][n - 1])
        throw ConfigError("tbs table: row " + std::to_string(m) + " not monotone in PRBs");
      if (m > 0 && t.bits_[m][n] < t.bits_[m - 1][n])
        throw ConfigError("tbs table: column " + std::to_string(n) + " not monotone in MCS");
    }
  }
  t.set_max_tbs(doc.value("max_tbs_bits", 1000));
  return t;
}

TbsTable TbsTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open tbs table '" + path + "'");
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("tbs table '" + path + "': " + e.what());
  }
}

nlohmann::json TbsTable::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : bits_) rows.push_back(row);
  return {{"version", "catm-tbs-1"}, {"max_tbs_bits", max_tbs_}, {"tbs_bits", rows}};
}

int TbsTable::raw_tbs(int mcs, int n_prbs) const {
  if (mcs < 0 || mcs >= kNumMcs) throw ConfigError("unknown MCS index " + std::to_string(mcs));
  if (n_prbs < 1 || n_prbs > kMaxNarrowbandPrbs)
    throw ConfigError("PRB count " + std::to_string(n_prbs) + " outside Cat-M range [1,6]");
  return bits_[mcs][n_prbs - 1];
}

int TbsTable::tbs(int mcs, int n_prbs) const { return std::min(raw_tbs(mcs, n_prbs), max_tbs_); }

void TbsTable::set_max_tbs(int bits) {
  if (bits <= 0) throw ConfigError("max_tbs must be positive");
  max_tbs_ = bits;
}

int TbsTable::prbs_for(int mcs, int bits) const {
  for (int n = 1; n <= kMaxNarrowbandPrbs; ++n)
    if (tbs(mcs, n) >= bits) return n;
  return 0;
}

}  // namespace catm
