#pragma once

#include "catm/common.hpp"

namespace catm {

/// Fixed subframe offsets of the Cat-M HARQ timeline, counted from the last
/// subframe of the preceding channel.
struct HarqOffsets {
  int mpdcch_to_pusch = 4;
  int mpdcch_to_pdsch = 2;
  int data_to_feedback = 4;  // PDSCH -> PUCCH ACK, and PUSCH/PUCCH -> next MPDCCH
};

inline constexpr HarqOffsets kHarqOffsets{};

/// Subframes from the first MPDCCH subframe until the data channel has been fully sent.
inline int data_end_offset(Direction dir, int rl_mpdcch, int rl_data) {
  const int gap = dir == Direction::Uplink ? kHarqOffsets.mpdcch_to_pusch : kHarqOffsets.mpdcch_to_pdsch;
  return rl_mpdcch - 1 + gap + rl_data;
}

/// Subframes from one MPDCCH start of a HARQ process to the earliest next MPDCCH
/// start of the same process.
inline int harq_cycle_ms(Direction dir, int rl_mpdcch, int rl_data, int rl_ack) {
  const int data_last = data_end_offset(dir, rl_mpdcch, rl_data) - 1;
  if (dir == Direction::Uplink) return data_last + kHarqOffsets.data_to_feedback;
  const int ack_last = data_last + kHarqOffsets.data_to_feedback + rl_ack - 1;
  return ack_last + kHarqOffsets.data_to_feedback;
}

}  // namespace catm
