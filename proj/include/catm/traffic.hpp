#pragma once

// Stochastic traffic: bursty MTC readings, two-party VoIP with talk spurts and
// SID, and full buffer.

#include <cstdint>
#include <deque>
#include <random>

#include "catm/common.hpp"

namespace catm::traffic {

/// Independent generator for (seed, stream_id); every random consumer owns one.
std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream_id);

enum class Kind { Bursty, Voip, FullBuffer };

struct BurstyParams {
  double mean_interarrival_ms = 10000.0;
  double min_interarrival_ms = 2500.0;
  int size_bits = 1000;
  Direction direction = Direction::Uplink;
  /// Optional downlink application ack after each reading (0 = none).
  int dl_ack_bits = 0;
  int header_bits = 0;
  void validate() const;
};

struct VoipParams {
  double mean_talk_ms = 2000.0;
  double mean_silence_ms = 2000.0;
  int voice_period_ms = 20;
  int sid_period_ms = 160;
  int voice_bits = 320;
  int sid_bits = 120;
  /// Offset of the partner's packets inside a phase, so the two streams never coincide.
  int partner_phase_ms = 10;
  void validate() const;
};

struct FullBufferParams {
  Direction direction = Direction::Downlink;
  int block_bits = 1000;
};

struct TrafficEvent {
  double arrival_ms = 0.0;
  int size_bits = 0;
  Direction direction = Direction::Uplink;
  bool sid = false;
  bool voice = false;
};

/// One traffic source with its own random stream derived from (seed, stream_id).
class TrafficSource {
 public:
  static TrafficSource bursty(const BurstyParams& p, std::uint64_t seed, std::uint64_t stream_id);
  static TrafficSource voip(const VoipParams& p, std::uint64_t seed, std::uint64_t stream_id);
  static TrafficSource full_buffer(const FullBufferParams& p);

  Kind kind() const { return kind_; }
  const BurstyParams& bursty_params() const { return bursty_; }
  const VoipParams& voip_params() const { return voip_; }
  const FullBufferParams& full_buffer_params() const { return full_; }

  /// Next arrival after the previous one; strictly increasing per source.
  /// Full-buffer sources never produce events.
  TrafficEvent next_event();
  /// Time of the next event without consuming it (infinity for full buffer).
  double peek_ms();

  /// Bursty only: one shifted-exponential inter-arrival draw.
  double draw_interarrival_ms();

 private:
  explicit TrafficSource(Kind k) : kind_(k) {}
  void refill_voip();

  Kind kind_;
  BurstyParams bursty_;
  VoipParams voip_;
  FullBufferParams full_;
  std::mt19937_64 rng_;
  double clock_ms_ = 0.0;
  double last_ms_ = -1.0;
  bool talking_ = false;
  std::deque<TrafficEvent> pending_;
};

}  // namespace catm::traffic
