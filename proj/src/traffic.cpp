#include "catm/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace catm::traffic {

void BurstyParams::validate() const {
  if (!(min_interarrival_ms >= 0.0)) throw ConfigError("bursty: min inter-arrival must be >= 0");
  if (!(mean_interarrival_ms > min_interarrival_ms))
    throw ConfigError("bursty: mean inter-arrival must exceed the minimum");
  if (size_bits <= 0 || dl_ack_bits < 0 || header_bits < 0) throw ConfigError("bursty: bad sizes");
}

void VoipParams::validate() const {
  if (!(mean_talk_ms > 0.0) || !(mean_silence_ms > 0.0)) throw ConfigError("voip: spurt means must be positive");
  if (voice_period_ms <= 0 || sid_period_ms <= 0) throw ConfigError("voip: periods must be positive");
  if (voice_bits <= 0 || sid_bits <= 0) throw ConfigError("voip: packet sizes must be positive");
  if (partner_phase_ms <= 0 || partner_phase_ms >= voice_period_ms)
    throw ConfigError("voip: partner phase must lie strictly inside one voice period");
}

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream_id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream_id), static_cast<std::uint32_t>(stream_id >> 32), 0x7472u};
  return std::mt19937_64(seq);
}

TrafficSource TrafficSource::bursty(const BurstyParams& p, std::uint64_t seed, std::uint64_t stream_id) {
  p.validate();
  TrafficSource s(Kind::Bursty);
  s.bursty_ = p;
  s.rng_ = make_stream(seed, stream_id);
  return s;
}

TrafficSource TrafficSource::voip(const VoipParams& p, std::uint64_t seed, std::uint64_t stream_id) {
  p.validate();
  TrafficSource s(Kind::Voip);
  s.voip_ = p;
  s.rng_ = make_stream(seed, stream_id);
  // Start in a random phase of the conversation.
  s.talking_ = std::bernoulli_distribution(0.5)(s.rng_);
  s.clock_ms_ = std::floor(std::uniform_real_distribution<double>(0.0, p.voice_period_ms)(s.rng_));
  return s;
}

TrafficSource TrafficSource::full_buffer(const FullBufferParams& p) {
  TrafficSource s(Kind::FullBuffer);
  s.full_ = p;
  return s;
}

double TrafficSource::draw_interarrival_ms() {
  std::exponential_distribution<double> exp(1.0 / (bursty_.mean_interarrival_ms - bursty_.min_interarrival_ms));
  return bursty_.min_interarrival_ms + exp(rng_);
}

void TrafficSource::refill_voip() {
  // One conversation phase: [start, start + length], next phase starts one ms later.
  const double mean = talking_ ? voip_.mean_talk_ms : voip_.mean_silence_ms;
  const double length = std::max(1.0, std::round(std::exponential_distribution<double>(1.0 / mean)(rng_)));
  const double start = clock_ms_;
  std::vector<TrafficEvent> ev;
  // Own voice (UL) or partner voice (DL) on the 20 ms grid from the phase start.
  const Direction voice_dir = talking_ ? Direction::Uplink : Direction::Downlink;
  for (double t = start; t <= start + length; t += voip_.voice_period_ms)
    ev.push_back({t, voip_.voice_bits, voice_dir, false, true});
  // The silent party sends SID every 160 ms, offset inside the phase.
  const Direction sid_dir = talking_ ? Direction::Downlink : Direction::Uplink;
  for (double t = start + voip_.partner_phase_ms; t <= start + length; t += voip_.sid_period_ms)
    ev.push_back({t, voip_.sid_bits, sid_dir, true, false});
  std::sort(ev.begin(), ev.end(), [](const TrafficEvent& a, const TrafficEvent& b) { return a.arrival_ms < b.arrival_ms; });
  pending_.insert(pending_.end(), ev.begin(), ev.end());
  clock_ms_ = start + length + 1.0;
  talking_ = !talking_;
}

double TrafficSource::peek_ms() {
  switch (kind_) {
    case Kind::FullBuffer: return std::numeric_limits<double>::infinity();
    case Kind::Voip:
      while (pending_.empty()) refill_voip();
      return pending_.front().arrival_ms;
    case Kind::Bursty:
      if (pending_.empty()) {
        clock_ms_ += draw_interarrival_ms();
        const int bits = bursty_.size_bits + bursty_.header_bits;
        pending_.push_back({clock_ms_, bits, bursty_.direction, false, false});
      }
      return pending_.front().arrival_ms;
  }
  return std::numeric_limits<double>::infinity();
}

TrafficEvent TrafficSource::next_event() {
  if (kind_ == Kind::FullBuffer) throw InputError("full-buffer sources have no discrete arrivals");
  peek_ms();
  TrafficEvent e = pending_.front();
  pending_.pop_front();
  CATM_ENSURE(e.arrival_ms > last_ms_, "traffic arrivals must strictly increase");
  last_ms_ = e.arrival_ms;
  return e;
}

}  // namespace catm::traffic
