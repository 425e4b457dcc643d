#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace catm {

/// Subframe index. One TTI is one millisecond.
using Tti = std::int64_t;

enum class Direction : std::uint8_t { Uplink, Downlink };

inline const char* to_string(Direction d) { return d == Direction::Uplink ? "UL" : "DL"; }

/// Bad configuration: unknown keys, values outside a ladder, tables that do not validate.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller passed an argument outside the operation's domain.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A simulator invariant was violated. Always a bug; carries a trace dump in what().
class InvariantBreach : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

#define CATM_ENSURE(cond, msg)                                                        \
  do {                                                                                \
    if (!(cond)) throw ::catm::InvariantBreach(std::string("invariant: ") + (msg) +   \
                                               " [" #cond "] at " __FILE__ ":" +      \
                                               std::to_string(__LINE__));             \
  } while (0)

/// Repetition ladder used by every Cat-M channel: 1, 2, 4, ..., 256.
inline constexpr int kMaxRepetition = 256;

inline bool on_repetition_ladder(int r) { return r >= 1 && r <= kMaxRepetition && (r & (r - 1)) == 0; }

inline void require_repetition(int r, const char* what) {
  if (!on_repetition_ladder(r))
    throw ConfigError(std::string(what) + ": repetition " + std::to_string(r) +
                      " is not on the ladder {1,2,4,...,256}");
}

}  // namespace catm
