#pragma once

// Independent reference computations for derived quantities. These restate the
// rules from first principles and share no code with the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <utility>
#include <vector>

namespace oracle {

inline double path_loss_db(double d_m) { return 128.1 + 37.6 * std::log10(std::max(d_m, 35.0) / 1000.0); }

inline double tx_power_dbm(double p_max, double p0, double alpha, double cl, int n_prbs) {
  return std::min(p_max, p0 + 10.0 * std::log10(static_cast<double>(n_prbs)) + alpha * cl);
}

/// Legacy PRBs lost to one narrowband: every RBG it touches is unusable.
inline int narrowband_waste(int total_prbs, int rbg, int nb_first) {
  int waste = 0;
  for (int g = 0; g * rbg < total_prbs; ++g) {
    const int lo = g * rbg, hi = std::min(total_prbs, lo + rbg);
    if (lo < nb_first + 6 && nb_first < hi) waste += hi - lo;
  }
  return waste;
}

/// Subframe occupancy of one HARQ process starting at 0: MPDCCH, data and
/// (downlink) ACK, plus its cycle length.
struct Occupancy {
  std::vector<int> rx, tx;
  int cycle = 0;
};

inline Occupancy harq_occupancy(bool uplink, int rm, int rd, int ra) {
  Occupancy o;
  for (int i = 0; i < rm; ++i) o.rx.push_back(i);
  int t = rm - 1;
  if (uplink) {
    const int first = t + 4;
    for (int i = 0; i < rd; ++i) o.tx.push_back(first + i);
    o.cycle = first + rd - 1 + 4;
  } else {
    const int first = t + 2;
    for (int i = 0; i < rd; ++i) o.rx.push_back(first + i);
    const int ack = first + rd - 1 + 4;
    for (int i = 0; i < ra; ++i) o.tx.push_back(ack + i);
    o.cycle = ack + ra - 1 + 4;
  }
  return o;
}

/// Maximum number of copies of the process pattern that fit in a cyclic frame of
/// `period` subframes. Builds the pairwise compatibility of shifts and finds the
/// largest clique by plain enumeration.
inline int max_processes(bool uplink, int rm, int rd, int ra, int period, bool full_duplex) {
  const Occupancy o = harq_occupancy(uplink, rm, rd, ra);
  const int P = std::max(period, o.cycle);
  auto mod = [P](int t) { return ((t % P) + P) % P; };
  auto slots = [&](int shift) {
    std::vector<std::pair<int, bool>> s;  // (subframe, is_tx)
    for (int t : o.rx) s.emplace_back(mod(t + shift), false);
    for (int t : o.tx) s.emplace_back(mod(t + shift), true);
    return s;
  };
  auto clash = [&](const std::vector<std::pair<int, bool>>& a, const std::vector<std::pair<int, bool>>& b) {
    for (auto [ta, xa] : a)
      for (auto [tb, xb] : b) {
        if (xa == xb) {
          if (ta == tb) return true;
        } else if (!full_duplex) {
          const int d = mod(ta - tb);
          if (d == 0 || d == 1 || d == P - 1) return true;
        }
      }
    return false;
  };
  // A single process must itself respect the half-duplex guard.
  const auto base = slots(0);
  if (!full_duplex)
    for (auto [ta, xa] : base)
      for (auto [tb, xb] : base)
        if (xa && !xb) {
          const int d = mod(ta - tb);
          if (d == 0 || d == 1 || d == P - 1) return 0;
        }
  std::vector<std::vector<std::pair<int, bool>>> all;
  for (int s = 0; s < P; ++s) all.push_back(slots(s));
  std::vector<std::vector<bool>> ok(P, std::vector<bool>(P, false));
  for (int a = 0; a < P; ++a)
    for (int b = a + 1; b < P; ++b) ok[a][b] = ok[b][a] = !clash(all[a], all[b]);

  int best = 1;
  std::vector<int> chosen{0};  // rotation: fix one process at shift 0
  auto rec = [&](auto&& self, int next) -> void {
    best = std::max<int>(best, static_cast<int>(chosen.size()));
    if (static_cast<int>(chosen.size()) + (P - next) <= best) return;
    for (int s = next; s < P; ++s) {
      bool fits = true;
      for (int c : chosen) fits = fits && ok[c][s];
      if (!fits) continue;
      chosen.push_back(s);
      self(self, s + 1);
      chosen.pop_back();
    }
  };
  rec(rec, 1);
  return best;
}

/// Nearest-rank percentile.
inline double percentile(std::vector<double> v, double p) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * static_cast<double>(v.size())));
  return v[std::max<std::size_t>(rank, 1) - 1];
}

}  // namespace oracle
