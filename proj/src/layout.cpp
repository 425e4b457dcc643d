#include "catm/layout.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "catm/traffic.hpp"

namespace catm::sim {

namespace {

constexpr double kDeg = 180.0 / std::numbers::pi;
constexpr std::uint64_t kLayoutStream = 0x4c41594f55540000ull;

void axial_to_xy(int q, int r, double isd, double& x, double& y) {
  x = isd * (q + r / 2.0);
  y = isd * std::sqrt(3.0) / 2.0 * r;
}

/// Site positions of the torus images used by wraparound (the site itself first).
std::vector<std::pair<double, double>> images(const Site& s, int rings, double isd, bool wraparound) {
  std::vector<std::pair<double, double>> out{{s.x_m, s.y_m}};
  if (!wraparound || rings == 0) return out;
  const int R = rings;
  const int shifts[3][2] = {{R + 1, R}, {-R, 2 * R + 1}, {-2 * R - 1, R + 1}};
  for (const auto& v : shifts)
    for (int sign : {1, -1}) {
      double dx, dy;
      axial_to_xy(sign * v[0], sign * v[1], isd, dx, dy);
      out.emplace_back(s.x_m + dx, s.y_m + dy);
    }
  return out;
}

std::pair<double, double> nearest_image(const Site& s, double x, double y, int rings, double isd, bool wrap) {
  auto best = std::make_pair(s.x_m, s.y_m);
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto& p : images(s, rings, isd, wrap)) {
    const double d = std::hypot(x - p.first, y - p.second);
    if (d < best_d) {
      best_d = d;
      best = p;
    }
  }
  return best;
}

/// Voronoi hexagon of a site on the lattice above: pointy top, circumradius `rad`.
bool in_hexagon(double x, double y, double rad) {
  const double ax = std::abs(x), ay = std::abs(y);
  const double h = rad * std::sqrt(3.0) / 2.0;
  if (ax > h) return false;
  return ay <= rad - ax / std::sqrt(3.0);
}

double wrap_deg(double a) {
  a = std::fmod(a, 360.0);
  return a < 0 ? a + 360.0 : a;
}

}  // namespace

int site_count(int rings) { return 1 + 3 * rings * (rings + 1); }

std::vector<Site> hex_sites(int rings, double isd_m) {
  if (rings < 0) throw ConfigError("layout.rings: must be >= 0");
  std::vector<Site> out;
  out.push_back({});
  // Walk each ring starting from the (k, 0) corner, six sides of k steps each.
  const int dirs[6][2] = {{-1, 1}, {-1, 0}, {0, -1}, {1, -1}, {1, 0}, {0, 1}};
  for (int k = 1; k <= rings; ++k) {
    int q = k, r = 0;
    for (const auto& d : dirs)
      for (int step = 0; step < k; ++step) {
        Site s{q, r, 0.0, 0.0};
        axial_to_xy(q, r, isd_m, s.x_m, s.y_m);
        out.push_back(s);
        q += d[0];
        r += d[1];
      }
  }
  return out;
}

double site_distance_m(const Site& s, double x, double y, int rings, double isd, bool wrap) {
  const auto p = nearest_image(s, x, y, rings, isd, wrap);
  return std::hypot(x - p.first, y - p.second);
}

double site_azimuth_deg(const Site& s, double x, double y, int rings, double isd, bool wrap) {
  const auto p = nearest_image(s, x, y, rings, isd, wrap);
  return wrap_deg(std::atan2(y - p.second, x - p.first) * kDeg);
}

Layout build_layout(const Scenario& sc) {
  const LayoutConfig& L = sc.layout;
  if (sc.total_ues() <= 0) throw ConfigError("scenario.ue_groups: zero UEs");
  Layout out;
  out.sites = hex_sites(L.rings, L.isd_m);
  for (int s = 0; s < static_cast<int>(out.sites.size()); ++s)
    for (int k = 0; k < L.sectors; ++k)
      out.cells.push_back({static_cast<int>(out.cells.size()), s, k, L.sectors == 1 ? 0.0 : 30.0 + 120.0 * k});

  radio::AntennaPattern pattern = sc.radio.antenna;
  if (L.sectors == 1) pattern.omni_horizontal = true;

  auto rng = traffic::make_stream(sc.seed, kLayoutStream);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> shadow(0.0, 1.0);

  const double cell_radius = L.isd_m / std::sqrt(3.0);
  const int n_cells = static_cast<int>(out.cells.size());
  const int n_sites = static_cast<int>(out.sites.size());
  int ue_id = 0;
  for (int g = 0; g < static_cast<int>(sc.ue_groups.size()); ++g) {
    const UeGroup& grp = sc.ue_groups[g];
    for (int i = 0; i < grp.count; ++i, ++ue_id) {
      UeDrop u;
      u.id = ue_id;
      u.group = g;
      u.drop_cell = ue_id % n_cells;
      const Cell& dc = out.cells[u.drop_cell];
      const Site& ds = out.sites[dc.site];
      // Uniform in the site hexagon, restricted to the sector's 120-degree wedge.
      for (;;) {
        const double dx = (2.0 * unit(rng) - 1.0) * cell_radius;
        const double dy = (2.0 * unit(rng) - 1.0) * cell_radius;
        if (!in_hexagon(dx, dy, cell_radius)) continue;
        if (std::hypot(dx, dy) < L.min_distance_m) continue;
        if (L.sectors == 3) {
          const double off = wrap_deg(std::atan2(dy, dx) * kDeg - dc.boresight_deg + 180.0) - 180.0;
          if (off < -60.0 || off >= 60.0) continue;
        }
        u.x_m = ds.x_m + dx;
        u.y_m = ds.y_m + dy;
        break;
      }
      std::vector<double> site_shadow(n_sites);
      for (double& v : site_shadow) v = sc.radio.shadow_std_db * shadow(rng);

      u.coupling_loss_db.resize(n_cells);
      std::vector<radio::LinkState> links(n_cells);
      for (const Cell& c : out.cells) {
        const Site& s = out.sites[c.site];
        const double d = site_distance_m(s, u.x_m, u.y_m, L.rings, L.isd_m, L.wraparound);
        const double az = site_azimuth_deg(s, u.x_m, u.y_m, L.rings, L.isd_m, L.wraparound) - c.boresight_deg;
        const double el = std::atan2(L.enb_height_m - L.ue_height_m, std::max(d, L.min_distance_m)) * kDeg;
        const double pl = radio::path_loss_db(d, sc.radio.carrier_ghz, L.min_distance_m);
        links[c.id] = radio::make_link(d, pl, site_shadow[c.site], sc.radio.body_loss_db,
                                       radio::antenna_gain_db(az, el, pattern), sc.radio.ue_antenna_gain_db);
        u.coupling_loss_db[c.id] = links[c.id].coupling_loss_db;
      }
      u.serving_cell = static_cast<int>(std::min_element(u.coupling_loss_db.begin(), u.coupling_loss_db.end()) -
                                        u.coupling_loss_db.begin());
      if (grp.coupling_loss_db) {
        // Pinned serving loss: shift the whole row so relative geometry (and attachment) is kept.
        const double delta = *grp.coupling_loss_db - u.coupling_loss_db[u.serving_cell];
        for (double& v : u.coupling_loss_db) v += delta;
        links[u.serving_cell].shadow_db += delta;
        links[u.serving_cell].coupling_loss_db = *grp.coupling_loss_db;
      }
      u.serving_link = links[u.serving_cell];
      out.ues.push_back(std::move(u));
    }
  }
  return out;
}

}  // namespace catm::sim
