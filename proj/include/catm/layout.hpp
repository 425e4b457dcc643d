#pragma once

// Hexagonal multi-site layout, UE drops and the coupling-loss matrix.

#include <cstdint>
#include <vector>

#include "catm/scenario.hpp"

namespace catm::sim {

struct Site {
  int q = 0;  // axial hex coordinates
  int r = 0;
  double x_m = 0.0;
  double y_m = 0.0;
};

struct Cell {
  int id = 0;
  int site = 0;
  int sector = 0;
  double boresight_deg = 0.0;
};

struct UeDrop {
  int id = 0;
  int group = 0;
  int drop_cell = 0;
  double x_m = 0.0;
  double y_m = 0.0;
  /// Coupling loss towards every cell, indexed by cell id.
  std::vector<double> coupling_loss_db;
  int serving_cell = 0;
  radio::LinkState serving_link;
};

struct Layout {
  std::vector<Site> sites;
  std::vector<Cell> cells;
  std::vector<UeDrop> ues;

  double serving_cl(int ue) const { return ues[ue].coupling_loss_db[ues[ue].serving_cell]; }
};

/// 1 + 3r(r+1) sites for r rings.
int site_count(int rings);

/// Axial coordinates of every site within `rings`, centre first then ring by ring.
std::vector<Site> hex_sites(int rings, double isd_m);

/// Smallest distance from (x, y) to the site or, with wraparound, any of its six images.
double site_distance_m(const Site& s, double x_m, double y_m, int rings, double isd_m, bool wraparound);

/// Azimuth of the UE as seen from the site, degrees in [0, 360).
double site_azimuth_deg(const Site& s, double x_m, double y_m, int rings, double isd_m, bool wraparound);

/// Builds sites, cells and UE drops; each UE attaches to its minimum coupling-loss cell.
/// Throws ConfigError for an empty population.
Layout build_layout(const Scenario& sc);

}  // namespace catm::sim
