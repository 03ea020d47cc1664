#pragma once

// Individual Typology Angle: per-pixel angle from CIE-Lab L and b, smoothed,
// reduced to a histogram mode per region, averaged over the skin regions.

#include <array>
#include <optional>
#include <vector>

#include "skintone/color.hpp"
#include "skintone/config.hpp"
#include "skintone/roi.hpp"

namespace skintone {

/// atan((L-50)/b) in degrees; b == 0 gives +-90 by the sign of L-50.
/// Returns nullopt when L == 50 and b == 0.
std::optional<double> pixel_ita(const Lab& lab);

// Angle grid over a crop; NaN marks undefined pixels.
struct ItaMap {
  int width = 0;
  int height = 0;
  std::vector<double> values;
};

ItaMap ita_map(const RegionCrop& crop);

/// Mean filter (edge-replicated, undefined neighbours skipped) followed by the
/// histogram mode. Throws Error(kInsufficientPixels).
double region_ita(const ItaMap& map, const ItaConfig& config = {});
double region_ita(const RegionCrop& crop, const ItaConfig& config = {});

/// Mode of a set of angles over bins of bin_width centered on its multiples
/// (end bins clipped to +-90); returns the center of the fullest bin, ties
/// toward the median.
double histogram_mode(const std::vector<double>& angles, double bin_width);

struct ItaResult {
  std::array<double, 3> per_region{};  // forehead, left cheek, right cheek
  double value = 0.0;
};

/// Throws Error(kMetricUnavailable) naming the failing region.
ItaResult compute_ita(const FaceSample& sample, const ItaConfig& config = {});

}  // namespace skintone
