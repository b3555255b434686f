#pragma once

#include <string>
#include <vector>

#include "mhd/common.hpp"

namespace mhd {

// ---- real spherical harmonics on a latitude-longitude grid ----
//
// Coefficient vectors use the flat index k = l^2 + l + m over unit-L2-norm
// real spherical harmonics with the Condon-Shortley phase folded into the
// associated Legendre recurrences:
//   Y_{l,0}  = Pbar_{l,0}
//   Y_{l,m}  = sqrt(2) Pbar_{l,m} cos(m phi)   (m > 0)
//   Y_{l,-m} = sqrt(2) Pbar_{l,m} sin(m phi)

struct LatLonGrid {
  int n_lat = 0;
  int n_lon = 0;
  RVec theta;   // cell-centered colatitudes pi (i + 1/2) / n_lat
  RVec phi;     // longitudes 2 pi j / n_lon
  RMat values;  // n_lat x n_lon field samples
};

struct RasterImage {
  int width = 0;
  int height = 0;
  std::vector<unsigned char> rgb;  // 3 bytes per pixel, row-major from top
};

LatLonGrid make_grid(int n_lat, int n_lon);

// Evaluates the expansion sum_k coeffs[k] Y_k on the grid.  The coefficient
// count must be a perfect square (elmax + 1)^2; elmax > n_lat provokes an
// aliasing warning on stderr.
LatLonGrid synthesize(const RVec& coeffs, int n_lat, int n_lon);

// Quadrature inverse of synthesize.  Exact (to roundoff) for band-limited
// grids when n_lat >= 2 elmax + 2 and n_lon >= 2 elmax + 1; throws on
// under-resolved grids.
RVec analyze(const LatLonGrid& grid, int elmax);

// Inverse Hammer projection of normalized map coordinates |x| <= 2 sqrt(2),
// |y| <= sqrt(2).  Returns false outside the projection ellipse.
bool hammer_invert(double x, double y, double& lat, double& lon);

// Diverging blue-white-red colormap over t in [-1, 1].
void colormap_diverging(double t, unsigned char rgb[3]);

// Equal-area Hammer rendering, width x width/2 pixels (width even).  Colors
// span +-vmax; vmax <= 0 selects the per-frame max |value|.  Pixels outside
// the ellipse get a dark gray background.
RasterImage render_hammer(const LatLonGrid& grid, int width, double vmax = 0.0);

// Binary PPM (P6) writer: "P6\n<width> <height>\n255\n" + raw triples.
void write_ppm(const std::string& path, const RasterImage& img);

}  // namespace mhd
