#include "mhd/spheregrid.hpp"

#include "mhd/basis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>

namespace mhd {

namespace {

constexpr double sqrt2 = 1.4142135623730951;

int elmax_of(const RVec& coeffs) {
  int L = int(std::lround(std::sqrt(double(coeffs.size())))) - 1;
  if (L < 0 || (L + 1) * (L + 1) != coeffs.size())
    throw std::invalid_argument(
        "spheregrid: coefficient count must be a perfect square");
  return L;
}

void check_grid(const LatLonGrid& g, const char* who) {
  if (g.n_lat < 2 || g.n_lon < 4)
    throw std::invalid_argument(std::string(who) + ": degenerate grid");
  if (g.values.rows() != g.n_lat || g.values.cols() != g.n_lon ||
      g.theta.size() != g.n_lat || g.phi.size() != g.n_lon)
    throw std::invalid_argument(std::string(who) + ": inconsistent grid data");
}

// Walks the normalized associated Legendre values Pbar_{l,m}(theta) at fixed
// theta, invoking fn(l, m, value) over all 0 <= m <= l <= L.  Condon-Shortley
// phase included; normalization: integral of Pbar^2 sin(theta) dtheta over
// [0, pi] equals 1/(2 pi).
template <class Fn>
void legendre_walk(int L, double ct, double st, Fn&& fn) {
  double pmm = 1.0 / std::sqrt(4.0 * pi);
  for (int m = 0; m <= L; ++m) {
    double prev = pmm;
    fn(m, m, prev);
    if (m + 1 <= L) {
      double cur = std::sqrt(2.0 * m + 3.0) * ct * pmm;
      fn(m + 1, m, cur);
      for (int l = m + 2; l <= L; ++l) {
        double lm = double(l) * l - double(m) * m;
        double alpha = std::sqrt((4.0 * l * l - 1.0) / lm);
        double beta = std::sqrt((2.0 * l + 1.0) * (l + m - 1.0) *
                                (l - m - 1.0) / ((2.0 * l - 3.0) * lm));
        double next = alpha * ct * cur - beta * prev;
        fn(l, m, next);
        prev = cur;
        cur = next;
      }
    }
    pmm *= -std::sqrt((2.0 * m + 3.0) / (2.0 * m + 2.0)) * st;
  }
}

// Quadrature weights of Fejer's first rule.  The cell-centered colatitudes
// theta_i = (2i+1) pi / (2n) place x_i = cos(theta_i) on Chebyshev nodes, so
// these weights integrate polynomials in cos(theta) up to degree n-1 exactly
// over [-1, 1]; that covers every same-m product of two normalized Legendre
// functions with l <= (n-2)/2.
RVec fejer1_weights(int n) {
  RVec w(n);
  for (int i = 0; i < n; ++i) {
    double t = pi * (i + 0.5) / n;
    double s = 0.0;
    for (int k = 1; k <= n / 2; ++k)
      s += std::cos(2.0 * k * t) / (4.0 * double(k) * k - 1.0);
    w[i] = 2.0 / n * (1.0 - 2.0 * s);
  }
  return w;
}

// cos(m phi_j) and sin(m phi_j) tables, rows m = 0..L.
void trig_tables(int L, const RVec& phi, RMat& ct, RMat& st) {
  const int n = int(phi.size());
  ct.resize(L + 1, n);
  st.resize(L + 1, n);
  for (int m = 0; m <= L; ++m)
    for (int j = 0; j < n; ++j) {
      ct(m, j) = std::cos(m * phi[j]);
      st(m, j) = std::sin(m * phi[j]);
    }
}

}  // namespace

LatLonGrid make_grid(int n_lat, int n_lon) {
  if (n_lat < 2 || n_lon < 4)
    throw std::invalid_argument("make_grid: need n_lat >= 2 and n_lon >= 4");
  LatLonGrid g;
  g.n_lat = n_lat;
  g.n_lon = n_lon;
  g.theta.resize(n_lat);
  for (int i = 0; i < n_lat; ++i) g.theta[i] = pi * (i + 0.5) / n_lat;
  g.phi.resize(n_lon);
  for (int j = 0; j < n_lon; ++j) g.phi[j] = 2.0 * pi * j / n_lon;
  g.values = RMat::Zero(n_lat, n_lon);
  return g;
}

LatLonGrid synthesize(const RVec& coeffs, int n_lat, int n_lon) {
  const int L = elmax_of(coeffs);
  LatLonGrid g = make_grid(n_lat, n_lon);
  if (L > n_lat)
    std::cerr << "synthesize: elmax " << L << " exceeds n_lat " << n_lat
              << ", aliasing likely\n";

  RMat ctab, stab;
  trig_tables(L, g.phi, ctab, stab);

  RVec acc_cos(L + 1), acc_sin(L + 1);
  for (int i = 0; i < n_lat; ++i) {
    acc_cos.setZero();
    acc_sin.setZero();
    legendre_walk(L, std::cos(g.theta[i]), std::sin(g.theta[i]),
                  [&](int l, int m, double p) {
                    if (m == 0) {
                      acc_cos[0] += coeffs[coeff_index(l, 0)] * p;
                    } else {
                      acc_cos[m] += sqrt2 * coeffs[coeff_index(l, m)] * p;
                      acc_sin[m] += sqrt2 * coeffs[coeff_index(l, -m)] * p;
                    }
                  });
    for (int j = 0; j < n_lon; ++j) {
      double v = acc_cos[0];
      for (int m = 1; m <= L; ++m)
        v += acc_cos[m] * ctab(m, j) + acc_sin[m] * stab(m, j);
      g.values(i, j) = v;
    }
  }
  return g;
}

RVec analyze(const LatLonGrid& grid, int elmax) {
  check_grid(grid, "analyze");
  if (elmax < 0) throw std::invalid_argument("analyze: elmax must be >= 0");
  if (grid.n_lat < 2 * elmax + 2 || grid.n_lon < 2 * elmax + 1)
    throw std::invalid_argument("analyze: grid under-resolved for elmax");

  RMat ctab, stab;
  trig_tables(elmax, grid.phi, ctab, stab);

  const RVec wq = fejer1_weights(grid.n_lat);
  RVec coeffs = RVec::Zero((elmax + 1) * (elmax + 1));
  RVec fcos(elmax + 1), fsin(elmax + 1);
  for (int i = 0; i < grid.n_lat; ++i) {
    const double w = wq[i] * (2.0 * pi / grid.n_lon);
    for (int m = 0; m <= elmax; ++m) {
      fcos[m] = grid.values.row(i).dot(ctab.row(m));
      fsin[m] = grid.values.row(i).dot(stab.row(m));
    }
    legendre_walk(elmax, std::cos(grid.theta[i]), std::sin(grid.theta[i]),
                  [&](int l, int m, double p) {
                    if (m == 0) {
                      coeffs[coeff_index(l, 0)] += p * fcos[0] * w;
                    } else {
                      coeffs[coeff_index(l, m)] += sqrt2 * p * fcos[m] * w;
                      coeffs[coeff_index(l, -m)] += sqrt2 * p * fsin[m] * w;
                    }
                  });
  }
  return coeffs;
}

bool hammer_invert(double x, double y, double& lat, double& lon) {
  // closed ellipse, with roundoff slack so the poles stay inside
  if (x * x / 8.0 + y * y / 2.0 > 1.0 + 1e-12) return false;
  double z2 = 1.0 - x * x / 16.0 - y * y / 4.0;
  double z = std::sqrt(z2);
  lat = std::asin(std::clamp(z * y, -1.0, 1.0));
  lon = 2.0 * std::atan2(z * x / 2.0, 2.0 * z2 - 1.0);
  return true;
}

void colormap_diverging(double t, unsigned char rgb[3]) {
  t = std::clamp(t, -1.0, 1.0);
  // white at 0, #B40426 at +1, #3B4CC0 at -1
  double r, g, b;
  if (t >= 0.0) {
    r = 255.0 + t * (180.0 - 255.0);
    g = 255.0 + t * (4.0 - 255.0);
    b = 255.0 + t * (38.0 - 255.0);
  } else {
    r = 255.0 - t * (59.0 - 255.0);
    g = 255.0 - t * (76.0 - 255.0);
    b = 255.0 - t * (192.0 - 255.0);
  }
  rgb[0] = static_cast<unsigned char>(std::lround(r));
  rgb[1] = static_cast<unsigned char>(std::lround(g));
  rgb[2] = static_cast<unsigned char>(std::lround(b));
}

RasterImage render_hammer(const LatLonGrid& grid, int width, double vmax) {
  check_grid(grid, "render_hammer");
  if (width < 4 || width % 2 != 0)
    throw std::invalid_argument("render_hammer: width must be even and >= 4");

  if (vmax <= 0.0) vmax = grid.values.cwiseAbs().maxCoeff();

  RasterImage img;
  img.width = width;
  img.height = width / 2;
  img.rgb.assign(size_t(width) * img.height * 3, 0);

  const double dth = pi / grid.n_lat;
  const double dph = 2.0 * pi / grid.n_lon;
  const unsigned char bg[3] = {64, 64, 64};

  for (int py = 0; py < img.height; ++py) {
    double y = (1.0 - 2.0 * (py + 0.5) / img.height) * std::sqrt(2.0);
    for (int px = 0; px < width; ++px) {
      double x = (2.0 * (px + 0.5) / width - 1.0) * 2.0 * std::sqrt(2.0);
      unsigned char* out = &img.rgb[(size_t(py) * width + px) * 3];
      double lat, lon;
      if (!hammer_invert(x, y, lat, lon)) {
        out[0] = bg[0];
        out[1] = bg[1];
        out[2] = bg[2];
        continue;
      }
      double theta = 0.5 * pi - lat;
      double phi = lon < 0.0 ? lon + 2.0 * pi : lon;

      double u = theta / dth - 0.5;
      int i0 = int(std::floor(u));
      double fu = u - i0;
      int ia = std::clamp(i0, 0, grid.n_lat - 1);
      int ib = std::clamp(i0 + 1, 0, grid.n_lat - 1);
      double v = phi / dph;
      int j0 = int(std::floor(v));
      double fv = v - j0;
      int ja = ((j0 % grid.n_lon) + grid.n_lon) % grid.n_lon;
      int jb = (ja + 1) % grid.n_lon;
      double val = (1.0 - fu) * ((1.0 - fv) * grid.values(ia, ja) +
                                 fv * grid.values(ia, jb)) +
                   fu * ((1.0 - fv) * grid.values(ib, ja) +
                         fv * grid.values(ib, jb));
      colormap_diverging(vmax > 0.0 ? val / vmax : 0.0, out);
    }
  }
  return img;
}

void write_ppm(const std::string& path, const RasterImage& img) {
  if (img.width <= 0 || img.height <= 0 ||
      img.rgb.size() != size_t(img.width) * img.height * 3)
    throw std::invalid_argument("write_ppm: malformed image");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_ppm: cannot open " + path);
  out << "P6\n" << img.width << ' ' << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.rgb.data()),
            std::streamsize(img.rgb.size()));
  if (!out) throw std::runtime_error("write_ppm: write failed for " + path);
}

}  // namespace mhd
