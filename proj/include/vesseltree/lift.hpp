// Copyright 2026 The Vesseltree Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef VESSELTREE_LIFT_HPP_
#define VESSELTREE_LIFT_HPP_

#include <cmath>
#include <vector>

#include "vesseltree/core.hpp"
#include "vesseltree/image.hpp"
#include "vesseltree/parallel.hpp"

namespace vesseltree {

//! Anisotropic Gaussian kernel of the lifting operator. The long axis is
//! aligned with the orientation of each theta slice, so a slice responds
//! to image features parallel to it.
struct LiftKernelParams {
  double sigma_long = 6.0;
  double sigma_short = 1.5;
  int support_radius = 18;

  void validate() const {
    if (!(sigma_long > sigma_short) || !(sigma_short > 0.0))
      throw ConfigError("LiftKernelParams: need sigma_long > sigma_short > 0");
    if (support_radius < 3.0 * sigma_long)
      throw ConfigError(
          "LiftKernelParams: support_radius must be >= 3*sigma_long");
  }
};

struct FrangiParams {
  std::vector<double> scales = {1.0, 2.0, 4.0};
  double beta = 0.5;
  double c = 0.0;  // 0 = per image, half the maximum Hessian norm

  void validate() const {
    if (scales.empty()) throw ConfigError("FrangiParams: empty scale list");
    for (double s : scales)
      if (!(s > 0.0)) throw ConfigError("FrangiParams: scales must be > 0");
    if (!(beta > 0.0) || c < 0.0)
      throw ConfigError("FrangiParams: beta must be > 0 and c >= 0");
  }
};

//! One microbubble track: localized positions with per-frame velocity.
struct TrajectoryPoint {
  double x = 0.0;
  double y = 0.0;
  double vx = 0.0;
  double vy = 0.0;
  double t = 0.0;
};

struct Trajectory {
  std::vector<TrajectoryPoint> points;
  long track_id = 0;
};

struct NormalizeResult {
  LiftedField field;
  bool degenerate = false;  // input was constant; output all zeros
};

//! Affine min-max rescaling of the whole field to [0,1]. A constant field
//! has no meaningful rescaling and comes back as all zeros with the
//! degenerate flag set.
inline NormalizeResult normalize_score(const LiftedField& field) {
  NormalizeResult out{LiftedField(field.spec), false};
  const double lo = field.min_value();
  const double hi = field.max_value();
  if (!(hi > lo)) {
    out.degenerate = true;
    return out;
  }
  const double inv = 1.0 / (hi - lo);
  for (std::size_t i = 0; i < field.values.size(); ++i)
    out.field.values[i] = (field.values[i] - lo) * inv;
  return out;
}

namespace detail {

//! Taps of the unit-mass anisotropic Gaussian rotated to theta, on the
//! integer square [-r, r]^2. Discrete mass is normalized to exactly 1.
inline std::vector<double> lift_kernel(double theta,
                                       const LiftKernelParams& params) {
  const int r = params.support_radius;
  const int n = 2 * r + 1;
  std::vector<double> taps(static_cast<std::size_t>(n) * n);
  const double ct = std::cos(theta), st = std::sin(theta);
  const double il2 = 1.0 / (2.0 * params.sigma_long * params.sigma_long);
  const double is2 = 1.0 / (2.0 * params.sigma_short * params.sigma_short);
  double mass = 0.0;
  for (int dx = -r; dx <= r; ++dx) {
    for (int dy = -r; dy <= r; ++dy) {
      const double along = dx * ct + dy * st;
      const double across = -dx * st + dy * ct;
      const double v = std::exp(-along * along * il2 - across * across * is2);
      taps[static_cast<std::size_t>(dx + r) * n + (dy + r)] = v;
      mass += v;
    }
  }
  for (double& v : taps) v /= mass;
  return taps;
}

//! Dense direct convolution with zero padding outside the image.
inline void convolve_slice(const Image& image, const std::vector<double>& taps,
                           int r, LiftedField& out, int k) {
  const int n = 2 * r + 1;
  for (int x = 0; x < image.width; ++x) {
    for (int y = 0; y < image.height; ++y) {
      const int dx0 = std::max(-r, -x), dx1 = std::min(r, image.width - 1 - x);
      const int dy0 = std::max(-r, -y), dy1 = std::min(r, image.height - 1 - y);
      double acc = 0.0;
      for (int dx = dx0; dx <= dx1; ++dx) {
        const double* tap_col = &taps[static_cast<std::size_t>(dx + r) * n];
        const double* img_col =
            &image.values[static_cast<std::size_t>(x + dx) * image.height];
        for (int dy = dy0; dy <= dy1; ++dy)
          acc += tap_col[dy + r] * img_col[y + dy];
      }
      out.at(x, y, k) = acc;
    }
  }
}

//! Separable Gaussian blur with zero padding; sigma in pixels.
inline Image gaussian_blur(const Image& image, double sigma) {
  const int r = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> taps(2 * r + 1);
  double mass = 0.0;
  for (int i = -r; i <= r; ++i) {
    taps[i + r] = std::exp(-0.5 * i * i / (sigma * sigma));
    mass += taps[i + r];
  }
  for (double& t : taps) t /= mass;

  Image tmp(image.width, image.height);
  for (int y = 0; y < image.height; ++y)
    for (int x = 0; x < image.width; ++x) {
      double acc = 0.0;
      const int d0 = std::max(-r, -x), d1 = std::min(r, image.width - 1 - x);
      for (int d = d0; d <= d1; ++d) acc += taps[d + r] * image.at(x + d, y);
      tmp.at(x, y) = acc;
    }
  Image out(image.width, image.height);
  for (int x = 0; x < image.width; ++x)
    for (int y = 0; y < image.height; ++y) {
      double acc = 0.0;
      const int d0 = std::max(-r, -y), d1 = std::min(r, image.height - 1 - y);
      for (int d = d0; d <= d1; ++d) acc += taps[d + r] * tmp.at(x, y + d);
      out.at(x, y) = acc;
    }
  return out;
}

}  // namespace detail

//! Lifts a 2D image to the orientation-score field W: one rotated
//! anisotropic-Gaussian convolution per theta bin, then min-max
//! normalization to [0,1]. Slices run in parallel.
inline LiftedField lift_image(const Image& image, const GridSpec& spec,
                              const LiftKernelParams& params,
                              bool* degenerate = nullptr, int threads = 0) {
  params.validate();
  spec.validate();
  if (image.width != spec.width || image.height != spec.height)
    throw ConfigError("lift_image: image dimensions do not match grid spec");
  for (double v : image.values)
    if (v < 0.0) throw ConfigError("lift_image: image must be nonnegative");

  LiftedField lifted(spec);
  parallel_for(
      static_cast<std::size_t>(spec.n_theta),
      [&](std::size_t k) {
        const auto taps =
            detail::lift_kernel(spec.theta_at(static_cast<int>(k)), params);
        detail::convolve_slice(image, taps, params.support_radius, lifted,
                               static_cast<int>(k));
      },
      threads);

  NormalizeResult norm = normalize_score(lifted);
  if (degenerate) *degenerate = norm.degenerate;
  return std::move(norm.field);
}

//! Frangi vesselness for bright tubular structures on a dark background.
//! Per scale: Gaussian smoothing, scale-normalized Hessian by central
//! differences, eigenvalues |l1| <= |l2|, response
//! exp(-R_B^2/2beta^2) * (1 - exp(-S^2/2c^2)) zeroed where l2 > 0.
//! The output is the max over scales, rescaled to [0,1].
inline Image frangi_vesselness(const Image& image, const FrangiParams& params) {
  params.validate();
  const int w = image.width, h = image.height;

  struct EigenPair {
    double l1, l2;
  };
  // Hessian eigenvalues per scale, then response with the structureness
  // constant resolved per image if requested.
  std::vector<std::vector<EigenPair>> eigs(params.scales.size());
  double max_norm = 0.0;
  for (std::size_t si = 0; si < params.scales.size(); ++si) {
    const double s = params.scales[si];
    const Image g = detail::gaussian_blur(image, s);
    eigs[si].resize(static_cast<std::size_t>(w) * h);
    const double s2 = s * s;  // scale normalization
    for (int x = 0; x < w; ++x) {
      for (int y = 0; y < h; ++y) {
        auto v = [&](int xi_, int yi_) {
          return g.at(std::clamp(xi_, 0, w - 1), std::clamp(yi_, 0, h - 1));
        };
        const double hxx = s2 * (v(x + 1, y) - 2 * v(x, y) + v(x - 1, y));
        const double hyy = s2 * (v(x, y + 1) - 2 * v(x, y) + v(x, y - 1));
        const double hxy = s2 * 0.25 *
                           (v(x + 1, y + 1) - v(x + 1, y - 1) -
                            v(x - 1, y + 1) + v(x - 1, y - 1));
        const double tr = hxx + hyy;
        const double disc =
            std::sqrt(std::max(0.0, 0.25 * (hxx - hyy) * (hxx - hyy) +
                                        hxy * hxy));
        double a = 0.5 * tr + disc, b = 0.5 * tr - disc;
        if (std::abs(a) > std::abs(b)) std::swap(a, b);  // |l1| <= |l2|
        eigs[si][static_cast<std::size_t>(x) * h + y] = {a, b};
        max_norm = std::max(max_norm, std::sqrt(a * a + b * b));
      }
    }
  }
  const double c = params.c > 0.0 ? params.c : std::max(max_norm * 0.5, 1e-12);

  // Both factors live in [0,1], so the response needs no rescaling.
  Image out(w, h);
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    double best = 0.0;
    for (const auto& scale_eigs : eigs) {
      const double l1 = scale_eigs[i].l1, l2 = scale_eigs[i].l2;
      if (l2 >= 0.0) continue;  // dark or flat: not a bright vessel
      const double rb = l1 / l2;
      const double s2 = l1 * l1 + l2 * l2;
      const double resp = std::exp(-rb * rb / (2.0 * params.beta * params.beta)) *
                          (1.0 - std::exp(-s2 / (2.0 * c * c)));
      best = std::max(best, resp);
    }
    out.values[i] = best;
  }
  return out;
}

//! Orientation score straight from microbubble trajectories: histogram
//! every point into its (x, y, velocity-orientation) bin, smooth spatially
//! per slice and angularly with a periodic [1,2,1]/4 filter, then rescale
//! to [0,1]. Velocity orientation is projective: v and -v land in the
//! same bin.
inline LiftedField build_ulm_score(const std::vector<Trajectory>& trajectories,
                                   const GridSpec& spec, double smoothing,
                                   bool* degenerate = nullptr,
                                   int threads = 0) {
  spec.validate();
  if (!(smoothing > 0.0))
    throw ConfigError("build_ulm_score: smoothing must be > 0");

  LiftedField hist(spec);
  std::size_t used = 0;
  for (const auto& traj : trajectories) {
    for (const auto& p : traj.points) {
      if (p.vx == 0.0 && p.vy == 0.0) continue;
      const int x = static_cast<int>(std::lround(p.x));
      const int y = static_cast<int>(std::lround(p.y));
      if (!spec.contains_node(x, y)) continue;
      const int k = spec.nearest_theta_bin(std::atan2(p.vy, p.vx));
      hist.at(x, y, k) += 1.0;
      ++used;
    }
  }
  if (used == 0)
    throw InputError(
        "build_ulm_score: no trajectory point with nonzero velocity inside "
        "the domain");

  // Spatial smoothing slice by slice.
  LiftedField smooth(spec);
  parallel_for(
      static_cast<std::size_t>(spec.n_theta),
      [&](std::size_t k) {
        Image slice(spec.width, spec.height);
        for (int x = 0; x < spec.width; ++x)
          for (int y = 0; y < spec.height; ++y)
            slice.at(x, y) = hist.at(x, y, static_cast<int>(k));
        Image blurred = detail::gaussian_blur(slice, smoothing);
        for (int x = 0; x < spec.width; ++x)
          for (int y = 0; y < spec.height; ++y)
            smooth.at(x, y, static_cast<int>(k)) = blurred.at(x, y);
      },
      threads);

  // Periodic [1,2,1]/4 angular filter.
  LiftedField filtered(spec);
  for (int x = 0; x < spec.width; ++x)
    for (int y = 0; y < spec.height; ++y)
      for (int k = 0; k < spec.n_theta; ++k) {
        const int km = spec.wrap_theta_bin(k - 1);
        const int kp = spec.wrap_theta_bin(k + 1);
        filtered.at(x, y, k) = 0.25 * smooth.at(x, y, km) +
                               0.5 * smooth.at(x, y, k) +
                               0.25 * smooth.at(x, y, kp);
      }

  NormalizeResult norm = normalize_score(filtered);
  if (degenerate) *degenerate = norm.degenerate;
  return std::move(norm.field);
}

}  // namespace vesseltree

#endif  // VESSELTREE_LIFT_HPP_
