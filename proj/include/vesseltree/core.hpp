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

#ifndef VESSELTREE_CORE_HPP_
#define VESSELTREE_CORE_HPP_

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace vesseltree {

inline constexpr double kPi = 3.14159265358979323846;

//! Sentinel for unreached nodes in distance maps. Serialized as the largest
//! finite float32 in the LFT1 container.
inline constexpr double kUnreached = std::numeric_limits<double>::max();

// Error taxonomy. The CLI maps these onto its exit codes: input/domain
// problems -> 2, numerical failures -> 3, configuration problems -> 4.
class DomainError : public std::runtime_error {
 public:
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

//! Reduces an angle to the projective range [0, pi). Orientations are
//! lines, not rays: theta and theta + pi are the same orientation.
inline double mod_pi(double a) {
  double r = std::fmod(a, kPi);
  if (r < 0.0) r += kPi;
  if (r >= kPi) r = 0.0;  // fmod can round up to pi
  return r;
}

//! Projective angular distance d_P(a, b) = min(|d|, pi - |d|) with
//! d = (a - b) mod pi. Always in [0, pi/2].
inline double angular_distance(double a, double b) {
  double d = mod_pi(a - b);
  return std::min(d, kPi - d);
}

//! Signed projective difference a - b, reduced to (-pi/2, pi/2].
inline double angular_signed_diff(double a, double b) {
  double d = mod_pi(a - b);
  return (d > kPi / 2.0) ? d - kPi : d;
}

//! Discrete grid over R^2 x P^1: width x height spatial nodes (pixel
//! units) and n_theta orientation bins theta_k = k*pi/n_theta. The theta
//! axis is periodic with period pi.
struct GridSpec {
  int width = 0;
  int height = 0;
  int n_theta = 0;
  double spacing = 1.0;

  GridSpec() = default;
  GridSpec(int w, int h, int nt, double sp = 1.0)
      : width(w), height(h), n_theta(nt), spacing(sp) {
    validate();
  }

  void validate() const {
    if (width < 2 || height < 2)
      throw ConfigError("GridSpec: spatial dimensions must be >= 2, got " +
                        std::to_string(width) + "x" + std::to_string(height));
    if (n_theta < 4)
      throw ConfigError("GridSpec: n_theta must be >= 4, got " +
                        std::to_string(n_theta));
    if (!(spacing > 0.0)) throw ConfigError("GridSpec: spacing must be > 0");
  }

  double theta_step() const { return kPi / n_theta; }
  double theta_at(int k) const { return k * theta_step(); }

  //! Orientation bin nearest to theta (reduced mod pi), wrapped to
  //! [0, n_theta).
  int nearest_theta_bin(double theta) const {
    int k = static_cast<int>(std::lround(mod_pi(theta) / theta_step()));
    return k % n_theta;
  }

  int wrap_theta_bin(int k) const {
    int m = k % n_theta;
    return m < 0 ? m + n_theta : m;
  }

  bool contains(double x, double y) const {
    return x >= 0.0 && x <= width - 1 && y >= 0.0 && y <= height - 1;
  }
  bool contains_node(int x, int y) const {
    return x >= 0 && x < width && y >= 0 && y < height;
  }

  // Grid layout is x-major: x is the slowest index, theta the fastest.
  // Serialized fields use the same order, so files are layout-identical
  // to memory.
  std::size_t node_index(int x, int y, int k) const {
    return (static_cast<std::size_t>(x) * height + y) * n_theta + k;
  }
  std::size_t size() const {
    return static_cast<std::size_t>(width) * height * n_theta;
  }

  bool operator==(const GridSpec& o) const {
    return width == o.width && height == o.height && n_theta == o.n_theta &&
           spacing == o.spacing;
  }
};

//! Scalar field on the lifted grid. Houses orientation scores W (values in
//! [0,1]) and distance maps U (nonnegative, kUnreached sentinel allowed).
struct LiftedField {
  GridSpec spec;
  std::vector<double> values;

  LiftedField() = default;
  explicit LiftedField(const GridSpec& s, double fill = 0.0)
      : spec(s), values(s.size(), fill) {}

  double& at(int x, int y, int k) { return values[spec.node_index(x, y, k)]; }
  double at(int x, int y, int k) const {
    return values[spec.node_index(x, y, k)];
  }

  double min_value() const {
    return *std::min_element(values.begin(), values.end());
  }
  double max_value() const {
    return *std::max_element(values.begin(), values.end());
  }
};

enum class LandmarkClass { Endpoint, Bifurcation, Crossing };

inline const char* to_string(LandmarkClass c) {
  switch (c) {
    case LandmarkClass::Endpoint: return "endpoint";
    case LandmarkClass::Bifurcation: return "bifurcation";
    case LandmarkClass::Crossing: return "crossing";
  }
  return "?";
}

inline LandmarkClass landmark_class_from_string(const std::string& s) {
  if (s == "endpoint") return LandmarkClass::Endpoint;
  if (s == "bifurcation") return LandmarkClass::Bifurcation;
  if (s == "crossing") return LandmarkClass::Crossing;
  throw InputError("unknown landmark class: \"" + s + "\"");
}

//! Detected vascular keypoint, prior to orientation assignment.
struct Landmark {
  double x = 0.0;
  double y = 0.0;
  LandmarkClass cls = LandmarkClass::Endpoint;
  double confidence = 1.0;
};

enum class ThetaSource { Argmax, CrossingSecondary };

inline const char* to_string(ThetaSource s) {
  return s == ThetaSource::Argmax ? "argmax" : "crossing-secondary";
}

//! Landmark with an orientation coordinate, i.e. a point of the lifted
//! grid domain. theta is always kept in [0, pi).
struct LiftedLandmark {
  Landmark landmark;
  double theta = 0.0;
  ThetaSource source = ThetaSource::Argmax;
  bool low_confidence = false;
};

//! Parameters of the relaxed Reeds-Shepp tensor and of the score-to-cost
//! mapping C = 1/(1 + lambda W^2).
struct MetricParams {
  double epsilon = 0.1;  // sideways motion costs 1/epsilon
  double xi = 10.0;      // pixels per radian of turning
  double lambda = 1e3;   // cost contrast

  void validate() const {
    if (!(epsilon > 0.0) || !(xi > 0.0) || !(lambda > 0.0))
      throw ConfigError("MetricParams: epsilon, xi, lambda must all be > 0");
  }
};

//! Default radians-to-pixels tradeoff: a full orientation sweep costs about
//! as much as crossing half the image.
inline double default_xi(const GridSpec& spec) {
  return spec.width / (2.0 * kPi);
}

namespace detail {

//! Trilinear interpolation on an x-major lifted array: clamped at the
//! spatial border, periodic (period pi) in theta. Exact at grid nodes.
inline double sample_lifted_raw(const GridSpec& spec,
                                const std::vector<double>& values, double x,
                                double y, double theta) {
  if (!spec.contains(x, y))
    throw DomainError("sample_lifted: position (" + std::to_string(x) + ", " +
                      std::to_string(y) + ") outside image domain");
  const double tb = mod_pi(theta) / spec.theta_step();
  const int x0 = std::clamp(static_cast<int>(std::floor(x)), 0, spec.width - 1);
  const int y0 =
      std::clamp(static_cast<int>(std::floor(y)), 0, spec.height - 1);
  const int k0f = static_cast<int>(std::floor(tb));
  const int x1 = std::min(x0 + 1, spec.width - 1);
  const int y1 = std::min(y0 + 1, spec.height - 1);
  const double fx = std::clamp(x - x0, 0.0, 1.0);
  const double fy = std::clamp(y - y0, 0.0, 1.0);
  const double fk = tb - k0f;
  const int k0 = spec.wrap_theta_bin(k0f);
  const int k1 = spec.wrap_theta_bin(k0f + 1);

  auto v = [&](int xi_, int yi_, int ki_) {
    return values[spec.node_index(xi_, yi_, ki_)];
  };
  const double c00 = v(x0, y0, k0) * (1 - fk) + v(x0, y0, k1) * fk;
  const double c01 = v(x0, y1, k0) * (1 - fk) + v(x0, y1, k1) * fk;
  const double c10 = v(x1, y0, k0) * (1 - fk) + v(x1, y0, k1) * fk;
  const double c11 = v(x1, y1, k0) * (1 - fk) + v(x1, y1, k1) * fk;
  return (c00 * (1 - fy) + c01 * fy) * (1 - fx) +
         (c10 * (1 - fy) + c11 * fy) * fx;
}

}  // namespace detail

inline double sample_lifted(const LiftedField& field, double x, double y,
                            double theta) {
  return detail::sample_lifted_raw(field.spec, field.values, x, y, theta);
}

// ---------------------------------------------------------------------------
// LFT1 binary container: 16-byte header (magic "LFT1", then N_x, N_y,
// N_theta as 32-bit little-endian unsigned) followed by float32 little-endian
// samples in x-major order. kUnreached maps to the largest finite float32.
// ---------------------------------------------------------------------------

namespace detail {

inline void put_u32_le(std::ostream& os, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

inline std::uint32_t get_u32_le(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  return static_cast<std::uint32_t>(b[0]) |
         (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) |
         (static_cast<std::uint32_t>(b[3]) << 24);
}

}  // namespace detail

inline void write_lft(const std::string& path, const LiftedField& field) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InputError("cannot open for writing: " + path);
  os.write("LFT1", 4);
  detail::put_u32_le(os, static_cast<std::uint32_t>(field.spec.width));
  detail::put_u32_le(os, static_cast<std::uint32_t>(field.spec.height));
  detail::put_u32_le(os, static_cast<std::uint32_t>(field.spec.n_theta));
  std::vector<unsigned char> buf(field.values.size() * 4);
  for (std::size_t i = 0; i < field.values.size(); ++i) {
    float f;
    if (field.values[i] >= kUnreached)
      f = std::numeric_limits<float>::max();
    else
      f = static_cast<float>(field.values[i]);
    std::uint32_t u;
    std::memcpy(&u, &f, 4);
    buf[4 * i + 0] = static_cast<unsigned char>(u & 0xff);
    buf[4 * i + 1] = static_cast<unsigned char>((u >> 8) & 0xff);
    buf[4 * i + 2] = static_cast<unsigned char>((u >> 16) & 0xff);
    buf[4 * i + 3] = static_cast<unsigned char>((u >> 24) & 0xff);
  }
  os.write(reinterpret_cast<const char*>(buf.data()),
           static_cast<std::streamsize>(buf.size()));
  if (!os) throw InputError("short write: " + path);
}

inline LiftedField read_lft(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InputError("cannot open: " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "LFT1", 4) != 0)
    throw InputError("not an LFT1 container: " + path);
  const std::uint32_t w = detail::get_u32_le(is);
  const std::uint32_t h = detail::get_u32_le(is);
  const std::uint32_t nt = detail::get_u32_le(is);
  if (!is) throw InputError("truncated LFT1 header: " + path);
  LiftedField field(GridSpec(static_cast<int>(w), static_cast<int>(h),
                             static_cast<int>(nt)));
  std::vector<unsigned char> buf(field.values.size() * 4);
  is.read(reinterpret_cast<char*>(buf.data()),
          static_cast<std::streamsize>(buf.size()));
  if (!is) throw InputError("truncated LFT1 payload: " + path);
  for (std::size_t i = 0; i < field.values.size(); ++i) {
    std::uint32_t u = static_cast<std::uint32_t>(buf[4 * i + 0]) |
                      (static_cast<std::uint32_t>(buf[4 * i + 1]) << 8) |
                      (static_cast<std::uint32_t>(buf[4 * i + 2]) << 16) |
                      (static_cast<std::uint32_t>(buf[4 * i + 3]) << 24);
    float f;
    std::memcpy(&f, &u, 4);
    field.values[i] =
        (f >= std::numeric_limits<float>::max()) ? kUnreached : f;
  }
  return field;
}

}  // namespace vesseltree

#endif  // VESSELTREE_CORE_HPP_
