#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "tetsum/fourball.hpp"
#include "tetsum/geom_core.hpp"
#include "tetsum/tet_metrics.hpp"

namespace tetsum {

namespace bounds {

inline constexpr double kPi = std::numbers::pi;
inline const double kTwoPi = 2.0 * kPi;
inline const double kPathUpper = 2.5 * kPi;
inline const double kThreePi = 3.0 * kPi;
/// Dihedral angle sum of the regular tetrahedron, 6 arccos(1/3).
inline const double kRegularSigma = 6.0 * std::acos(1.0 / 3.0);
/// 1.5 pi + 3 arccos(sqrt(3)/3), the symmetric cube corner.
inline const double kCubeCornerLower = 1.5 * kPi + 3.0 * std::acos(std::sqrt(3.0) / 3.0);
/// 2 arccos(-1/3).
inline const double kKmax = 2.0 * std::acos(-1.0 / 3.0);

inline double degrees(double rad) { return rad * 180.0 / kPi; }
inline double radians(double deg) { return deg * kPi / 180.0; }

}  // namespace bounds

/// Sigma of the path tetrahedron O, (a,0,0), (a,1,0), (a,1,a).
inline double sigma_path_closed(double a) {
  if (!(a > 0)) throw Error(Errc::OutOfDomain, "path parameter must be positive");
  return 1.5 * std::numbers::pi + 2.0 * std::atan(a) + std::acos(a * a / (a * a + 1.0));
}

/// O = (0,0,0), A = (a,0,0), B = (a,b,0), C = (a,b,c); the path is OA, AB, BC.
inline Tetra path_tetra(double a, double b, double c, const Tolerance& tol = {}) {
  return Tetra({0, 0, 0}, {a, 0, 0}, {a, b, 0}, {a, b, c}, tol);
}

inline Tetra cube_corner_tetra(double a, double b, double c, const Tolerance& tol = {}) {
  return Tetra({0, 0, 0}, {a, 0, 0}, {0, b, 0}, {0, 0, c}, tol);
}

inline double sigma_cube_corner(double a, double b, double c, const Tolerance& tol = {}) {
  if (!(a > 0 && b > 0 && c > 0)) throw Error(Errc::OutOfDomain, "cube corner legs must be positive");
  return dihedral_angles(cube_corner_tetra(a, b, c, tol), tol).sigma;
}

/// Height at which the pyramid over an equilateral base of side `base` is regular.
inline double regular_pyramid_height(double base = 1.0) { return base * std::sqrt(2.0 / 3.0); }

/// Equilateral base of side `base` centered at the origin, apex above the centroid.
inline Tetra eq_pyramid(double h, double base = 1.0, const Tolerance& tol = {}) {
  const double r = base / std::sqrt(3.0);
  return Tetra({r, 0, 0}, {-0.5 * r, 0.5 * std::sqrt(3.0) * r, 0}, {-0.5 * r, -0.5 * std::sqrt(3.0) * r, 0},
               {0, 0, h}, tol);
}

/// Alternate corners of a p x q x r box; opposite edges are the face diagonals.
inline Tetra equifacial_box(double p, double q, double r, const Tolerance& tol = {}) {
  return Tetra({0, 0, 0}, {p, q, 0}, {p, 0, r}, {0, q, r}, tol);
}

struct RandomFourBall {
  Tetra tetra;
  TangentLengths4 tangents;
  int attempts = 0;
};

/**
 * Seeded random 4-ball tetrahedron. Face tangent lengths are log-uniform on
 * [0.1, 10]; l4 is uniform on (l0, l0 + 10] where l0 is the Soddy radius.
 * Draws for which no apex exists are redrawn. (seed, index) fully determine
 * the result.
 */
inline RandomFourBall random_fourball(std::uint64_t seed, std::uint64_t index, const Tolerance& tol = {}) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> log_l(std::log(0.1), std::log(10.0));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int attempt = 1; attempt <= 1000; ++attempt) {
    const TangentLengths3 t3(std::exp(log_l(rng)), std::exp(log_l(rng)), std::exp(log_l(rng)));
    const double l4 = soddy_radius(t3) + 10.0 * (1.0 - unit(rng));
    const auto [a, b, c] = tangents_to_triangle(t3);
    const double x = (a * a + b * b - c * c) / (2.0 * a);
    const Point3 a1{0, 0, 0}, a2{a, 0, 0}, a3{x, std::sqrt(std::max(0.0, b * b - x * x)), 0};
    try {
      Tetra t = fourball_from_face(a1, a2, a3, l4, false, tol);
      return {t, TangentLengths4(t3.l1, t3.l2, t3.l3, l4), attempt};
    } catch (const Error& e) {
      if (e.code() != Errc::NotConstructible && e.code() != Errc::ApexDegenerate &&
          e.code() != Errc::DegenerateInput) {
        throw;
      }
    }
  }
  throw Error(Errc::NotConstructible, "random 4-ball sampler exhausted its attempts");
}

enum class FamilyKind { path_diag, cube_corner, eq_pyramid, equifacial_box, random_fourball };

struct Family {
  FamilyKind kind;
  std::string_view name;
  std::size_t arity;
  std::string_view domain;
};

inline constexpr std::array<Family, 5> kFamilies{{
    {FamilyKind::path_diag, "path_diag", 1, "a > 0: path O,(a,0,0),(a,1,0),(a,1,a)"},
    {FamilyKind::cube_corner, "cube_corner", 3, "a,b,c > 0: (0,0,0),(a,0,0),(0,b,0),(0,0,c)"},
    {FamilyKind::eq_pyramid, "eq_pyramid", 1, "h > 0: unit equilateral base, apex over the centroid"},
    {FamilyKind::equifacial_box, "equifacial_box", 3, "p,q,r > 0: alternate corners of a box"},
    {FamilyKind::random_fourball, "random_fourball", 2, "(seed, index): non-negative integers"},
}};

inline const Family& family_info(FamilyKind k) { return kFamilies[static_cast<std::size_t>(k)]; }

inline std::optional<FamilyKind> parse_family(std::string_view name) {
  for (const auto& f : kFamilies) {
    if (f.name == name) return f.kind;
  }
  return std::nullopt;
}

inline Tetra generate_family(FamilyKind kind, std::span<const double> params, const Tolerance& tol = {}) {
  const auto& info = family_info(kind);
  if (params.size() != info.arity) {
    throw Error(Errc::OutOfDomain, std::string(info.name) + " expects " + std::to_string(info.arity) + " parameter(s)");
  }
  if (kind == FamilyKind::random_fourball) {
    for (double p : params) {
      if (!(p >= 0) || p != std::floor(p)) throw Error(Errc::OutOfDomain, "seed and index must be non-negative integers");
    }
    return random_fourball(static_cast<std::uint64_t>(params[0]), static_cast<std::uint64_t>(params[1]), tol).tetra;
  }
  for (double p : params) {
    if (!(p > 0) || !std::isfinite(p)) throw Error(Errc::OutOfDomain, std::string(info.name) + " parameters must be positive");
  }
  switch (kind) {
    case FamilyKind::path_diag: return path_tetra(params[0], 1.0, params[0], tol);
    case FamilyKind::cube_corner: return cube_corner_tetra(params[0], params[1], params[2], tol);
    case FamilyKind::eq_pyramid: return eq_pyramid(params[0], 1.0, tol);
    case FamilyKind::equifacial_box: return equifacial_box(params[0], params[1], params[2], tol);
    case FamilyKind::random_fourball: break;
  }
  throw Error(Errc::OutOfDomain, "unknown family");
}

/// Runs body(i) for i in [0, n) over `threads` workers.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, unsigned threads = 0) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n && !failed; i = next++) {
        try {
          body(i);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

struct SweepSample {
  std::vector<double> params;
  double sigma = 0.0;
  bool nonobtuse = false;
  bool path = false;
  bool equifacial = false;
  bool fourball = false;
};

struct Verdict {
  std::string claim;
  bool pass = false;
  std::string detail;
};

struct SweepResult {
  FamilyKind family = FamilyKind::path_diag;
  std::vector<SweepSample> samples;
  double min_sigma = 0.0;
  double max_sigma = 0.0;
  std::size_t argmin = 0;
  std::size_t argmax = 0;
  std::vector<Verdict> verdicts;

  bool all_pass() const {
    return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
  }
};

inline std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  if (!(lo > 0 && hi > lo) || n < 2) throw Error(Errc::OutOfDomain, "log grid needs 0 < lo < hi and n >= 2");
  std::vector<double> out(n);
  const double l0 = std::log(lo), l1 = std::log(hi);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = std::exp(l0 + (l1 - l0) * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  out.front() = lo;
  out.back() = hi;
  return out;
}

inline std::vector<std::vector<double>> tensor_grid3(const std::vector<double>& axis) {
  std::vector<std::vector<double>> out;
  out.reserve(axis.size() * axis.size() * axis.size());
  for (double x : axis) {
    for (double y : axis) {
      for (double z : axis) out.push_back({x, y, z});
    }
  }
  return out;
}

/// Default parameter sets used by the CLI and the certification suites.
inline std::vector<std::vector<double>> default_grid(FamilyKind kind, std::size_t n, std::uint64_t seed = 42) {
  std::vector<std::vector<double>> out;
  switch (kind) {
    case FamilyKind::path_diag:
      for (double a : log_grid(1e-3, 1e3, n)) out.push_back({a});
      break;
    case FamilyKind::cube_corner:
    case FamilyKind::equifacial_box:
      return tensor_grid3(log_grid(0.1, 10.0, n));
    case FamilyKind::eq_pyramid: {
      // Odd-sized symmetric log grid around h0 so that h0 itself is sampled.
      const double h0 = regular_pyramid_height();
      const std::size_t m = n % 2 == 0 ? n + 1 : n;
      for (double s : log_grid(1e-2, 1e2, m)) out.push_back({h0 * s});
      out[m / 2][0] = h0;
      break;
    }
    case FamilyKind::random_fourball:
      for (std::size_t i = 0; i < n; ++i) out.push_back({static_cast<double>(seed), static_cast<double>(i)});
      break;
  }
  return out;
}

namespace detail {

inline Verdict range_verdict(const SweepResult& r, std::string claim, double lo, bool lo_closed, double hi,
                             bool hi_closed, double slack) {
  bool ok = true;
  for (const auto& s : r.samples) {
    const bool above = lo_closed ? s.sigma >= lo - slack : s.sigma > lo;
    const bool below = hi_closed ? s.sigma <= hi + slack : s.sigma < hi;
    ok = ok && above && below;
  }
  std::string detail = "observed [" + std::to_string(r.min_sigma) + ", " + std::to_string(r.max_sigma) + "] rad";
  return {std::move(claim), ok, std::move(detail)};
}

inline bool all_equal(const std::vector<double>& v, double rel) {
  for (double x : v) {
    if (std::fabs(x - v.front()) > rel * std::fabs(v.front())) return false;
  }
  return true;
}

}  // namespace detail

/**
 * Evaluates sigma over a parameter grid and checks the family's two-sided
 * bound. Samples are computed independently (in parallel when threads != 1)
 * and returned sorted by parameter tuple. These verdicts are numerical
 * evidence on the sampled grid, not proofs.
 */
inline SweepResult sweep(FamilyKind kind, std::vector<std::vector<double>> grid, unsigned threads = 0,
                         const Tolerance& tol = {}) {
  if (grid.empty()) throw Error(Errc::OutOfDomain, "empty sweep grid");
  std::sort(grid.begin(), grid.end());
  SweepResult r;
  r.family = kind;
  r.samples.resize(grid.size());
  parallel_for(
      grid.size(),
      [&](std::size_t i) {
        const Tetra t = generate_family(kind, grid[i], tol);
        const auto rep = dihedral_angles(t, tol);
        r.samples[i] = {grid[i], rep.sigma, rep.nonobtuse, rep.path, rep.equifacial, rep.fourball};
      },
      threads);

  for (std::size_t i = 0; i < r.samples.size(); ++i) {
    if (r.samples[i].sigma < r.samples[r.argmin].sigma) r.argmin = i;
    if (r.samples[i].sigma > r.samples[r.argmax].sigma) r.argmax = i;
  }
  r.min_sigma = r.samples[r.argmin].sigma;
  r.max_sigma = r.samples[r.argmax].sigma;
  const double cert = 1e-9;
  using namespace bounds;

  switch (kind) {
    case FamilyKind::path_diag: {
      r.verdicts.push_back(detail::range_verdict(r, "2pi < sigma < 2.5pi", kTwoPi, false, kPathUpper, false, 0));
      double worst = 0.0;
      for (const auto& s : r.samples) worst = std::max(worst, std::fabs(s.sigma - sigma_path_closed(s.params[0])));
      r.verdicts.push_back({"closed form agrees with dihedral sum (1e-9 rad)", worst <= cert,
                            "max deviation " + std::to_string(worst)});
      const double gap_lo = r.min_sigma - kTwoPi, gap_hi = kPathUpper - r.max_sigma;
      r.verdicts.push_back({"bounds approached within 0.01 rad", gap_lo <= 0.01 && gap_hi <= 0.01,
                            "gaps " + std::to_string(gap_lo) + ", " + std::to_string(gap_hi)});
      const bool all_path = std::all_of(r.samples.begin(), r.samples.end(), [](const auto& s) { return s.path && s.nonobtuse; });
      r.verdicts.push_back({"every member is a nonobtuse path tetrahedron", all_path, ""});
      break;
    }
    case FamilyKind::cube_corner: {
      r.verdicts.push_back(detail::range_verdict(r, "1.5pi + 3 arccos(sqrt(3)/3) <= sigma < 2.5pi", kCubeCornerLower,
                                                 true, kPathUpper, false, cert));
      const auto& p = r.samples[r.argmin].params;
      r.verdicts.push_back({"minimum attained at a = b = c", detail::all_equal(p, tol.rel),
                            "argmin (" + std::to_string(p[0]) + ", " + std::to_string(p[1]) + ", " +
                                std::to_string(p[2]) + ")"});
      r.verdicts.push_back({"minimum equals 434.2 deg within 0.1 deg", std::fabs(degrees(r.min_sigma) - 434.2) <= 0.1,
                            "min " + std::to_string(degrees(r.min_sigma)) + " deg"});
      break;
    }
    case FamilyKind::eq_pyramid: {
      r.verdicts.push_back(detail::range_verdict(r, "6 arccos(1/3) <= sigma < 3pi", kRegularSigma, true, kThreePi, false, cert));
      bool unimodal = true;
      for (std::size_t i = 1; i < r.samples.size(); ++i) {
        const double diff = r.samples[i].sigma - r.samples[i - 1].sigma;
        unimodal = unimodal && (i <= r.argmin ? diff < 0.0 : diff > 0.0);
      }
      r.verdicts.push_back({"decreasing on (0, h0], increasing on [h0, inf)", unimodal, ""});
      const double h0 = regular_pyramid_height();
      const double h_min = r.samples[r.argmin].params[0];
      // Neighboring grid points bound the resolution.
      const double lo_h = r.argmin > 0 ? r.samples[r.argmin - 1].params[0] : h_min;
      const double hi_h = r.argmin + 1 < r.samples.size() ? r.samples[r.argmin + 1].params[0] : h_min;
      r.verdicts.push_back({"minimum at h0 within grid resolution", lo_h <= h0 && h0 <= hi_h,
                            "argmin h = " + std::to_string(h_min) + ", h0 = " + std::to_string(h0)});
      r.verdicts.push_back({"minimum equals 6 arccos(1/3) (1e-9)", std::fabs(r.min_sigma - kRegularSigma) <= cert,
                            "min " + std::to_string(r.min_sigma)});
      break;
    }
    case FamilyKind::equifacial_box: {
      r.verdicts.push_back(detail::range_verdict(r, "2pi < sigma <= 6 arccos(1/3)", kTwoPi, false, kRegularSigma, true, cert));
      bool only_regular = true;
      for (const auto& s : r.samples) {
        const bool at_bound = std::fabs(s.sigma - kRegularSigma) <= cert;
        only_regular = only_regular && (at_bound == detail::all_equal(s.params, tol.rel));
      }
      r.verdicts.push_back({"equality only at the regular tetrahedron", only_regular, ""});
      break;
    }
    case FamilyKind::random_fourball: {
      r.verdicts.push_back(detail::range_verdict(r, "6 arccos(1/3) <= sigma < 3pi", kRegularSigma, true, kThreePi, false, cert));
      const bool all_fb = std::all_of(r.samples.begin(), r.samples.end(), [](const auto& s) { return s.fourball; });
      r.verdicts.push_back({"every sample is 4-ball", all_fb, ""});
      break;
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Spherical geometry of outward face normals.

/// Side opposite the angle alpha enclosed by sides b and c (spherical law of cosines).
inline double spherical_cos_side(double b, double c, double alpha) {
  return std::acos(clamp_unit(std::cos(b) * std::cos(c) + std::sin(b) * std::sin(c) * std::cos(alpha)));
}

/// Angle opposite side a in the spherical triangle with sides a, b, c.
inline double spherical_angle(double a, double b, double c) {
  return std::acos(clamp_unit((std::cos(a) - std::cos(b) * std::cos(c)) / (std::sin(b) * std::sin(c))));
}

/// Geodesic side lengths of a spherical triangle of unit normals.
struct SphericalTriple {
  double a = 0, b = 0, c = 0;

  /// Proper spherical triangle: sides in (0, pi), sum below 2pi, strict triangle inequalities.
  bool admissible(double slack = 0.0) const {
    const double pi = std::numbers::pi;
    for (double s : {a, b, c}) {
      if (!(s > slack && s < pi - slack)) return false;
    }
    return a + b + c < 2 * pi - slack && a < b + c - slack && b < a + c - slack && c < a + b - slack;
  }
};

/**
 * Isosceles case b = c: with C = cos a, S = sin a, B = cos b, D = sin b,
 * A = cos(alpha / 2) and alpha the apex angle,
 *   (B - BC - ADS) cos k = (BS - D - ACD) sin k.
 * The two-argument arctangent gives k modulo pi; the branch kept is the one
 * with k - a and k - b in (0, pi].
 */
inline double k_isosceles(double a, double b) {
  const double pi = std::numbers::pi;
  if (!(a > 0 && a < pi && b > 0 && b < pi)) throw Error(Errc::OutOfDomain, "sides must lie in (0, pi)");
  const double C = std::cos(a), S = std::sin(a), B = std::cos(b), D = std::sin(b);
  const double ratio = (C - B * B) / (D * D);
  if (std::fabs(ratio) > 1.0) throw Error(Errc::OutOfDomain, "no isosceles spherical triangle with these sides");
  const double A = std::cos(0.5 * std::acos(ratio));
  const double num = B - B * C - A * D * S;
  const double den = B * S - D - A * C * D;
  double base = std::atan2(num, den);
  if (base < 0) base += 2 * pi;
  for (double k : {base - pi, base, base + pi}) {
    if (k - a > 0 && k - a <= pi && k - b > 0 && k - b <= pi) return k;
  }
  throw Error(Errc::NoSolution, "no admissible branch for k");
}

/// Unit normals n1, n2, n3 with dist(n2,n3) = a, dist(n1,n3) = b, dist(n1,n2) = c.
inline std::array<Vec3, 3> place_normals(const SphericalTriple& s) {
  const Vec3 n1{0, 0, 1};
  const Vec3 n2{std::sin(s.c), 0, std::cos(s.c)};
  const double z = std::cos(s.b);
  const double x = (std::cos(s.a) - std::cos(s.c) * z) / std::sin(s.c);
  const double y = std::sqrt(std::max(0.0, std::sin(s.b) * std::sin(s.b) - x * x));
  return {n1, n2, Vec3{x, y, z}};
}

struct KSolution {
  double k = 0.0;
  /// n1..n3 as placed, n4 the solved fourth normal.
  std::array<Vec3, 4> normals{};
  double residual = 0.0;
  int seed = -1;
};

/**
 * Fourth unit normal n4 and constant k with dist(n4, n1) = k - a,
 * dist(n4, n2) = k - b, dist(n4, n3) = k - c. Damped Newton from 8 seeds on
 * a tangent-plane chart of the sphere. Only roots whose four normals
 * positively span space (the normals of an actual tetrahedron) are kept.
 */
inline std::optional<KSolution> solve_k_general(const SphericalTriple& s, const Tolerance& tol = {}) {
  if (!s.admissible()) return std::nullopt;
  const auto n = place_normals(s);
  const std::array<double, 3> side{s.a, s.b, s.c};
  const double pi = std::numbers::pi;

  std::vector<Vec3> seeds;
  seeds.push_back(normalize(-(n[0] + n[1] + n[2])));
  for (const Vec3& d : {Vec3{1, 0, 0}, Vec3{-1, 0, 0}, Vec3{0, 1, 0}, Vec3{0, -1, 0}, Vec3{0, 0, 1},
                        Vec3{0, 0, -1}, Vec3{1, 1, 1}}) {
    seeds.push_back(normalize(d));
  }

  for (std::size_t si = 0; si < seeds.size(); ++si) {
    const Vec3 sd = seeds[si];
    const Vec3 helper = std::fabs(sd.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
    const Vec3 e1 = normalize(cross(sd, helper));
    const Vec3 e2 = cross(sd, e1);

    auto chart = [&](double u, double v) { return normalize(sd + e1 * u + e2 * v); };
    auto resid = [&](double u, double v, double k) {
      const Vec3 p = chart(u, v);
      std::array<double, 3> f{};
      for (std::size_t i = 0; i < 3; ++i) f[i] = angle_between(p, n[i]) - (k - side[i]);
      return f;
    };
    auto max_abs = [](const std::array<double, 3>& f) {
      return std::max({std::fabs(f[0]), std::fabs(f[1]), std::fabs(f[2])});
    };

    double u = 0, v = 0, k = 0;
    for (std::size_t i = 0; i < 3; ++i) k += (angle_between(sd, n[i]) + side[i]) / 3.0;
    auto f = resid(u, v, k);
    for (int iter = 0; iter < 100 && max_abs(f) > 1e-14; ++iter) {
      const Vec3 w = sd + e1 * u + e2 * v;
      const double wn = norm(w);
      const Vec3 p = w / wn;
      const Vec3 dpu = (e1 - p * dot(p, e1)) / wn;
      const Vec3 dpv = (e2 - p * dot(p, e2)) / wn;
      std::array<double, 3> ju{}, jv{};
      bool singular = false;
      for (std::size_t i = 0; i < 3; ++i) {
        const double dist = angle_between(p, n[i]);
        const double sn = std::sin(dist);
        if (sn < 1e-12) {
          singular = true;
          break;
        }
        ju[i] = -dot(n[i], dpu) / sn;
        jv[i] = -dot(n[i], dpv) / sn;
      }
      if (singular) break;
      const auto step = solve3(Vec3{ju[0], ju[1], ju[2]}, Vec3{jv[0], jv[1], jv[2]}, Vec3{-1, -1, -1},
                               Vec3{-f[0], -f[1], -f[2]}, 1e-300);
      if (!step) break;
      double alpha = 1.0;
      const double f0 = max_abs(f);
      std::array<double, 3> ft{};
      for (;;) {
        ft = resid(u + alpha * step->x, v + alpha * step->y, k + alpha * step->z);
        if (max_abs(ft) < (1.0 - 1e-4 * alpha) * f0 || alpha < 1e-10) break;
        alpha *= 0.5;
      }
      if (alpha < 1e-10) break;
      u += alpha * step->x;
      v += alpha * step->y;
      k += alpha * step->z;
      f = ft;
      if (std::fabs(u) > 1e6 || std::fabs(v) > 1e6) break;
    }
    if (max_abs(f) > 1e-10) continue;

    const Vec3 n4 = chart(u, v);
    bool valid = true;
    for (std::size_t i = 0; i < 3; ++i) {
      const double d = k - side[i];
      valid = valid && d > 0 && d < pi;
    }
    // -n4 must lie strictly inside the cone spanned by n1, n2, n3.
    const auto lam = solve3(n[0], n[1], n[2], -n4, 1e-14);
    valid = valid && lam && lam->x > tol.rel && lam->y > tol.rel && lam->z > tol.rel;
    if (!valid) continue;
    return KSolution{k, {n[0], n[1], n[2], n4}, max_abs(f), static_cast<int>(si)};
  }
  return std::nullopt;
}

/// Sum of the six geodesic distances between outward unit face normals.
inline double gamma_of(const Tetra& t, const Tolerance& tol = {}) {
  if (volume(t) <= tol.abs) throw Error(Errc::DegenerateInput, "flat tetrahedron");
  const auto n = outward_normals(t, tol);
  double g = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = i + 1; j < 4; ++j) g += angle_between(n[i], n[j]);
  }
  return g;
}

/// Geodesic triangle of the three face normals meeting at vertex v, ordered as in place_normals.
inline SphericalTriple normal_triangle(const Tetra& t, int v, const Tolerance& tol = {}) {
  const auto f = face_vertices(v);  // faces opposite f[0], f[1], f[2] all contain v
  const auto n = outward_normals(t, tol);
  const auto& n1 = n[static_cast<std::size_t>(f[0])];
  const auto& n2 = n[static_cast<std::size_t>(f[1])];
  const auto& n3 = n[static_cast<std::size_t>(f[2])];
  return {angle_between(n2, n3), angle_between(n1, n3), angle_between(n1, n2)};
}

struct KmaxCertificate {
  std::array<double, 3> argmax{};
  double k_max = -std::numeric_limits<double>::infinity();
  std::array<double, 3> grid_argmax{};
  double grid_k_max = -std::numeric_limits<double>::infinity();
  std::size_t admissible = 0;
  std::size_t solved = 0;
  /// Maximum of k_isosceles over (a, b).
  std::array<double, 2> iso_argmax{};
  double iso_k_max = -std::numeric_limits<double>::infinity();
  /// Largest |k_isosceles - solve_k_general| over the isosceles points checked.
  double iso_agreement = 0.0;
  std::size_t iso_checked = 0;

  double implied_sigma_lower() const { return 6.0 * std::numbers::pi - 3.0 * k_max; }
};

namespace detail {

/// Compass search maximizing f from x0; shrinks the step by half down to min_step.
template <std::size_t N, class F>
std::pair<std::array<double, N>, double> compass_maximize(F f, std::array<double, N> x, double step, double min_step) {
  double best = f(x);
  while (step > min_step) {
    bool improved = false;
    for (std::size_t i = 0; i < N; ++i) {
      for (double sign : {1.0, -1.0}) {
        auto y = x;
        y[i] += sign * step;
        const double val = f(y);
        if (val > best) {
          best = val;
          x = y;
          improved = true;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return {x, best};
}

}  // namespace detail

/**
 * Grid maximization of k(a, b, c) over cell centers of (0, 2pi)^3 followed
 * by compass-search refinement; the isosceles closed form is maximized over
 * (a, b) the same way and cross-checked against the general solver.
 */
inline KmaxCertificate certify_kmax(int resolution, unsigned threads = 0, const Tolerance& tol = {}) {
  if (resolution < 20) throw Error(Errc::OutOfDomain, "resolution must be at least 20");
  const double h = 2.0 * std::numbers::pi / resolution;
  const auto r = static_cast<std::size_t>(resolution);
  KmaxCertificate cert;

  std::vector<double> k(r * r * r, -std::numeric_limits<double>::infinity());
  std::vector<char> adm(k.size(), 0);
  parallel_for(
      k.size(),
      [&](std::size_t idx) {
        const SphericalTriple s{(static_cast<double>(idx / (r * r)) + 0.5) * h,
                                (static_cast<double>((idx / r) % r) + 0.5) * h,
                                (static_cast<double>(idx % r) + 0.5) * h};
        if (!s.admissible()) return;
        adm[idx] = 1;
        if (const auto sol = solve_k_general(s, tol)) k[idx] = sol->k;
      },
      threads);
  for (std::size_t idx = 0; idx < k.size(); ++idx) {
    cert.admissible += static_cast<std::size_t>(adm[idx]);
    if (std::isfinite(k[idx])) ++cert.solved;
    if (k[idx] > cert.grid_k_max) {
      cert.grid_k_max = k[idx];
      cert.grid_argmax = {(static_cast<double>(idx / (r * r)) + 0.5) * h, (static_cast<double>((idx / r) % r) + 0.5) * h,
                          (static_cast<double>(idx % r) + 0.5) * h};
    }
  }
  auto objective = [&](const std::array<double, 3>& x) {
    const auto sol = solve_k_general({x[0], x[1], x[2]}, tol);
    return sol ? sol->k : -std::numeric_limits<double>::infinity();
  };
  std::tie(cert.argmax, cert.k_max) = detail::compass_maximize<3>(objective, cert.grid_argmax, h, 1e-10);

  // Isosceles slice.
  std::array<double, 2> iso_start{};
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < r; ++j) {
      const double a = (static_cast<double>(i) + 0.5) * h, b = (static_cast<double>(j) + 0.5) * h;
      const SphericalTriple s{a, b, b};
      if (!s.admissible()) continue;
      double kiso = 0.0;
      try {
        kiso = k_isosceles(a, b);
      } catch (const Error&) {
        continue;
      }
      if (kiso > cert.iso_k_max) {
        cert.iso_k_max = kiso;
        iso_start = {a, b};
      }
      if (const auto sol = solve_k_general(s, tol)) {
        cert.iso_agreement = std::max(cert.iso_agreement, std::fabs(sol->k - kiso));
        ++cert.iso_checked;
      }
    }
  }
  auto iso_objective = [](const std::array<double, 2>& x) {
    try {
      if (!SphericalTriple{x[0], x[1], x[1]}.admissible()) return -std::numeric_limits<double>::infinity();
      return k_isosceles(x[0], x[1]);
    } catch (const Error&) {
      return -std::numeric_limits<double>::infinity();
    }
  };
  std::tie(cert.iso_argmax, cert.iso_k_max) = detail::compass_maximize<2>(iso_objective, iso_start, h, 1e-10);
  return cert;
}

}  // namespace tetsum
