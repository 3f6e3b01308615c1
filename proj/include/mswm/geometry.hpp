#pragma once

#include <cmath>
#include <array>

namespace mswm {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
};

inline double dot(const Vec3& a, const Vec3& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}

inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

inline Vec3 normalized(const Vec3& a) {
  double n = norm(a);
  return {a.x / n, a.y / n, a.z / n};
}

// Angle between two unit vectors, robust near 0 and pi.
inline double arc_angle(const Vec3& a, const Vec3& b) {
  return std::atan2(norm(cross(a, b)), dot(a, b));
}

// Signed area of the spherical triangle (a,b,c) on the unit sphere,
// positive when (a,b,c) winds counterclockwise seen from outside.
inline double spherical_triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
  double num = dot(a, cross(b, c));
  double den = 1.0 + dot(a, b) + dot(b, c) + dot(a, c);
  return 2.0 * std::atan2(num, den);
}

// Unit tangent at p along the great circle through p and q.
inline Vec3 tangent_toward(const Vec3& p, const Vec3& q) {
  Vec3 t = q - p * dot(p, q);
  return normalized(t);
}

// Intersection of the great circles through (a1,a2) and (b1,b2), choosing
// the branch on the same side of the sphere as the four input points.
inline Vec3 arc_intersection(const Vec3& a1, const Vec3& a2,
                             const Vec3& b1, const Vec3& b2) {
  Vec3 p = normalized(cross(cross(a1, a2), cross(b1, b2)));
  if (dot(p, a1 + a2 + b1 + b2) < 0.0) p = p * -1.0;
  return p;
}

inline double longitude_of(const Vec3& p) {
  double lon = std::atan2(p.y, p.x);
  if (lon < 0.0) lon += 2.0 * M_PI;
  return lon;
}

inline double latitude_of(const Vec3& p) { return std::asin(p.z); }

inline Vec3 from_lonlat(double lon, double lat) {
  return {std::cos(lat) * std::cos(lon), std::cos(lat) * std::sin(lon), std::sin(lat)};
}

// Shortest angular difference a-b wrapped into (-pi, pi].
inline double wrap_angle(double a) {
  while (a > M_PI) a -= 2.0 * M_PI;
  while (a <= -M_PI) a += 2.0 * M_PI;
  return a;
}

}  // namespace mswm
