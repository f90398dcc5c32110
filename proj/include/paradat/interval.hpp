#pragma once

#include <stdexcept>
#include <vector>

namespace paradat {

/// Uniform partition of [a, b] into n equal cells.
struct Interval1D {
  double a = 0.0;
  double b = 1.0;
  int n = 1;

  Interval1D() = default;
  Interval1D(double a_, double b_, int n_) : a(a_), b(b_), n(n_) {
    if (!(a < b)) throw std::invalid_argument("Interval1D: requires a < b");
    if (n < 1) throw std::invalid_argument("Interval1D: requires n >= 1");
  }

  double length() const { return b - a; }
  double h() const { return (b - a) / n; }
  double node(int i) const { return a + i * h(); }

  /// Mesh obtained by bisecting every cell `levels` times.
  Interval1D bisected(int levels) const {
    if (levels < 0) throw std::invalid_argument("Interval1D: negative level");
    return Interval1D(a, b, n << levels);
  }

  /// Cell containing x, clamped to [0, n-1] so that endpoints are valid.
  int cell_of(double x) const {
    int c = static_cast<int>((x - a) / h());
    if (c < 0) c = 0;
    if (c >= n) c = n - 1;
    return c;
  }

  bool operator==(const Interval1D&) const = default;
};

/// One integration segment [lo, hi] inside a mesh cell.
struct Segment {
  int cell;
  double lo;
  double hi;
};

/// Decompose the mesh cells so that no segment straddles any cut point.
/// Segments of zero length are dropped; their union equals the mesh.
std::vector<Segment> split_at(const Interval1D& mesh, const std::vector<double>& cuts);

/// Segments covering the intersection of the mesh with [lo, hi].
std::vector<Segment> restrict_to(const Interval1D& mesh, double lo, double hi);

/// Observation sub-interval omega = [omega_lo, omega_hi] of Omega = [0, 1],
/// plus the reporting threshold eta for time-slice errors near t = 0.
struct ObservationWindow {
  double omega_lo = 0.25;
  double omega_hi = 0.75;
  double eta = 0.1;

  ObservationWindow() = default;
  ObservationWindow(double lo, double hi, double eta_ = 0.1)
      : omega_lo(lo), omega_hi(hi), eta(eta_) {
    if (!(0.0 <= omega_lo && omega_lo < omega_hi && omega_hi <= 1.0))
      throw std::invalid_argument("ObservationWindow: requires 0 <= lo < hi <= 1");
    if (!(eta > 0.0 && eta < 1.0))
      throw std::invalid_argument("ObservationWindow: requires 0 < eta < T");
  }

  double measure() const { return omega_hi - omega_lo; }
};

}  // namespace paradat
