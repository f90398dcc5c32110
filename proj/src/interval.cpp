#include "paradat/interval.hpp"

#include <algorithm>
#include <cmath>

namespace paradat {

std::vector<Segment> split_at(const Interval1D& mesh, const std::vector<double>& cuts) {
  std::vector<double> sorted = cuts;
  std::sort(sorted.begin(), sorted.end());
  const double tol = 1e-14 * mesh.length();

  std::vector<Segment> out;
  out.reserve(mesh.n + sorted.size());
  for (int c = 0; c < mesh.n; ++c) {
    double lo = mesh.node(c);
    const double hi = mesh.node(c + 1);
    for (double cut : sorted) {
      if (cut > lo + tol && cut < hi - tol) {
        out.push_back({c, lo, cut});
        lo = cut;
      }
    }
    out.push_back({c, lo, hi});
  }
  return out;
}

std::vector<Segment> restrict_to(const Interval1D& mesh, double lo, double hi) {
  std::vector<Segment> out;
  const double tol = 1e-14 * mesh.length();
  for (const Segment& s : split_at(mesh, {lo, hi})) {
    if (s.lo >= lo - tol && s.hi <= hi + tol) out.push_back(s);
  }
  return out;
}

}  // namespace paradat
