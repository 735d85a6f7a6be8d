#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

#include "marginlab/classes.hpp"

// Dichotomies cut out by closed half-spaces.
//
// Every nontrivial realizable dichotomy can be moved to a hyperplane through d
// affinely independent points; points off that hyperplane keep their side and
// the points on it are split by a small rotation, i.e. by a half-space of the
// hyperplane itself. Recursing on the on-plane points enumerates everything.

namespace marginlab {
namespace {

using Vec = std::vector<double>;
using Mask = std::uint32_t;

double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    s += a[i] * b[i];
  }
  return s;
}

Vec sub(const Vec& a, const Vec& b) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    r[i] = a[i] - b[i];
  }
  return r;
}

// Orthonormalizes v against basis; appends and returns true when the residual
// is not negligible.
bool extend_basis(std::vector<Vec>& basis, Vec v, double tol) {
  for (const auto& b : basis) {
    const double c = dot(v, b);
    for (std::size_t i = 0; i < v.size(); ++i) {
      v[i] -= c * b[i];
    }
  }
  const double norm = std::sqrt(dot(v, v));
  if (norm <= tol) {
    return false;
  }
  for (double& x : v) {
    x /= norm;
  }
  basis.push_back(std::move(v));
  return true;
}

std::vector<Vec> project(const std::vector<Vec>& pts, const Vec& origin, const std::vector<Vec>& basis) {
  std::vector<Vec> out;
  out.reserve(pts.size());
  for (const auto& p : pts) {
    const Vec d = sub(p, origin);
    Vec c(basis.size());
    for (std::size_t k = 0; k < basis.size(); ++k) {
      c[k] = dot(d, basis[k]);
    }
    out.push_back(std::move(c));
  }
  return out;
}

double scale_of(const std::vector<Vec>& pts) {
  double s = 1.0;
  for (const auto& p : pts) {
    for (double x : p) {
      s = std::max(s, std::abs(x));
    }
  }
  return s;
}

std::set<Mask> dichotomies(const std::vector<Vec>& pts) {
  const std::size_t n = pts.size();
  const Mask all = n == 32 ? ~Mask{0} : (Mask{1} << n) - 1;
  std::set<Mask> out{0, all};
  if (n <= 1) {
    return out;
  }
  const std::size_t d = pts[0].size();
  const double tol = 1e-9 * scale_of(pts);

  // Reduce to the affine hull first.
  std::vector<Vec> hull;
  for (std::size_t i = 1; i < n && hull.size() < d; ++i) {
    extend_basis(hull, sub(pts[i], pts[0]), tol);
  }
  if (hull.size() < d) {
    if (hull.empty()) {
      return out;
    }
    return dichotomies(project(pts, pts[0], hull));
  }

  if (d == 1) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pts[a][0] < pts[b][0]; });
    Mask prefix = 0;
    for (std::size_t k = 0; k < n; ++k) {
      prefix |= Mask{1} << order[k];
      out.insert(prefix);
      out.insert(all & ~prefix);
    }
    return out;
  }

  // Hyperplanes through d affinely independent points.
  std::vector<std::size_t> idx(d);
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    std::vector<Vec> span;
    bool independent = true;
    for (std::size_t k = 1; k < d && independent; ++k) {
      independent = extend_basis(span, sub(pts[idx[k]], pts[idx[0]]), tol);
    }
    if (independent) {
      // Normal: residual of the best standard basis vector.
      Vec normal;
      double best = -1.0;
      for (std::size_t e = 0; e < d; ++e) {
        Vec v(d, 0.0);
        v[e] = 1.0;
        for (const auto& b : span) {
          const double c = dot(v, b);
          for (std::size_t i = 0; i < d; ++i) {
            v[i] -= c * b[i];
          }
        }
        const double norm = std::sqrt(dot(v, v));
        if (norm > best) {
          best = norm;
          normal = v;
        }
      }
      for (double& x : normal) {
        x /= best;
      }
      const double offset = dot(normal, pts[idx[0]]);

      std::vector<std::size_t> on_plane;
      std::vector<Vec> on_pts;
      Mask above = 0;
      Mask below = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const double s = dot(normal, pts[i]) - offset;
        if (std::abs(s) <= tol) {
          on_plane.push_back(i);
          on_pts.push_back(pts[i]);
        } else if (s > 0) {
          above |= Mask{1} << i;
        } else {
          below |= Mask{1} << i;
        }
      }
      // Coordinates inside the hyperplane.
      std::vector<Vec> plane_basis;
      for (std::size_t e = 0; e < d && plane_basis.size() + 1 < d; ++e) {
        Vec v(d, 0.0);
        v[e] = 1.0;
        const double c = dot(v, normal);
        for (std::size_t i = 0; i < d; ++i) {
          v[i] -= c * normal[i];
        }
        extend_basis(plane_basis, v, 1e-6);
      }
      const auto sub_masks = dichotomies(project(on_pts, pts[idx[0]], plane_basis));
      for (Mask sm : sub_masks) {
        Mask lifted = 0;
        for (std::size_t k = 0; k < on_plane.size(); ++k) {
          if (sm & (Mask{1} << k)) {
            lifted |= Mask{1} << on_plane[k];
          }
        }
        out.insert(above | lifted);
        out.insert(below | lifted);
      }
    }

    // Next combination.
    std::size_t k = d;
    while (k > 0 && idx[k - 1] == n - d + k - 1) {
      --k;
    }
    if (k == 0) {
      break;
    }
    ++idx[k - 1];
    for (std::size_t j = k; j < d; ++j) {
      idx[j] = idx[j - 1] + 1;
    }
  }
  return out;
}

}  // namespace

std::vector<std::uint32_t> halfspace_dichotomies(const std::vector<Point>& points) {
  if (points.empty()) {
    throw std::invalid_argument("half-space trace needs at least one point");
  }
  if (points.size() > 32) {
    throw std::invalid_argument("too many points for half-space enumeration");
  }
  const std::size_t d = points[0].size();
  if (d == 0 || d > 3) {
    throw std::invalid_argument("half-space traces support dimensions 1 to 3");
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].size() != d) {
      throw std::invalid_argument("points must share one dimension");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (points[i] == points[j]) {
        throw std::invalid_argument("duplicate point in half-space trace");
      }
    }
  }
  const auto set = dichotomies(points);
  return {set.begin(), set.end()};
}

}  // namespace marginlab
