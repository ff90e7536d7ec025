#include "evade/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace evade {

void ModelParams::validate() const {
  if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be >= 0");
  if (!(speed > 0.0)) throw std::invalid_argument("speed must be > 0");
  if (dim < 2 || dim > kMaxDim)
    throw std::invalid_argument("dim must be in [2, " + std::to_string(kMaxDim) + "]");
}

double ModelParams::delta() const { return speed / (4.0 * std::sqrt(static_cast<double>(dim))); }

Site Site::of(int dim, std::int32_t x, std::int32_t y) {
  Site s;
  s.dim = dim;
  s.c[0] = x;
  s.c[1] = y;
  return s;
}

std::int64_t Site::l1() const {
  std::int64_t n = 0;
  for (int i = 0; i < dim; ++i) n += std::abs(static_cast<std::int64_t>(c[i]));
  return n;
}

double Site::l2() const {
  double s = 0;
  for (int i = 0; i < dim; ++i) s += static_cast<double>(c[i]) * c[i];
  return std::sqrt(s);
}

bool Site::in_hyperplane() const {
  for (int i = 2; i < dim; ++i)
    if (c[i] != 0) return false;
  return true;
}

bool Site::operator==(const Site& o) const {
  if (dim != o.dim) return false;
  for (int i = 0; i < dim; ++i)
    if (c[i] != o.c[i]) return false;
  return true;
}

bool Site::operator<(const Site& o) const {
  for (int i = 0; i < dim; ++i) {
    if (c[i] != o.c[i]) return c[i] < o.c[i];
  }
  return false;
}

std::string Site::str() const {
  std::ostringstream os;
  os << '(';
  for (int i = 0; i < dim; ++i) os << (i ? "," : "") << c[i];
  os << ')';
  return os.str();
}

double dist_l2(const Site& a, const Site& b) {
  double s = 0;
  for (int i = 0; i < a.dim; ++i) {
    const double d = static_cast<double>(a.c[i]) - b.c[i];
    s += d * d;
  }
  return std::sqrt(s);
}

std::int64_t dist_l1(const Site& a, const Site& b) {
  std::int64_t s = 0;
  for (int i = 0; i < a.dim; ++i) s += std::abs(static_cast<std::int64_t>(a.c[i]) - b.c[i]);
  return s;
}

std::int64_t dist_linf(const Site& a, const Site& b) {
  std::int64_t s = 0;
  for (int i = 0; i < a.dim; ++i)
    s = std::max(s, std::abs(static_cast<std::int64_t>(a.c[i]) - b.c[i]));
  return s;
}

Cone Cone::at(const Site& site, double t, double delta) {
  Cone cone;
  cone.dim = site.dim;
  for (int i = 0; i < site.dim; ++i) cone.apex[i] = static_cast<double>(site.c[i]);
  cone.apex_time = t;
  cone.delta = delta;
  return cone;
}

Cell cell_of(const Site& site, const ModelParams& params) {
  if (site.dim != params.dim) throw std::invalid_argument("cell_of: site dimension mismatch");
  if (!site.in_hyperplane())
    throw std::domain_error("cell_of: site outside H_d (trailing coordinates nonzero)");
  Cell cell;
  cell.site = site;
  const double k = static_cast<double>(site.l1());
  // Endpoints computed as single divisions k/S so shared instants compare equal.
  cell.t_start = k / params.speed;
  cell.t_end = (k + 1.0) / params.speed;
  cell.radius = params.cell_radius();
  return cell;
}

std::vector<Site> level_sites(long k, int dim, std::optional<long> radius_cap) {
  if (k < 0) throw std::invalid_argument("level_sites: k must be >= 0");
  std::vector<Site> out;
  if (k == 0) {
    out.push_back(Site::of(dim, 0, 0));
    return out;
  }
  const long cap = radius_cap.value_or(k);
  for (long x = -k; x <= k; ++x) {
    if (std::abs(x) > cap) continue;
    const long r = k - std::abs(x);
    if (r > cap) continue;
    if (r == 0) {
      out.push_back(Site::of(dim, static_cast<std::int32_t>(x), 0));
    } else {
      out.push_back(Site::of(dim, static_cast<std::int32_t>(x), static_cast<std::int32_t>(-r)));
      out.push_back(Site::of(dim, static_cast<std::int32_t>(x), static_cast<std::int32_t>(r)));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Site> oriented_successors(const Site& site) {
  if (!site.in_hyperplane())
    throw std::domain_error("oriented_successors: site outside H_d");
  const std::int64_t n = site.l1();
  std::vector<Site> out;
  const std::int32_t dx[4] = {1, -1, 0, 0};
  const std::int32_t dy[4] = {0, 0, 1, -1};
  for (int m = 0; m < 4; ++m) {
    Site nb = site;
    nb.c[0] += dx[m];
    nb.c[1] += dy[m];
    if (nb.l1() == n + 1) out.push_back(nb);
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool cone_contains(const Cone& cone, const std::array<double, kMaxDim>& point, int dim,
                   double time) {
  if (!(time > cone.apex_time)) return false;
  double s = 0;
  for (int i = 0; i < dim; ++i) {
    const double d = point[i] - cone.apex[i];
    s += d * d;
  }
  return std::sqrt(s) < cone.delta * (time - cone.apex_time);
}

bool cone_contains(const Cone& cone, const Site& point, double time) {
  std::array<double, kMaxDim> p{};
  for (int i = 0; i < point.dim; ++i) p[i] = static_cast<double>(point.c[i]);
  return cone_contains(cone, p, point.dim, time);
}

namespace {

std::vector<Site> diamond_sites(long norm_max, int dim) {
  std::vector<Site> out;
  for (long k = 0; k <= norm_max; ++k) {
    auto lvl = level_sites(k, dim);
    out.insert(out.end(), lvl.begin(), lvl.end());
  }
  return out;
}

}  // namespace

ConeCheckReport verify_cone_disjointness(const ModelParams& params, long x_norm_max,
                                         long j_norm_max, int t_samples,
                                         double delta_override) {
  params.validate();
  if (x_norm_max > j_norm_max)
    throw std::invalid_argument("verify_cone_disjointness: x_norm_max must be <= j_norm_max");
  if (t_samples < 2) throw std::invalid_argument("verify_cone_disjointness: t_samples >= 2");

  const double delta = delta_override > 0.0 ? delta_override : params.delta();
  const double speed = params.speed;
  const bool continuum = params.mode == Mode::kContinuum;
  // Continuum worst case: apex anywhere in B(x,4/3), target anywhere in
  // B(j,4/3); centers closer than 5 are excluded per the region construction.
  const double slack = continuum ? 8.0 / 3.0 : 0.0;

  const auto xs = diamond_sites(x_norm_max, params.dim);
  const auto js = diamond_sites(j_norm_max, params.dim);

  ConeCheckReport report;
  for (const Site& x : xs) {
    const double t0 = static_cast<double>(x.l1()) / speed;
    for (const Site& j : js) {
      if (j == x) continue;
      const double u = dist_l2(j, x);
      if (continuum && u <= 5.0) continue;
      const double s_hi = (static_cast<double>(j.l1()) + 1.0) / speed;
      for (int m = 0; m < t_samples; ++m) {
        const double t = t0 + (static_cast<double>(m) / (t_samples - 1)) / speed;
        ++report.checks;
        // The cone reaches (j, s) iff s - t > dist/delta; the latest s in
        // T_j gives the sup, so one arithmetic comparison settles the cell.
        if (s_hi > t && delta * (s_hi - t) > u - slack) {
          report.passed = false;
          report.counterexample = ConeCheckCounterexample{x, t, j, s_hi};
          return report;
        }
      }
    }
  }
  return report;
}

}  // namespace evade
