#include "evade/particles.hpp"

#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "evade/stats.hpp"

namespace evade {

namespace {

constexpr char kDumpMagic[8] = {'E', 'V', 'D', 'R', '0', '0', '0', '1'};

std::uint64_t site_stream(std::uint64_t seed, const Site& s) {
  std::uint64_t h = rng::stream_seed(seed, {0x5174Eull});
  for (int i = 0; i < s.dim; ++i) h = rng::combine(h, rng::zigzag(s.c[i]));
  return h;
}

template <class T>
void put(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw std::runtime_error("load_realization: truncated stream");
  return v;
}

}  // namespace

std::array<std::int32_t, kMaxDim> SimulationWindow::sample_lo() const {
  auto out = core_lo;
  for (int i = 0; i < dim; ++i) out[i] -= buffer_radius;
  return out;
}

std::array<std::int32_t, kMaxDim> SimulationWindow::sample_hi() const {
  auto out = core_hi;
  for (int i = 0; i < dim; ++i) out[i] += buffer_radius;
  return out;
}

bool SimulationWindow::core_contains(const Site& s, double pad) const {
  for (int i = 0; i < dim; ++i) {
    if (s.c[i] - pad < core_lo[i] || s.c[i] + pad > core_hi[i]) return false;
  }
  return true;
}

int required_buffer(const ModelParams& params, const SimulationWindow& core, double walk_rate,
                    double eps) {
  if (params.lambda == 0.0) return 1;
  const int d = params.dim;
  std::array<double, kMaxDim> ext{};
  for (int i = 0; i < d; ++i) ext[i] = static_cast<double>(core.core_hi[i] - core.core_lo[i] + 1);
  const double t_eff = core.horizon * walk_rate;

  auto shell_volume = [&](long z) {
    double outer = 1.0, inner = 1.0;
    for (int i = 0; i < d; ++i) {
      outer *= ext[i] + 2.0 * static_cast<double>(z);
      inner *= ext[i] + 2.0 * static_cast<double>(z - 1);
    }
    return outer - inner;
  };

  // Find smallest B with sum_{z > B} lambda * shell(z) * P(reach z) < eps.
  // Lattice reach needs >= z jumps within the horizon; continuum reach needs
  // some coordinate to travel >= z - 1.
  auto tail_mass = [&](long B) {
    double sum = 0.0;
    for (long z = B + 1; z < B + 100000; ++z) {
      double p;
      if (params.mode == Mode::kLattice) {
        p = poisson_tail_chernoff(t_eff, static_cast<double>(z));
      } else {
        const double a = std::max(0.0, static_cast<double>(z) - 1.0);
        p = std::min(1.0,
                     4.0 * d * normal_upper_tail(a / std::sqrt(std::max(1e-12, core.horizon))));
      }
      const double term = params.lambda * shell_volume(z) * p;
      sum += term;
      if (term < eps * 1e-9 && p < 1.0) break;
    }
    return sum;
  };

  long lo = std::max<long>(1, static_cast<long>(t_eff));
  while (lo < 1000000 && tail_mass(lo) >= eps) lo = std::max<long>(lo + 1, lo * 5 / 4);
  // Walk back down to the exact threshold.
  while (lo > 1 && tail_mass(lo - 1) < eps) --lo;
  return static_cast<int>(lo);
}

SimulationWindow window_for_depth(const ModelParams& params, int depth, double horizon, double eps,
                                  double walk_rate) {
  params.validate();
  if (depth < 0) throw std::invalid_argument("window_for_depth: depth >= 0");
  SimulationWindow w;
  w.dim = params.dim;
  w.horizon = horizon > 0.0 ? horizon : (static_cast<double>(depth) + 1.0) / params.speed;
  w.epsilon_truncation = eps;
  const int pad = params.mode == Mode::kContinuum ? 2 : 0;
  for (int i = 0; i < params.dim; ++i) {
    const int r = (i < 2 ? depth : 0) + pad;
    w.core_lo[i] = -r;
    w.core_hi[i] = r;
  }
  w.buffer_radius = required_buffer(params, w, walk_rate, eps);
  return w;
}

SimulationWindow window_for_box(const ModelParams& params, const Site& lo, const Site& hi,
                                double horizon, double eps, double walk_rate) {
  params.validate();
  SimulationWindow w;
  w.dim = params.dim;
  w.horizon = horizon;
  w.epsilon_truncation = eps;
  for (int i = 0; i < params.dim; ++i) {
    if (lo.c[i] > hi.c[i]) throw std::invalid_argument("window_for_box: lo > hi");
    w.core_lo[i] = lo.c[i];
    w.core_hi[i] = hi.c[i];
  }
  w.buffer_radius = required_buffer(params, w, walk_rate, eps);
  return w;
}

long ParticleRealization::grid_steps() const {
  if (step_dt <= 0.0) return 0;
  return static_cast<long>(std::ceil(window.horizon / step_dt - 1e-9));
}

ParticleRealization sample_initial_cloud(const ModelParams& params, const SimulationWindow& window,
                                         std::uint64_t seed, double walk_rate) {
  params.validate();
  if (params.lambda < 0.0) throw std::invalid_argument("sample_initial_cloud: lambda < 0");
  ParticleRealization r;
  r.params = params;
  r.window = window;
  r.master_seed = seed;
  r.walk_rate = walk_rate;

  const auto lo = window.sample_lo();
  const auto hi = window.sample_hi();
  const int d = params.dim;

  // Row-major site scan; per-site streams keep identity window-independent.
  Site s;
  s.dim = d;
  std::array<long, kMaxDim> idx{};
  for (int i = 0; i < d; ++i) idx[i] = lo[i];
  const bool continuum = params.mode == Mode::kContinuum;
  for (;;) {
    for (int i = 0; i < d; ++i) s.c[i] = static_cast<std::int32_t>(idx[i]);
    const std::uint64_t hs = site_stream(seed, s);
    rng::Xoshiro256pp g(hs);
    const long count = g.poisson(params.lambda);
    for (long p = 0; p < count; ++p) {
      Particle particle;
      particle.site = s;
      particle.stream = rng::combine(hs, static_cast<std::uint64_t>(p) + 1);
      if (continuum) {
        rng::Xoshiro256pp gp(rng::combine(particle.stream, 0xFACEull));
        for (int i = 0; i < d; ++i) particle.pos0[i] = s.c[i] + gp.u01();
      } else {
        for (int i = 0; i < d; ++i) particle.pos0[i] = static_cast<double>(s.c[i]);
      }
      r.particles.push_back(particle);
    }
    int axis = d - 1;
    while (axis >= 0 && ++idx[axis] > hi[axis]) {
      idx[axis] = lo[axis];
      --axis;
    }
    if (axis < 0) break;
  }
  return r;
}

void evolve_lattice_walks(ParticleRealization& r) {
  if (r.params.mode != Mode::kLattice)
    throw std::logic_error("evolve_lattice_walks: realization is not in lattice mode");
  r.histories.assign(r.particles.size(), {});
  for (std::size_t i = 0; i < r.particles.size(); ++i) {
    auto& hist = r.histories[i];
    Site prev = r.particles[i].site;
    // Same draw order as the streaming accessor, so both paths agree exactly.
    rng::Xoshiro256pp g(r.particles[i].stream);
    (void)g.u01();
    const int nd = 2 * r.params.dim;
    double t = 0.0;
    for (;;) {
      const double t_next = t + g.exponential(r.walk_rate);
      if (t_next > r.window.horizon) break;
      const std::uint32_t dir = g.below(static_cast<std::uint32_t>(nd));
      Site to = prev;
      to.c[dir >> 1] += (dir & 1) ? -1 : 1;
      hist.push_back(JumpEvent{t_next, to});
      prev = to;
      t = t_next;
    }
  }
}

void evolve_brownian(ParticleRealization& r, double step_dt) {
  if (r.params.mode != Mode::kContinuum)
    throw std::logic_error("evolve_brownian: realization is not in continuum mode");
  if (!(step_dt > 0.0)) throw std::invalid_argument("evolve_brownian: step_dt must be > 0");
  r.step_dt = step_dt;
  r.brownian_paths.assign(r.particles.size(), {});
  const long steps = r.grid_steps();
  const int d = r.params.dim;
  const double sd = std::sqrt(step_dt);
  for (std::size_t i = 0; i < r.particles.size(); ++i) {
    auto& path = r.brownian_paths[i];
    path.reserve(steps + 1);
    rng::Xoshiro256pp g(r.particles[i].stream);
    (void)g.u01();
    std::array<double, kMaxDim> pos = r.particles[i].pos0;
    path.push_back(pos);
    for (long m = 1; m <= steps; ++m) {
      for (int k = 0; k < d; k += 2) {
        double a, b;
        g.normal_pair(a, b);
        pos[k] += sd * a;
        if (k + 1 < d) pos[k + 1] += sd * b;
      }
      path.push_back(pos);
    }
  }
}

double particle_keep_u(const ParticleRealization& r, std::size_t idx) {
  rng::Xoshiro256pp g(r.particles[idx].stream);
  return g.u01();
}

bool occupancy(const ParticleRealization& r, const Site& site, double radius, double t0,
               double t1) {
  if (t0 < 0.0 || t1 > r.window.horizon + 1e-12 || t0 > t1)
    throw std::invalid_argument("occupancy: interval outside [0, horizon]");
  if (!r.window.core_contains(site, radius))
    throw std::invalid_argument("occupancy: query outside certified window");
  if (radius == 0.0) {
    for (std::size_t i = 0; i < r.particles.size(); ++i) {
      bool hit = false;
      for_each_residence(r, i, [&](const Site& pos, double a, double b) {
        if (a > t1) return false;
        if (b >= t0 && pos == site) {  // closed-closed overlap
          hit = true;
          return false;
        }
        return true;
      });
      if (hit) return true;
    }
    return false;
  }
  const double dt = r.step_dt > 0.0 ? r.step_dt : 0.01;
  for (std::size_t i = 0; i < r.particles.size(); ++i) {
    bool hit = false;
    for_each_grid_position(r, i, dt, [&](const std::array<double, kMaxDim>& pos, double t) {
      if (t > t1 + 1e-12) return false;
      if (t + 1e-12 >= t0) {
        double s = 0;
        for (int k = 0; k < r.params.dim; ++k) {
          const double d = pos[k] - site.c[k];
          s += d * d;
        }
        if (s <= radius * radius) {
          hit = true;
          return false;
        }
      }
      return true;
    });
    if (hit) return true;
  }
  return false;
}

std::vector<Site> positions_at(const ParticleRealization& r, double t) {
  if (t < 0.0 || t > r.window.horizon + 1e-12)
    throw std::invalid_argument("positions_at: time outside [0, horizon]");
  std::vector<Site> out;
  out.reserve(r.particles.size());
  for (std::size_t i = 0; i < r.particles.size(); ++i) {
    Site at = r.particles[i].site;
    for_each_residence(r, i, [&](const Site& pos, double a, double b) {
      (void)b;
      // Right-continuous: the last residence starting at or before t owns it.
      if (a > t) return false;
      at = pos;
      return true;
    });
    out.push_back(at);
  }
  return out;
}

std::vector<std::array<double, kMaxDim>> positions_at_continuum(const ParticleRealization& r,
                                                                double t) {
  const double dt = r.step_dt > 0.0 ? r.step_dt : 0.01;
  const long m = static_cast<long>(std::llround(t / dt));
  if (std::abs(m * dt - t) > 1e-9)
    throw std::invalid_argument("positions_at_continuum: t is not a grid time");
  std::vector<std::array<double, kMaxDim>> out;
  out.reserve(r.particles.size());
  for (std::size_t i = 0; i < r.particles.size(); ++i) {
    std::array<double, kMaxDim> found{};
    for_each_grid_position(r, i, dt, [&](const std::array<double, kMaxDim>& pos, double tg) {
      if (std::llround(tg / dt) == m) {
        found = pos;
        return false;
      }
      return true;
    });
    out.push_back(found);
  }
  return out;
}

void dump_realization(const ParticleRealization& r, std::ostream& os) {
  os.write(kDumpMagic, sizeof(kDumpMagic));
  put(os, r.params.lambda);
  put(os, r.params.speed);
  put(os, static_cast<std::int32_t>(r.params.dim));
  put(os, static_cast<std::int32_t>(r.params.mode == Mode::kContinuum ? 1 : 0));
  put(os, r.window.core_lo);
  put(os, r.window.core_hi);
  put(os, static_cast<std::int32_t>(r.window.dim));
  put(os, r.window.horizon);
  put(os, static_cast<std::int32_t>(r.window.buffer_radius));
  put(os, r.window.epsilon_truncation);
  put(os, r.master_seed);
  put(os, r.walk_rate);
  put(os, r.step_dt);
  put(os, static_cast<std::uint64_t>(r.particles.size()));
  for (const Particle& p : r.particles) {
    put(os, p.site.c);
    put(os, p.pos0);
    put(os, p.stream);
  }
  const std::uint8_t has_hist = r.histories.empty() ? 0 : 1;
  put(os, has_hist);
  if (has_hist) {
    for (const auto& h : r.histories) {
      put(os, static_cast<std::uint64_t>(h.size()));
      for (const JumpEvent& ev : h) {
        put(os, ev.t);
        put(os, ev.to.c);
      }
    }
  }
}

ParticleRealization load_realization(std::istream& is) {
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kDumpMagic, sizeof(magic)) != 0)
    throw std::runtime_error("load_realization: bad magic / format version");
  ParticleRealization r;
  r.params.lambda = get<double>(is);
  r.params.speed = get<double>(is);
  r.params.dim = get<std::int32_t>(is);
  r.params.mode = get<std::int32_t>(is) ? Mode::kContinuum : Mode::kLattice;
  r.window.core_lo = get<std::array<std::int32_t, kMaxDim>>(is);
  r.window.core_hi = get<std::array<std::int32_t, kMaxDim>>(is);
  r.window.dim = get<std::int32_t>(is);
  r.window.horizon = get<double>(is);
  r.window.buffer_radius = get<std::int32_t>(is);
  r.window.epsilon_truncation = get<double>(is);
  r.master_seed = get<std::uint64_t>(is);
  r.walk_rate = get<double>(is);
  r.step_dt = get<double>(is);
  const auto n = get<std::uint64_t>(is);
  r.particles.resize(n);
  for (auto& p : r.particles) {
    p.site.c = get<std::array<std::int32_t, kMaxDim>>(is);
    p.site.dim = r.params.dim;
    p.pos0 = get<std::array<double, kMaxDim>>(is);
    p.stream = get<std::uint64_t>(is);
  }
  if (get<std::uint8_t>(is)) {
    r.histories.resize(n);
    for (auto& h : r.histories) {
      const auto m = get<std::uint64_t>(is);
      h.resize(m);
      for (auto& ev : h) {
        ev.t = get<double>(is);
        ev.to.c = get<std::array<std::int32_t, kMaxDim>>(is);
        ev.to.dim = r.params.dim;
      }
    }
  }
  return r;
}

}  // namespace evade
