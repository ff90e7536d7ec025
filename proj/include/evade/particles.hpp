#pragma once

// Finite realization of the infinite particle cloud: Poisson initial
// conditions over a buffered box, continuous-time random walks (lattice) or
// Brownian motions (continuum, on a fixed time grid), plus occupancy and
// position queries.
//
// Randomness layout (fixed; couplings depend on it):
//   * every site of the sampling box owns a stream keyed by
//     (seed, "site", coordinates); its first draws give the Poisson count;
//   * particle p at that site owns stream combine(site_stream, p+1); its
//     draw order is: one uniform (thinning coupling), then the path
//     (holding time + direction per jump, or one normal pair per grid step
//     and coordinate pair).
// Because identity is keyed by site, enlarging the window or changing
// thread counts never changes the particles that both runs share.

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "evade/geometry.hpp"
#include "evade/rng.hpp"

namespace evade {

struct SimulationWindow {
  std::array<std::int32_t, kMaxDim> core_lo{};  // certified query region (inclusive)
  std::array<std::int32_t, kMaxDim> core_hi{};
  int dim = 2;
  double horizon = 0.0;
  int buffer_radius = 0;
  double epsilon_truncation = 1e-6;

  std::array<std::int32_t, kMaxDim> sample_lo() const;
  std::array<std::int32_t, kMaxDim> sample_hi() const;

  bool core_contains(const Site& s, double pad = 0.0) const;
  long core_extent(int axis) const { return core_hi[axis] - core_lo[axis] + 1; }
};

// Smallest buffer width B such that the expected number of omitted particles
// that could reach the core within the horizon is below eps (Chernoff Poisson
// tail for walks, reflection bound for Brownian motions).
int required_buffer(const ModelParams& params, const SimulationWindow& core, double walk_rate,
                    double eps);

// Window whose core covers every cell of the level diamond |i|_1 <= depth
// (continuum cells padded by their 4/3 radius) up to time (depth+1)/S.
SimulationWindow window_for_depth(const ModelParams& params, int depth, double horizon = 0.0,
                                  double eps = 1e-6, double walk_rate = 1.0);

// Window for an explicit core box over [0, horizon].
SimulationWindow window_for_box(const ModelParams& params, const Site& lo, const Site& hi,
                                double horizon, double eps = 1e-6, double walk_rate = 1.0);

struct JumpEvent {
  double t = 0.0;
  Site to;
};

struct Particle {
  Site site;                              // birth site (lattice) / birth cell (continuum)
  std::array<double, kMaxDim> pos0{};     // initial position (continuum; = site in lattice)
  std::uint64_t stream = 0;
};

struct ParticleRealization {
  ModelParams params;
  SimulationWindow window;
  std::uint64_t master_seed = 0;
  double walk_rate = 1.0;  // total jump rate; 1 is the model default
  double step_dt = 0.0;    // continuum grid step; 0 until evolve_brownian ran

  std::vector<Particle> particles;
  // Materialized paths (optional; streaming accessors below regenerate the
  // same paths on demand from the particle streams).
  std::vector<std::vector<JumpEvent>> histories;
  std::vector<std::vector<std::array<double, kMaxDim>>> brownian_paths;

  bool has_histories() const { return !histories.empty() || !brownian_paths.empty(); }
  long grid_steps() const;
};

// Positions-only Poisson cloud over the buffered box.
ParticleRealization sample_initial_cloud(const ModelParams& params, const SimulationWindow& window,
                                         std::uint64_t seed, double walk_rate = 1.0);

// Materializes jump histories (lattice mode).
void evolve_lattice_walks(ParticleRealization& r);

// Materializes Brownian positions on the grid {0, dt, 2dt, ...} up to horizon.
void evolve_brownian(ParticleRealization& r, double step_dt);

// Thinning coupling draw for particle idx: the realization restricted to
// particles with keep_u < lambda_sub / params.lambda is distributed as a
// cloud of intensity lambda_sub, and is a subset of the full cloud.
double particle_keep_u(const ParticleRealization& r, std::size_t idx);

// Streams residences (pos, [a, b)) of a lattice particle in time order; the
// final residence is clipped at the window horizon. Visitor returns false to
// stop early.
template <class F>
void for_each_residence(const ParticleRealization& r, std::size_t idx, F&& f) {
  const Particle& p = r.particles[idx];
  const double horizon = r.window.horizon;
  if (!r.histories.empty()) {
    Site pos = p.site;
    double a = 0.0;
    for (const JumpEvent& ev : r.histories[idx]) {
      if (!f(pos, a, ev.t)) return;
      pos = ev.to;
      a = ev.t;
    }
    f(pos, a, horizon);
    return;
  }
  rng::Xoshiro256pp g(p.stream);
  (void)g.u01();  // thinning slot
  Site pos = p.site;
  double a = 0.0;
  const int nd = 2 * r.params.dim;
  for (;;) {
    const double t_next = a + g.exponential(r.walk_rate);
    if (t_next > horizon) {
      f(pos, a, horizon);
      return;
    }
    if (!f(pos, a, t_next)) return;
    const std::uint32_t dir = g.below(static_cast<std::uint32_t>(nd));
    pos.c[dir >> 1] += (dir & 1) ? -1 : 1;
    a = t_next;
  }
}

// Streams Brownian grid positions (t_m = m * dt, m = 0..M) of one particle.
// Visitor f(pos, t) returns false to stop early.
template <class F>
void for_each_grid_position(const ParticleRealization& r, std::size_t idx, double step_dt, F&& f) {
  const Particle& p = r.particles[idx];
  const long steps = static_cast<long>(std::ceil(r.window.horizon / step_dt - 1e-9));
  const int dim = r.params.dim;
  if (!r.brownian_paths.empty() && r.step_dt == step_dt) {
    const auto& path = r.brownian_paths[idx];
    for (long m = 0; m < static_cast<long>(path.size()); ++m) {
      if (!f(path[m], m * step_dt)) return;
    }
    return;
  }
  rng::Xoshiro256pp g(p.stream);
  (void)g.u01();  // thinning slot
  std::array<double, kMaxDim> pos = p.pos0;
  if (!f(pos, 0.0)) return;
  const double sd = std::sqrt(step_dt);
  for (long m = 1; m <= steps; ++m) {
    for (int i = 0; i < dim; i += 2) {
      double a, b;
      g.normal_pair(a, b);
      pos[i] += sd * a;
      if (i + 1 < dim) pos[i + 1] += sd * b;
    }
    if (!f(pos, m * step_dt)) return;
  }
}

// True iff some particle occupies `site` (lattice, radius 0: site equality on
// a closed residence overlap) or comes within `radius` of it (continuum, at
// grid times) at some time in the closed interval [t0, t1]. Residences are
// treated as closed on both ends, matching the closed-cell convention.
bool occupancy(const ParticleRealization& r, const Site& site, double radius, double t0,
               double t1);

// Exact particle positions at an instant, right-continuous at jumps (lattice).
std::vector<Site> positions_at(const ParticleRealization& r, double t);

// Continuum positions at the grid time nearest to t (must be within 1e-9).
std::vector<std::array<double, kMaxDim>> positions_at_continuum(const ParticleRealization& r,
                                                                double t);

// Versioned binary dump/load (materialized realizations round-trip exactly).
void dump_realization(const ParticleRealization& r, std::ostream& os);
ParticleRealization load_realization(std::istream& is);

}  // namespace evade
