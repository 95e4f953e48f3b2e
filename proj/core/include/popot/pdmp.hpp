#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "popot/measure.hpp"
#include "popot/models.hpp"
#include "popot/rng.hpp"
#include "popot/stats.hpp"

namespace popot {

// Stream families derived from one seed.
inline constexpr std::uint64_t kInitialStream = 1;
inline constexpr std::uint64_t kDynamicsStream = 2;
inline constexpr std::uint64_t kReplicaStream = 3;

struct SimConfig {
  std::size_t n_particles = 1000;
  double horizon = 1.0;
  /// Sorted times in [0, horizon] at which states are recorded.
  std::vector<double> checkpoints;
  std::uint64_t seed = 0;
  /// Thinning window length.
  double lookahead = 0.1;
  /// Worker threads for independent trajectories.
  unsigned workers = 1;
  /// Number of leading pairs whose states are kept at every checkpoint; all
  /// pairs are kept at the last checkpoint.
  std::size_t keep = std::numeric_limits<std::size_t>::max();

  void validate() const;
};

/// count + 1 equally spaced times 0, T/count, ..., T.
std::vector<double> uniform_checkpoints(double horizon, std::size_t count);

/// Raised when a sampled jump rate exceeds the envelope of its window.
class EnvelopeViolation : public std::runtime_error {
 public:
  EnvelopeViolation(double time, double rate, double bound);
  double time() const { return time_; }
  double rate() const { return rate_; }
  double bound() const { return bound_; }

 private:
  double time_;
  double rate_;
  double bound_;
};

template <class S>
struct CoupledPair {
  S first;
  S second;
  std::uint64_t common_events = 0;
  std::uint64_t solo_first_events = 0;
  std::uint64_t solo_second_events = 0;
};

struct CheckpointStats {
  double time = 0;
  double mean_cost = 0;
  double stderr_cost = 0;
  std::size_t n_pairs = 0;
  std::uint64_t common_events = 0;
  std::uint64_t solo_events = 0;
  /// Fraction of pairs with at least one event so far.
  double touched = 0;
};

template <class S>
struct CoupledRun {
  std::vector<CheckpointStats> stats;
  std::vector<std::vector<CoupledPair<S>>> clouds;
};

struct ThinningEvent {
  double time = 0;
  EventClass event = EventClass::common;
};

namespace detail {

inline constexpr double kEnvelopeSlack = 1e-12;

inline void check_envelope(double time, double rate, double bound) {
  if (rate > bound * (1.0 + kEnvelopeSlack) + kEnvelopeSlack) throw EnvelopeViolation(time, rate, bound);
}

template <class S, class Model>
void require_state(const Model& m, const S& s) {
  if (!m.in_space(s)) throw std::logic_error("simulated state left its space");
}

/// Runs fn(k) for k in [0, n) on contiguous blocks, one per worker.
template <class Fn>
void parallel_for(std::size_t n, unsigned workers, Fn fn) {
  const std::size_t w = std::max<std::size_t>(1, std::min<std::size_t>(workers, n));
  if (w == 1) {
    for (std::size_t k = 0; k < n; ++k) fn(k);
    return;
  }
  std::vector<std::exception_ptr> errors(w);
  std::vector<std::thread> pool;
  pool.reserve(w);
  for (std::size_t b = 0; b < w; ++b) {
    pool.emplace_back([&, b] {
      try {
        const std::size_t lo = n * b / w;
        const std::size_t hi = n * (b + 1) / w;
        for (std::size_t k = lo; k < hi; ++k) fn(k);
      } catch (...) {
        errors[b] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace detail

/// Flows `s` forward from time t over at most `window`, stopping at the first
/// accepted event (state left just before the jump). Returns the event time,
/// or nothing if the window passed without an event.
template <class Model>
std::optional<double> thinning_next_event(const Model& m, typename Model::State& s, double t,
                                          double window, Stream& rng) {
  const double bound = m.rate_bound(s, window);
  double elapsed = 0;
  while (bound > 0) {
    const double tau = exponential(rng, bound);
    if (elapsed + tau >= window) break;
    s = m.flow(s, tau);
    elapsed += tau;
    const double r = m.rate(s);
    detail::check_envelope(t + elapsed, r, bound);
    if (uniform01(rng) * bound < r) return t + elapsed;
  }
  s = m.flow(s, window - elapsed);
  return std::nullopt;
}

/// Pair version on one clock. The envelope is max of the two bounds when the
/// pair is aligned and their sum otherwise; one uniform draw both accepts and
/// classifies the event.
template <class Model>
std::optional<ThinningEvent> thinning_next_event(const Model& m, typename Model::State& x,
                                                 typename Model::State& y, double t, double window,
                                                 Stream& rng) {
  const double bx = m.rate_bound(x, window);
  const double by = m.rate_bound(y, window);
  const double bound = m.aligned(x, y) ? std::max(bx, by) : bx + by;
  double elapsed = 0;
  while (bound > 0) {
    const double tau = exponential(rng, bound);
    if (elapsed + tau >= window) break;
    x = m.flow(x, tau);
    y = m.flow(y, tau);
    elapsed += tau;
    const EventRates r = m.event_rates(x, y);
    detail::check_envelope(t + elapsed, r.total(), bound);
    const double u = uniform01(rng) * bound;
    if (u < r.common) return ThinningEvent{t + elapsed, EventClass::common};
    if (u < r.common + r.solo_first) return ThinningEvent{t + elapsed, EventClass::solo_first};
    if (u < r.total()) return ThinningEvent{t + elapsed, EventClass::solo_second};
  }
  x = m.flow(x, window - elapsed);
  y = m.flow(y, window - elapsed);
  return std::nullopt;
}

namespace detail {

/// Drives one trajectory through the checkpoints. `step(t, window)` advances
/// the state and returns the new time; `record(k)` stores checkpoint k.
template <class Step, class Record>
void run_checkpoints(const SimConfig& cfg, Step step, Record record) {
  const auto& cps = cfg.checkpoints;
  std::size_t idx = 0;
  double t = 0;
  while (idx < cps.size() && cps[idx] <= t) record(idx++);
  while (t < cfg.horizon) {
    const double target = idx < cps.size() ? cps[idx] : cfg.horizon;
    const double window = std::min(cfg.lookahead, target - t);
    t = step(t, window, target);
    while (idx < cps.size() && cps[idx] <= t) record(idx++);
  }
}

}  // namespace detail

/// Independent trajectories from i.i.d. draws of `init`; particle k uses
/// stream k of the dynamics family. Returns the empirical measure at each
/// checkpoint.
template <class Model>
std::vector<EmpiricalMeasure<typename Model::State>> simulate_population(
    const Model& m, const SimConfig& cfg, const EmpiricalMeasure<typename Model::State>& init) {
  using S = typename Model::State;
  cfg.validate();
  const std::size_t n = cfg.n_particles;
  Stream init_rng = stream_for(cfg.seed, 0, kInitialStream);
  const std::vector<S> start = init.sample(n, init_rng);
  std::vector<std::vector<S>> clouds(cfg.checkpoints.size(), std::vector<S>(n));
  detail::parallel_for(n, cfg.workers, [&](std::size_t k) {
    Stream rng = stream_for(cfg.seed, k, kDynamicsStream);
    S s = start[k];
    detail::require_state(m, s);
    detail::run_checkpoints(
        cfg,
        [&](double t, double window, double target) {
          if (auto ev = thinning_next_event(m, s, t, window, rng)) {
            s = m.jump(s, rng);
            detail::require_state(m, s);
            return *ev;
          }
          return window == target - t ? target : t + window;
        },
        [&](std::size_t c) { clouds[c][k] = s; });
  });
  std::vector<EmpiricalMeasure<S>> out;
  out.reserve(clouds.size());
  for (auto& c : clouds) out.push_back(EmpiricalMeasure<S>::uniform(std::move(c)));
  return out;
}

/// Evolves each initial pair under the coupled dynamics; pair k uses stream k
/// of the dynamics family. Reports the mean cost and its standard error at
/// every checkpoint.
template <class Model>
CoupledRun<typename Model::State> simulate_coupled(
    const Model& m, const SimConfig& cfg,
    const std::vector<std::pair<typename Model::State, typename Model::State>>& init) {
  using S = typename Model::State;
  cfg.validate();
  const std::size_t n = init.size();
  if (n == 0) throw std::invalid_argument("no initial pairs");
  const std::size_t nc = cfg.checkpoints.size();
  const std::size_t keep = std::min(cfg.keep, n);
  std::vector<std::vector<double>> costs(nc, std::vector<double>(n));
  std::vector<std::vector<std::uint64_t>> common(nc, std::vector<std::uint64_t>(n));
  std::vector<std::vector<std::uint64_t>> solo(nc, std::vector<std::uint64_t>(n));
  CoupledRun<S> run;
  run.clouds.resize(nc);
  for (std::size_t c = 0; c < nc; ++c) run.clouds[c].resize(c + 1 == nc ? n : keep);

  detail::parallel_for(n, cfg.workers, [&](std::size_t k) {
    Stream rng = stream_for(cfg.seed, k, kDynamicsStream);
    CoupledPair<S> p{init[k].first, init[k].second};
    detail::require_state(m, p.first);
    detail::require_state(m, p.second);
    detail::run_checkpoints(
        cfg,
        [&](double t, double window, double target) {
          if (auto ev = thinning_next_event(m, p.first, p.second, t, window, rng)) {
            auto [nx, ny] = m.coupled_jump(p.first, p.second, ev->event, rng);
            p.first = nx;
            p.second = ny;
            detail::require_state(m, p.first);
            detail::require_state(m, p.second);
            if (ev->event == EventClass::common) ++p.common_events;
            else if (ev->event == EventClass::solo_first) ++p.solo_first_events;
            else ++p.solo_second_events;
            return ev->time;
          }
          return window == target - t ? target : t + window;
        },
        [&](std::size_t c) {
          costs[c][k] = m.cost(p.first, p.second);
          common[c][k] = p.common_events;
          solo[c][k] = p.solo_first_events + p.solo_second_events;
          if (k < run.clouds[c].size()) run.clouds[c][k] = p;
        });
  });

  run.stats.resize(nc);
  for (std::size_t c = 0; c < nc; ++c) {
    CheckpointStats& st = run.stats[c];
    st.time = cfg.checkpoints[c];
    st.mean_cost = mean(costs[c]);
    st.stderr_cost = standard_error(costs[c]);
    st.n_pairs = n;
    std::size_t touched = 0;
    for (std::size_t k = 0; k < n; ++k) {
      st.common_events += common[c][k];
      st.solo_events += solo[c][k];
      if (common[c][k] + solo[c][k] > 0) ++touched;
    }
    st.touched = static_cast<double>(touched) / static_cast<double>(n);
  }
  return run;
}

/// Interacting population: events at total rate N, each replacing a uniform
/// particle by its offspring with a uniform partner among the others.
std::vector<EmpiricalMeasure<Trait>> simulate_population(const Sexual& m, const SimConfig& cfg,
                                                         const std::vector<Trait>& init);

/// Coupled interacting population: the replaced pair and its partner pair
/// share one sigma.
CoupledRun<Trait> simulate_coupled(const Sexual& m, const SimConfig& cfg,
                                   const std::vector<std::pair<Trait, Trait>>& init);

/// Pools independent replicas: the checkpoint mean is the mean of replica
/// means and the standard error is their spread over sqrt(replicas). Clouds
/// are concatenated in replica order.
CoupledRun<Trait> combine_replicas(const std::vector<CoupledRun<Trait>>& replicas);

/// Piece of a trajectory: the state at `start` flows without jumping until
/// `end`.
template <class S>
struct PathSegment {
  double start = 0;
  double end = 0;
  S state;
};

/// One trajectory on [0, horizon] as a list of flow segments.
template <class Model>
std::vector<PathSegment<typename Model::State>> simulate_path(const Model& m,
                                                              typename Model::State s,
                                                              double horizon, double lookahead,
                                                              Stream& rng) {
  using S = typename Model::State;
  std::vector<PathSegment<S>> out;
  double t = 0;
  while (t < horizon) {
    const double window = std::min(lookahead, horizon - t);
    const S before = s;
    if (auto ev = thinning_next_event(m, s, t, window, rng)) {
      out.push_back({t, *ev, before});
      s = m.jump(s, rng);
      t = *ev;
    } else {
      const double next = window == horizon - t ? horizon : t + window;
      out.push_back({t, next, before});
      t = next;
    }
  }
  return out;
}

}  // namespace popot
