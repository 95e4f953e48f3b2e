#include "popot/pdmp.hpp"

#include <sstream>

namespace popot {

namespace {

std::size_t uniform_index(Stream& rng, std::size_t n) {
  const auto k = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n));
  return k < n ? k : n - 1;
}

// Uniform particle k and a partner drawn uniformly among the other n - 1.
std::pair<std::size_t, std::size_t> mating_pair(Stream& rng, std::size_t n) {
  const std::size_t k = uniform_index(rng, n);
  std::size_t j = uniform_index(rng, n - 1);
  if (j >= k) ++j;
  return {k, j};
}

// Event-driven loop at total rate n; `record(c)` is called for every
// checkpoint c as the clock passes it, `event()` at each event.
template <class Event, class Record>
void run_events(const SimConfig& cfg, std::size_t n, Stream& rng, Event event, Record record) {
  const auto& cps = cfg.checkpoints;
  std::size_t idx = 0;
  double t = 0;
  const double total = static_cast<double>(n);
  while (true) {
    const double next = t + exponential(rng, total);
    while (idx < cps.size() && cps[idx] < next) record(idx++);
    if (next > cfg.horizon) break;
    t = next;
    event();
  }
  while (idx < cps.size()) record(idx++);
}

void require_population(const Sexual& m, std::size_t n) {
  if (n < 2) throw std::invalid_argument("sexual model needs at least 2 particles");
  (void)m;
}

}  // namespace

void SimConfig::validate() const {
  if (n_particles == 0) throw std::invalid_argument("n_particles must be >= 1");
  if (!(horizon > 0) || !std::isfinite(horizon)) throw std::invalid_argument("horizon must be > 0");
  if (!(lookahead > 0)) throw std::invalid_argument("lookahead must be > 0");
  if (workers == 0) throw std::invalid_argument("workers must be >= 1");
  for (std::size_t k = 0; k < checkpoints.size(); ++k) {
    if (!(checkpoints[k] >= 0 && checkpoints[k] <= horizon))
      throw std::invalid_argument("checkpoints must lie in [0, horizon]");
    if (k > 0 && checkpoints[k] < checkpoints[k - 1])
      throw std::invalid_argument("checkpoints must be sorted");
  }
}

std::vector<double> uniform_checkpoints(double horizon, std::size_t count) {
  if (count == 0) throw std::invalid_argument("need at least one checkpoint interval");
  std::vector<double> out(count + 1);
  for (std::size_t k = 0; k <= count; ++k)
    out[k] = k == count ? horizon : horizon * static_cast<double>(k) / static_cast<double>(count);
  return out;
}

static std::string envelope_message(double time, double rate, double bound) {
  std::ostringstream os;
  os.precision(17);
  os << "thinning envelope violated at t = " << time << ": rate " << rate << " exceeds bound "
     << bound;
  return os.str();
}

EnvelopeViolation::EnvelopeViolation(double time, double rate, double bound)
    : std::runtime_error(envelope_message(time, rate, bound)), time_(time), rate_(rate),
      bound_(bound) {}

std::vector<EmpiricalMeasure<Trait>> simulate_population(const Sexual& m, const SimConfig& cfg,
                                                         const std::vector<Trait>& init) {
  cfg.validate();
  const std::size_t n = init.size();
  require_population(m, n);
  for (const auto& s : init) detail::require_state(m, s);
  std::vector<Trait> pop = init;
  Stream rng = stream_for(cfg.seed, 0, kDynamicsStream);
  std::vector<EmpiricalMeasure<Trait>> out;
  run_events(
      cfg, n, rng,
      [&] {
        const auto [k, j] = mating_pair(rng, n);
        const double sigma = m.mix().sample(rng);
        pop[k] = m.offspring(pop[k], pop[j], sigma);
      },
      [&](std::size_t) { out.push_back(EmpiricalMeasure<Trait>::uniform(pop)); });
  return out;
}

CoupledRun<Trait> simulate_coupled(const Sexual& m, const SimConfig& cfg,
                                   const std::vector<std::pair<Trait, Trait>>& init) {
  cfg.validate();
  const std::size_t n = init.size();
  require_population(m, n);
  std::vector<CoupledPair<Trait>> pop;
  pop.reserve(n);
  for (const auto& [x, y] : init) {
    detail::require_state(m, x);
    detail::require_state(m, y);
    pop.push_back({x, y});
  }
  Stream rng = stream_for(cfg.seed, 0, kDynamicsStream);
  const std::size_t keep = std::min(cfg.keep, n);
  const std::size_t nc = cfg.checkpoints.size();
  CoupledRun<Trait> run;
  std::vector<double> costs(n);
  run_events(
      cfg, n, rng,
      [&] {
        const auto [k, j] = mating_pair(rng, n);
        const double sigma = m.mix().sample(rng);
        CoupledPair<Trait>& p = pop[k];
        const CoupledPair<Trait>& q = pop[j];
        p.first = m.offspring(p.first, q.first, sigma);
        p.second = m.offspring(p.second, q.second, sigma);
        ++p.common_events;
      },
      [&](std::size_t c) {
        CheckpointStats st;
        st.time = cfg.checkpoints[c];
        std::size_t touched = 0;
        for (std::size_t k = 0; k < n; ++k) {
          costs[k] = m.cost(pop[k].first, pop[k].second);
          st.common_events += pop[k].common_events;
          if (pop[k].common_events > 0) ++touched;
        }
        st.mean_cost = mean(costs);
        st.stderr_cost = standard_error(costs);
        st.n_pairs = n;
        st.touched = static_cast<double>(touched) / static_cast<double>(n);
        run.stats.push_back(st);
        const std::size_t count = c + 1 == nc ? n : keep;
        run.clouds.emplace_back(pop.begin(), pop.begin() + static_cast<std::ptrdiff_t>(count));
      });
  return run;
}

CoupledRun<Trait> combine_replicas(const std::vector<CoupledRun<Trait>>& replicas) {
  if (replicas.empty()) throw std::invalid_argument("no replicas to combine");
  const std::size_t nc = replicas.front().stats.size();
  CoupledRun<Trait> out;
  out.stats.resize(nc);
  out.clouds.resize(nc);
  std::vector<double> means(replicas.size());
  for (std::size_t c = 0; c < nc; ++c) {
    CheckpointStats& st = out.stats[c];
    double touched = 0;
    for (std::size_t r = 0; r < replicas.size(); ++r) {
      const CheckpointStats& s = replicas[r].stats.at(c);
      means[r] = s.mean_cost;
      st.time = s.time;
      st.n_pairs += s.n_pairs;
      st.common_events += s.common_events;
      st.solo_events += s.solo_events;
      touched += s.touched * static_cast<double>(s.n_pairs);
      const auto& cloud = replicas[r].clouds.at(c);
      out.clouds[c].insert(out.clouds[c].end(), cloud.begin(), cloud.end());
    }
    st.mean_cost = mean(means);
    st.stderr_cost = standard_error(means);
    st.touched = touched / static_cast<double>(st.n_pairs);
  }
  return out;
}

}  // namespace popot
