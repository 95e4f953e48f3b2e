#include <cmath>
#include <sstream>

#include "popot/pdmp.hpp"
#include "popot/stats.hpp"
#include "popot/transport.hpp"
#include "popot_cli/experiments.hpp"

namespace popot::cli {

namespace {

constexpr double kBoundSlack = 1e-10;
constexpr std::size_t kPermutations = 1999;

Sampler<Age> initial_sampler(const Renewal&, const json& j, const std::string& p) {
  return parse_initial_age(j, p);
}
Sampler<Age> initial_sampler(const GrowthFragmentation&, const json& j, const std::string& p) {
  return parse_initial_age(j, p);
}
Sampler<AgeState> initial_sampler(const RenewalSystem& m, const json& j, const std::string& p) {
  return parse_initial_age_state(j, p, m.torus_size());
}
Sampler<AgePosition> initial_sampler(const SpaceAge& m, const json& j, const std::string& p) {
  return parse_initial_age_position(j, p, m.noise().dim());
}
Sampler<TimePair> initial_sampler(const TwoTime&, const json& j, const std::string& p) {
  return parse_initial_time_pair(j, p);
}
Sampler<AgeSize> initial_sampler(const AgeSizeModel&, const json& j, const std::string& p) {
  return parse_initial_age_size(j, p);
}
Sampler<Trait> initial_sampler(const Sexual& m, const json& j, const std::string& p) {
  return parse_initial_trait(j, p, m.dim());
}

std::uint64_t replica_seed(std::uint64_t seed, std::size_t r) {
  Stream s = stream_for(seed, r, kReplicaStream);
  return s();
}

// Independent replicas of i.i.d. pairs: pooled mean with the exact standard
// error of the pooled estimator.
template <class S>
CoupledRun<S> pool_replicas(std::vector<CoupledRun<S>>& runs, std::size_t keep) {
  if (runs.size() == 1) return std::move(runs.front());
  const std::size_t nc = runs.front().stats.size();
  CoupledRun<S> out;
  out.stats.resize(nc);
  out.clouds.resize(nc);
  for (std::size_t c = 0; c < nc; ++c) {
    CheckpointStats& st = out.stats[c];
    double sum = 0, var = 0, touched = 0;
    for (auto& run : runs) {
      const CheckpointStats& s = run.stats[c];
      const double n = static_cast<double>(s.n_pairs);
      st.time = s.time;
      st.n_pairs += s.n_pairs;
      st.common_events += s.common_events;
      st.solo_events += s.solo_events;
      sum += n * s.mean_cost;
      var += n * n * s.stderr_cost * s.stderr_cost;
      touched += n * s.touched;
      const auto& cloud = run.clouds[c];
      const std::size_t take = c + 1 == nc ? cloud.size() : std::min(keep, cloud.size());
      out.clouds[c].insert(out.clouds[c].end(), cloud.begin(),
                           cloud.begin() + static_cast<std::ptrdiff_t>(take));
    }
    const double total = static_cast<double>(st.n_pairs);
    st.mean_cost = sum / total;
    st.stderr_cost = std::sqrt(var) / total;
    st.touched = touched / total;
  }
  return out;
}

CoupledRun<Trait> merge_runs(std::vector<CoupledRun<Trait>>& runs, std::size_t) {
  if (runs.size() == 1) return std::move(runs.front());
  return combine_replicas(runs);
}

template <class S>
CoupledRun<S> merge_runs(std::vector<CoupledRun<S>>& runs, std::size_t keep) {
  return pool_replicas(runs, keep);
}

template <class S>
std::vector<std::vector<double>> coordinate_rows(const std::vector<S>& states) {
  std::vector<std::vector<double>> out;
  out.reserve(states.size());
  for (const S& s : states) out.push_back(coordinates(s));
  return out;
}

// Final population of an independent run started from `init`.
template <class Model>
std::vector<typename Model::State> population_at_horizon(const Model& m, const SimConfig& base,
                                                         const EmpiricalMeasure<typename Model::State>& init,
                                                         std::size_t n, std::size_t, std::uint64_t seed) {
  SimConfig cfg = base;
  cfg.checkpoints = {cfg.horizon};
  cfg.n_particles = n;
  cfg.seed = seed;
  return simulate_population(m, cfg, init).back().atoms();
}

std::vector<Trait> population_at_horizon(const Sexual& m, const SimConfig& base,
                                         const EmpiricalMeasure<Trait>& init, std::size_t n,
                                         std::size_t replicas, std::uint64_t seed) {
  std::vector<Trait> out;
  const std::size_t per = n / replicas;
  for (std::size_t r = 0; r < replicas; ++r) {
    SimConfig cfg = base;
    cfg.checkpoints = {cfg.horizon};
    cfg.seed = replica_seed(seed, r);
    Stream rng = stream_for(seed, r, kInitialStream);
    const auto start = init.sample(per, rng);
    const auto clouds = simulate_population(m, cfg, start);
    const auto& last = clouds.back().atoms();
    out.insert(out.end(), last.begin(), last.end());
  }
  return out;
}

template <class Model>
ContractResult contract_impl(const Model& m, const ModelSpec& spec, const ContractOptions& o) {
  using S = typename Model::State;
  constexpr bool interacting = std::is_same_v<Model, Sexual>;
  ContractResult res;
  res.model = spec.name;
  res.a = spec.a;
  res.a_auto = spec.a_auto;
  res.replicas = o.replicas.value_or(interacting ? 32 : 1);
  if (res.replicas == 0) throw ConfigError("replicas must be >= 1");
  const std::size_t per = o.n_particles / res.replicas;
  if (per < (interacting ? 2u : 1u)) throw ConfigError("too few particles per replica");
  if (o.ot_atoms == 0) throw ConfigError("ot_atoms must be >= 1");

  const Sampler<S> draw_first = initial_sampler(m, o.first, "init.first");
  const Sampler<S> draw_second = initial_sampler(m, o.second, "init.second");
  std::vector<S> a, b;
  Stream rng_a = stream_for(o.seed, 1, kInitialStream);
  Stream rng_b = stream_for(o.seed, 2, kInitialStream);
  for (std::size_t k = 0; k < o.ot_atoms; ++k) a.push_back(draw_first(rng_a));
  for (std::size_t k = 0; k < o.ot_atoms; ++k) b.push_back(draw_second(rng_b));
  const auto mu = EmpiricalMeasure<S>::uniform(std::move(a));
  const auto nu = EmpiricalMeasure<S>::uniform(std::move(b));
  const auto cost = [&m](const S& x, const S& y) { return m.cost(x, y); };
  const TransportPlan plan = transport_cost(mu, nu, cost);
  res.initial_ot = plan.cost;

  SimConfig cfg;
  cfg.n_particles = per;
  cfg.horizon = o.horizon;
  cfg.checkpoints = uniform_checkpoints(o.horizon, o.checkpoints);
  cfg.lookahead = o.lookahead;
  cfg.workers = o.workers;
  const std::size_t keep = (o.ot_atoms + res.replicas - 1) / res.replicas;
  cfg.keep = keep;
  std::vector<CoupledRun<S>> runs;
  for (std::size_t r = 0; r < res.replicas; ++r) {
    Stream prng = stream_for(o.seed, 16 + r, kInitialStream);
    const auto pairs = sample_plan(plan, mu, nu, per, prng);
    cfg.seed = replica_seed(o.seed, r);
    runs.push_back(simulate_coupled(m, cfg, pairs));
  }
  const CoupledRun<S> run = merge_runs(runs, keep);

  for (std::size_t c = 0; c < run.stats.size(); ++c) {
    const CheckpointStats& st = run.stats[c];
    const auto& cloud = run.clouds[c];
    const std::size_t take = std::min(o.ot_atoms, cloud.size());
    std::vector<S> xs, ys;
    double paired = 0;
    for (std::size_t k = 0; k < take; ++k) {
      xs.push_back(cloud[k].first);
      ys.push_back(cloud[k].second);
      paired += m.cost(cloud[k].first, cloud[k].second);
    }
    ContractRow row;
    row.time = st.time;
    row.exact_ot = transport_cost(EmpiricalMeasure<S>::uniform(std::move(xs)),
                                  EmpiricalMeasure<S>::uniform(std::move(ys)), cost)
                       .cost;
    row.paired_cost = paired / static_cast<double>(take);
    row.mean_cost = st.mean_cost;
    row.stderr_cost = st.stderr_cost;
    row.n_pairs = st.n_pairs;
    row.common_events = st.common_events;
    row.solo_events = st.solo_events;
    row.touched = st.touched;
    res.rows.push_back(row);
  }

  const auto& rows = res.rows;
  for (std::size_t c = 0; c < rows.size(); ++c) {
    if (rows[c].exact_ot > rows[c].paired_cost + kBoundSlack) res.coupling_bound = false;
    if (rows[c].exact_ot > rows[c].mean_cost + kBoundSlack) res.ot_below_mean = false;
    const double s0 = std::hypot(rows[0].stderr_cost, rows[c].stderr_cost);
    if (rows[c].mean_cost > rows[0].mean_cost + 3 * s0 + kBoundSlack) res.contraction = false;
    if (c == 0) continue;
    const double s = std::hypot(rows[c - 1].stderr_cost, rows[c].stderr_cost);
    const double rise = rows[c].mean_cost - rows[c - 1].mean_cost;
    if (rise > 3 * s + kBoundSlack) res.monotone = false;
    if (rise > 0) res.worst_rise_sigma = std::max(res.worst_rise_sigma, s > 0 ? rise / s : INFINITY);
  }
  res.touched_ok = rows.back().touched >= o.min_touched;

  if (o.marginal_test) {
    const auto& last = run.clouds.back();
    std::vector<S> firsts, seconds;
    for (const auto& p : last) {
      firsts.push_back(p.first);
      seconds.push_back(p.second);
    }
    const auto pop_first =
        population_at_horizon(m, cfg, mu, per * res.replicas, res.replicas, replica_seed(o.seed, 1001));
    const auto pop_second =
        population_at_horizon(m, cfg, nu, per * res.replicas, res.replicas, replica_seed(o.seed, 1002));
    MarginalTest t;
    if constexpr (interacting) {
      // Particles of one replica are dependent; replicas are the independent units.
      const std::size_t k = res.replicas;
      t.p_first = ks_projections_clustered(coordinate_rows(firsts), k, coordinate_rows(pop_first), k,
                                           kPermutations, replica_seed(o.seed, 1003));
      t.p_second = ks_projections_clustered(coordinate_rows(seconds), k, coordinate_rows(pop_second), k,
                                            kPermutations, replica_seed(o.seed, 1004));
    } else {
      t.p_first = ks_projections(coordinate_rows(firsts), coordinate_rows(pop_first));
      t.p_second = ks_projections(coordinate_rows(seconds), coordinate_rows(pop_second));
    }
    t.rejected = t.p_first < o.significance || t.p_second < o.significance;
    res.marginals = t;
  }
  return res;
}

}  // namespace

ContractOptions parse_contract(const json& config, const Overrides& over) {
  Reader r(config, "");
  ContractOptions o;
  if (r.has("command") && r.text("command") != "contract")
    throw ConfigError("command: this config is not for 'contract'");
  o.model = r.raw("model");
  Reader init = r.child("init");
  o.first = init.raw("first");
  o.second = init.raw("second");
  init.finish();
  if (r.has("grid")) o.grid = parse_grid(r.raw("grid"), "grid");
  o.n_particles = r.count("n_particles", o.n_particles);
  o.horizon = r.number("horizon");
  o.checkpoints = r.count("checkpoints", o.checkpoints);
  o.ot_atoms = r.count("ot_atoms", o.ot_atoms);
  o.lookahead = r.number("lookahead", o.lookahead);
  o.workers = static_cast<unsigned>(r.count("workers", o.workers));
  if (r.has("replicas")) o.replicas = r.count("replicas");
  o.min_touched = r.number("min_touched", o.min_touched);
  o.marginal_test = r.flag("marginal_test", o.marginal_test);
  o.significance = r.number("significance", o.significance);
  o.seed = r.u64("seed", o.seed);
  r.finish();
  if (over.seed) o.seed = *over.seed;
  if (over.replicas) o.replicas = *over.replicas;
  if (!(o.horizon > 0)) throw ConfigError("horizon: must be > 0");
  if (o.checkpoints == 0) throw ConfigError("checkpoints: must be >= 1");
  if (o.workers == 0) throw ConfigError("workers: must be >= 1");
  return o;
}

ContractResult run_contract(const ContractOptions& o) {
  const ModelSpec spec = parse_model(o.model, "model", o.grid);
  if (spec.certificate && !spec.certificate->valid) {
    std::ostringstream os;
    os << "truncation a = " << spec.a << " is not admissible (min ratio "
       << spec.certificate->min_ratio << ")";
    throw std::domain_error(os.str());
  }
  return std::visit([&](const auto& m) { return contract_impl(m, spec, o); }, spec.model);
}

CommandResult cmd_contract(const json& config, const Overrides& over) {
  const ContractOptions o = parse_contract(config, over);
  CommandResult out;
  ContractResult res;
  try {
    res = run_contract(o);
  } catch (const std::domain_error& e) {
    out.exit_code = 2;
    out.report = std::string("FAIL ") + e.what() + "\n";
    out.summary = {{"command", "contract"}, {"passed", false}, {"error", e.what()}};
    return out;
  }
  std::string csv =
      "time,exact_ot,paired_cost,mean_coupled_cost,stderr,n_pairs,common_events,solo_events,touched\n";
  for (const auto& row : res.rows) {
    csv += format_number(row.time) + "," + format_number(row.exact_ot) + "," +
           format_number(row.paired_cost) + "," + format_number(row.mean_cost) + "," +
           format_number(row.stderr_cost) + "," + std::to_string(row.n_pairs) + "," +
           std::to_string(row.common_events) + "," + std::to_string(row.solo_events) + "," +
           format_number(row.touched) + "\n";
  }
  out.files.push_back({"contract.csv", csv});
  out.summary = {{"command", "contract"},
                 {"model", res.model},
                 {"a", res.a},
                 {"a_auto", res.a_auto},
                 {"seed", o.seed},
                 {"replicas", res.replicas},
                 {"initial_ot", res.initial_ot},
                 {"checks",
                  {{"coupling_bound", res.coupling_bound},
                   {"ot_below_mean", res.ot_below_mean},
                   {"monotone", res.monotone},
                   {"contraction", res.contraction},
                   {"touched", res.touched_ok}}},
                 {"worst_rise_sigma", res.worst_rise_sigma},
                 {"passed", res.passed()}};
  if (res.marginals) {
    out.summary["marginals"] = {{"p_first", res.marginals->p_first},
                                {"p_second", res.marginals->p_second},
                                {"rejected", res.marginals->rejected}};
  }
  std::ostringstream os;
  os << res.model << " a=" << res.a << " initial_ot=" << res.initial_ot << "\n";
  for (const auto& row : res.rows)
    os << "  t=" << row.time << " exact_ot=" << row.exact_ot << " mean=" << row.mean_cost
       << " +- " << row.stderr_cost << " touched=" << row.touched << "\n";
  os << (res.passed() ? "PASS" : "FAIL") << " contract\n";
  out.report = os.str();
  out.exit_code = res.passed() ? 0 : 2;
  return out;
}

}  // namespace popot::cli
