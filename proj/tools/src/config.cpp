#include "popot_cli/config.hpp"

#include <fstream>
#include <sstream>

namespace popot::cli {

namespace {

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

const json& require_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path + ": expected an object");
  return j;
}

double as_number(const json& j, const std::string& where) {
  if (!j.is_number()) throw ConfigError(where + ": expected a number");
  return j.get<double>();
}

std::vector<double> numbers(const json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + ": expected an array of numbers");
  std::vector<double> out;
  for (std::size_t k = 0; k < j.size(); ++k) out.push_back(as_number(j[k], where + "[" + std::to_string(k) + "]"));
  return out;
}

// Re-throws library validation errors with the config path attached.
template <class F>
auto guarded(const std::string& path, F f) -> decltype(f()) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path + ": " + e.what());
  } catch (const std::domain_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

void require_nonnegative_support(const Law& law, const std::string& path) {
  if (law.lower() < 0) throw ConfigError(path + ": law must live on [0, inf)");
}

GridSpec pair_default_grid() { return GridSpec{0.0, 10.0, 201, 9}; }

struct ResolvedGrids {
  GridSpec scalar;
  GridSpec pair;
};

ResolvedGrids resolve_grids(Reader& r, const std::optional<GridSpec>& command_grid) {
  ResolvedGrids g{command_grid.value_or(GridSpec{}), command_grid.value_or(pair_default_grid())};
  if (r.has("grid")) {
    const GridSpec own = parse_grid(r.raw("grid"), r.where("grid"));
    g = {own, own};
  }
  return g;
}

}  // namespace

Reader::Reader(const json& j, std::string path) : j_(&require_object(j, path)), path_(std::move(path)) {}

bool Reader::has(const std::string& key) const { return j_->contains(key); }

std::string Reader::where(const std::string& key) const { return join(path_, key); }

const json& Reader::raw(const std::string& key) {
  if (!has(key)) throw ConfigError(where(key) + ": missing");
  used_.insert(key);
  return j_->at(key);
}

double Reader::number(const std::string& key) { return as_number(raw(key), where(key)); }

double Reader::number(const std::string& key, double fallback) {
  return has(key) ? number(key) : fallback;
}

std::size_t Reader::count(const std::string& key) {
  const json& v = raw(key);
  if (!v.is_number_integer() && !(v.is_number() && v.get<double>() == std::floor(v.get<double>())))
    throw ConfigError(where(key) + ": expected a nonnegative integer");
  const double d = v.get<double>();
  if (d < 0) throw ConfigError(where(key) + ": expected a nonnegative integer");
  return static_cast<std::size_t>(d);
}

std::size_t Reader::count(const std::string& key, std::size_t fallback) {
  return has(key) ? count(key) : fallback;
}

std::uint64_t Reader::u64(const std::string& key, std::uint64_t fallback) {
  if (!has(key)) return fallback;
  const json& v = raw(key);
  const bool ok = v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
  if (!ok) throw ConfigError(where(key) + ": expected a nonnegative integer");
  return v.get<std::uint64_t>();
}

std::string Reader::text(const std::string& key) {
  const json& v = raw(key);
  if (!v.is_string()) throw ConfigError(where(key) + ": expected a string");
  return v.get<std::string>();
}

std::string Reader::text(const std::string& key, const std::string& fallback) {
  return has(key) ? text(key) : fallback;
}

bool Reader::flag(const std::string& key, bool fallback) {
  if (!has(key)) return fallback;
  const json& v = raw(key);
  if (!v.is_boolean()) throw ConfigError(where(key) + ": expected true or false");
  return v.get<bool>();
}

Reader Reader::child(const std::string& key) { return Reader(raw(key), where(key)); }

void Reader::finish() const {
  std::string unknown;
  for (const auto& [key, value] : j_->items())
    if (!used_.count(key)) unknown += (unknown.empty() ? "" : ", ") + where(key);
  if (!unknown.empty()) throw ConfigError("unknown configuration keys: " + unknown);
}

GridSpec parse_grid(const json& j, const std::string& path) {
  Reader r(j, path);
  GridSpec g;
  g.lo = r.number("lo", g.lo);
  g.hi = r.number("hi", g.hi);
  g.points = r.count("points", g.points);
  g.refine = r.count("refine", g.refine);
  r.finish();
  if (!(g.hi > g.lo) || g.points < 2) throw ConfigError(path + ": need hi > lo and points >= 2");
  return g;
}

Law parse_law(const json& j, const std::string& path) {
  Reader r(j, path);
  const std::string type = r.text("type");
  Law law = guarded(path, [&] {
    if (type == "dirac") return Law::dirac(r.number("value"));
    if (type == "atoms") return Law::atoms(numbers(r.raw("values"), r.where("values")),
                                           numbers(r.raw("weights"), r.where("weights")));
    if (type == "uniform") return Law::uniform(r.number("lo"), r.number("hi"));
    if (type == "power") return Law::power(r.number("lo"), r.number("hi"), r.number("gamma"));
    throw ConfigError(r.where("type") + ": unknown law '" + type + "'");
  });
  r.finish();
  return law;
}

VectorLaw parse_vector_law(const json& j, const std::string& path) {
  Reader r(j, path);
  const std::string type = r.text("type");
  VectorLaw law = guarded(path, [&] {
    if (type == "product") {
      const json& f = r.raw("factors");
      if (!f.is_array()) throw ConfigError(r.where("factors") + ": expected an array of laws");
      std::vector<Law> factors;
      for (std::size_t k = 0; k < f.size(); ++k)
        factors.push_back(parse_law(f[k], r.where("factors") + "[" + std::to_string(k) + "]"));
      return VectorLaw::product(std::move(factors));
    }
    if (type == "atoms") {
      const json& v = r.raw("values");
      if (!v.is_array()) throw ConfigError(r.where("values") + ": expected an array of vectors");
      std::vector<Vec> values;
      for (std::size_t k = 0; k < v.size(); ++k)
        values.push_back(Vec::from(numbers(v[k], r.where("values") + "[" + std::to_string(k) + "]")));
      return VectorLaw::atoms(std::move(values), numbers(r.raw("weights"), r.where("weights")));
    }
    throw ConfigError(r.where("type") + ": unknown vector law '" + type + "'");
  });
  r.finish();
  return law;
}

ScalarRate parse_rate(const json& j, const std::string& path) {
  Reader r(j, path);
  const std::string type = r.text("type");
  ScalarRate rate = guarded(path, [&] {
    if (type == "constant") return constant_rate(r.number("value"));
    if (type == "power") return power_rate(r.number("alpha"), r.number("beta"), r.number("p", 1.0));
    throw ConfigError(r.where("type") + ": unknown rate '" + type + "'");
  });
  r.finish();
  return rate;
}

PairRate parse_pair_rate(const json& j, const std::string& path) {
  Reader r(j, path);
  const std::string type = r.text("type");
  PairRate rate = guarded(path, [&] {
    if (type == "constant") {
      const double v = r.number("value");
      return power_rate2(v, 0, 1, 0, 1);
    }
    if (type == "power")
      return power_rate2(r.number("alpha"), r.number("beta"), r.number("p1", 1.0), r.number("gamma"),
                         r.number("p2", 1.0));
    throw ConfigError(r.where("type") + ": unknown pair rate '" + type + "'");
  });
  r.finish();
  return rate;
}

GrowthFunction parse_growth(const json& j, const std::string& path) {
  Reader r(j, path);
  const std::string type = r.text("type");
  GrowthFunction g = guarded(path, [&] {
    if (type == "constant") return GrowthFunction::constant(r.number("c"));
    if (type == "affine") return GrowthFunction::affine(r.number("c0"), r.number("c1"));
    throw ConfigError(r.where("type") + ": unknown growth function '" + type + "'");
  });
  r.finish();
  return g;
}

namespace {

struct Truncation {
  double value = 0;
  bool automatic = false;
};

Truncation read_truncation(Reader& r) {
  const json& v = r.raw("a");
  if (v.is_string()) {
    if (v.get<std::string>() != "auto") throw ConfigError(r.where("a") + ": expected a number or \"auto\"");
    return {0, true};
  }
  const double a = as_number(v, r.where("a"));
  if (!(a > 0)) throw ConfigError(r.where("a") + ": must be > 0");
  return {a, false};
}

std::vector<CycleStage> read_stages(Reader& r) {
  const json& s = r.raw("stages");
  if (!s.is_array() || s.empty()) throw ConfigError(r.where("stages") + ": expected a nonempty array");
  std::vector<CycleStage> stages;
  for (std::size_t k = 0; k < s.size(); ++k) {
    Reader st(s[k], r.where("stages") + "[" + std::to_string(k) + "]");
    stages.push_back({parse_growth(st.raw("g"), st.where("g")), parse_rate(st.raw("d"), st.where("d"))});
    st.finish();
  }
  return stages;
}

// Parses the model; `a` is either given or computed by suggest_a.
ModelSpec build_model(const json& j, const std::string& path, const std::optional<GridSpec>& grid,
                      bool ignore_a) {
  Reader r(j, path);
  struct {
    std::string name;
    double a = 0;
    bool a_auto = false;
    std::optional<AdmissibilityReport> certificate;
  } spec;
  std::optional<AnyModel> model;
  spec.name = r.text("name");
  const ResolvedGrids grids = resolve_grids(r, grid);
  const auto truncation = [&](auto suggest) {
    if (ignore_a) {
      if (r.has("a")) r.raw("a");
      return suggest();
    }
    const Truncation t = read_truncation(r);
    spec.a_auto = t.automatic;
    return t.automatic ? suggest() : t.value;
  };
  const auto certify = [&](const auto& model, const GridSpec& g) {
    spec.certificate = validate_truncation(model, g);
  };

  guarded(path, [&] {
    if (spec.name == "renewal") {
      auto g = parse_growth(r.raw("g"), r.where("g"));
      auto d = parse_rate(r.raw("d"), r.where("d"));
      Law b = parse_law(r.raw("b"), r.where("b"));
      require_nonnegative_support(b, r.where("b"));
      spec.a = truncation([&] { return suggest_a(d, grids.scalar); });
      Renewal m(std::move(g), std::move(d), BirthLaw(std::move(b)), spec.a);
      certify(m, grids.scalar);
      model.emplace(std::move(m));
    } else if (spec.name == "renewal_system") {
      auto stages = read_stages(r);
      spec.a = truncation([&] { return suggest_a(stages, grids.scalar); });
      RenewalSystem m(std::move(stages), spec.a);
      certify(m, grids.scalar);
      model.emplace(std::move(m));
    } else if (spec.name == "space_age") {
      auto d = parse_rate(r.raw("d"), r.where("d"));
      SpatialNoise k(parse_vector_law(r.raw("noise"), r.where("noise")), r.number("eps"));
      spec.a = truncation([&] { return suggest_a(d, grids.scalar); });
      SpaceAge m(std::move(d), std::move(k), spec.a);
      certify(m, grids.scalar);
      model.emplace(std::move(m));
    } else if (spec.name == "two_time") {
      auto d = parse_pair_rate(r.raw("d"), r.where("d"));
      spec.a = truncation([&] { return suggest_a(d, grids.pair, grids.pair, two_time_metric()); });
      TwoTime m(std::move(d), spec.a);
      certify(m, grids.pair);
      model.emplace(std::move(m));
    } else if (spec.name == "growth_fragmentation") {
      auto g = parse_growth(r.raw("g"), r.where("g"));
      auto d = parse_rate(r.raw("d"), r.where("d"));
      FragmentRatio beta(parse_law(r.raw("beta"), r.where("beta")));
      spec.a = truncation([&] { return suggest_a(d, grids.scalar, 1.0 - beta.mean_ratio()); });
      GrowthFragmentation m(std::move(g), std::move(d), std::move(beta), spec.a);
      certify(m, grids.scalar);
      model.emplace(std::move(m));
    } else if (spec.name == "age_size") {
      auto g = parse_growth(r.raw("g"), r.where("g"));
      auto d = parse_pair_rate(r.raw("d"), r.where("d"));
      FragmentRatio beta(parse_law(r.raw("beta"), r.where("beta")));
      spec.a = truncation([&] {
        return suggest_a(d, grids.pair, grids.pair, age_size_metric(), 1.0 - beta.mean_ratio());
      });
      AgeSizeModel m(std::move(g), std::move(d), std::move(beta), spec.a);
      certify(m, grids.pair);
      model.emplace(std::move(m));
    } else if (spec.name == "sexual") {
      const std::size_t dim = r.count("dim");
      Law h = parse_law(r.raw("h"), r.where("h"));
      model.emplace(Sexual(dim, MatingMix(std::move(h), r.number("p"))));
    } else {
      throw ConfigError(r.where("name") + ": unknown model '" + spec.name + "'");
    }
    return 0;
  });
  r.finish();
  return ModelSpec{spec.name, std::move(*model), spec.a, spec.a_auto, spec.certificate};
}

}  // namespace

ModelSpec parse_model(const json& j, const std::string& path, const std::optional<GridSpec>& grid) {
  return build_model(j, path, grid, false);
}

double suggest_truncation(const json& j, const std::string& path,
                          const std::optional<GridSpec>& grid) {
  return build_model(j, path, grid, true).a;
}

Sampler<Age> parse_initial_age(const json& j, const std::string& path) {
  Law law = parse_law(j, path);
  require_nonnegative_support(law, path);
  return [law](Stream& rng) { return Age{law.sample(rng)}; };
}

Sampler<AgeState> parse_initial_age_state(const json& j, const std::string& path, int torus_size) {
  Reader r(j, path);
  Law x = parse_law(r.raw("x"), r.where("x"));
  require_nonnegative_support(x, r.where("x"));
  const std::size_t i = r.count("i");
  r.finish();
  if (i < 1 || static_cast<int>(i) > torus_size)
    throw ConfigError(r.where("i") + ": state must lie in 1.." + std::to_string(torus_size));
  const int state = static_cast<int>(i);
  return [x, state](Stream& rng) { return AgeState{x.sample(rng), state}; };
}

Sampler<AgePosition> parse_initial_age_position(const json& j, const std::string& path,
                                                std::size_t dim) {
  Reader r(j, path);
  Law x = parse_law(r.raw("x"), r.where("x"));
  require_nonnegative_support(x, r.where("x"));
  VectorLaw z = parse_vector_law(r.raw("z"), r.where("z"));
  r.finish();
  if (z.dim() != dim) throw ConfigError(r.where("z") + ": dimension must match the noise");
  return [x, z](Stream& rng) {
    const double age = x.sample(rng);
    return AgePosition{age, z.sample(rng)};
  };
}

Sampler<TimePair> parse_initial_time_pair(const json& j, const std::string& path) {
  Reader r(j, path);
  Law x1 = parse_law(r.raw("x1"), r.where("x1"));
  Law gap = parse_law(r.raw("gap"), r.where("gap"));
  r.finish();
  require_nonnegative_support(x1, r.where("x1"));
  require_nonnegative_support(gap, r.where("gap"));
  return [x1, gap, path](Stream& rng) {
    const double a = x1.sample(rng);
    const TimePair s{a, a + gap.sample(rng)};
    if (!in_space(s)) throw ConfigError(path + ": sampled time pair is not in the open wedge");
    return s;
  };
}

Sampler<AgeSize> parse_initial_age_size(const json& j, const std::string& path) {
  Reader r(j, path);
  Law x = parse_law(r.raw("x"), r.where("x"));
  Law z = parse_law(r.raw("z"), r.where("z"));
  r.finish();
  require_nonnegative_support(x, r.where("x"));
  require_nonnegative_support(z, r.where("z"));
  return [x, z](Stream& rng) {
    const double age = x.sample(rng);
    return AgeSize{age, z.sample(rng)};
  };
}

Sampler<Trait> parse_initial_trait(const json& j, const std::string& path, std::size_t dim) {
  VectorLaw law = parse_vector_law(j, path);
  if (law.dim() != dim) throw ConfigError(path + ": dimension must match the model");
  return [law](Stream& rng) { return Trait{law.sample(rng)}; };
}

json load_json_file(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open config file " + file);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(file + ": " + e.what());
  }
}

Space space_from_string(const std::string& name) {
  for (Space s : {Space::age, Space::age_state, Space::age_position, Space::time_pair,
                  Space::age_size, Space::trait})
    if (to_string(s) == name) return s;
  throw ConfigError("unknown state space '" + name + "'");
}

}  // namespace popot::cli
