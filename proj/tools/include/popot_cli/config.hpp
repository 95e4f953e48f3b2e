#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>

#include <json.hpp>

#include "popot/admissibility.hpp"
#include "popot/functions.hpp"
#include "popot/law.hpp"
#include "popot/models.hpp"
#include "popot/rng.hpp"

namespace popot::cli {

using json = nlohmann::json;

/// Bad or unknown configuration; maps to exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Typed access to one JSON object. Every key read is recorded so that
/// finish() can reject the ones nobody asked for.
class Reader {
 public:
  Reader(const json& j, std::string path);

  bool has(const std::string& key) const;
  const json& raw(const std::string& key);
  double number(const std::string& key);
  double number(const std::string& key, double fallback);
  std::size_t count(const std::string& key);
  std::size_t count(const std::string& key, std::size_t fallback);
  std::uint64_t u64(const std::string& key, std::uint64_t fallback);
  std::string text(const std::string& key);
  std::string text(const std::string& key, const std::string& fallback);
  bool flag(const std::string& key, bool fallback);
  Reader child(const std::string& key);
  std::string where(const std::string& key) const;
  const std::string& path() const { return path_; }

  /// Throws ConfigError listing unread keys.
  void finish() const;

 private:
  const json* j_;
  std::string path_;
  mutable std::set<std::string> used_;
};

GridSpec parse_grid(const json& j, const std::string& path);
Law parse_law(const json& j, const std::string& path);
VectorLaw parse_vector_law(const json& j, const std::string& path);
ScalarRate parse_rate(const json& j, const std::string& path);
PairRate parse_pair_rate(const json& j, const std::string& path);
GrowthFunction parse_growth(const json& j, const std::string& path);

using AnyModel =
    std::variant<Renewal, RenewalSystem, SpaceAge, TwoTime, GrowthFragmentation, AgeSizeModel, Sexual>;

/// Model with its truncation certificate.
struct ModelSpec {
  std::string name;
  AnyModel model;
  /// Truncation level; 0 for the sexual model (power cost, no truncation).
  double a = 0;
  bool a_auto = false;
  /// Empty for the sexual model.
  std::optional<AdmissibilityReport> certificate;
};

/// Builds the model named by "name"; "a" may be a number or "auto". The
/// truncation is always validated, on the model's own "grid" if present,
/// else on `grid`, else on [0, 10] with 2001 points (201 for two-coordinate
/// rates).
ModelSpec parse_model(const json& j, const std::string& path,
                      const std::optional<GridSpec>& grid = std::nullopt);

/// Suggested truncation for a model description (its "a" is ignored).
double suggest_truncation(const json& j, const std::string& path,
                          const std::optional<GridSpec>& grid = std::nullopt);

template <class S>
using Sampler = std::function<S(Stream&)>;

/// Initial law for the state type of each model.
Sampler<Age> parse_initial_age(const json& j, const std::string& path);
Sampler<AgeState> parse_initial_age_state(const json& j, const std::string& path, int torus_size);
Sampler<AgePosition> parse_initial_age_position(const json& j, const std::string& path,
                                                std::size_t dim);
Sampler<TimePair> parse_initial_time_pair(const json& j, const std::string& path);
Sampler<AgeSize> parse_initial_age_size(const json& j, const std::string& path);
Sampler<Trait> parse_initial_trait(const json& j, const std::string& path, std::size_t dim);

json load_json_file(const std::string& file);

Space space_from_string(const std::string& name);

}  // namespace popot::cli
