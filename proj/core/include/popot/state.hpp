#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

namespace popot {

/// Fixed-capacity real vector used for positions and traits. Stored inline so
/// that every state type is trivially copyable.
class Vec {
 public:
  static constexpr std::size_t kCapacity = 3;

  Vec() = default;
  explicit Vec(std::size_t dim) : dim_(check_dim(dim)) {}
  Vec(std::initializer_list<double> values) : dim_(check_dim(values.size())) {
    std::size_t k = 0;
    for (double v : values) c_[k++] = v;
  }
  static Vec from(const std::vector<double>& values) {
    Vec v(values.size());
    for (std::size_t k = 0; k < values.size(); ++k) v.c_[k] = values[k];
    return v;
  }

  std::size_t dim() const { return dim_; }
  double operator[](std::size_t k) const { return c_[k]; }
  double& operator[](std::size_t k) { return c_[k]; }

  friend Vec operator+(Vec a, const Vec& b) {
    for (std::size_t k = 0; k < a.dim_; ++k) a.c_[k] += b.c_[k];
    return a;
  }
  friend Vec operator-(Vec a, const Vec& b) {
    for (std::size_t k = 0; k < a.dim_; ++k) a.c_[k] -= b.c_[k];
    return a;
  }
  friend Vec operator*(double s, Vec a) {
    for (std::size_t k = 0; k < a.dim_; ++k) a.c_[k] *= s;
    return a;
  }
  friend bool operator==(const Vec& a, const Vec& b) {
    if (a.dim_ != b.dim_) return false;
    for (std::size_t k = 0; k < a.dim_; ++k)
      if (a.c_[k] != b.c_[k]) return false;
    return true;
  }

 private:
  static std::size_t check_dim(std::size_t dim) {
    if (dim == 0 || dim > kCapacity)
      throw std::invalid_argument("vector dimension must lie in [1, " +
                                  std::to_string(kCapacity) + "]");
    return dim;
  }

  std::array<double, kCapacity> c_{};
  std::size_t dim_ = 0;
};

double norm(const Vec& v);
double dot(const Vec& a, const Vec& b);

// State-space points, one type per model family.

struct Age {
  double x = 0;
  friend bool operator==(const Age&, const Age&) = default;
};

/// Age plus a discrete state on the torus {1, ..., I}.
struct AgeState {
  double x = 0;
  int i = 1;
  friend bool operator==(const AgeState&, const AgeState&) = default;
};

struct AgePosition {
  double x = 0;
  Vec z;
  friend bool operator==(const AgePosition&, const AgePosition&) = default;
};

/// Ages of the two most recent events; lives in the open wedge x2 > x1 >= 0.
struct TimePair {
  double x1 = 0;
  double x2 = 0;
  friend bool operator==(const TimePair&, const TimePair&) = default;
};

struct AgeSize {
  double x = 0;
  double z = 0;
  friend bool operator==(const AgeSize&, const AgeSize&) = default;
};

struct Trait {
  Vec x;
  friend bool operator==(const Trait&, const Trait&) = default;
};

using StatePoint = std::variant<Age, AgeState, AgePosition, TimePair, AgeSize, Trait>;

enum class Space { age, age_state, age_position, time_pair, age_size, trait };

std::string_view to_string(Space space);
Space space_from_string(std::string_view name);

template <class S>
constexpr Space space_of();
template <>
constexpr Space space_of<Age>() { return Space::age; }
template <>
constexpr Space space_of<AgeState>() { return Space::age_state; }
template <>
constexpr Space space_of<AgePosition>() { return Space::age_position; }
template <>
constexpr Space space_of<TimePair>() { return Space::time_pair; }
template <>
constexpr Space space_of<AgeSize>() { return Space::age_size; }
template <>
constexpr Space space_of<Trait>() { return Space::trait; }

Space space_of(const StatePoint& p);

/// Whether the point lies in its state space. `torus_size` bounds AgeState
/// indices when positive.
bool in_space(const Age& s);
bool in_space(const AgeState& s, int torus_size = 0);
bool in_space(const AgePosition& s);
bool in_space(const TimePair& s);
bool in_space(const AgeSize& s);
bool in_space(const Trait& s);
bool in_space(const StatePoint& p);

/// Throws std::invalid_argument naming the violated constraint.
template <class S>
void require_in_space(const S& s) {
  if (!in_space(s))
    throw std::invalid_argument("state outside its space (" + std::string(to_string(space_of<S>())) +
                                ")");
}

/// Flat coordinate view, used for serialization, statistics and ordering.
std::vector<double> coordinates(const Age& s);
std::vector<double> coordinates(const AgeState& s);
std::vector<double> coordinates(const AgePosition& s);
std::vector<double> coordinates(const TimePair& s);
std::vector<double> coordinates(const AgeSize& s);
std::vector<double> coordinates(const Trait& s);
std::vector<double> coordinates(const StatePoint& p);

/// Inverse of coordinates(). Vector dimension for position and trait spaces
/// is inferred from the coordinate count.
StatePoint state_from_coordinates(Space space, const std::vector<double>& coords);

/// Coordinates in (i, x) order for AgeState so that lexicographic order
/// groups by torus state first; identical to coordinates() otherwise.
template <class S>
std::vector<double> ordering_key(const S& s) {
  if constexpr (std::is_same_v<S, AgeState>) {
    return {static_cast<double>(s.i), s.x};
  } else {
    return coordinates(s);
  }
}

}  // namespace popot
