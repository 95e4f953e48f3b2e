#include "popot/state.hpp"

#include <cmath>

namespace popot {

namespace {

bool finite_vec(const Vec& v) {
  if (v.dim() == 0) return false;
  for (std::size_t k = 0; k < v.dim(); ++k)
    if (!std::isfinite(v[k])) return false;
  return true;
}

bool nonneg(double x) { return std::isfinite(x) && x >= 0; }

std::vector<double> with_vec(double head, const Vec& v) {
  std::vector<double> out{head};
  for (std::size_t k = 0; k < v.dim(); ++k) out.push_back(v[k]);
  return out;
}

}  // namespace

double dot(const Vec& a, const Vec& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("dimension mismatch");
  double s = 0;
  for (std::size_t k = 0; k < a.dim(); ++k) s += a[k] * b[k];
  return s;
}

double norm(const Vec& v) {
  double s = 0;
  for (std::size_t k = 0; k < v.dim(); ++k) s += v[k] * v[k];
  return std::sqrt(s);
}

std::string_view to_string(Space space) {
  switch (space) {
    case Space::age: return "age";
    case Space::age_state: return "age_state";
    case Space::age_position: return "age_position";
    case Space::time_pair: return "time_pair";
    case Space::age_size: return "age_size";
    case Space::trait: return "trait";
  }
  return "unknown";
}

Space space_from_string(std::string_view name) {
  for (Space s : {Space::age, Space::age_state, Space::age_position, Space::time_pair,
                  Space::age_size, Space::trait})
    if (to_string(s) == name) return s;
  throw std::invalid_argument("unknown state space: " + std::string(name));
}

Space space_of(const StatePoint& p) {
  return std::visit([](const auto& s) { return space_of<std::decay_t<decltype(s)>>(); }, p);
}

bool in_space(const Age& s) { return nonneg(s.x); }

bool in_space(const AgeState& s, int torus_size) {
  return nonneg(s.x) && s.i >= 1 && (torus_size <= 0 || s.i <= torus_size);
}

bool in_space(const AgePosition& s) { return nonneg(s.x) && finite_vec(s.z); }

bool in_space(const TimePair& s) { return nonneg(s.x1) && std::isfinite(s.x2) && s.x2 > s.x1; }

bool in_space(const AgeSize& s) { return nonneg(s.x) && nonneg(s.z); }

bool in_space(const Trait& s) { return finite_vec(s.x); }

bool in_space(const StatePoint& p) {
  return std::visit([](const auto& s) { return in_space(s); }, p);
}

std::vector<double> coordinates(const Age& s) { return {s.x}; }
std::vector<double> coordinates(const AgeState& s) { return {s.x, static_cast<double>(s.i)}; }
std::vector<double> coordinates(const AgePosition& s) { return with_vec(s.x, s.z); }
std::vector<double> coordinates(const TimePair& s) { return {s.x1, s.x2}; }
std::vector<double> coordinates(const AgeSize& s) { return {s.x, s.z}; }
std::vector<double> coordinates(const Trait& s) {
  std::vector<double> out(s.x.dim());
  for (std::size_t k = 0; k < s.x.dim(); ++k) out[k] = s.x[k];
  return out;
}
std::vector<double> coordinates(const StatePoint& p) {
  return std::visit([](const auto& s) { return coordinates(s); }, p);
}

StatePoint state_from_coordinates(Space space, const std::vector<double>& c) {
  const auto need = [&](std::size_t n) {
    if (c.size() != n)
      throw std::invalid_argument(std::string(to_string(space)) + " needs " + std::to_string(n) +
                                  " coordinates, got " + std::to_string(c.size()));
  };
  switch (space) {
    case Space::age:
      need(1);
      return Age{c[0]};
    case Space::age_state: {
      need(2);
      const double i = c[1];
      if (i != std::floor(i)) throw std::invalid_argument("torus state must be an integer");
      return AgeState{c[0], static_cast<int>(i)};
    }
    case Space::age_position:
      if (c.size() < 2) throw std::invalid_argument("age_position needs at least 2 coordinates");
      return AgePosition{c[0], Vec::from(std::vector<double>(c.begin() + 1, c.end()))};
    case Space::time_pair:
      need(2);
      return TimePair{c[0], c[1]};
    case Space::age_size:
      need(2);
      return AgeSize{c[0], c[1]};
    case Space::trait:
      return Trait{Vec::from(c)};
  }
  throw std::invalid_argument("unknown state space");
}

}  // namespace popot
