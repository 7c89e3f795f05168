#include "rcpd/manifold.hpp"

#include "rcpd/errors.hpp"

#include <cmath>
#include <sstream>

namespace rcpd {

std::string to_string(ManifoldKind kind) {
  switch (kind) {
    case ManifoldKind::spd:
      return "spd";
    case ManifoldKind::grassmann:
      return "grassmann";
  }
  return "unknown";
}

LogResult Manifold::log_with_distance(const Point& x, const Point& y) const {
  Tangent v = log(x, y);
  return {std::move(v), distance(x, y)};
}

bool Manifold::is_valid(const Point& x) const {
  try {
    validate(x);
    return true;
  } catch (const ValidationError&) {
    return false;
  }
}

double Manifold::norm(const Point& x, const Tangent& v) const {
  return std::sqrt(std::max(0.0, inner(x, v, v)));
}

std::string Manifold::describe() const {
  std::ostringstream os;
  os << to_string(kind()) << "(" << rows();
  if (kind() == ManifoldKind::grassmann) os << ", " << cols();
  os << ")";
  return os.str();
}

}  // namespace rcpd
