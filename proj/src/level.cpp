#include "floerlab/level.hpp"

#include <sstream>

#include "floerlab/errors.hpp"

namespace floerlab {

Level::Level(double s) : s_(s) {
  if (!std::isfinite(s) || !admissible(s)) {
    std::ostringstream os;
    os << "level " << s << " outside {-1} U [0,2]";
    throw LevelError(os.str());
  }
}

std::string Level::str() const {
  std::ostringstream os;
  os << s_;
  return os.str();
}

}  // namespace floerlab
