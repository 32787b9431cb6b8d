#include "gts/rng.hpp"

#include <sstream>

#include "gts/error.hpp"

namespace gts {

std::string serialize_rng(const Rng& rng) {
  std::ostringstream os;
  os << rng;
  return os.str();
}

Rng deserialize_rng(const std::string& text) {
  std::istringstream is(text);
  Rng rng;
  is >> rng;
  if (is.fail()) throw InputError("malformed rng state");
  return rng;
}

}  // namespace gts
