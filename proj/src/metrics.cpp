#include "lyricgenre/metrics.hpp"

#include <string>

#include "lyricgenre/error.hpp"

namespace lyricgenre {

Confusion confusion(std::span<const int> truth, std::span<const int> predicted) {
  if (truth.size() != predicted.size()) {
    throw DataError("label vectors differ in length: " + std::to_string(truth.size()) + " vs " +
                    std::to_string(predicted.size()));
  }
  Confusion c;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const int t = truth[i], p = predicted[i];
    if ((t != 1 && t != -1) || (p != 1 && p != -1)) throw DataError("labels must be +1 or -1");
    if (t == 1) {
      ++(p == 1 ? c.tp : c.fn);
    } else {
      ++(p == 1 ? c.fp : c.tn);
    }
  }
  return c;
}

double f1_score(std::span<const int> truth, std::span<const int> predicted) {
  const Confusion c = confusion(truth, predicted);
  const std::size_t denom = 2 * c.tp + c.fp + c.fn;
  return denom == 0 ? 0.0 : static_cast<double>(2 * c.tp) / static_cast<double>(denom);
}

}  // namespace lyricgenre
