#pragma once

#include <cstddef>
#include <span>

namespace lyricgenre {

struct Confusion {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;
};

/// Labels are +1 / -1. Throws DataError on length mismatch or other values.
Confusion confusion(std::span<const int> truth, std::span<const int> predicted);

/// F1 of the positive class, 2TP / (2TP + FP + FN); 0 when the denominator is 0.
double f1_score(std::span<const int> truth, std::span<const int> predicted);

}  // namespace lyricgenre
