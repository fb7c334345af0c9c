#pragma once

#include <string>

namespace shapehit::acceptance {

struct Outcome {
  bool pass = false;
  std::string detail;
};

Outcome kwise_exactness(int jobs);
Outcome perfect_hash_completeness(int jobs);
Outcome fractional_hash_bound(int jobs);
Outcome expander_walk_lemma(int jobs);
Outcome rectangle_buckets(int jobs);
Outcome strong_rect_regression(int jobs);
Outcome shape_hitting_end_to_end(int jobs);
Outcome interpolation_lemma(int jobs);
Outcome oracle_consistency(int jobs);

}  // namespace shapehit::acceptance
