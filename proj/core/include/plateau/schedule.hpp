#pragma once

#include <string>
#include <vector>

#include "plateau/complex.hpp"

namespace plateau {

// q(k) is the least integer with 2^-q(k) <= (1 - mu)(1/2 - sum_{i<k} 2^-q(i)), computed exactly.
std::vector<int> q_schedule(double mu, int count);

// Exact checks in rational arithmetic; R_k = 1/2 - sum_{i<k} 2^-q(i).
struct QScheduleCheck {
  bool at_least_two = true;
  bool non_decreasing = true;
  bool strictly_increasing = true;
  bool lower_envelope = true;  // R_k >= mu^k / 2
  bool term_bound = true;      // 2^-q(k) >= (1 - mu) mu^k / 4
  bool sandwich = true;        // (1 - mu)/2 < 2^-q(k) / R_k <= 1 - mu
  bool upper_envelope = true;  // R_k <= ((1 + mu)/2)^k / 2, so the series sums to 1/2
  bool remainder_positive = true;
  double final_remainder = 0.0;
  std::string final_remainder_exact;
  std::string first_failure;

  bool ok() const {
    return at_least_two && non_decreasing && lower_envelope && term_bound && sandwich && upper_envelope &&
           remainder_positive;
  }
};
QScheduleCheck check_q_schedule(double mu, const std::vector<int>& q);

enum class NestedDirection { Expanding, Shrinking };

// Expanding: |K_k| = (1/2 + sum_{i<k} 2^-q(i)) [-1,1]^n, maximal cells of the layered grids.
// Shrinking: |K_k| = (1 - sum_{i<k} 2^-q(i)) [-1,1]^n at side 2^-q(k).
// Cells lying on the outer boundary are excluded.
std::vector<Complex> nested_complexes(NestedDirection dir, const std::vector<int>& q, int n, int count);

// Radius of the k-th cube in either direction.
double nested_radius(NestedDirection dir, const std::vector<int>& q, int k);

}  // namespace plateau
