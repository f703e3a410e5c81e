#pragma once

#include <cstddef>
#include <vector>

namespace hcert {

/// Uniform sample points on [0, t_max]; stands in for "for all t >= 0".
struct ScanGrid {
  double t_max = 100.0;
  std::size_t n_points = 1001;

  /// Throws InputError unless t_max > 0 and n_points >= 2.
  void validate() const;
  double at(std::size_t i) const;
  std::vector<double> times() const;

  bool operator==(const ScanGrid&) const = default;
};

}  // namespace hcert
