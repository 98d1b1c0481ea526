#pragma once

#include <cstddef>
#include <cstdint>

#include "jstego/stego.hpp"

namespace jstego {

struct RunConfig {
  double eps = 1e-7;  // MVEE tolerance
  double gap_tol = 0.1;
  double axis_ratio = 2.0;
  double payload_min = 1e-6;
  std::size_t decoys = 8;
  std::uint64_t seed = 0;

  /// Throws InvalidArgument unless every tolerance is positive, eps < 1
  /// and axis_ratio > 1.
  void validate() const;

  EmbedParams embed_params(Eigen::Index dim = 0) const;
  ExtractParams extract_params() const;
};

/// Volume-ratio tolerance eta implied by eps: 1 + eta = (1 + eps)^(n/2).
double eta_from_eps(double eps, Eigen::Index n);

}  // namespace jstego
