#include "jstego/config.hpp"

#include <cmath>

namespace jstego {

void RunConfig::validate() const {
  if (!(eps > 0.0 && eps < 1.0)) throw Error(ErrorCode::InvalidArgument, "eps must lie in (0, 1)");
  if (!(gap_tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "gap tolerance must be positive");
  if (!(axis_ratio > 1.0)) throw Error(ErrorCode::InvalidArgument, "axis ratio must exceed 1");
  if (!(payload_min > 0.0))
    throw Error(ErrorCode::InvalidArgument, "payload minimum must be positive");
  // The carrier gap rho^2 must clear the rejection threshold.
  if (!(axis_ratio * axis_ratio > 1.0 + gap_tol))
    throw Error(ErrorCode::InvalidArgument, "axis ratio squared must exceed 1 + gap tolerance");
}

EmbedParams RunConfig::embed_params(Eigen::Index dim) const {
  EmbedParams p;
  p.dim = dim;
  p.axis_ratio = axis_ratio;
  p.payload_min = payload_min;
  p.gap_tol = gap_tol;
  return p;
}

ExtractParams RunConfig::extract_params() const {
  ExtractParams p;
  p.eps = eps;
  p.gap_tol = gap_tol;
  p.seed = seed;
  return p;
}

double eta_from_eps(double eps, Eigen::Index n) {
  return std::pow(1.0 + eps, 0.5 * static_cast<double>(n)) - 1.0;
}

}  // namespace jstego
