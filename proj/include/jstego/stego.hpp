#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "jstego/error.hpp"
#include "jstego/linalg.hpp"
#include "jstego/mvee.hpp"
#include "jstego/rng.hpp"

namespace jstego {

/// Largest index (and orthant code) kept exact in a double coordinate.
inline constexpr std::uint64_t kMaxIndex = std::uint64_t{1} << 40;

struct PayloadMessage {
  std::uint64_t index = 0;  // >= 1
  Vector payload;           // length n - 2
};

// w = (i, j, v_1, ..., v_{n-2}) with orthant code j = 1 + sum_k bit_k 2^k,
// bit_k = 1 iff v_{k+1} < 0.
struct EncodedVector {
  Vector w;
  std::uint64_t orthant = 1;
};

struct Polytope {
  std::vector<Vector> vertices;

  Eigen::Index dim() const { return vertices.empty() ? 0 : vertices.front().size(); }
  PointSet points() const { return PointSet::from_points(vertices); }

  friend bool operator==(const Polytope& a, const Polytope& b);
};

struct StegoPlan {
  Eigen::Index dim = 0;
  std::vector<Polytope> polytopes;
  /// Carriers have longest semi-axis >= 2 tau, decoys < tau.
  double carrier_threshold = 0.0;

  friend bool operator==(const StegoPlan& a, const StegoPlan& b);
};

struct Rejection {
  std::size_t position = 0;
  ErrorCode reason = ErrorCode::NoUniqueAxis;
  std::string detail;
};

struct ExtractionResult {
  std::vector<PayloadMessage> messages;  // sorted by index
  std::vector<Rejection> rejected;       // sorted by position
};

struct EmbedParams {
  Eigen::Index dim = 0;  // 0: payload length + 2
  double axis_ratio = 2.0;
  double payload_min = 1e-6;
  double gap_tol = 0.1;
  /// Camouflage points added strictly inside each polytope's ellipsoid.
  std::size_t extra_points = 4;
};

struct ExtractParams {
  /// Tolerance for the carrier/decoy decision.
  double eps = 1e-7;
  double gap_tol = 0.1;
  /// Carriers are re-solved to this tolerance before decoding. The payload
  /// error is roughly eps * |w| / |v|, so a large index next to a small
  /// payload needs a tighter solve than classification does. Values >= eps
  /// skip the second solve.
  double decode_eps = 1e-12;
  /// Iteration cap for the decoding solve; on exhaustion the classification
  /// solution is decoded instead.
  std::size_t decode_max_iterations = 20000;
  /// Seed for the per-polytope solver streams; results do not depend on it
  /// beyond solver tolerance.
  std::uint64_t seed = 0;
  /// 0 selects std::thread::hardware_concurrency().
  unsigned threads = 0;
};

/// Orthant code of a payload: 1 + sum of 2^k over negative coordinates k.
std::uint64_t orthant_code(const Vector& payload);

EncodedVector encode_payload(const PayloadMessage& msg, Eigen::Index n,
                             double payload_min = 1e-6);

/// Accepts w or -w; the sign is chosen so the index coordinate is positive.
PayloadMessage decode_payload(const Vector& w);

/// Origin-centred ellipsoid whose unique longest axis has endpoints +-w:
/// Q = R diag(1/|w|^2, a, ..., a) R^T with a = rho^2/|w|^2 and R the
/// Householder reflection taking e_1 to w/|w|.
Ellipsoid make_axis_ellipsoid(const Vector& w, double axis_ratio = 2.0);

/// Polytope whose MVEE is `e`: the 2n points c +- Q^{-1/2} e_i plus `extra`
/// points drawn strictly inside (radius factor at most 0.9), shuffled.
Polytope make_cover_polytope(const Ellipsoid& e, std::size_t extra, Rng& rng);

StegoPlan embed(const std::vector<PayloadMessage>& messages, std::size_t decoy_count,
                const EmbedParams& params, Rng& rng);

/// Recovers every carrier in `plan`. Per-polytope failures land in
/// `rejected`; nothing is thrown for malformed carriers or decoys.
///
/// Note that the channel is not rotation invariant: applying an orthogonal
/// map R to every vertex moves each recovered axis to R w, which decodes
/// to the original message only when R is the identity.
ExtractionResult extract(const StegoPlan& plan, const ExtractParams& params = {});

}  // namespace jstego
