#include "jstego/stego.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <thread>

namespace jstego {

bool operator==(const Polytope& a, const Polytope& b) {
  if (a.vertices.size() != b.vertices.size()) return false;
  for (std::size_t i = 0; i < a.vertices.size(); ++i) {
    if (a.vertices[i].size() != b.vertices[i].size()) return false;
    if (a.vertices[i] != b.vertices[i]) return false;
  }
  return true;
}

bool operator==(const StegoPlan& a, const StegoPlan& b) {
  return a.dim == b.dim && a.carrier_threshold == b.carrier_threshold &&
         a.polytopes == b.polytopes;
}

// ---------------------------------------------------------------------------
// Payload coding

std::uint64_t orthant_code(const Vector& payload) {
  std::uint64_t code = 1;
  for (Eigen::Index k = 0; k < payload.size(); ++k)
    if (payload[k] < 0.0) code += std::uint64_t{1} << k;
  return code;
}

EncodedVector encode_payload(const PayloadMessage& msg, Eigen::Index n, double payload_min) {
  if (n < 3) throw Error(ErrorCode::DimensionMismatch, "dimension must be at least 3");
  if (n - 2 > 40)
    throw Error(ErrorCode::DimensionMismatch, "orthant code needs n - 2 <= 40 to stay exact");
  if (msg.payload.size() != n - 2)
    throw Error(ErrorCode::DimensionMismatch,
                "payload has " + std::to_string(msg.payload.size()) + " coordinates, expected " +
                    std::to_string(n - 2));
  if (msg.index < 1 || msg.index > kMaxIndex)
    throw Error(ErrorCode::EmbedRejected, "index " + std::to_string(msg.index) + " out of range");
  for (Eigen::Index k = 0; k < msg.payload.size(); ++k) {
    const double v = msg.payload[k];
    if (!std::isfinite(v) || std::abs(v) < payload_min)
      throw Error(ErrorCode::EmbedRejected,
                  "payload coordinate " + std::to_string(k + 1) + " has magnitude below " +
                      std::to_string(payload_min));
  }
  EncodedVector out;
  out.orthant = orthant_code(msg.payload);
  out.w.resize(n);
  out.w[0] = static_cast<double>(msg.index);
  out.w[1] = static_cast<double>(out.orthant);
  out.w.tail(n - 2) = msg.payload;
  return out;
}

PayloadMessage decode_payload(const Vector& input) {
  if (input.size() < 3) throw Error(ErrorCode::DimensionMismatch, "encoded vector too short");
  const Vector w = input[0] < 0.0 ? Vector(-input) : input;

  const double index = std::round(w[0]);
  if (!(index >= 1.0) || std::abs(w[0] - index) > 0.25 ||
      index > static_cast<double>(kMaxIndex))
    throw Error(ErrorCode::IndexInvalid, "index coordinate " + std::to_string(w[0]));

  PayloadMessage msg;
  msg.index = static_cast<std::uint64_t>(index);
  msg.payload = w.tail(w.size() - 2);

  const double code = std::round(w[1]);
  if (std::abs(w[1] - code) > 0.25 || code != static_cast<double>(orthant_code(msg.payload)))
    throw Error(ErrorCode::ChecksumMismatch,
                "orthant code " + std::to_string(w[1]) + " disagrees with payload signs");
  return msg;
}

// ---------------------------------------------------------------------------
// Geometry

Ellipsoid make_axis_ellipsoid(const Vector& w, double axis_ratio) {
  const double norm = w.norm();
  if (!(norm > 0.0)) throw Error(ErrorCode::ZeroVector, "axis vector is zero");
  if (!(axis_ratio > 1.0)) throw Error(ErrorCode::InvalidArgument, "axis ratio must exceed 1");
  const Eigen::Index n = w.size();

  Vector diag = Vector::Constant(n, axis_ratio * axis_ratio / (norm * norm));
  diag[0] = 1.0 / (norm * norm);

  // Householder reflection H = I - 2 u u^T / u^T u with u = e_1 - w/|w|.
  // When w is nearly parallel to e_1, 1 - w_1/|w| cancels; use the
  // equivalent (sum_{k>1} w_k^2) / (|w| (|w| + w_1)) instead.
  Vector u = -w / norm;
  if (w[0] > 0.0)
    u[0] = w.tail(n - 1).squaredNorm() / (norm * (norm + w[0]));
  else
    u[0] += 1.0;
  Matrix reflect = Matrix::Identity(n, n);
  const double uu = u.squaredNorm();
  if (uu > 1e-28) reflect -= (2.0 / uu) * (u * u.transpose());

  Ellipsoid e;
  e.center = Vector::Zero(n);
  e.shape = reflect * diag.asDiagonal() * reflect.transpose();
  e.shape = 0.5 * (e.shape + e.shape.transpose()).eval();
  return e;
}

Polytope make_cover_polytope(const Ellipsoid& e, std::size_t extra, Rng& rng) {
  if (!e.valid()) throw Error(ErrorCode::InvalidArgument, "cover ellipsoid is not valid");
  const Eigen::Index n = e.dim();
  const Matrix root = inverse_sqrt_spd(e.shape);  // Q^{-1/2}

  Polytope poly;
  poly.vertices.reserve(static_cast<std::size_t>(2 * n) + extra);
  for (Eigen::Index i = 0; i < n; ++i) {
    poly.vertices.push_back(e.center + root.col(i));
    poly.vertices.push_back(e.center - root.col(i));
  }
  for (std::size_t k = 0; k < extra; ++k) {
    const Vector dir = rng.unit_vector(n);
    const double radius = 0.9 * std::pow(rng.uniform(), 1.0 / static_cast<double>(n));
    poly.vertices.push_back(e.center + radius * (root * dir));
  }
  rng.shuffle(poly.vertices.begin(), poly.vertices.end());
  return poly;
}

namespace {

// Near-spherical ellipsoid: semi-axes within a band narrow enough that the
// eigen-gap ratio stays below 1 + gap_tol / 2.
Ellipsoid make_decoy_ellipsoid(Eigen::Index n, double radius, double gap_tol, Rng& rng) {
  const double spread = 1.0 - 1.0 / std::sqrt(1.0 + 0.5 * gap_tol);
  Vector axes(n);
  for (Eigen::Index i = 0; i < n; ++i) axes[i] = radius * (1.0 - spread * rng.uniform());
  const Matrix rot = rng.orthogonal_matrix(n);
  const Vector inv_sq = axes.array().square().inverse();

  Ellipsoid e;
  e.center = Vector(n);
  for (Eigen::Index i = 0; i < n; ++i) e.center[i] = rng.uniform(-radius, radius);
  e.shape = rot * inv_sq.asDiagonal() * rot.transpose();
  e.shape = 0.5 * (e.shape + e.shape.transpose()).eval();
  return e;
}

}  // namespace

StegoPlan embed(const std::vector<PayloadMessage>& messages, std::size_t decoy_count,
                const EmbedParams& params, Rng& rng) {
  Eigen::Index n = params.dim;
  if (n == 0) {
    if (messages.empty())
      throw Error(ErrorCode::DimensionMismatch, "dimension unknown without messages");
    n = messages.front().payload.size() + 2;
  }
  std::set<std::uint64_t> seen;
  for (const PayloadMessage& msg : messages)
    if (!seen.insert(msg.index).second)
      throw Error(ErrorCode::DuplicateIndex, "index " + std::to_string(msg.index) + " repeated");

  StegoPlan plan;
  plan.dim = n;

  double min_half = std::numeric_limits<double>::infinity();
  double max_half = 0.0;
  for (const PayloadMessage& msg : messages) {
    const EncodedVector enc = encode_payload(msg, n, params.payload_min);
    const Ellipsoid carrier = make_axis_ellipsoid(enc.w, params.axis_ratio);
    plan.polytopes.push_back(make_cover_polytope(carrier, params.extra_points, rng));
    min_half = std::min(min_half, enc.w.norm());
    max_half = std::max(max_half, enc.w.norm());
  }
  plan.carrier_threshold = messages.empty() ? 1.0 : 0.5 * min_half;
  const double tau = plan.carrier_threshold;

  // Decoys are drawn at carrier scale, then shrunk together by 1/s so the
  // largest one sits at tau / 2.
  const double raw_radius = messages.empty() ? 1.0 : max_half;
  std::vector<Ellipsoid> decoys;
  double largest = 0.0;
  for (std::size_t k = 0; k < decoy_count; ++k) {
    const double radius = raw_radius * rng.uniform(0.5, 1.5);
    decoys.push_back(make_decoy_ellipsoid(n, radius, params.gap_tol, rng));
    largest = std::max(largest, decoys.back().semi_axes()[0]);
  }
  const double s = decoys.empty() ? 1.0 : largest / (0.5 * tau);
  for (const Ellipsoid& e : decoys) {
    Polytope poly = make_cover_polytope(e, params.extra_points, rng);
    for (Vector& v : poly.vertices) v /= s;
    plan.polytopes.push_back(std::move(poly));
  }

  rng.shuffle(plan.polytopes.begin(), plan.polytopes.end());
  return plan;
}

// ---------------------------------------------------------------------------
// Recovery

namespace {

struct Outcome {
  bool carrier = false;
  PayloadMessage message;
  Rejection rejection;
};

Outcome extract_one(const StegoPlan& plan, std::size_t position, const ExtractParams& params) {
  Outcome out;
  out.rejection.position = position;
  try {
    const Polytope& poly = plan.polytopes[position];
    if (poly.dim() != plan.dim)
      throw Error(ErrorCode::DimensionMismatch, "polytope dimension differs from plan");
    Rng rng = Rng(params.seed).split(position);
    const MveeResult solved = solve_mvee(poly.points(), params.eps, rng);
    const PrincipalAxis axis = principal_axis(solved.ellipsoid, params.gap_tol);
    if (axis.half_length < plan.carrier_threshold)
      throw Error(ErrorCode::BelowThreshold,
                  "half-length " + std::to_string(axis.half_length) + " below threshold");
    Vector endpoint = axis.endpoint;
    if (params.decode_eps < params.eps) {
      MveeOptions fine;
      fine.eps = params.decode_eps;
      fine.max_iterations = params.decode_max_iterations;
      Rng fine_rng = Rng(params.seed).split(position);
      try {
        endpoint = principal_axis(solve_mvee(poly.points(), fine, fine_rng).ellipsoid,
                                  params.gap_tol)
                       .endpoint;
      } catch (const Error& err) {
        if (err.code() != ErrorCode::NoConvergence) throw;
      }
    }
    out.message = decode_payload(endpoint);
    out.carrier = true;
  } catch (const Error& err) {
    out.rejection.reason = err.code();
    out.rejection.detail = err.what();
  }
  return out;
}

}  // namespace

ExtractionResult extract(const StegoPlan& plan, const ExtractParams& params) {
  const std::size_t count = plan.polytopes.size();
  std::vector<Outcome> outcomes(count);

  unsigned threads = params.threads != 0 ? params.threads : std::thread::hardware_concurrency();
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) outcomes[i] = extract_one(plan, i, params);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t)
      pool.emplace_back([&, t] {
        for (std::size_t i = t; i < count; i += threads) outcomes[i] = extract_one(plan, i, params);
      });
    for (std::thread& th : pool) th.join();
  }

  ExtractionResult result;
  std::set<std::uint64_t> seen;
  for (std::size_t i = 0; i < count; ++i) {
    Outcome& o = outcomes[i];
    if (o.carrier && seen.insert(o.message.index).second) {
      result.messages.push_back(std::move(o.message));
    } else if (o.carrier) {
      result.rejected.push_back({i, ErrorCode::DuplicateIndex,
                                 "index " + std::to_string(o.message.index) + " already recovered"});
    } else {
      result.rejected.push_back(std::move(o.rejection));
    }
  }
  std::sort(result.messages.begin(), result.messages.end(),
            [](const PayloadMessage& a, const PayloadMessage& b) { return a.index < b.index; });
  return result;
}

}  // namespace jstego
