#include "cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <ostream>

#include "jstego/config.hpp"
#include "jstego/fhe_toy.hpp"
#include "jstego/mvee.hpp"
#include "jstego/plan_io.hpp"
#include "jstego/stego.hpp"

namespace jstego::cli {

namespace {

// Stream ids for Rng::split, one per command.
constexpr std::uint64_t kEmbedStream = 1;
constexpr std::uint64_t kMveeStream = 2;
constexpr std::uint64_t kFheStream = 3;

void print_vector(std::ostream& out, const Vector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) out << (i ? " " : "") << format_double(v[i]);
  out << '\n';
}

int cmd_embed(const std::string& in, const std::string& out_path, Eigen::Index dim,
              std::size_t extra, const RunConfig& cfg, std::ostream& out) {
  const std::vector<PayloadMessage> messages = load_vectors(in);
  if (messages.empty()) throw Error(ErrorCode::EmbedRejected, "vectors file holds no messages");
  const Eigen::Index payload_dim = messages.front().payload.size() + 2;
  if (dim != 0 && dim != payload_dim)
    throw Error(ErrorCode::DimensionMismatch, "--dim " + std::to_string(dim) +
                                                  " but payloads imply dimension " +
                                                  std::to_string(payload_dim));
  EmbedParams params = cfg.embed_params(payload_dim);
  params.extra_points = extra;
  Rng rng = Rng(cfg.seed).split(kEmbedStream);
  const StegoPlan plan = embed(messages, cfg.decoys, params, rng);
  save_plan(plan, out_path);
  out << "embedded " << messages.size() << " message(s) and " << cfg.decoys
      << " decoy(s) into " << plan.polytopes.size() << " polytopes, dim " << plan.dim
      << ", threshold " << format_double(plan.carrier_threshold) << '\n';
  return kExitOk;
}

int cmd_extract(const std::string& in, const std::string& out_path, const RunConfig& cfg,
                double decode_eps, std::ostream& out) {
  const StegoPlan plan = load_plan(in);
  ExtractParams params = cfg.extract_params();
  params.decode_eps = decode_eps;
  params.threads = 1;
  const ExtractionResult result = extract(plan, params);
  save_vectors(result.messages, out_path);
  out << "recovered " << result.messages.size() << " message(s) from " << plan.polytopes.size()
      << " polytopes\n";
  for (const Rejection& r : result.rejected)
    out << "  polytope " << r.position << ": " << to_string(r.reason) << '\n';
  return kExitOk;
}

int cmd_mvee(const std::string& in, const RunConfig& cfg, std::ostream& out) {
  const PointSet points = load_points(in);
  Rng rng = Rng(cfg.seed).split(kMveeStream);
  const MveeResult res = solve_mvee(points, cfg.eps, rng);
  const Ellipsoid& e = res.ellipsoid;
  out << "dim " << points.dim() << "\npoints " << points.size() << '\n';
  out << "center ";
  print_vector(out, e.center);
  out << "shape\n";
  for (Eigen::Index i = 0; i < e.shape.rows(); ++i) {
    out << "  ";
    print_vector(out, e.shape.row(i).transpose());
  }
  const SymmetricEigen eig = jacobi_eigen(e.shape);
  out << "axes\n";
  for (Eigen::Index k = 0; k < eig.values.size(); ++k) {
    out << "  " << format_double(1.0 / std::sqrt(eig.values[k])) << " : ";
    print_vector(out, eig.vectors.col(k));
  }
  out << "iterations " << res.report.iterations << '\n';
  out << "final_eps " << format_double(res.report.final_eps) << '\n';
  out << "support " << res.report.support.size() << '\n';
  return kExitOk;
}

int cmd_fhe_demo(const fhe::FheParams& params, std::uint64_t seed, std::ostream& out) {
  params.validate();
  Rng rng = Rng(seed).split(kFheStream);
  const fhe::KeySet keys = fhe::keygen(params, rng);
  const std::int64_t budget = 2 * params.noise_bound * static_cast<std::int64_t>(params.pk_size);

  out << "# keygen\n";
  out << "q " << params.q << " n " << params.n << " B " << params.noise_bound << " pk_size "
      << params.pk_size << " bits " << params.bits() << '\n';
  out << "public key elements " << keys.pk.elements.size() << ", switch hints "
      << keys.hints.hints.size() << '\n';
  for (std::size_t k = 0; k < std::min<std::size_t>(3, keys.pk.elements.size()); ++k)
    out << "pk[" << k << "](s) = " << fhe::noise_of(params, keys.s, keys.pk.elements[k]) << '\n';

  out << "# encrypt/decrypt (fresh noise bound " << budget << ")\n";
  for (int m : {0, 1, 0, 1}) {
    const fhe::LinearCiphertext c = fhe::encrypt(keys.pk, m, rng);
    const int got = fhe::decrypt(params, keys.s, c);
    out << "Enc(" << m << ") -> noise " << fhe::noise_of(params, keys.s, c) << " -> Dec " << got
        << (got == m ? " ok" : " WRONG") << '\n';
  }

  out << "# addition chain c <- c + c from Enc(0) with noise 2B\n";
  fhe::LinearCiphertext c = fhe::encrypt_with_noise(params, keys.s, 0, params.noise_bound, rng);
  double predicted = 2.0 * static_cast<double>(params.noise_bound);
  const double half_q = static_cast<double>(params.q) / 2.0;
  for (int step = 0; step < 80; ++step) {
    const int got = fhe::decrypt(params, keys.s, c);
    const bool overflow = predicted > half_q;
    out << "step " << step << " predicted " << format_double(predicted) << " noise "
        << fhe::noise_of(params, keys.s, c) << " Dec " << got
        << (overflow ? " (past q/2)" : "") << (got == 0 ? " ok" : " WRONG") << '\n';
    if (overflow) break;
    c = fhe::add(params, c, c);
    predicted *= 2.0;
  }

  out << "# multiply + switch key (bound " << fhe::switch_key_noise_bound(params) << ")\n";
  for (int a : {0, 1}) {
    for (int b : {0, 1}) {
      const fhe::LinearCiphertext ca = fhe::encrypt(keys.pk, a, rng);
      const fhe::LinearCiphertext cb = fhe::encrypt(keys.pk, b, rng);
      const fhe::QuadraticCiphertext prod = fhe::mul(params, ca, cb);
      const fhe::LinearCiphertext switched = fhe::switch_key(keys.hints, prod);
      const int got = fhe::decrypt(params, keys.t, switched);
      out << a << " * " << b << ": tensor noise " << fhe::noise_of(params, keys.s, prod)
          << ", switched noise " << fhe::noise_of(params, keys.t, switched) << " -> Dec " << got
          << (got == a * b ? " ok" : " WRONG") << '\n';
    }
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hide vectors as longest axes of minimum-volume enclosing ellipsoids", "jstego"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string in_path;
  std::string out_path;
  Eigen::Index dim = 0;
  std::size_t extra = EmbedParams{}.extra_points;

  auto* embed_cmd = app.add_subcommand("embed", "embed a vectors file into a plan file");
  embed_cmd->add_option("--in", in_path, "vectors file")->required();
  embed_cmd->add_option("--out", out_path, "plan file to write")->required();
  embed_cmd->add_option("--decoys", cfg.decoys, "decoy polytope count")->capture_default_str();
  embed_cmd->add_option("--seed", cfg.seed, "64-bit seed")->capture_default_str();
  embed_cmd->add_option("--dim", dim, "ambient dimension (payload length + 2)");
  embed_cmd->add_option("--axis-ratio", cfg.axis_ratio, "carrier axis ratio")->capture_default_str();
  embed_cmd->add_option("--payload-min", cfg.payload_min, "smallest payload magnitude")
      ->capture_default_str();
  embed_cmd->add_option("--gap-tol", cfg.gap_tol, "eigen-gap tolerance")->capture_default_str();
  embed_cmd->add_option("--extra", extra, "interior camouflage points per polytope")
      ->capture_default_str();

  auto* extract_cmd = app.add_subcommand("extract", "recover the vectors hidden in a plan file");
  extract_cmd->add_option("--in", in_path, "plan file")->required();
  extract_cmd->add_option("--out", out_path, "vectors file to write")->required();
  extract_cmd->add_option("--eps", cfg.eps, "MVEE tolerance")->capture_default_str();
  extract_cmd->add_option("--gap-tol", cfg.gap_tol, "eigen-gap tolerance")->capture_default_str();
  extract_cmd->add_option("--seed", cfg.seed, "solver seed")->capture_default_str();
  double decode_eps = ExtractParams{}.decode_eps;
  extract_cmd->add_option("--decode-eps", decode_eps, "MVEE tolerance for decoding carriers")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  auto* mvee_cmd = app.add_subcommand("mvee", "minimum-volume enclosing ellipsoid of a points file");
  mvee_cmd->add_option("--in", in_path, "points file")->required();
  mvee_cmd->add_option("--eps", cfg.eps, "MVEE tolerance")->capture_default_str();
  mvee_cmd->add_option("--seed", cfg.seed, "solver seed")->capture_default_str();

  fhe::FheParams fhe_params;
  std::uint64_t fhe_seed = 0;
  auto* fhe_cmd = app.add_subcommand("fhe-demo", "trace of the toy degree-1 homomorphic scheme");
  fhe_cmd->add_option("--q", fhe_params.q, "odd modulus")->capture_default_str();
  fhe_cmd->add_option("--n", fhe_params.n, "key length")->capture_default_str();
  fhe_cmd->add_option("--noise-bound", fhe_params.noise_bound, "fresh noise bound B")
      ->capture_default_str();
  fhe_cmd->add_option("--pk-size", fhe_params.pk_size, "public key size")->capture_default_str();
  fhe_cmd->add_option("--seed", fhe_seed, "64-bit seed")->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    cfg.validate();
    if (embed_cmd->parsed()) return cmd_embed(in_path, out_path, dim, extra, cfg, out);
    if (extract_cmd->parsed()) return cmd_extract(in_path, out_path, cfg, decode_eps, out);
    if (mvee_cmd->parsed()) return cmd_mvee(in_path, cfg, out);
    if (fhe_cmd->parsed()) return cmd_fhe_demo(fhe_params, fhe_seed, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::InvalidArgument ? kExitUsage : kExitData;
  }
  err << app.help();
  return kExitUsage;
}

}  // namespace jstego::cli
