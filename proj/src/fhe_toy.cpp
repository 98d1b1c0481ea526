#include "jstego/fhe_toy.hpp"

#include <bit>
#include <string>
#include <utility>

#include "jstego/error.hpp"

namespace jstego::fhe {

namespace {

__extension__ typedef unsigned __int128 u128;

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t q) {
  return static_cast<std::uint64_t>(static_cast<u128>(a) * b % q);
}

std::uint64_t addmod(std::uint64_t a, std::uint64_t b, std::uint64_t q) {
  std::uint64_t r = a + b;  // q < 2^62, no wrap
  return r >= q ? r - q : r;
}

std::uint64_t submod(std::uint64_t a, std::uint64_t b, std::uint64_t q) {
  return a >= b ? a - b : a + q - b;
}

// Reduces a signed value into [0, q).
std::uint64_t reduce(std::int64_t v, std::uint64_t q) {
  const auto sq = static_cast<std::int64_t>(q);
  std::int64_t r = v % sq;
  if (r < 0) r += sq;
  return static_cast<std::uint64_t>(r);
}

void check_linear(const FheParams& params, const LinearCiphertext& c) {
  if (c.coeffs.size() != params.n + 1)
    throw Error(ErrorCode::ParamMismatch,
                "ciphertext has " + std::to_string(c.coeffs.size()) + " coefficients, expected " +
                    std::to_string(params.n + 1));
}

void check_key(const FheParams& params, const SecretKey& sk) {
  if (sk.s.size() != params.n)
    throw Error(ErrorCode::ParamMismatch, "secret key length differs from n");
}

// Key value at variable index i, with x_0 = 1.
std::uint64_t key_at(const SecretKey& sk, std::size_t i) { return i == 0 ? 1 : sk.s[i - 1]; }

}  // namespace

void FheParams::validate() const {
  if (q < 3 || q % 2 == 0 || q >= (std::uint64_t{1} << 62))
    throw Error(ErrorCode::InvalidArgument, "modulus q must be odd with 3 <= q < 2^62");
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "n must be positive");
  if (noise_bound < 0 || static_cast<std::uint64_t>(2 * noise_bound) >= q)
    throw Error(ErrorCode::InvalidArgument, "noise bound must satisfy 0 <= 2B < q");
}

unsigned FheParams::bits() const { return static_cast<unsigned>(std::bit_width(q - 1)); }

std::int64_t centered(std::uint64_t v, std::uint64_t q) {
  v %= q;
  if (v > q / 2) return static_cast<std::int64_t>(v) - static_cast<std::int64_t>(q);
  return static_cast<std::int64_t>(v);
}

// ---------------------------------------------------------------------------
// Quadratic storage

QuadraticCiphertext::QuadraticCiphertext(std::size_t n)
    : n_(n), upper_((n + 1) * (n + 2) / 2, 0) {}

std::size_t QuadraticCiphertext::pair_index(std::size_t i, std::size_t j) const {
  if (i > j) std::swap(i, j);
  const std::size_t width = n_ + 1;
  if (j >= width) throw Error(ErrorCode::ParamMismatch, "variable index out of range");
  // Row i of the packed upper triangle starts after sum_{r<i} (width - r).
  return i * width - (i * (i + 1)) / 2 + j;
}

// ---------------------------------------------------------------------------
// Keys

LinearCiphertext smeven(const FheParams& params, const SecretKey& key,
                        std::span<const std::uint64_t> a, std::int64_t e,
                        std::uint64_t target) {
  check_key(params, key);
  if (a.size() != params.n) throw Error(ErrorCode::ParamMismatch, "need n linear coefficients");
  const std::uint64_t q = params.q;
  LinearCiphertext f;
  f.coeffs.resize(params.n + 1);
  std::uint64_t dot = 0;
  for (std::size_t i = 0; i < params.n; ++i) {
    f.coeffs[i + 1] = a[i] % q;
    dot = addmod(dot, mulmod(f.coeffs[i + 1], key.s[i], q), q);
  }
  f.coeffs[0] = submod(addmod(target % q, reduce(2 * e, q), q), dot, q);
  return f;
}

SecretKey sample_key(const FheParams& params, Rng& rng) {
  SecretKey sk;
  sk.s.resize(params.n);
  for (auto& v : sk.s) v = rng.below(params.q);
  return sk;
}

namespace {

LinearCiphertext random_smeven(const FheParams& params, const SecretKey& key,
                               std::uint64_t target, Rng& rng) {
  std::vector<std::uint64_t> a(params.n);
  for (auto& v : a) v = rng.below(params.q);
  const std::int64_t e = rng.between(-params.noise_bound, params.noise_bound);
  return smeven(params, key, a, e, target);
}

}  // namespace

KeySet keygen(const FheParams& params, Rng& rng) {
  params.validate();
  KeySet keys;
  keys.s = sample_key(params, rng);
  keys.t = sample_key(params, rng);

  keys.pk.params = params;
  keys.pk.elements.reserve(params.pk_size);
  for (std::size_t k = 0; k < params.pk_size; ++k)
    keys.pk.elements.push_back(random_smeven(params, keys.s, 0, rng));

  const std::uint64_t q = params.q;
  KeySwitchHints& hints = keys.hints;
  hints.params = params;
  hints.bits = params.bits();
  const QuadraticCiphertext layout(params.n);
  hints.hints.resize(layout.pair_count() * hints.bits);
  for (std::size_t i = 0; i <= params.n; ++i) {
    for (std::size_t j = i; j <= params.n; ++j) {
      const std::uint64_t product = mulmod(key_at(keys.s, i), key_at(keys.s, j), q);
      const std::size_t pair = layout.pair_index(i, j);
      std::uint64_t scaled = product;  // 2^b * s_i s_j mod q
      for (unsigned b = 0; b < hints.bits; ++b) {
        hints.hints[pair * hints.bits + b] = random_smeven(params, keys.t, scaled, rng);
        scaled = addmod(scaled, scaled, q);
      }
    }
  }
  return keys;
}

// ---------------------------------------------------------------------------
// Encryption

LinearCiphertext encrypt(const PublicKey& pk, int m, Rng& rng) {
  if (m != 0 && m != 1) throw Error(ErrorCode::InvalidPlaintext, "plaintext must be 0 or 1");
  const FheParams& params = pk.params;
  const std::uint64_t q = params.q;
  LinearCiphertext c;
  c.coeffs.assign(params.n + 1, 0);
  for (const LinearCiphertext& f : pk.elements) {
    const std::int64_t r = rng.between(-1, 1);
    if (r == 0) continue;
    for (std::size_t i = 0; i <= params.n; ++i)
      c.coeffs[i] = r > 0 ? addmod(c.coeffs[i], f.coeffs[i], q) : submod(c.coeffs[i], f.coeffs[i], q);
  }
  c.coeffs[0] = addmod(c.coeffs[0], static_cast<std::uint64_t>(m), q);
  return c;
}

LinearCiphertext encrypt_with_noise(const FheParams& params, const SecretKey& sk, int m,
                                    std::int64_t e, Rng& rng) {
  if (m != 0 && m != 1) throw Error(ErrorCode::InvalidPlaintext, "plaintext must be 0 or 1");
  std::vector<std::uint64_t> a(params.n);
  for (auto& v : a) v = rng.below(params.q);
  return smeven(params, sk, a, e, static_cast<std::uint64_t>(m));
}

std::uint64_t evaluate(const FheParams& params, const SecretKey& sk, const LinearCiphertext& c) {
  check_linear(params, c);
  check_key(params, sk);
  const std::uint64_t q = params.q;
  std::uint64_t acc = c.coeffs[0] % q;
  for (std::size_t i = 1; i <= params.n; ++i)
    acc = addmod(acc, mulmod(c.coeffs[i], sk.s[i - 1], q), q);
  return acc;
}

std::uint64_t evaluate(const FheParams& params, const SecretKey& sk,
                       const QuadraticCiphertext& c) {
  if (c.n() != params.n) throw Error(ErrorCode::ParamMismatch, "quadratic ciphertext size differs");
  check_key(params, sk);
  const std::uint64_t q = params.q;
  std::uint64_t acc = 0;
  for (std::size_t i = 0; i <= params.n; ++i)
    for (std::size_t j = i; j <= params.n; ++j)
      acc = addmod(acc, mulmod(c.at(i, j), mulmod(key_at(sk, i), key_at(sk, j), q), q), q);
  return acc;
}

std::int64_t noise_of(const FheParams& params, const SecretKey& sk, const LinearCiphertext& c) {
  return centered(evaluate(params, sk, c), params.q);
}

std::int64_t noise_of(const FheParams& params, const SecretKey& sk,
                      const QuadraticCiphertext& c) {
  return centered(evaluate(params, sk, c), params.q);
}

int decrypt(const FheParams& params, const SecretKey& sk, const LinearCiphertext& c) {
  return static_cast<int>(((noise_of(params, sk, c) % 2) + 2) % 2);
}

int decrypt(const FheParams& params, const SecretKey& sk, const QuadraticCiphertext& c) {
  return static_cast<int>(((noise_of(params, sk, c) % 2) + 2) % 2);
}

// ---------------------------------------------------------------------------
// Homomorphic operations

LinearCiphertext add(const FheParams& params, const LinearCiphertext& a,
                     const LinearCiphertext& b) {
  check_linear(params, a);
  check_linear(params, b);
  LinearCiphertext c;
  c.coeffs.resize(params.n + 1);
  for (std::size_t i = 0; i <= params.n; ++i) c.coeffs[i] = addmod(a.coeffs[i], b.coeffs[i], params.q);
  return c;
}

QuadraticCiphertext mul(const FheParams& params, const LinearCiphertext& a,
                        const LinearCiphertext& b) {
  check_linear(params, a);
  check_linear(params, b);
  const std::uint64_t q = params.q;
  QuadraticCiphertext c(params.n);
  for (std::size_t i = 0; i <= params.n; ++i) {
    c.at(i, i) = mulmod(a.coeffs[i], b.coeffs[i], q);
    for (std::size_t j = i + 1; j <= params.n; ++j)
      c.at(i, j) = addmod(mulmod(a.coeffs[i], b.coeffs[j], q), mulmod(a.coeffs[j], b.coeffs[i], q), q);
  }
  return c;
}

BitPlanes bit_decompose(const QuadraticCiphertext& c, unsigned bits) {
  BitPlanes out;
  out.pair_count = c.pair_count();
  out.bits = bits;
  out.planes.assign(out.pair_count * bits, 0);
  const auto packed = c.packed();
  for (std::size_t p = 0; p < packed.size(); ++p) {
    if (bits < 64 && (packed[p] >> bits) != 0)
      throw Error(ErrorCode::ParamMismatch, "entry does not fit in the requested bit width");
    for (unsigned b = 0; b < bits; ++b) out.planes[p * bits + b] = (packed[p] >> b) & 1u;
  }
  return out;
}

LinearCiphertext switch_key(const KeySwitchHints& hints, const QuadraticCiphertext& c) {
  const FheParams& params = hints.params;
  if (c.n() != params.n || hints.bits != params.bits() ||
      hints.hints.size() != c.pair_count() * hints.bits)
    throw Error(ErrorCode::ParamMismatch, "key-switch hints do not match the ciphertext");
  const std::uint64_t q = params.q;
  const BitPlanes planes = bit_decompose(c, hints.bits);

  LinearCiphertext d;
  d.coeffs.assign(params.n + 1, 0);
  for (std::size_t p = 0; p < planes.pair_count; ++p) {
    for (unsigned b = 0; b < planes.bits; ++b) {
      if (!planes.bit(p, b)) continue;
      const LinearCiphertext& h = hints.hint(p, b);
      for (std::size_t i = 0; i <= params.n; ++i) d.coeffs[i] = addmod(d.coeffs[i], h.coeffs[i], q);
    }
  }
  return d;
}

std::int64_t switch_key_noise_bound(const FheParams& params) {
  const auto width = static_cast<std::int64_t>(params.n + 1);
  return width * width * static_cast<std::int64_t>(params.bits()) * 2 * params.noise_bound;
}

}  // namespace jstego::fhe
