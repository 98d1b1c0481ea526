#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "jstego/rng.hpp"

// Degree-1 somewhat-homomorphic encryption over Z_q.
//
// A ciphertext of a bit m is a linear polynomial c(x) = m + g(x) where g is
// "small and even" at the secret key: g(s) = 2e with |e| << q. Decryption
// evaluates c at s, takes the centred residue and reads its parity.
// Multiplying two ciphertexts gives a quadratic form in X_ij = x_i x_j;
// switch_key turns it back into a linear ciphertext under a second key t
// using bit-decomposed hints h_ij,b(t) = 2^b s_i s_j + 2e.
namespace jstego::fhe {

struct FheParams {
  std::uint64_t q = 2147483647;  // odd modulus, 2^31 - 1
  std::size_t n = 16;            // number of key variables
  std::int64_t noise_bound = 4;  // B: fresh noise e is uniform in [-B, B]
  std::size_t pk_size = 32;      // smeven polynomials in the public key

  /// Throws InvalidArgument unless q is odd, 3 <= q < 2^62, n >= 1 and
  /// 0 <= 2B < q.
  void validate() const;
  /// ceil(log2 q): bit planes needed for an entry of Z_q.
  unsigned bits() const;

  friend bool operator==(const FheParams&, const FheParams&) = default;
};

struct SecretKey {
  std::vector<std::uint64_t> s;  // (s_1, ..., s_n), each in [0, q)
};

struct LinearCiphertext {
  std::vector<std::uint64_t> coeffs;  // (c_0, c_1, ..., c_n)
};

// Symmetric quadratic form sum_{i<=j} C_ij x_i x_j over i, j in {0..n},
// x_0 = 1. Off-diagonal entries hold C_ij + C_ji.
class QuadraticCiphertext {
 public:
  QuadraticCiphertext() = default;
  explicit QuadraticCiphertext(std::size_t n);

  std::size_t n() const noexcept { return n_; }
  std::size_t pair_count() const noexcept { return upper_.size(); }
  /// Packed position of the pair (i, j), order-insensitive.
  std::size_t pair_index(std::size_t i, std::size_t j) const;
  std::uint64_t at(std::size_t i, std::size_t j) const { return upper_[pair_index(i, j)]; }
  std::uint64_t& at(std::size_t i, std::size_t j) { return upper_[pair_index(i, j)]; }
  std::span<const std::uint64_t> packed() const noexcept { return upper_; }

 private:
  std::size_t n_ = 0;
  std::vector<std::uint64_t> upper_;
};

struct PublicKey {
  FheParams params;
  std::vector<LinearCiphertext> elements;
};

struct KeySwitchHints {
  FheParams params;
  unsigned bits = 0;
  /// hints[pair * bits + b] encrypts 2^b s_i s_j under the target key.
  std::vector<LinearCiphertext> hints;

  const LinearCiphertext& hint(std::size_t pair, unsigned b) const {
    return hints[pair * bits + b];
  }
};

struct KeySet {
  SecretKey s;  // source key
  SecretKey t;  // key-switch target
  PublicKey pk;
  KeySwitchHints hints;
};

// C'_ij,b in {0, 1} with C_ij = sum_b 2^b C'_ij,b.
struct BitPlanes {
  std::size_t pair_count = 0;
  unsigned bits = 0;
  std::vector<std::uint8_t> planes;  // planes[pair * bits + b]

  std::uint8_t bit(std::size_t pair, unsigned b) const { return planes[pair * bits + b]; }
};

/// Centred representative of v mod q in (-q/2, q/2].
std::int64_t centered(std::uint64_t v, std::uint64_t q);

/// Linear polynomial with the given a_1..a_n whose value at `key` is
/// target + 2e (mod q): a_0 = target + 2e - sum a_i key_i.
LinearCiphertext smeven(const FheParams& params, const SecretKey& key,
                        std::span<const std::uint64_t> a, std::int64_t e,
                        std::uint64_t target = 0);

SecretKey sample_key(const FheParams& params, Rng& rng);
KeySet keygen(const FheParams& params, Rng& rng);

/// Public-key encryption: m + sum r_k f_k with r_k uniform in {-1, 0, 1}.
LinearCiphertext encrypt(const PublicKey& pk, int m, Rng& rng);
/// Secret-key encryption with a chosen noise e: c(s) = m + 2e exactly.
LinearCiphertext encrypt_with_noise(const FheParams& params, const SecretKey& sk, int m,
                                    std::int64_t e, Rng& rng);

/// c(s) mod q.
std::uint64_t evaluate(const FheParams& params, const SecretKey& sk, const LinearCiphertext& c);
std::uint64_t evaluate(const FheParams& params, const SecretKey& sk,
                       const QuadraticCiphertext& c);

int decrypt(const FheParams& params, const SecretKey& sk, const LinearCiphertext& c);
int decrypt(const FheParams& params, const SecretKey& sk, const QuadraticCiphertext& c);

/// Centred c(s) mod q: parity is the plaintext, magnitude is the noise.
std::int64_t noise_of(const FheParams& params, const SecretKey& sk, const LinearCiphertext& c);
std::int64_t noise_of(const FheParams& params, const SecretKey& sk,
                      const QuadraticCiphertext& c);

LinearCiphertext add(const FheParams& params, const LinearCiphertext& a,
                     const LinearCiphertext& b);
QuadraticCiphertext mul(const FheParams& params, const LinearCiphertext& a,
                        const LinearCiphertext& b);

BitPlanes bit_decompose(const QuadraticCiphertext& c, unsigned bits);

/// d(x) = sum_{ij,b} C'_ij,b h_ij,b(x), a linear ciphertext under t.
LinearCiphertext switch_key(const KeySwitchHints& hints, const QuadraticCiphertext& c);

/// Worst-case noise added by switch_key: (n+1)^2 * ceil(log2 q) * 2B.
std::int64_t switch_key_noise_bound(const FheParams& params);

}  // namespace jstego::fhe
