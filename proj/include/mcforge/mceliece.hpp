#pragma once

// McEliece key generation, encryption and decryption, and generation of
// benchmark instances with their secret sidecars.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "mcforge/goppa.hpp"

namespace mcforge {

struct PrivateKey {
    GoppaCode code;
    BitMatrix S;
    std::optional<BitMatrix> S_inv;     // empty when S is singular
    std::vector<BitVector> S_kernel;    // basis of {x : x S = 0}
    std::vector<std::size_t> perm;      // P has its row-i one at column perm[i]
    BitMatrix P;
};

struct PublicKey {
    BitMatrix G_prime; // S G P
    std::size_t n = 0;
    std::size_t k = 0;
    unsigned t = 0;
};

struct KeyPair {
    PrivateKey priv;
    PublicKey pub;
};

/// Subseeds are split from rng by label ("polynomial", "support", "S", "P").
/// With allow_singular_s the scrambler is a uniformly random k x k matrix.
KeyPair keygen(std::size_t n, unsigned t, unsigned m, Rng& rng, bool allow_singular_s = false);
/// Builds the key pair for an existing code (used when reloading private keys).
KeyPair assemble_keys(GoppaCode code, BitMatrix S, std::vector<std::size_t> perm);

struct Ciphertext {
    BitVector q_prime;
    BitVector error;
};

/// q' = q G' + e with e uniform of weight exactly t.
Ciphertext encrypt(const BitVector& q, const PublicKey& pub, Rng& rng);

/// One preimage q with q G' within distance t of q'. Throws DecodeFailure.
BitVector decrypt(const BitVector& q_prime, const PrivateKey& priv);
/// Every preimage: the coset decrypt(q') + ker(S), 2^corank(S) elements.
std::vector<BitVector> decrypt_all(const BitVector& q_prime, const PrivateKey& priv);

struct McElieceInstance {
    std::size_t n = 0;
    std::size_t k = 0;
    unsigned t = 0;
    unsigned m = 0;
    std::uint32_t reduction_poly = 0;
    BitMatrix G_prime;
    BitVector q_prime;
    std::string seed;
};

struct Solution {
    BitVector q;
    BitVector error;
};

/// True iff q G' + error == q' and |error| == t.
bool verify_solution(const McElieceInstance& inst, const Solution& sol);

struct GeneratedInstance {
    McElieceInstance instance;
    Solution solution;
    PrivateKey key;
};

/// Deterministic in (n, t, m, seed, allow_singular_s).
GeneratedInstance generate_instance(std::size_t n, unsigned t, unsigned m, const std::string& seed,
                                    bool allow_singular_s = false);

} // namespace mcforge
