#include "mcforge/mceliece.hpp"

#include <numeric>

#include "mcforge/errors.hpp"

namespace mcforge {

KeyPair assemble_keys(GoppaCode code, BitMatrix S, std::vector<std::size_t> perm) {
    if (S.rows() != code.k || S.cols() != code.k) throw UsageError("S must be k x k");
    if (perm.size() != code.n) throw UsageError("permutation length must be N");
    KeyPair kp;
    auto& priv = kp.priv;
    priv.P = permutation_matrix(perm);
    priv.S_inv = inverse(S);
    if (!priv.S_inv) priv.S_kernel = rank_and_kernel(S.transpose()).kernel;
    kp.pub.G_prime = multiply(multiply(S, code.G), priv.P);
    kp.pub.n = code.n;
    kp.pub.k = code.k;
    kp.pub.t = code.t;
    priv.S = std::move(S);
    priv.perm = std::move(perm);
    priv.code = std::move(code);
    return kp;
}

KeyPair keygen(std::size_t n, unsigned t, unsigned m, Rng& rng, bool allow_singular_s) {
    auto code = sample_code(n, t, m, rng);
    Rng s_rng = rng.split("S");
    Rng p_rng = rng.split("P");
    BitMatrix S = allow_singular_s ? sample_matrix(code.k, code.k, s_rng) : sample_invertible(code.k, s_rng);
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    p_rng.shuffle(perm.begin(), perm.end());
    return assemble_keys(std::move(code), std::move(S), std::move(perm));
}

Ciphertext encrypt(const BitVector& q, const PublicKey& pub, Rng& rng) {
    if (q.size() != pub.k) throw UsageError("message length must be k");
    Ciphertext c;
    c.error = sample_weight(pub.n, pub.t, rng);
    c.q_prime = vecmat(q, pub.G_prime) ^ c.error;
    return c;
}

namespace {

// q S, recovered from the private code.
BitVector unscrambled_message(const BitVector& q_prime, const PrivateKey& priv) {
    const auto& code = priv.code;
    if (q_prime.size() != code.n) throw UsageError("ciphertext length must be N");
    // y = q' P^-1 = q' P^T, i.e. y_i = q'_{perm[i]}
    BitVector y(code.n);
    for (std::size_t i = 0; i < code.n; ++i)
        if (q_prime.get(priv.perm[i])) y.set(i);
    y ^= decode(y, code);
    return code.message_of(y);
}

} // namespace

BitVector decrypt(const BitVector& q_prime, const PrivateKey& priv) {
    const BitVector qs = unscrambled_message(q_prime, priv);
    if (priv.S_inv) return vecmat(qs, *priv.S_inv);
    auto q = solve_left(priv.S, qs);
    if (!q) throw DecodeFailure("message is not in the image of S");
    return *q;
}

std::vector<BitVector> decrypt_all(const BitVector& q_prime, const PrivateKey& priv) {
    const BitVector q0 = decrypt(q_prime, priv);
    std::vector<BitVector> out{q0};
    for (const auto& v : priv.S_kernel) {
        const std::size_t cur = out.size();
        for (std::size_t i = 0; i < cur; ++i) out.push_back(out[i] ^ v);
    }
    return out;
}

bool verify_solution(const McElieceInstance& inst, const Solution& sol) {
    if (sol.q.size() != inst.k || sol.error.size() != inst.n) return false;
    if (sol.error.weight() != inst.t) return false;
    return (vecmat(sol.q, inst.G_prime) ^ sol.error) == inst.q_prime;
}

GeneratedInstance generate_instance(std::size_t n, unsigned t, unsigned m, const std::string& seed,
                                    bool allow_singular_s) {
    Rng master(seed);
    auto kp = keygen(n, t, m, master, allow_singular_s);
    Rng msg_rng = master.split("message");
    Rng err_rng = master.split("error");

    GeneratedInstance g;
    g.solution.q = BitVector::random(kp.pub.k, msg_rng);
    auto c = encrypt(g.solution.q, kp.pub, err_rng);
    g.solution.error = std::move(c.error);

    auto& inst = g.instance;
    inst.n = n;
    inst.k = kp.pub.k;
    inst.t = t;
    inst.m = m;
    inst.reduction_poly = kp.priv.code.field->reduction_poly();
    inst.G_prime = std::move(kp.pub.G_prime);
    inst.q_prime = std::move(c.q_prime);
    inst.seed = seed;
    g.key = std::move(kp.priv);
    return g;
}

} // namespace mcforge
