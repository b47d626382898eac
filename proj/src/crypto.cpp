#define OPENSSL_SUPPRESS_DEPRECATED
#include "auxkey/crypto.hpp"

#include <openssl/sha.h>

#include <algorithm>
#include <cstring>
#include <limits>
#include <stdexcept>
#include <vector>

namespace auxkey {

namespace {

constexpr std::size_t kShaBlock = 64;

struct KeyedState {
    SHA256_CTX inner;
    SHA256_CTX outer;
};

KeyedState keyed_state(ByteView key) {
    std::array<std::uint8_t, kShaBlock> k0{};
    if (key.size() > kShaBlock) {
        SHA256(key.data(), key.size(), k0.data());
    } else {
        std::copy(key.begin(), key.end(), k0.begin());
    }
    std::array<std::uint8_t, kShaBlock> pad;
    KeyedState st;
    for (std::size_t i = 0; i < kShaBlock; ++i) pad[i] = k0[i] ^ 0x36;
    SHA256_Init(&st.inner);
    SHA256_Update(&st.inner, pad.data(), pad.size());
    for (std::size_t i = 0; i < kShaBlock; ++i) pad[i] = k0[i] ^ 0x5c;
    SHA256_Init(&st.outer);
    SHA256_Update(&st.outer, pad.data(), pad.size());
    return st;
}

// Master keys recur across many handshakes, so the post-pad hash states of
// recently used 16-octet keys are kept in a small direct-mapped table. A hit
// saves two of the four compressions per call.
struct KeyedCache {
    static constexpr std::size_t kSlots = 8192;
    struct Slot {
        Block key;
        bool used = false;
        KeyedState state;
    };
    std::vector<Slot> slots = std::vector<Slot>(kSlots);

    const KeyedState& get(ByteView key) {
        std::uint64_t h = 0;
        std::memcpy(&h, key.data(), sizeof h);
        Slot& s = slots[(h * 0x9e3779b97f4a7c15ULL) >> 51];
        if (!s.used || !std::equal(key.begin(), key.end(), s.key.begin())) {
            std::copy(key.begin(), key.end(), s.key.begin());
            s.state = keyed_state(key);
            s.used = true;
        }
        return s.state;
    }
};

// SHA256_* is the low-level interface; it reaches the SHA-NI code path without
// the per-call EVP fetch overhead, which dominates on 16-octet inputs.
std::array<std::uint8_t, 32> hmac_raw(ByteView key, ByteView message) {
    thread_local KeyedCache cache;
    const KeyedState st = key.size() == kKeyLen ? cache.get(key) : keyed_state(key);
    std::array<std::uint8_t, 32> inner;
    std::array<std::uint8_t, 32> out;

    SHA256_CTX ctx = st.inner;
    SHA256_Update(&ctx, message.data(), message.size());
    SHA256_Final(inner.data(), &ctx);

    ctx = st.outer;
    SHA256_Update(&ctx, inner.data(), inner.size());
    SHA256_Final(out.data(), &ctx);
    return out;
}

void put_be32(std::uint8_t* p, std::uint32_t v) {
    p[0] = static_cast<std::uint8_t>(v >> 24);
    p[1] = static_cast<std::uint8_t>(v >> 16);
    p[2] = static_cast<std::uint8_t>(v >> 8);
    p[3] = static_cast<std::uint8_t>(v);
}

// Keystream block i = HMAC(key, "ENC\0" || be32(len) || be32(i)).
// The 12-octet input never coincides with a PRF (16) or MAC (64) input.
Bytes keystream_xor(const KeyMaterial& key, ByteView in) {
    Bytes out(in.begin(), in.end());
    std::array<std::uint8_t, 12> label{'E', 'N', 'C', 0};
    put_be32(label.data() + 4, static_cast<std::uint32_t>(in.size()));
    for (std::size_t off = 0, blk = 0; off < out.size(); off += 32, ++blk) {
        put_be32(label.data() + 8, static_cast<std::uint32_t>(blk));
        const auto ks = hmac_raw(as_bytes(key), label);
        const std::size_t n = std::min<std::size_t>(32, out.size() - off);
        for (std::size_t i = 0; i < n; ++i) out[off + i] ^= ks[i];
    }
    return out;
}

thread_local OpCounts tls_counts;

}  // namespace

Block NodeId::canonical_bytes() const {
    Block b{};
    for (std::size_t i = 0; i < 8; ++i) {
        b[kKeyLen - 1 - i] = static_cast<std::uint8_t>(raw >> (8 * i));
    }
    return b;
}

NodeId NodeId::from_canonical(const Block& bytes) {
    for (std::size_t i = 0; i < kKeyLen - 8; ++i) {
        if (bytes[i] != 0) throw std::invalid_argument("NodeId: identifier exceeds 64 bits");
    }
    std::uint64_t v = 0;
    for (std::size_t i = kKeyLen - 8; i < kKeyLen; ++i) v = (v << 8) | bytes[i];
    return NodeId{v};
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    engine_.seed(seq);
}

std::uint64_t Rng::mix(std::uint64_t a, std::uint64_t b) {
    // splitmix64 finalizer over a combined word
    std::uint64_t z = a * 0x9e3779b97f4a7c15ULL + b + 0x632be59bd9b4e019ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t Rng::below(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("Rng::below: bound must be positive");
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x;
    do {
        x = next();
    } while (x >= limit);
    return x % bound;
}

void Rng::fill(std::span<std::uint8_t> out) {
    std::size_t i = 0;
    while (i < out.size()) {
        std::uint64_t w = next();
        for (int b = 0; b < 8 && i < out.size(); ++b, ++i) {
            out[i] = static_cast<std::uint8_t>(w);
            w >>= 8;
        }
    }
}

std::array<std::uint8_t, 32> hmac_sha256(ByteView key, ByteView message) {
    return hmac_raw(key, message);
}

KeyMaterial prf(const KeyMaterial& key, ByteView message) {
    ++tls_counts.prf;
    const auto h = hmac_raw(as_bytes(key), message);
    KeyMaterial out;
    std::copy_n(h.begin(), kKeyLen, out.bytes.begin());
    return out;
}

MacTag mac(const KeyMaterial& key, ByteView message) {
    ++tls_counts.mac;
    const auto h = hmac_raw(as_bytes(key), message);
    MacTag out;
    std::copy_n(h.begin(), kTagLen, out.bytes.begin());
    return out;
}

bool verify_mac(const MacTag& tag, const KeyMaterial& key, ByteView message) {
    return mac(key, message) == tag;
}

CipherText encrypt(const KeyMaterial& key, ByteView plaintext) {
    ++tls_counts.encrypt;
    return CipherText{keystream_xor(key, plaintext)};
}

Bytes decrypt(const KeyMaterial& key, const CipherText& ct) {
    ++tls_counts.decrypt;
    return keystream_xor(key, ct.bytes);
}

KeyMaterial mask_key(const KeyMaterial& key, NodeId id, const Nonce& rn) {
    const Block idb = id.canonical_bytes();
    KeyMaterial out;
    for (std::size_t i = 0; i < kKeyLen; ++i) out.bytes[i] = key.bytes[i] ^ idb[i] ^ rn.bytes[i];
    return out;
}

KeyMaterial unmask_key(const KeyMaterial& masked, NodeId id, const Nonce& rn) {
    return mask_key(masked, id, rn);
}

KeyMaterial random_key(Rng& rng) {
    KeyMaterial k;
    rng.fill(k.bytes);
    return k;
}

Nonce random_nonce(Rng& rng) {
    Nonce n;
    rng.fill(n.bytes);
    return n;
}

OpCounts& OpCounts::operator+=(const OpCounts& o) {
    prf += o.prf;
    mac += o.mac;
    encrypt += o.encrypt;
    decrypt += o.decrypt;
    return *this;
}

OpCounts operator-(OpCounts a, const OpCounts& b) {
    a.prf -= b.prf;
    a.mac -= b.mac;
    a.encrypt -= b.encrypt;
    a.decrypt -= b.decrypt;
    return a;
}

OpCounts& thread_op_counts() { return tls_counts; }

std::string to_hex(ByteView bytes) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string s;
    s.reserve(bytes.size() * 2);
    for (auto b : bytes) {
        s.push_back(digits[b >> 4]);
        s.push_back(digits[b & 0xf]);
    }
    return s;
}

Bytes from_hex(std::string_view hex) {
    if (hex.size() % 2 != 0) throw std::invalid_argument("from_hex: odd length");
    auto nibble = [](char c) -> std::uint8_t {
        if (c >= '0' && c <= '9') return static_cast<std::uint8_t>(c - '0');
        if (c >= 'a' && c <= 'f') return static_cast<std::uint8_t>(c - 'a' + 10);
        if (c >= 'A' && c <= 'F') return static_cast<std::uint8_t>(c - 'A' + 10);
        throw std::invalid_argument("from_hex: bad digit");
    };
    Bytes out(hex.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = static_cast<std::uint8_t>((nibble(hex[2 * i]) << 4) | nibble(hex[2 * i + 1]));
    }
    return out;
}

}  // namespace auxkey
