#pragma once

// Symmetric primitives used by the key-establishment protocol.
//
// Every secret, identifier and nonce is normalized to a 16-octet block so the
// XOR masking step operates on equal-width operands. PRF and MAC are both
// HMAC-SHA256 truncated to 16 octets; the cipher is a length-preserving
// keystream derived from the same keyed hash in counter mode.

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace auxkey {

inline constexpr std::size_t kKeyLen = 16;
inline constexpr std::size_t kTagLen = 16;

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;
using Block = std::array<std::uint8_t, kKeyLen>;

struct KeyMaterial {
    Block bytes{};
    friend bool operator==(const KeyMaterial&, const KeyMaterial&) = default;
};

struct Nonce {
    Block bytes{};
    friend bool operator==(const Nonce&, const Nonce&) = default;
};

struct MacTag {
    std::array<std::uint8_t, kTagLen> bytes{};
    friend bool operator==(const MacTag&, const MacTag&) = default;
};

struct CipherText {
    Bytes bytes;
    friend bool operator==(const CipherText&, const CipherText&) = default;
};

struct NodeId {
    std::uint64_t raw = 0;

    /// Big-endian, zero-padded to kKeyLen octets.
    Block canonical_bytes() const;
    static NodeId from_canonical(const Block& bytes);

    friend auto operator<=>(const NodeId&, const NodeId&) = default;
};

/// Seedable pseudo-random stream. Streams are derived from (seed, stream id)
/// so each trial or simulation entity gets an independent, reproducible
/// sequence.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

    std::uint64_t next() { return engine_(); }
    /// Uniform in [0, 1) with 53 bits of precision.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    /// Uniform integer in [0, bound). bound must be > 0.
    std::uint64_t below(std::uint64_t bound);
    void fill(std::span<std::uint8_t> out);

    /// Child stream keyed on this generator's seed material.
    Rng derive(std::uint64_t stream) const { return Rng(seed_, mix(stream_, stream)); }

    friend bool operator==(const Rng&, const Rng&) = default;

private:
    static std::uint64_t mix(std::uint64_t a, std::uint64_t b);

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::mt19937_64 engine_;
};

KeyMaterial prf(const KeyMaterial& key, ByteView message);
MacTag mac(const KeyMaterial& key, ByteView message);
bool verify_mac(const MacTag& tag, const KeyMaterial& key, ByteView message);

CipherText encrypt(const KeyMaterial& key, ByteView plaintext);
Bytes decrypt(const KeyMaterial& key, const CipherText& ct);

KeyMaterial mask_key(const KeyMaterial& key, NodeId id, const Nonce& rn);
KeyMaterial unmask_key(const KeyMaterial& masked, NodeId id, const Nonce& rn);

KeyMaterial random_key(Rng& rng);
Nonce random_nonce(Rng& rng);

/// Full 32-octet HMAC-SHA256, exposed for test-vector checks.
std::array<std::uint8_t, 32> hmac_sha256(ByteView key, ByteView message);

/// Per-thread tally of primitive invocations. verify_mac counts as a MAC.
struct OpCounts {
    std::uint64_t prf = 0;
    std::uint64_t mac = 0;
    std::uint64_t encrypt = 0;
    std::uint64_t decrypt = 0;

    OpCounts& operator+=(const OpCounts& o);
    friend OpCounts operator+(OpCounts a, const OpCounts& b) { return a += b; }
    friend OpCounts operator-(OpCounts a, const OpCounts& b);
    friend bool operator==(const OpCounts&, const OpCounts&) = default;
};

OpCounts& thread_op_counts();

std::string to_hex(ByteView bytes);
Bytes from_hex(std::string_view hex);

inline ByteView as_bytes(const Block& b) { return {b.data(), b.size()}; }
inline ByteView as_bytes(const KeyMaterial& k) { return as_bytes(k.bytes); }

}  // namespace auxkey

template <>
struct std::hash<auxkey::NodeId> {
    std::size_t operator()(const auxkey::NodeId& id) const noexcept {
        return std::hash<std::uint64_t>{}(id.raw);
    }
};

template <>
struct std::hash<auxkey::KeyMaterial> {
    std::size_t operator()(const auxkey::KeyMaterial& k) const noexcept {
        std::uint64_t h = 0;
        for (std::size_t i = 0; i < 8; ++i) h = (h << 8) | k.bytes[i];
        return static_cast<std::size_t>(h);
    }
};
