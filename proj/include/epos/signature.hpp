#pragma once

#include <epos/core.hpp>

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace epos {

using Bytes = std::vector<std::uint8_t>;
using PublicKey = std::array<std::uint8_t, 32>;
using Signature = std::array<std::uint8_t, 64>;
using Digest = std::array<std::uint8_t, 32>;

/// Ed25519 key pair. Signing is deterministic.
class KeyPair {
public:
    /// KeyGen from a 32-byte seed expanded out of a 64-bit value.
    static KeyPair from_seed(std::uint64_t seed);

    const PublicKey& public_key() const { return public_key_; }
    Signature sign(std::span<const std::uint8_t> message) const;

private:
    PublicKey public_key_{};
    std::array<std::uint8_t, 64> secret_key_{};
};

bool verify_signature(const PublicKey& pk, std::span<const std::uint8_t> message, const Signature& sig);

/// BLAKE2b-256.
Digest hash_bytes(std::span<const std::uint8_t> data);

std::string to_hex(std::span<const std::uint8_t> data);

/// Public keys the contract (and every peer) knows, by miner.
class KeyRegistry {
public:
    void register_key(NodeId node, const PublicKey& pk) { keys_[node] = pk; }
    std::optional<PublicKey> lookup(NodeId node) const;

private:
    std::map<NodeId, PublicKey> keys_;
};

/// Little-endian, length-prefixed field writer for canonical encodings.
class Encoder {
public:
    void u64(std::uint64_t v);
    void i64(std::int64_t v) { u64(static_cast<std::uint64_t>(v)); }
    void field(std::span<const std::uint8_t> bytes);
    const Bytes& bytes() const { return out_; }
    Bytes take() { return std::move(out_); }

private:
    Bytes out_;
};

} // namespace epos
