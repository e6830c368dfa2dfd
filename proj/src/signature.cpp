#include <epos/signature.hpp>

#include <sodium.h>

namespace epos {

namespace {

void ensure_sodium()
{
    static const bool ready = [] {
        if (sodium_init() < 0) {
            throw Error("libsodium initialization failed");
        }
        return true;
    }();
    (void)ready;
}

} // namespace

KeyPair KeyPair::from_seed(std::uint64_t seed)
{
    ensure_sodium();
    std::array<std::uint8_t, crypto_sign_SEEDBYTES> expanded{};
    std::array<std::uint8_t, 8> raw{};
    for (int i = 0; i < 8; ++i) {
        raw[i] = static_cast<std::uint8_t>(seed >> (8 * i));
    }
    crypto_generichash(expanded.data(), expanded.size(), raw.data(), raw.size(), nullptr, 0);

    KeyPair kp;
    crypto_sign_seed_keypair(kp.public_key_.data(), kp.secret_key_.data(), expanded.data());
    return kp;
}

Signature KeyPair::sign(std::span<const std::uint8_t> message) const
{
    Signature sig{};
    crypto_sign_detached(sig.data(), nullptr, message.data(), message.size(), secret_key_.data());
    return sig;
}

bool verify_signature(const PublicKey& pk, std::span<const std::uint8_t> message, const Signature& sig)
{
    ensure_sodium();
    return crypto_sign_verify_detached(sig.data(), message.data(), message.size(), pk.data()) == 0;
}

Digest hash_bytes(std::span<const std::uint8_t> data)
{
    ensure_sodium();
    Digest out{};
    crypto_generichash(out.data(), out.size(), data.data(), data.size(), nullptr, 0);
    return out;
}

std::string to_hex(std::span<const std::uint8_t> data)
{
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out;
    out.reserve(data.size() * 2);
    for (auto b : data) {
        out.push_back(kDigits[b >> 4]);
        out.push_back(kDigits[b & 0xf]);
    }
    return out;
}

std::optional<PublicKey> KeyRegistry::lookup(NodeId node) const
{
    auto it = keys_.find(node);
    if (it == keys_.end()) {
        return std::nullopt;
    }
    return it->second;
}

void Encoder::u64(std::uint64_t v)
{
    for (int i = 0; i < 8; ++i) {
        out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
}

void Encoder::field(std::span<const std::uint8_t> bytes)
{
    u64(bytes.size());
    out_.insert(out_.end(), bytes.begin(), bytes.end());
}

} // namespace epos
