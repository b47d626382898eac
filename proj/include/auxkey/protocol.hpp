#pragma once

// Node state machines and wire messages for auxiliary-assisted pairwise key
// establishment.
//
// Case 1 (regular u <-> regular v, via auxiliary A discovered by v):
//   1. u -> v : id_u || RN_u                                    InitRequest
//   2. v -> A : id_u || id_v || RN_u || RN_v || MAC_MKv(...)    AuxRequest
//   3. A -> v : E_MKu(k ^ id_u ^ RN_u), E_MKv(k ^ id_v ^ RN_v)  AuxReply
//   4. v -> u : E_MKu(k ^ id_u ^ RN_u)                          ForwardKey
// Case 2 (regular u <-> auxiliary A):
//   1. u -> A : id_u                                            AuxDirectRequest
//   2. A -> u : E_MKu(k)                                        AuxDirectReply

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <variant>

#include "auxkey/crypto.hpp"

namespace auxkey {

struct ProtocolError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DuplicateId : ProtocolError {
    using ProtocolError::ProtocolError;
};
struct SelfTarget : ProtocolError {
    using ProtocolError::ProtocolError;
};
struct AuthError : ProtocolError {
    using ProtocolError::ProtocolError;
};
struct NoPendingTransaction : ProtocolError {
    using ProtocolError::ProtocolError;
};
struct MalformedMessage : ProtocolError {
    using ProtocolError::ProtocolError;
};

struct InitRequest {
    NodeId from;
    Nonce rn_u;
    friend bool operator==(const InitRequest&, const InitRequest&) = default;
};

struct AuxRequest {
    NodeId id_u;
    NodeId id_v;
    Nonce rn_u;
    Nonce rn_v;
    MacTag tag;

    /// id_u || id_v || RN_u || RN_v in canonical bytes; the MAC input.
    Bytes authenticated_bytes() const;
    friend bool operator==(const AuxRequest&, const AuxRequest&) = default;
};

struct AuxReply {
    CipherText for_u;
    CipherText for_v;
    friend bool operator==(const AuxReply&, const AuxReply&) = default;
};

struct ForwardKey {
    CipherText for_u;
    friend bool operator==(const ForwardKey&, const ForwardKey&) = default;
};

struct AuxDirectRequest {
    NodeId from;
    friend bool operator==(const AuxDirectRequest&, const AuxDirectRequest&) = default;
};

struct AuxDirectReply {
    CipherText enc_key;
    friend bool operator==(const AuxDirectReply&, const AuxDirectReply&) = default;
};

using ProtocolMessage =
    std::variant<InitRequest, AuxRequest, AuxReply, ForwardKey, AuxDirectRequest, AuxDirectReply>;

/// 1-octet variant tag (1..6, declaration order) followed by fixed-width
/// fields; ciphertexts carry a 2-octet big-endian length prefix.
Bytes encode(const ProtocolMessage& msg);
ProtocolMessage decode(ByteView bytes);

enum class Role : std::uint8_t { initiator, responder };

struct PendingTransaction {
    Role role = Role::initiator;
    Nonce own;            // RN of this node
    Nonce peer;           // RN of the other endpoint (responder only)
    friend bool operator==(const PendingTransaction&, const PendingTransaction&) = default;
};

struct RegularNode {
    NodeId id;
    KeyMaterial master_key;
    std::map<NodeId, KeyMaterial> pairwise_keys;
    std::map<NodeId, PendingTransaction> pending;

    /// Secrets loaded before deployment; session keys are not counted.
    std::size_t preloaded_secret_count() const { return 1; }
    std::optional<KeyMaterial> key_with(NodeId peer) const;
    /// Drop an unfinished transaction, e.g. when no auxiliary is reachable.
    void abandon(NodeId peer) { pending.erase(peer); }

    friend bool operator==(const RegularNode&, const RegularNode&) = default;
};

struct AuxiliaryNode {
    NodeId id;
    KeyMaterial special_key;
    /// Keys agreed with regular neighbours through Case 2.
    std::map<NodeId, KeyMaterial> session_keys;

    std::size_t preloaded_secret_count() const { return 1; }
    /// Digest over the full node state; unchanged by Case 1 traffic.
    std::uint64_t fingerprint() const;

    friend bool operator==(const AuxiliaryNode&, const AuxiliaryNode&) = default;
};

/// Offline key setup server. Holds SK and the issued identifier sets.
class SetupServer {
public:
    explicit SetupServer(Rng& rng);
    explicit SetupServer(const KeyMaterial& special_key) : special_key_(special_key) {}

    RegularNode provision_regular(NodeId id);
    AuxiliaryNode provision_auxiliary(NodeId id);

    // Post-deployment additions use exactly the same provisioning.
    RegularNode add_regular_node(NodeId id) { return provision_regular(id); }
    AuxiliaryNode add_auxiliary_node(NodeId id) { return provision_auxiliary(id); }

    const KeyMaterial& special_key() const { return special_key_; }
    bool is_issued(NodeId id) const;
    std::size_t issued_count() const { return regular_ids_.size() + aux_ids_.size(); }

private:
    void claim(NodeId id, std::unordered_set<NodeId>& into);

    KeyMaterial special_key_;
    std::unordered_set<NodeId> regular_ids_;
    std::unordered_set<NodeId> aux_ids_;
};

KeyMaterial derive_master_key(const KeyMaterial& special_key, NodeId id);

// Case 1 --------------------------------------------------------------------

InitRequest initiate(RegularNode& u, NodeId v_id, Rng& rng);
AuxRequest handle_init(RegularNode& v, const InitRequest& msg, Rng& rng);

/// Authenticates v, draws k_uv and returns both protected copies. The
/// auxiliary is taken by const reference: it keeps nothing from the
/// transaction. `issued` (optional) receives k_uv for audit harnesses.
AuxReply aux_handle(const AuxiliaryNode& aux, const AuxRequest& msg, Rng& rng,
                    KeyMaterial* issued = nullptr);

ForwardKey responder_handle_reply(RegularNode& v, const AuxReply& msg, NodeId peer);
KeyMaterial initiator_handle_forward(RegularNode& u, const ForwardKey& msg, NodeId peer);

// Case 2 --------------------------------------------------------------------

AuxDirectRequest aux_direct_request(const RegularNode& u);
/// Auxiliary side: draws the session key, records it, replies E_MKu(k).
AuxDirectReply aux_direct_handle(AuxiliaryNode& aux, const AuxDirectRequest& msg, Rng& rng);
KeyMaterial aux_direct_complete(RegularNode& u, const AuxDirectReply& msg, NodeId aux_id);

/// Both legs of Case 2 with reliable delivery.
KeyMaterial aux_direct(RegularNode& u, AuxiliaryNode& aux, Rng& rng);

}  // namespace auxkey
