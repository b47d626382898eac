#include "auxkey/protocol.hpp"

#include <algorithm>

namespace auxkey {

namespace {

void append(Bytes& out, const Block& b) { out.insert(out.end(), b.begin(), b.end()); }

void append(Bytes& out, const CipherText& ct) {
    if (ct.bytes.size() > 0xffff) throw MalformedMessage("ciphertext longer than 65535 octets");
    out.push_back(static_cast<std::uint8_t>(ct.bytes.size() >> 8));
    out.push_back(static_cast<std::uint8_t>(ct.bytes.size()));
    out.insert(out.end(), ct.bytes.begin(), ct.bytes.end());
}

KeyMaterial key_from_bytes(const Bytes& b) {
    if (b.size() != kKeyLen) throw MalformedMessage("protected key has wrong length");
    KeyMaterial k;
    std::copy(b.begin(), b.end(), k.bytes.begin());
    return k;
}

class Reader {
public:
    explicit Reader(ByteView in) : in_(in) {}

    Block block() {
        need(kKeyLen);
        Block b;
        std::copy_n(in_.begin() + static_cast<std::ptrdiff_t>(pos_), kKeyLen, b.begin());
        pos_ += kKeyLen;
        return b;
    }
    NodeId id() { return NodeId::from_canonical(block()); }
    Nonce nonce() { return Nonce{block()}; }
    MacTag tag() {
        MacTag t;
        t.bytes = block();
        return t;
    }
    CipherText cipher() {
        need(2);
        const std::size_t len = (std::size_t{in_[pos_]} << 8) | in_[pos_ + 1];
        pos_ += 2;
        need(len);
        CipherText ct{Bytes(in_.begin() + static_cast<std::ptrdiff_t>(pos_),
                            in_.begin() + static_cast<std::ptrdiff_t>(pos_ + len))};
        pos_ += len;
        return ct;
    }
    void finish() const {
        if (pos_ != in_.size()) throw MalformedMessage("trailing octets after message");
    }

private:
    void need(std::size_t n) const {
        if (in_.size() - pos_ < n) throw MalformedMessage("truncated message");
    }

    ByteView in_;
    std::size_t pos_ = 1;
};

}  // namespace

Bytes AuxRequest::authenticated_bytes() const {
    Bytes out;
    out.reserve(4 * kKeyLen);
    append(out, id_u.canonical_bytes());
    append(out, id_v.canonical_bytes());
    append(out, rn_u.bytes);
    append(out, rn_v.bytes);
    return out;
}

Bytes encode(const ProtocolMessage& msg) {
    Bytes out;
    out.push_back(static_cast<std::uint8_t>(msg.index() + 1));
    std::visit(
        [&out](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, InitRequest>) {
                append(out, m.from.canonical_bytes());
                append(out, m.rn_u.bytes);
            } else if constexpr (std::is_same_v<T, AuxRequest>) {
                append(out, m.id_u.canonical_bytes());
                append(out, m.id_v.canonical_bytes());
                append(out, m.rn_u.bytes);
                append(out, m.rn_v.bytes);
                append(out, m.tag.bytes);
            } else if constexpr (std::is_same_v<T, AuxReply>) {
                append(out, m.for_u);
                append(out, m.for_v);
            } else if constexpr (std::is_same_v<T, ForwardKey>) {
                append(out, m.for_u);
            } else if constexpr (std::is_same_v<T, AuxDirectRequest>) {
                append(out, m.from.canonical_bytes());
            } else {
                append(out, m.enc_key);
            }
        },
        msg);
    return out;
}

ProtocolMessage decode(ByteView bytes) {
    if (bytes.empty()) throw MalformedMessage("empty message");
    Reader r(bytes);
    ProtocolMessage msg;
    switch (bytes[0]) {
        case 1: {
            InitRequest m;
            m.from = r.id();
            m.rn_u = r.nonce();
            msg = m;
            break;
        }
        case 2: {
            AuxRequest m;
            m.id_u = r.id();
            m.id_v = r.id();
            m.rn_u = r.nonce();
            m.rn_v = r.nonce();
            m.tag = r.tag();
            msg = m;
            break;
        }
        case 3: {
            AuxReply m;
            m.for_u = r.cipher();
            m.for_v = r.cipher();
            msg = m;
            break;
        }
        case 4:
            msg = ForwardKey{r.cipher()};
            break;
        case 5:
            msg = AuxDirectRequest{r.id()};
            break;
        case 6:
            msg = AuxDirectReply{r.cipher()};
            break;
        default:
            throw MalformedMessage("unknown message tag " + std::to_string(bytes[0]));
    }
    r.finish();
    return msg;
}

std::optional<KeyMaterial> RegularNode::key_with(NodeId peer) const {
    auto it = pairwise_keys.find(peer);
    if (it == pairwise_keys.end()) return std::nullopt;
    return it->second;
}

std::uint64_t AuxiliaryNode::fingerprint() const {
    // FNV-1a over id, SK and the ordered session-key table.
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto feed = [&h](const Block& b) {
        for (auto octet : b) {
            h ^= octet;
            h *= 0x100000001b3ULL;
        }
    };
    feed(id.canonical_bytes());
    feed(special_key.bytes);
    for (const auto& [peer, key] : session_keys) {
        feed(peer.canonical_bytes());
        feed(key.bytes);
    }
    return h;
}

KeyMaterial derive_master_key(const KeyMaterial& special_key, NodeId id) {
    return prf(special_key, id.canonical_bytes());
}

SetupServer::SetupServer(Rng& rng) : special_key_(random_key(rng)) {}

bool SetupServer::is_issued(NodeId id) const {
    return regular_ids_.contains(id) || aux_ids_.contains(id);
}

void SetupServer::claim(NodeId id, std::unordered_set<NodeId>& into) {
    if (is_issued(id)) throw DuplicateId("identifier " + std::to_string(id.raw) + " already issued");
    into.insert(id);
}

RegularNode SetupServer::provision_regular(NodeId id) {
    claim(id, regular_ids_);
    RegularNode node;
    node.id = id;
    node.master_key = derive_master_key(special_key_, id);
    return node;
}

AuxiliaryNode SetupServer::provision_auxiliary(NodeId id) {
    claim(id, aux_ids_);
    return AuxiliaryNode{id, special_key_, {}};
}

InitRequest initiate(RegularNode& u, NodeId v_id, Rng& rng) {
    if (v_id == u.id) throw SelfTarget("node cannot establish a key with itself");
    const Nonce rn = random_nonce(rng);
    u.pending[v_id] = PendingTransaction{Role::initiator, rn, {}};
    return InitRequest{u.id, rn};
}

AuxRequest handle_init(RegularNode& v, const InitRequest& msg, Rng& rng) {
    if (msg.from == v.id) throw SelfTarget("init request claims to come from the responder itself");
    AuxRequest req;
    req.id_u = msg.from;
    req.id_v = v.id;
    req.rn_u = msg.rn_u;
    req.rn_v = random_nonce(rng);
    req.tag = mac(v.master_key, req.authenticated_bytes());
    v.pending[msg.from] = PendingTransaction{Role::responder, req.rn_v, req.rn_u};
    return req;
}

AuxReply aux_handle(const AuxiliaryNode& aux, const AuxRequest& msg, Rng& rng, KeyMaterial* issued) {
    const KeyMaterial mk_v = derive_master_key(aux.special_key, msg.id_v);
    if (!verify_mac(msg.tag, mk_v, msg.authenticated_bytes())) {
        throw AuthError("MAC mismatch on request from node " + std::to_string(msg.id_v.raw));
    }
    const KeyMaterial mk_u = derive_master_key(aux.special_key, msg.id_u);
    const KeyMaterial k_uv = random_key(rng);
    if (issued) *issued = k_uv;

    AuxReply reply;
    reply.for_u = encrypt(mk_u, as_bytes(mask_key(k_uv, msg.id_u, msg.rn_u)));
    reply.for_v = encrypt(mk_v, as_bytes(mask_key(k_uv, msg.id_v, msg.rn_v)));
    return reply;
}

ForwardKey responder_handle_reply(RegularNode& v, const AuxReply& msg, NodeId peer) {
    auto it = v.pending.find(peer);
    if (it == v.pending.end() || it->second.role != Role::responder) {
        throw NoPendingTransaction("responder has no open transaction with " + std::to_string(peer.raw));
    }
    const Nonce rn_v = it->second.own;
    const KeyMaterial masked = key_from_bytes(decrypt(v.master_key, msg.for_v));
    v.pairwise_keys[peer] = unmask_key(masked, v.id, rn_v);
    v.pending.erase(it);
    return ForwardKey{msg.for_u};
}

KeyMaterial initiator_handle_forward(RegularNode& u, const ForwardKey& msg, NodeId peer) {
    auto it = u.pending.find(peer);
    if (it == u.pending.end() || it->second.role != Role::initiator) {
        throw NoPendingTransaction("initiator has no open transaction with " + std::to_string(peer.raw));
    }
    const Nonce rn_u = it->second.own;
    const KeyMaterial masked = key_from_bytes(decrypt(u.master_key, msg.for_u));
    const KeyMaterial k = unmask_key(masked, u.id, rn_u);
    u.pairwise_keys[peer] = k;
    u.pending.erase(it);
    return k;
}

AuxDirectRequest aux_direct_request(const RegularNode& u) { return AuxDirectRequest{u.id}; }

AuxDirectReply aux_direct_handle(AuxiliaryNode& aux, const AuxDirectRequest& msg, Rng& rng) {
    const KeyMaterial k = random_key(rng);
    const KeyMaterial mk_u = derive_master_key(aux.special_key, msg.from);
    aux.session_keys[msg.from] = k;
    return AuxDirectReply{encrypt(mk_u, as_bytes(k))};
}

KeyMaterial aux_direct_complete(RegularNode& u, const AuxDirectReply& msg, NodeId aux_id) {
    const KeyMaterial k = key_from_bytes(decrypt(u.master_key, msg.enc_key));
    u.pairwise_keys[aux_id] = k;
    return k;
}

KeyMaterial aux_direct(RegularNode& u, AuxiliaryNode& aux, Rng& rng) {
    const AuxDirectReply reply = aux_direct_handle(aux, aux_direct_request(u), rng);
    return aux_direct_complete(u, reply, aux.id);
}

}  // namespace auxkey
