#pragma once

#include <cstdint>
#include <vector>

#include "heda/bigint.hpp"

namespace heda {

enum class Role : uint8_t { kAlice = 0, kBob = 1 };

// Protocol tags carried on the wire. Values 1..7 are the standalone
// two-party blocks; the trainer's composite steps get their own tags.
enum class ProtocolId : uint8_t {
  kSecureAdd = 1,
  kSecureSub = 2,
  kSecureDot = 3,
  kSecureMul = 4,
  kSecurePow = 5,
  kConvert = 6,
  kRekey = 7,
  kTrainData = 10,
  kTrainSigmoid = 11,
};

// One length-prefixed big-endian integer on the wire. `width` fixes the
// serialized byte count (normally the modulus width of the ciphertext's
// key) so byte counters are reproducible for a given key size.
struct WireItem {
  Bigint value;
  uint32_t width = 0;
};

// Framing: { u32 length | u8 protocol_id | u8 step | u16 payload_count |
// payloads }, each payload as { u32 width | width bytes, big-endian }.
// The u32 length covers everything after itself. The sender is a channel
// property, not a wire field.
struct Message {
  ProtocolId protocol_id;
  uint8_t step = 0;
  Role sender = Role::kAlice;
  std::vector<WireItem> items;

  size_t wire_size() const;
  std::vector<uint8_t> serialize() const;
  static Message deserialize(const std::vector<uint8_t>& bytes, Role sender);
};

// Ordered record of every message moved through a transport, plus byte
// counters per sender.
struct Transcript {
  std::vector<Message> messages;
  size_t bytes_from_alice = 0;
  size_t bytes_from_bob = 0;

  // Number of direction changes into Alice->Bob: a message from Alice
  // that immediately follows one from Bob counts one round trip.
  size_t round_trips() const;
  size_t total_bytes() const { return bytes_from_alice + bytes_from_bob; }
  void clear();
};

}  // namespace heda
