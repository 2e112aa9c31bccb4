#include "heda/wire.hpp"

#include "heda/errors.hpp"

namespace heda {

namespace {

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
  out.push_back(static_cast<uint8_t>(v >> 24));
  out.push_back(static_cast<uint8_t>(v >> 16));
  out.push_back(static_cast<uint8_t>(v >> 8));
  out.push_back(static_cast<uint8_t>(v));
}

uint32_t get_u32(const std::vector<uint8_t>& in, size_t& pos) {
  if (pos + 4 > in.size()) throw ParseError("message: truncated u32");
  uint32_t v = (static_cast<uint32_t>(in[pos]) << 24) |
               (static_cast<uint32_t>(in[pos + 1]) << 16) |
               (static_cast<uint32_t>(in[pos + 2]) << 8) |
               static_cast<uint32_t>(in[pos + 3]);
  pos += 4;
  return v;
}

}  // namespace

size_t Message::wire_size() const {
  size_t n = 4 + 1 + 1 + 2;
  for (const WireItem& item : items) n += 4 + item.width;
  return n;
}

std::vector<uint8_t> Message::serialize() const {
  if (items.size() > 0xffff) {
    throw RangeError("message: payload count exceeds u16");
  }
  std::vector<uint8_t> out;
  out.reserve(wire_size());
  size_t body = wire_size() - 4;
  put_u32(out, static_cast<uint32_t>(body));
  out.push_back(static_cast<uint8_t>(protocol_id));
  out.push_back(step);
  out.push_back(static_cast<uint8_t>(items.size() >> 8));
  out.push_back(static_cast<uint8_t>(items.size() & 0xff));
  for (const WireItem& item : items) {
    put_u32(out, item.width);
    std::vector<uint8_t> bytes = to_bytes_be(item.value, item.width);
    out.insert(out.end(), bytes.begin(), bytes.end());
  }
  return out;
}

Message Message::deserialize(const std::vector<uint8_t>& bytes, Role sender) {
  size_t pos = 0;
  uint32_t body = get_u32(bytes, pos);
  if (bytes.size() - 4 != body) throw ParseError("message: bad frame length");
  if (pos + 4 > bytes.size()) throw ParseError("message: truncated header");
  Message m;
  m.protocol_id = static_cast<ProtocolId>(bytes[pos++]);
  m.step = bytes[pos++];
  uint16_t count = static_cast<uint16_t>((bytes[pos] << 8) | bytes[pos + 1]);
  pos += 2;
  m.sender = sender;
  m.items.reserve(count);
  for (uint16_t i = 0; i < count; ++i) {
    uint32_t width = get_u32(bytes, pos);
    if (pos + width > bytes.size()) throw ParseError("message: truncated item");
    WireItem item;
    item.width = width;
    item.value = from_bytes_be(bytes.data() + pos, width);
    pos += width;
    m.items.push_back(std::move(item));
  }
  if (pos != bytes.size()) throw ParseError("message: trailing bytes");
  return m;
}

size_t Transcript::round_trips() const {
  size_t n = 0;
  for (size_t i = 1; i < messages.size(); ++i) {
    if (messages[i].sender == Role::kAlice &&
        messages[i - 1].sender == Role::kBob) {
      ++n;
    }
  }
  return n;
}

void Transcript::clear() {
  messages.clear();
  bytes_from_alice = 0;
  bytes_from_bob = 0;
}

}  // namespace heda
