#pragma once

#include <deque>

#include "heda/wire.hpp"

namespace heda {

// Message channel between the two roles. Implementations must preserve
// per-direction FIFO order. The in-process variant below is the only one
// shipped; the wire format in wire.hpp is what a socket transport would
// move, so byte accounting here matches what a remote run would send.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual void send(Message m) = 0;
  virtual Message receive(Role me) = 0;
  virtual Transcript& transcript() = 0;
};

class InProcessTransport : public Transport {
 public:
  // Sends serialize the message once to charge the byte counters, then
  // queue the structured form for the peer.
  void send(Message m) override;
  Message receive(Role me) override;
  Transcript& transcript() override { return transcript_; }

 private:
  std::deque<Message> to_alice_;
  std::deque<Message> to_bob_;
  Transcript transcript_;
};

}  // namespace heda
