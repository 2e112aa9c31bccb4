#include "heda/transport.hpp"

#include "heda/errors.hpp"

namespace heda {

void InProcessTransport::send(Message m) {
  size_t bytes = m.serialize().size();
  if (m.sender == Role::kAlice) {
    transcript_.bytes_from_alice += bytes;
    to_bob_.push_back(m);
  } else {
    transcript_.bytes_from_bob += bytes;
    to_alice_.push_back(m);
  }
  transcript_.messages.push_back(std::move(m));
}

Message InProcessTransport::receive(Role me) {
  std::deque<Message>& queue = (me == Role::kAlice) ? to_alice_ : to_bob_;
  if (queue.empty()) {
    throw ParamError("transport: receive on an empty channel");
  }
  Message m = std::move(queue.front());
  queue.pop_front();
  return m;
}

}  // namespace heda
