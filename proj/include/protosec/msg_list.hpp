#ifndef PROTOSEC_MSG_LIST_HPP_
#define PROTOSEC_MSG_LIST_HPP_

// Lists encoded as messages: nil = Number 0, cons(X, L) = {X, L}.

#include <cstddef>
#include <vector>

#include "protosec/message.hpp"

namespace protosec {

class MalformedList : public Error {
 public:
  explicit MalformedList(const Message& m);
};

class IndexOutOfRange : public Error {
 public:
  IndexOutOfRange(std::size_t index, std::size_t length);
};

namespace msglist {

Message nil();
Message cons(const Message& head, const Message& tail);
Message from_vector(const std::vector<Message>& items);

bool well_formed(const Message& l);
/// Throws MalformedList unless l is well formed.
std::vector<Message> to_vector(const Message& l);

/// Well-formed list whose elements are all Agent messages.
bool is_agent_list(const Message& l);

std::size_t len(const Message& l);
/// First element; the head of nil is nil.
Message head(const Message& l);
Message app(const Message& front, const Message& back);
/// Removes the first occurrence of x, if any.
Message del(const Message& x, const Message& l);
bool isin(const Message& x, const Message& l);
/// The (i+1)-th element.
Message ith(const Message& l, std::size_t i);
/// l with its (i+1)-th element replaced by m.
Message repl(const Message& l, std::size_t i, const Message& m);
/// l with m inserted before its (i+1)-th element; i may equal len(l).
Message ins(const Message& l, std::size_t i, const Message& m);
/// Drops the i first elements; requires i <= len(l).
Message trunc(const Message& l, std::size_t i);

}  // namespace msglist
}  // namespace protosec

#endif  // PROTOSEC_MSG_LIST_HPP_
