#include "protosec/msg_list.hpp"

#include <algorithm>
#include <string>

namespace protosec {

MalformedList::MalformedList(const Message& m) : Error("malformed message list: " + m.str()) {}

IndexOutOfRange::IndexOutOfRange(std::size_t index, std::size_t length)
    : Error("list index " + std::to_string(index) + " out of range for length " +
            std::to_string(length)) {}

namespace msglist {

Message nil() { return Message::number(0); }

Message cons(const Message& head, const Message& tail) { return Message::pair(head, tail); }

Message from_vector(const std::vector<Message>& items) {
  Message acc = nil();
  for (auto it = items.rbegin(); it != items.rend(); ++it) acc = cons(*it, acc);
  return acc;
}

bool well_formed(const Message& l) {
  Message cur = l;
  while (cur.is_pair()) cur = cur.second();
  return cur == nil();
}

std::vector<Message> to_vector(const Message& l) {
  std::vector<Message> out;
  Message cur = l;
  while (cur.is_pair()) {
    out.push_back(cur.first());
    cur = cur.second();
  }
  if (cur != nil()) throw MalformedList(l);
  return out;
}

bool is_agent_list(const Message& l) {
  Message cur = l;
  while (cur.is_pair()) {
    if (cur.first().kind() != Message::Kind::kAgent) return false;
    cur = cur.second();
  }
  return cur == nil();
}

std::size_t len(const Message& l) { return to_vector(l).size(); }

Message head(const Message& l) {
  if (l.is_pair()) return l.first();
  if (l == nil()) return nil();
  throw MalformedList(l);
}

Message app(const Message& front, const Message& back) {
  auto items = to_vector(front);
  Message acc = back;
  if (!well_formed(back)) throw MalformedList(back);
  for (auto it = items.rbegin(); it != items.rend(); ++it) acc = cons(*it, acc);
  return acc;
}

Message del(const Message& x, const Message& l) {
  auto items = to_vector(l);
  auto it = std::find(items.begin(), items.end(), x);
  if (it != items.end()) items.erase(it);
  return from_vector(items);
}

bool isin(const Message& x, const Message& l) {
  auto items = to_vector(l);
  return std::find(items.begin(), items.end(), x) != items.end();
}

Message ith(const Message& l, std::size_t i) {
  auto items = to_vector(l);
  if (i >= items.size()) throw IndexOutOfRange(i, items.size());
  return items[i];
}

Message repl(const Message& l, std::size_t i, const Message& m) {
  auto items = to_vector(l);
  if (i >= items.size()) throw IndexOutOfRange(i, items.size());
  items[i] = m;
  return from_vector(items);
}

Message ins(const Message& l, std::size_t i, const Message& m) {
  auto items = to_vector(l);
  if (i > items.size()) throw IndexOutOfRange(i, items.size());
  items.insert(items.begin() + static_cast<std::ptrdiff_t>(i), m);
  return from_vector(items);
}

Message trunc(const Message& l, std::size_t i) {
  auto items = to_vector(l);
  if (i > items.size()) throw IndexOutOfRange(i, items.size());
  return from_vector(std::vector<Message>(items.begin() + static_cast<std::ptrdiff_t>(i), items.end()));
}

}  // namespace msglist
}  // namespace protosec
