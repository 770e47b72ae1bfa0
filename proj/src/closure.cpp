#include "protosec/closure.hpp"

#include <vector>

namespace protosec {

MessageSet parts(const MessageSet& h) {
  MessageSet out;
  std::vector<Message> work(h.begin(), h.end());
  while (!work.empty()) {
    Message m = work.back();
    work.pop_back();
    if (!out.insert(m)) continue;
    if (m.is_pair()) {
      work.push_back(m.first());
      work.push_back(m.second());
    } else if (m.is_crypt()) {
      work.push_back(m.body());
    }
  }
  return out;
}

AnalzClosure::AnalzClosure(const MessageSet& h) { add_all(h); }

void AnalzClosure::add_all(const MessageSet& h) {
  for (const auto& m : h) add(m);
}

void AnalzClosure::add(const Message& start) {
  std::vector<Message> work{start};
  while (!work.empty()) {
    Message m = work.back();
    work.pop_back();
    if (!known_.insert(m)) continue;
    switch (m.kind()) {
      case Message::Kind::kPair:
        work.push_back(m.first());
        work.push_back(m.second());
        break;
      case Message::Kind::kCrypt: {
        KeyId needed = inv_key(m.key_id());
        if (known_.contains(Message::key(needed))) {
          work.push_back(m.body());
        } else {
          locked_.emplace_back(needed, m.body());
        }
        break;
      }
      case Message::Kind::kKey: {
        KeyId k = m.key_id();
        for (auto it = locked_.begin(); it != locked_.end();) {
          if (it->first == k) {
            work.push_back(it->second);
            it = locked_.erase(it);
          } else {
            ++it;
          }
        }
        break;
      }
      default:
        break;
    }
  }
}

MessageSet analz(const MessageSet& h) { return AnalzClosure(h).known(); }

bool synth_member(const Message& x, const MessageSet& h) {
  switch (x.kind()) {
    case Message::Kind::kAgent:
    case Message::Kind::kNumber:
      return true;
    case Message::Kind::kNonce:
    case Message::Kind::kKey:
      return h.contains(x);
    case Message::Kind::kHash:
      return h.contains(x) || synth_member(x.body(), h);
    case Message::Kind::kPair:
      return h.contains(x) || (synth_member(x.first(), h) && synth_member(x.second(), h));
    case Message::Kind::kCrypt:
      return h.contains(x) ||
             (h.contains(Message::key(x.key_id())) && synth_member(x.body(), h));
  }
  return false;
}

MessageSet pparts(const MessageSet& h) {
  MessageSet out;
  std::vector<Message> work;
  for (const auto& m : h)
    if (m.is_pair()) work.push_back(m);
  while (!work.empty()) {
    Message m = work.back();
    work.pop_back();
    if (!out.insert(m)) continue;
    if (m.first().is_pair()) work.push_back(m.first());
    if (m.second().is_pair()) work.push_back(m.second());
  }
  return out;
}

MessageSet kparts(const MessageSet& h) {
  MessageSet out;
  std::vector<Message> work(h.begin(), h.end());
  MessageSet seen_pairs;
  while (!work.empty()) {
    Message m = work.back();
    work.pop_back();
    if (m.is_pair()) {
      if (!seen_pairs.insert(m)) continue;
      work.push_back(m.first());
      work.push_back(m.second());
    } else {
      out.insert(m);
    }
  }
  return out;
}

std::size_t crypt_measure(const MessageSet& h) {
  std::size_t n = 0;
  for (const auto& m : h)
    if (m.is_crypt()) ++n;
  return n;
}

}  // namespace protosec
