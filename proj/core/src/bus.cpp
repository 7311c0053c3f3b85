#include "sitewatch/bus.hpp"

#include <algorithm>
#include <stdexcept>

#include "sitewatch/errors.hpp"

namespace sitewatch::bus {

std::string_view to_string(PayloadKind k) {
  switch (k) {
    case PayloadKind::FramePacket: return "FramePacket";
    case PayloadKind::DetectionList: return "DetectionList";
    case PayloadKind::RiskEvent: return "RiskEvent";
    case PayloadKind::ActuationCommand: return "ActuationCommand";
    case PayloadKind::AlertMessage: return "AlertMessage";
  }
  return "?";
}

PayloadKind kind_of(const Payload& p) {
  return static_cast<PayloadKind>(p.index());
}

std::uint64_t TopicStats::delivered() const {
  std::uint64_t sum = 0;
  for (const auto& q : queues) sum += q.delivered;
  return sum;
}

std::uint64_t TopicStats::dropped() const {
  std::uint64_t sum = 0;
  for (const auto& q : queues) sum += q.dropped;
  return sum;
}

Bus::~Bus() { stop(); }

TopicId Bus::create_topic(std::string name, PayloadKind kind, std::size_t capacity) {
  std::lock_guard lock(mutex_);
  if (capacity < 1) throw std::invalid_argument("create_topic: capacity must be >= 1");
  for (const auto& t : topics_) {
    if (t.name == name) throw std::invalid_argument("create_topic: duplicate topic " + name);
  }
  topics_.push_back({std::move(name), kind, capacity, 0, 0, {}});
  return topics_.size() - 1;
}

TopicId Bus::topic(std::string_view name) const {
  std::lock_guard lock(mutex_);
  for (std::size_t i = 0; i < topics_.size(); ++i) {
    if (topics_[i].name == name) return i;
  }
  throw std::out_of_range("no such topic: " + std::string(name));
}

SubscriptionId Bus::subscribe(TopicId topic) {
  std::lock_guard lock(mutex_);
  if (topic >= topics_.size()) throw std::out_of_range("subscribe: bad topic id");
  queues_.push_back({});
  topics_[topic].queues.push_back(queues_.size() - 1);
  return queues_.size() - 1;
}

void Bus::publish(TopicId topic, Payload payload) {
  {
    std::lock_guard lock(mutex_);
    publish_locked(topic, std::move(payload));
  }
  cv_.notify_all();
}

void Bus::publish_locked(TopicId topic, Payload payload) {
  if (topic >= topics_.size()) throw std::out_of_range("publish: bad topic id");
  Topic& t = topics_[topic];
  if (kind_of(payload) != t.kind) {
    throw std::invalid_argument("publish: payload kind mismatch on topic " + t.name);
  }
  ++t.published;
  for (std::size_t qi : t.queues) {
    Queue& q = queues_[qi];
    if (q.items.size() >= t.capacity) {
      q.items.pop_front();  // drop-oldest: freshest data wins
      ++q.stats.dropped;
    }
    q.items.push_back(payload);
    t.max_depth = std::max(t.max_depth, q.items.size());
  }
}

std::optional<Payload> Bus::try_pop(SubscriptionId subscription) {
  std::lock_guard lock(mutex_);
  if (subscription >= queues_.size()) throw std::out_of_range("try_pop: bad subscription id");
  Queue& q = queues_[subscription];
  if (q.items.empty()) return std::nullopt;
  Payload p = std::move(q.items.front());
  q.items.pop_front();
  ++q.stats.delivered;
  return p;
}

void Bus::add_node(std::string name, std::vector<TopicId> subscriptions,
                   std::vector<TopicId> publications, NodeFn callback) {
  std::lock_guard lock(mutex_);
  if (running_) throw std::logic_error("add_node: bus already started");
  for (TopicId sub : subscriptions) {
    if (std::find(publications.begin(), publications.end(), sub) != publications.end()) {
      throw std::invalid_argument("add_node: node " + name +
                                  " subscribes to its own publication");
    }
  }
  Node node;
  node.name = std::move(name);
  node.subscriptions = subscriptions;
  node.publications = std::move(publications);
  node.callback = std::move(callback);
  for (TopicId sub : subscriptions) {
    if (sub >= topics_.size()) throw std::out_of_range("add_node: bad topic id");
    queues_.push_back({});
    queues_.back().node = static_cast<int>(nodes_.size());
    topics_[sub].queues.push_back(queues_.size() - 1);
    node.queue_for_sub.push_back(queues_.size() - 1);
  }
  nodes_.push_back(std::move(node));
}

void Bus::deliver_outputs_locked(const Node& node, std::vector<Publication>&& outputs) {
  for (auto& out : outputs) {
    if (std::find(node.publications.begin(), node.publications.end(), out.topic) ==
        node.publications.end()) {
      throw std::logic_error("node " + node.name + " published to an undeclared topic");
    }
    publish_locked(out.topic, std::move(out.payload));
  }
}

BusStats Bus::pump(std::size_t max_rounds) {
  std::unique_lock lock(mutex_);
  if (running_) throw std::logic_error("pump: bus is free-running");

  for (std::size_t round = 0; round < max_rounds; ++round) {
    std::size_t processed = 0;
    for (std::size_t ni = 0; ni < nodes_.size(); ++ni) {
      Node& node = nodes_[ni];
      for (std::size_t si = 0; si < node.subscriptions.size(); ++si) {
        Queue& q = queues_[node.queue_for_sub[si]];
        while (!q.items.empty()) {
          Payload payload = std::move(q.items.front());
          q.items.pop_front();
          ++q.stats.delivered;
          ++processed;
          std::vector<Publication> outputs = node.callback(node.subscriptions[si], payload);
          deliver_outputs_locked(node, std::move(outputs));
        }
      }
    }
    if (processed == 0) {
      lock.unlock();
      return stats();
    }
  }
  throw LivelockError("pump: no quiescence within the round bound");
}

void Bus::worker(std::size_t node_index, const std::stop_token& stop) {
  for (;;) {
    std::optional<Payload> payload;
    TopicId source = 0;
    {
      std::unique_lock lock(mutex_);
      Node& node = nodes_[node_index];
      auto ready_subscription = [&]() -> int {
        for (std::size_t si = 0; si < node.subscriptions.size(); ++si) {
          if (!queues_[node.queue_for_sub[si]].items.empty()) return static_cast<int>(si);
        }
        return -1;
      };
      cv_.wait(lock, [&] { return stop.stop_requested() || ready_subscription() >= 0; });
      const int si = ready_subscription();
      if (si < 0) return;  // stop requested, queues drained
      Queue& q = queues_[node.queue_for_sub[static_cast<std::size_t>(si)]];
      payload = std::move(q.items.front());
      q.items.pop_front();
      ++q.stats.delivered;
      source = node.subscriptions[static_cast<std::size_t>(si)];
      ++in_flight_;
    }
    // Callback runs unlocked; nodes_ is stable once the bus has started.
    std::vector<Publication> outputs = nodes_[node_index].callback(source, *payload);
    {
      std::lock_guard lock(mutex_);
      deliver_outputs_locked(nodes_[node_index], std::move(outputs));
      --in_flight_;
    }
    cv_.notify_all();
  }
}

void Bus::start() {
  {
    std::lock_guard lock(mutex_);
    if (running_) return;
    running_ = true;
  }
  for (std::size_t ni = 0; ni < nodes_.size(); ++ni) {
    workers_.emplace_back([this, ni](std::stop_token st) { worker(ni, st); });
  }
}

bool Bus::wait_quiescent(std::chrono::milliseconds timeout) {
  std::unique_lock lock(mutex_);
  return cv_.wait_for(lock, timeout, [&] {
    if (in_flight_ != 0) return false;
    for (const Queue& q : queues_) {
      if (q.node >= 0 && !q.items.empty()) return false;
    }
    return true;
  });
}

void Bus::stop() {
  {
    std::lock_guard lock(mutex_);
    if (!running_) return;
    running_ = false;
  }
  for (auto& w : workers_) w.request_stop();
  cv_.notify_all();
  workers_.clear();  // joins
}

BusStats Bus::stats() const {
  std::lock_guard lock(mutex_);
  BusStats out;
  for (const Topic& t : topics_) {
    TopicStats ts;
    ts.name = t.name;
    ts.published = t.published;
    ts.max_depth = t.max_depth;
    for (std::size_t qi : t.queues) ts.queues.push_back(queues_[qi].stats);
    out.topics.push_back(std::move(ts));
  }
  return out;
}

}  // namespace sitewatch::bus
