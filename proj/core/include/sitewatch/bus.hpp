#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <mutex>
#include <optional>
#include <stop_token>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "sitewatch/behavior.hpp"
#include "sitewatch/risk.hpp"
#include "sitewatch/types.hpp"

namespace sitewatch::bus {

enum class PayloadKind {
  FramePacket,
  DetectionList,
  RiskEvent,
  ActuationCommand,
  AlertMessage,
};

std::string_view to_string(PayloadKind k);

using Payload = std::variant<FramePacket, std::vector<Detection>, risk::RiskEvent,
                             fsm::ActuationCommand, fsm::AlertMessage>;

PayloadKind kind_of(const Payload& p);

using TopicId = std::size_t;
using SubscriptionId = std::size_t;

struct QueueStats {
  std::uint64_t delivered = 0;
  std::uint64_t dropped = 0;
};

struct TopicStats {
  std::string name;
  std::uint64_t published = 0;
  std::size_t max_depth = 0;
  std::vector<QueueStats> queues;  // one per subscriber, in subscription order

  std::uint64_t delivered() const;
  std::uint64_t dropped() const;
};

struct BusStats {
  std::vector<TopicStats> topics;  // in topic creation order
};

/// A publication a node wants to make as the result of one callback.
struct Publication {
  TopicId topic;
  Payload payload;
};

/// In-process pub/sub fabric with bounded per-subscriber FIFO queues and a
/// drop-oldest overflow policy. Runs either as a deterministic single-task
/// round-robin pump or free-running with one worker task per node.
class Bus {
 public:
  Bus() = default;
  ~Bus();
  Bus(const Bus&) = delete;
  Bus& operator=(const Bus&) = delete;

  /// Registers a topic. Duplicate names and zero capacities throw
  /// std::invalid_argument.
  TopicId create_topic(std::string name, PayloadKind kind, std::size_t capacity);

  /// Lookup by name; throws std::out_of_range when absent.
  TopicId topic(std::string_view name) const;

  /// Plain subscription, drained with try_pop (used by sinks and tests).
  SubscriptionId subscribe(TopicId topic);

  /// Publishes to every subscriber queue, dropping the oldest entry of a full
  /// queue. Payload kind must match the topic (std::invalid_argument).
  /// Never blocks.
  void publish(TopicId topic, Payload payload);

  std::optional<Payload> try_pop(SubscriptionId subscription);

  using NodeFn = std::function<std::vector<Publication>(TopicId source, const Payload&)>;

  /// Registers a processing node. A node may not subscribe to a topic it
  /// publishes. Outputs are validated against the declared publications.
  /// Callbacks publish through their return value only; calling publish()
  /// from inside a callback deadlocks the deterministic pump.
  void add_node(std::string name, std::vector<TopicId> subscriptions,
                std::vector<TopicId> publications, NodeFn callback);

  /// Deterministic mode: runs nodes in registration order, draining each
  /// subscription FIFO, until a full round moves no message. Throws
  /// LivelockError when max_rounds is exhausted.
  BusStats pump(std::size_t max_rounds = 100000);

  /// Free-running mode: one worker task per node. publish() stays non-blocking.
  void start();
  /// Waits until all node queues are empty and no callback is in flight.
  /// Returns false on timeout.
  bool wait_quiescent(std::chrono::milliseconds timeout);
  void stop();

  BusStats stats() const;

 private:
  struct Queue {
    std::deque<Payload> items;
    QueueStats stats;
    int node = -1;  // owning node index, -1 for plain subscriptions
  };
  struct Topic {
    std::string name;
    PayloadKind kind;
    std::size_t capacity;
    std::uint64_t published = 0;
    std::size_t max_depth = 0;
    std::vector<std::size_t> queues;  // indices into queues_
  };
  struct Node {
    std::string name;
    std::vector<TopicId> subscriptions;          // declared order
    std::vector<std::size_t> queue_for_sub;      // queue index per subscription
    std::vector<TopicId> publications;
    NodeFn callback;
  };

  void publish_locked(TopicId topic, Payload payload);
  void deliver_outputs_locked(const Node& node, std::vector<Publication>&& outputs);
  void worker(std::size_t node_index, const std::stop_token& stop);

  mutable std::mutex mutex_;
  std::condition_variable cv_;
  std::vector<Topic> topics_;
  std::vector<Queue> queues_;
  std::vector<Node> nodes_;
  std::vector<std::jthread> workers_;
  int in_flight_ = 0;
  bool running_ = false;
};

}  // namespace sitewatch::bus
