#pragma once

#include <cstddef>
#include <deque>
#include <map>
#include <optional>
#include <vector>

#include "manet/engine.hpp"
#include "manet/packet.hpp"

namespace manet {

struct Position {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Position&, const Position&) = default;
};

double distance(const Position& a, const Position& b);

struct Area {
  double width = 500.0;
  double height = 500.0;
};

/// Random waypoint parameters. speed_max == 0 makes every node static.
struct MobilityConfig {
  double speed_min = 0.0;
  double speed_max = 10.0;
  double pause_s = 2.0;
};

/// Unit-disk radio: a link exists iff distance <= range.
struct RadioModel {
  double range = 250.0;
  double loss_prob = 0.0;
};

struct QueueConfig {
  std::size_t capacity = 50;
  double service_rate = 500.0;
  double hop_latency_s = 0.002;
};

struct MobilityState {
  Position position;
  SimTime updated_at = 0.0;
  Position waypoint;
  double speed = 0.0;
  SimTime pause_until = 0.0;
  bool moving = false;
  bool mobile = true;
};

/// A packet waiting for the radio together with its link-layer destination.
/// next_hop == kNoNode means broadcast.
struct Frame {
  Packet packet;
  NodeId next_hop = kNoNode;
};

/// Per-node drop-tail interface queue. Control frames use their own FIFO lane
/// and are served before data; each lane is bounded by the capacity.
class TxQueue {
 public:
  TxQueue(std::size_t capacity, double service_rate);

  /// Appends the frame, or returns false when its lane is full.
  bool push(Frame frame);
  std::optional<Frame> pop();

  std::size_t data_backlog() const { return data_.size(); }
  std::size_t control_backlog() const { return control_.size(); }
  std::size_t capacity() const { return capacity_; }
  double service_rate() const { return service_rate_; }
  bool empty() const { return data_.empty() && control_.empty(); }

  template <typename Fn>
  void for_each(Fn&& fn) const {
    for (const auto& f : control_) fn(f);
    for (const auto& f : data_) fn(f);
  }

 private:
  std::size_t capacity_;
  double service_rate_;
  std::deque<Frame> control_;
  std::deque<Frame> data_;
};

enum class Reception { Unicast, Broadcast, Overheard };

/// Upcalls from the radio layer into the protocol stack.
class LinkListener {
 public:
  virtual ~LinkListener() = default;
  virtual void on_receive(NodeId at, NodeId from, const Packet& pkt, Reception how) = 0;
  /// A frame left `src`'s queue. in_range is false for a unicast whose next hop was gone.
  virtual void on_departure(NodeId src, const Packet& pkt, NodeId next_hop, bool in_range) = 0;
  virtual void on_link_failure(NodeId src, const Packet& pkt, NodeId next_hop) = 0;
  virtual void on_queue_overflow(NodeId src, const Packet& pkt) = 0;
  virtual void on_mac_loss(NodeId src, const Packet& pkt, NodeId next_hop) = 0;
};

/// Node positions, mobility, connectivity and the shared broadcast medium.
class World {
 public:
  World(Scheduler& scheduler, Area area, RadioModel radio, QueueConfig queue,
        MobilityConfig mobility, std::vector<Position> initial, RandomStream mobility_rng,
        RandomStream loss_rng);

  void set_listener(LinkListener* listener) { listener_ = listener; }

  std::size_t node_count() const { return motion_.size(); }
  const Area& area() const { return area_; }
  const RadioModel& radio() const { return radio_; }
  const QueueConfig& queue_config() const { return queue_cfg_; }

  /// Advances `node` along its trajectory up to `now` and returns its position.
  Position step_mobility(NodeId node, SimTime now);
  Position position(NodeId node) { return step_mobility(node, scheduler_.now()); }

  /// Nodes within radio range of `node` at the current time, ascending by id.
  std::vector<NodeId> neighbors(NodeId node);
  bool in_range(NodeId a, NodeId b);

  /// Queues pkt for transmission. next_hop == kNoNode broadcasts.
  void transmit(NodeId src, Packet pkt, NodeId next_hop);

  /// Pins a node: it stays at `pos` for the rest of the run.
  void place(NodeId node, Position pos);
  /// Scripted straight-line motion toward `waypoint`; the node stops there.
  void set_motion(NodeId node, Position from, Position waypoint, double speed);
  const MobilityState& motion(NodeId node) const { return motion_.at(node); }

  const TxQueue& queue(NodeId node) const { return queues_.at(node).queue; }
  /// Ids of data packets sitting in interface queues or on the air.
  std::vector<PacketId> data_in_flight() const;

 private:
  struct Interface {
    TxQueue queue;
    bool busy = false;
  };

  void check_node(NodeId node) const;
  void draw_leg(MobilityState& st);
  void serve(NodeId node);
  void depart(NodeId node, Frame frame);

  Scheduler& scheduler_;
  Area area_;
  RadioModel radio_;
  QueueConfig queue_cfg_;
  MobilityConfig mobility_cfg_;
  std::vector<MobilityState> motion_;
  std::vector<Interface> queues_;
  RandomStream mobility_rng_;
  RandomStream loss_rng_;
  LinkListener* listener_ = nullptr;
  std::map<PacketId, int> data_on_air_;
};

}  // namespace manet
