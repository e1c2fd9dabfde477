#include "manet/world.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "manet/errors.hpp"

namespace manet {

double distance(const Position& a, const Position& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

TxQueue::TxQueue(std::size_t capacity, double service_rate)
    : capacity_(capacity), service_rate_(service_rate) {
  if (capacity == 0) throw ConfigError("queue capacity must be positive");
  if (!(service_rate > 0.0)) throw ConfigError("queue service rate must be positive");
}

bool TxQueue::push(Frame frame) {
  auto& lane = frame.packet.is_control() ? control_ : data_;
  if (lane.size() >= capacity_) return false;
  lane.push_back(std::move(frame));
  if (lane.size() > capacity_) throw InvariantViolation("interface queue exceeded its capacity");
  return true;
}

std::optional<Frame> TxQueue::pop() {
  auto& lane = !control_.empty() ? control_ : data_;
  if (lane.empty()) return std::nullopt;
  Frame f = std::move(lane.front());
  lane.pop_front();
  return f;
}

World::World(Scheduler& scheduler, Area area, RadioModel radio, QueueConfig queue,
             MobilityConfig mobility, std::vector<Position> initial, RandomStream mobility_rng,
             RandomStream loss_rng)
    : scheduler_(scheduler),
      area_(area),
      radio_(radio),
      queue_cfg_(queue),
      mobility_cfg_(mobility),
      mobility_rng_(mobility_rng),
      loss_rng_(loss_rng) {
  if (!(radio.range > 0.0)) throw ConfigError("radio range must be positive");
  if (radio.loss_prob < 0.0 || radio.loss_prob > 1.0)
    throw ConfigError("radio loss probability must lie in [0,1]");
  if (mobility.speed_min < 0.0 || mobility.speed_min > mobility.speed_max)
    throw ConfigError("mobility speeds must satisfy 0 <= speed_min <= speed_max");
  if (mobility.pause_s < 0.0) throw ConfigError("mobility pause must be non-negative");
  if (!(queue.hop_latency_s >= 0.0)) throw ConfigError("hop latency must be non-negative");

  const bool mobile = mobility.speed_max > 0.0;
  motion_.reserve(initial.size());
  queues_.reserve(initial.size());
  for (const auto& p : initial) {
    if (p.x < 0.0 || p.y < 0.0 || p.x > area.width || p.y > area.height)
      throw ConfigError("initial node position outside the area");
    MobilityState st;
    st.position = p;
    st.waypoint = p;
    st.mobile = mobile;
    motion_.push_back(st);
    queues_.push_back(Interface{TxQueue(queue.capacity, queue.service_rate)});
  }
}

void World::check_node(NodeId node) const {
  if (node >= motion_.size()) {
    std::ostringstream msg;
    msg << "unknown node " << node;
    throw InvariantViolation(msg.str());
  }
}

void World::draw_leg(MobilityState& st) {
  st.waypoint = Position{mobility_rng_.uniform(0.0, area_.width),
                         mobility_rng_.uniform(0.0, area_.height)};
  st.speed = mobility_cfg_.speed_min == mobility_cfg_.speed_max
                 ? mobility_cfg_.speed_min
                 : mobility_rng_.uniform(mobility_cfg_.speed_min, mobility_cfg_.speed_max);
  st.moving = true;
}

Position World::step_mobility(NodeId node, SimTime now) {
  check_node(node);
  MobilityState& st = motion_[node];
  if (!st.mobile || now <= st.updated_at) return st.position;

  while (st.updated_at < now) {
    if (!st.moving) {
      if (now < st.pause_until) {
        st.updated_at = now;
        break;
      }
      st.updated_at = std::max(st.updated_at, st.pause_until);
      draw_leg(st);
      if (!(st.speed > 0.0)) {
        st.mobile = false;
        st.updated_at = now;
        break;
      }
      continue;
    }
    const double d = distance(st.position, st.waypoint);
    const SimTime arrive = st.updated_at + d / st.speed;
    if (arrive > now) {
      const double frac = (now - st.updated_at) * st.speed / d;
      st.position.x += (st.waypoint.x - st.position.x) * frac;
      st.position.y += (st.waypoint.y - st.position.y) * frac;
      st.updated_at = now;
      break;
    }
    st.position = st.waypoint;
    st.updated_at = arrive;
    st.moving = false;
    st.pause_until = arrive + mobility_cfg_.pause_s;
  }
  st.position.x = std::clamp(st.position.x, 0.0, area_.width);
  st.position.y = std::clamp(st.position.y, 0.0, area_.height);
  return st.position;
}

void World::place(NodeId node, Position pos) {
  check_node(node);
  MobilityState& st = motion_[node];
  st.position = pos;
  st.waypoint = pos;
  st.speed = 0.0;
  st.moving = false;
  st.mobile = false;
  st.updated_at = scheduler_.now();
}

void World::set_motion(NodeId node, Position from, Position waypoint, double speed) {
  check_node(node);
  MobilityState& st = motion_[node];
  st.position = from;
  st.waypoint = waypoint;
  st.speed = speed;
  st.updated_at = scheduler_.now();
  st.pause_until = std::numeric_limits<double>::infinity();
  st.moving = speed > 0.0;
  st.mobile = speed > 0.0;
}

std::vector<NodeId> World::neighbors(NodeId node) {
  const SimTime now = scheduler_.now();
  const Position self = step_mobility(node, now);
  std::vector<NodeId> out;
  for (NodeId m = 0; m < motion_.size(); ++m) {
    if (m == node) continue;
    if (distance(self, step_mobility(m, now)) <= radio_.range) out.push_back(m);
  }
  return out;
}

bool World::in_range(NodeId a, NodeId b) {
  const SimTime now = scheduler_.now();
  return distance(step_mobility(a, now), step_mobility(b, now)) <= radio_.range;
}

void World::transmit(NodeId src, Packet pkt, NodeId next_hop) {
  check_node(src);
  Interface& iface = queues_[src];
  if (!iface.queue.push(Frame{pkt, next_hop})) {
    if (listener_) listener_->on_queue_overflow(src, pkt);
    return;
  }
  if (!iface.busy) {
    iface.busy = true;
    scheduler_.schedule(scheduler_.now(), [this, src] { serve(src); });
  }
}

void World::serve(NodeId node) {
  Interface& iface = queues_[node];
  auto frame = iface.queue.pop();
  if (!frame) {
    iface.busy = false;
    return;
  }
  scheduler_.schedule_in(1.0 / iface.queue.service_rate(), [this, node] { serve(node); });
  depart(node, std::move(*frame));
}

void World::depart(NodeId node, Frame frame) {
  const std::vector<NodeId> nbrs = neighbors(node);
  const bool unicast = frame.next_hop != kNoNode;
  const bool reachable =
      !unicast || std::binary_search(nbrs.begin(), nbrs.end(), frame.next_hop);

  if (listener_) {
    listener_->on_departure(node, frame.packet, frame.next_hop, reachable);
    if (!reachable) listener_->on_link_failure(node, frame.packet, frame.next_hop);
  }

  struct Delivery {
    NodeId to;
    Reception how;
  };
  std::vector<Delivery> deliveries;
  deliveries.reserve(nbrs.size());
  bool unicast_lost = false;
  for (NodeId m : nbrs) {
    const Reception how = !unicast             ? Reception::Broadcast
                          : m == frame.next_hop ? Reception::Unicast
                                                : Reception::Overheard;
    const bool lost = loss_rng_.bernoulli(radio_.loss_prob);
    if (lost) {
      if (how == Reception::Unicast) unicast_lost = true;
      continue;
    }
    deliveries.push_back(Delivery{m, how});
  }

  const bool tracked = unicast && reachable && !frame.packet.is_control();
  if (tracked) ++data_on_air_[frame.packet.id];

  scheduler_.schedule_in(queue_cfg_.hop_latency_s,
                         [this, node, tracked, unicast_lost, frame = std::move(frame),
                          deliveries = std::move(deliveries)] {
                           if (tracked) {
                             auto it = data_on_air_.find(frame.packet.id);
                             if (it != data_on_air_.end() && --it->second == 0)
                               data_on_air_.erase(it);
                           }
                           if (!listener_) return;
                           if (unicast_lost)
                             listener_->on_mac_loss(node, frame.packet, frame.next_hop);
                           for (const auto& d : deliveries)
                             listener_->on_receive(d.to, node, frame.packet, d.how);
                         });
}

std::vector<PacketId> World::data_in_flight() const {
  std::vector<PacketId> ids;
  for (const auto& iface : queues_) {
    iface.queue.for_each([&](const Frame& f) {
      if (!f.packet.is_control()) ids.push_back(f.packet.id);
    });
  }
  for (const auto& [id, n] : data_on_air_)
    for (int i = 0; i < n; ++i) ids.push_back(id);
  std::sort(ids.begin(), ids.end());
  return ids;
}

}  // namespace manet
