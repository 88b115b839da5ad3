#include "swarmsim/swarm/swarm.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <limits>
#include <optional>
#include <string>

#include "swarmsim/engine/event_queue.hpp"
#include "swarmsim/engine/flow_allocator.hpp"
#include "swarmsim/engine/rng.hpp"
#include "swarmsim/identity/identity.hpp"
#include "swarmsim/protocol/choking.hpp"
#include "swarmsim/protocol/piece_selection.hpp"
#include "swarmsim/protocol/rate_estimator.hpp"
#include "swarmsim/protocol/tracker.hpp"
#include "swarmsim/strategy/seeding.hpp"
#include "swarmsim/strategy/tft.hpp"
#include "swarmsim/strategy/tyrant.hpp"

namespace swarmsim {
namespace {

constexpr std::uint32_t kNone = ~std::uint32_t{0};
// Runs without a horizon stop here even if some node never finishes.
constexpr double kSafetyHorizonS = 1e7;
// Minimum spacing of early re-announces for nodes short of neighbors.
constexpr double kEarlyAnnounceSpacingS = 60.0;

struct Request {
  std::uint32_t piece = 0;
  std::uint32_t block = 0;
};

// Transfer state for one direction of a connection.
struct Direction {
  NodeId up = 0;
  NodeId down = 0;
  bool unchoked = false;    // uploader unchokes downloader
  bool interested = false;  // downloader wants something uploader has
  std::uint32_t needed = 0; // pieces uploader has and downloader lacks
  std::deque<Request> requests;  // served front first
  double head_bits = 0.0;        // still to send for requests.front()
  double rate = 0.0;
  SimTime settled_at;
  std::uint32_t active_pos = kNone;
  EventHandle completion;
  double cap = kUncapped;
  std::int32_t pool = -1;
  std::uint64_t bytes = 0;  // credited over the connection lifetime
  std::uint32_t blocks_round = 0;
  RollingRate received;  // the downloader's view of this direction
  TyrantEstimate tyrant;
  bool tyrant_tracked = false;

  bool has_request(std::uint32_t piece, std::uint32_t block) const {
    return std::any_of(requests.begin(), requests.end(), [&](const Request& r) {
      return r.piece == piece && r.block == block;
    });
  }
};

struct Link {
  NodeId a = 0;
  NodeId b = 0;
  bool open = true;
  bool block_mode = false;  // mutually recognized tyrants
  SimTime opened;
  std::uint32_t pieces_at_open[2] = {0, 0};
  Direction dir[2];  // [0] a -> b, [1] b -> a
};

struct Neighbor {
  NodeId peer = 0;
  std::uint32_t link = 0;
};

enum class Phase : std::uint8_t { kPending, kDownloading, kSeeding, kGone };

struct Node {
  Node(const NodeSpec& s, const TorrentSpec& torrent)
      : spec(s),
        pieces(s.role == Role::kInitialSeed ? PieceMap::full(torrent) : PieceMap(torrent)),
        availability(torrent.piece_count(), 0) {}

  NodeSpec spec;
  PieceMap pieces;
  std::vector<std::uint16_t> availability;
  std::vector<Neighbor> neighbors;  // sorted by peer
  Phase phase = Phase::kPending;
  TradingKind trading = TradingKind::kTft;
  SeedingKind seeding = SeedingKind::kRoundRobin;

  bool rewarding = false;  // uses its ledger when seeding
  bool accrues = false;    // records observed seeding bytes
  SeedingLedger ledger;
  TicketTable tickets;

  ActiveSet active;
  std::vector<NodeId> unchoked;  // peers this node currently unchokes
  std::vector<NodeId> seed_reserved;
  std::vector<NodeId> seed_open;
  RoundRobinCursor cursor;
  SimTime next_seed_round;
  double reserved_pool_bps = kUncapped;
  double open_pool_bps = kUncapped;
  bool endgame = false;

  Rng rng;
  SimTime last_announce;
  EventHandle reannounce;
  std::optional<double> td;
  double leave = std::numeric_limits<double>::infinity();
  std::uint64_t bytes_up = 0;
  std::uint64_t bytes_down = 0;
  std::uint64_t duplicate = 0;
  std::uint64_t seeded_given = 0;
};

}  // namespace

class Swarm::Impl {
 public:
  Impl(const ScenarioConfig& cfg, std::vector<NodeSpec> specs);
  RunResult run();

 private:
  // Topology.
  Direction& dir(std::uint32_t id) { return links_[id / 2].dir[id % 2]; }
  std::uint32_t dir_id(std::uint32_t link, NodeId from) const {
    return link * 2 + (links_[link].a == from ? 0 : 1);
  }
  std::optional<std::uint32_t> find_link(NodeId a, NodeId b) const;
  Direction& out_dir(NodeId from, const Neighbor& n) { return dir(dir_id(n.link, from)); }
  Direction& in_dir(NodeId, const Neighbor& n) { return dir(dir_id(n.link, n.peer)); }
  std::uint32_t id_of(const Direction& d) const;
  void connect(NodeId a, NodeId b);
  void disconnect(std::uint32_t link);
  void announce(NodeId n, AnnounceKind kind);

  // Transfers.
  void settle(Direction& d);
  void credit(Direction& d, std::uint64_t bytes, bool duplicate);
  // keep_head: a partly sent block still completes (the CHOKE message
  // queues behind it on the wire).
  void drop_requests(Direction& d, bool keep_head = false);
  void refresh(Direction& d);
  void ensure_completion(Direction& d);
  void try_fill(Direction& d);
  void refill_all(NodeId n);
  std::optional<Request> pick_block(Node& down, const Node& up, const Direction& d);
  void cancel_duplicates(NodeId n, const Request& r, const Direction* except);
  void on_piece_complete(NodeId n, std::uint32_t piece);
  void on_complete(NodeId n);
  double block_bits(const Request& r) const {
    return 8.0 * cfg_.torrent.block_size(r.piece, r.block);
  }

  // Choking.
  struct Unchoke {
    NodeId peer;
    double cap = kUncapped;
    std::int32_t pool = -1;
  };
  void apply_unchokes(NodeId u, const std::vector<Unchoke>& targets);
  void tft_round(NodeId u);
  void tft_optimistic(NodeId u);
  void tyrant_round(NodeId u, bool probe);
  void seed_round(NodeId u);
  bool recognized_tyrant(NodeId peer) const {
    return nodes_[peer].trading == TradingKind::kTyrant && cfg_.tyrant.self_identify;
  }

  // Handlers.
  void dispatch(const Event& ev);
  void on_join(NodeId n);
  void on_depart(NodeId n);
  void on_transfer(const Event& ev);
  void on_choke_tick();
  void on_optimistic_tick();
  void recompute();
  void fail(const std::string& what) const { throw InvariantViolation(what); }

  ScenarioConfig cfg_;
  std::vector<Node> nodes_;
  std::deque<Link> links_;
  EventQueue queue_;
  Tracker tracker_;
  Rng tracker_rng_;
  FlowAllocator allocator_;
  std::vector<std::uint32_t> active_;  // direction ids with a flow
  std::vector<FlowEdge> edges_;
  std::vector<NodeCapacity> capacity_;
  std::vector<double> pool_caps_;
  std::size_t unfinished_ = 0;
  SimTime last_optimistic_ = SimTime::max();
  RunStats stats_;
};

Swarm::Impl::Impl(const ScenarioConfig& cfg, std::vector<NodeSpec> specs)
    : cfg_(cfg), tracker_rng_(make_stream(cfg.seed, StreamTag::kTracker)) {
  nodes_.reserve(specs.size());
  for (std::size_t i = 0; i < specs.size(); ++i) {
    if (specs[i].id != i) throw std::invalid_argument("node ids must be 0..n-1 in order");
    nodes_.emplace_back(specs[i], cfg_.torrent);
    Node& n = nodes_.back();
    n.rng = make_stream(cfg_.seed, n.spec.id, StreamTag::kPeer);
    if (n.spec.role == Role::kInitialSeed) {
      n.trading = TradingKind::kTft;
      n.seeding = SeedingKind::kRoundRobin;
    } else {
      const auto& pop = cfg_.population(n.spec.role);
      n.trading = pop.trading;
      n.seeding = pop.seeding;
      n.rewarding = n.seeding == SeedingKind::kRewardLottery;
      ++unfinished_;
    }
    capacity_.push_back({n.spec.bandwidth.up_bps, n.spec.bandwidth.down_bps});
  }

  // Overlap decides which altruists actually use their ledgers; the others
  // still reserve bandwidth but never have anyone to give it to.
  std::vector<LongTermId> altruist_ids;
  std::vector<NodeId> altruists;
  for (const auto& n : nodes_) {
    if (n.spec.role == Role::kAltruistic && n.seeding == SeedingKind::kRewardLottery &&
        n.spec.identity) {
      altruist_ids.push_back(*n.spec.identity);
      altruists.push_back(n.spec.id);
    }
  }
  Rng history_rng = make_stream(cfg_.seed, StreamTag::kHistory);
  const auto history = synth_history(
      altruist_ids, cfg_.reward.overlap, history_rng,
      {cfg_.reward.history_min_bytes, cfg_.reward.history_max_bytes});
  for (std::size_t i = 0; i < altruists.size(); ++i) {
    Node& n = nodes_[altruists[i]];
    n.rewarding = history.assignment.rewarding[i];
    if (cfg_.reward.synthetic_history) n.ledger = history.ledgers[i];
  }
  for (auto& n : nodes_) {
    if (n.spec.role == Role::kAltruistic && n.seeding == SeedingKind::kRewardLottery &&
        !n.spec.identity) {
      n.rewarding = false;
    }
    n.accrues = n.rewarding && cfg_.reward.in_run_observation;
  }

  pool_caps_.assign(2 * nodes_.size(), kUncapped);
  for (const auto& n : nodes_) {
    queue_.schedule(SimTime::from_seconds(n.spec.join_s), EventKind::kNodeJoin, n.spec.id);
  }
  queue_.schedule(SimTime::zero(), EventKind::kOptimisticRound);
  queue_.schedule(SimTime::zero(), EventKind::kChokeRound);
}

std::optional<std::uint32_t> Swarm::Impl::find_link(NodeId a, NodeId b) const {
  const auto& nb = nodes_[a].neighbors;
  auto it = std::lower_bound(nb.begin(), nb.end(), b,
                             [](const Neighbor& n, NodeId id) { return n.peer < id; });
  if (it == nb.end() || it->peer != b) return std::nullopt;
  return it->link;
}

std::uint32_t Swarm::Impl::id_of(const Direction& d) const {
  const auto link = *find_link(d.up, d.down);
  return link * 2 + (links_[link].a == d.up ? 0 : 1);
}

void Swarm::Impl::connect(NodeId a, NodeId b) {
  if (a == b || find_link(a, b)) return;
  if (nodes_[a].phase == Phase::kGone || nodes_[b].phase == Phase::kGone) return;
  const auto link_id = static_cast<std::uint32_t>(links_.size());
  links_.emplace_back();
  Link& link = links_.back();
  link.a = a;
  link.b = b;
  link.opened = queue_.now();
  link.pieces_at_open[0] = nodes_[a].pieces.complete_count();
  link.pieces_at_open[1] = nodes_[b].pieces.complete_count();
  const auto window = cfg_.protocol.rate_window_s;
  for (int k = 0; k < 2; ++k) {
    Direction& d = link.dir[k];
    d.up = k == 0 ? a : b;
    d.down = k == 0 ? b : a;
    d.received = RollingRate(window);
    d.settled_at = queue_.now();
    const Node& up = nodes_[d.up];
    Node& down = nodes_[d.down];
    const bool down_complete = down.pieces.is_complete();
    for (std::uint32_t p = 0; p < up.pieces.piece_count(); ++p) {
      if (!up.pieces.has(p) || down_complete) continue;
      ++down.availability[p];
      if (!down.pieces.has(p)) ++d.needed;
    }
    d.interested = d.needed > 0;
    if (d.interested) ++stats_.messages;
  }
  const bool a_tyrant = nodes_[a].trading == TradingKind::kTyrant;
  const bool b_tyrant = nodes_[b].trading == TradingKind::kTyrant;
  const auto tag_a = advertised_tag(a_tyrant, cfg_.tyrant.self_identify);
  const auto tag_b = advertised_tag(b_tyrant, cfg_.tyrant.self_identify);
  link.block_mode = tyrant_handshake(tag_b, a_tyrant && cfg_.tyrant.self_identify) &&
                    tyrant_handshake(tag_a, b_tyrant && cfg_.tyrant.self_identify);

  auto insert = [&](NodeId self, NodeId peer) {
    auto& nb = nodes_[self].neighbors;
    auto it = std::lower_bound(nb.begin(), nb.end(), peer,
                               [](const Neighbor& n, NodeId id) { return n.peer < id; });
    nb.insert(it, Neighbor{peer, link_id});
  };
  insert(a, b);
  insert(b, a);
  stats_.messages += 4;  // handshakes and bitfields
  ++stats_.links;
}

void Swarm::Impl::disconnect(std::uint32_t link_id) {
  Link& link = links_[link_id];
  if (!link.open) return;
  for (auto& d : link.dir) {
    drop_requests(d);
    d.unchoked = false;
    d.interested = false;
  }
  for (auto [self, peer] : {std::pair{link.a, link.b}, std::pair{link.b, link.a}}) {
    Node& n = nodes_[self];
    auto& nb = n.neighbors;
    nb.erase(std::find_if(nb.begin(), nb.end(), [&](const Neighbor& x) { return x.peer == peer; }));
    auto drop = [&](std::vector<NodeId>& v) { std::erase(v, peer); };
    drop(n.unchoked);
    drop(n.seed_reserved);
    drop(n.seed_open);
    drop(n.active.regular);
    if (n.active.optimistic == peer) n.active.optimistic.reset();
    if (!n.pieces.is_complete()) {
      const Node& other = nodes_[peer];
      for (std::uint32_t p = 0; p < other.pieces.piece_count(); ++p) {
        if (other.pieces.has(p)) --n.availability[p];
      }
    }
  }
  link.open = false;
}

void Swarm::Impl::announce(NodeId n, AnnounceKind kind) {
  Node& node = nodes_[n];
  node.last_announce = queue_.now();
  const auto peers = tracker_.announce(n, kind, cfg_.protocol.neighbor_request, tracker_rng_);
  ++stats_.messages;
  for (NodeId p : peers) connect(n, p);
}

void Swarm::Impl::settle(Direction& d) {
  const SimTime now = queue_.now();
  if (d.rate > 0.0 && !d.requests.empty()) {
    d.head_bits = std::max(0.0, d.head_bits - d.rate * seconds_between(d.settled_at, now));
  }
  d.settled_at = now;
}

void Swarm::Impl::credit(Direction& d, std::uint64_t bytes, bool duplicate) {
  if (bytes == 0) return;
  Node& up = nodes_[d.up];
  Node& down = nodes_[d.down];
  up.bytes_up += bytes;
  if (up.pieces.is_complete()) up.seeded_given += bytes;
  down.bytes_down += bytes;
  if (duplicate) down.duplicate += bytes;
  stats_.bytes_up += bytes;
  stats_.bytes_down += bytes;
  if (duplicate) stats_.duplicate_bytes += bytes;
  d.bytes += bytes;
  if (down.accrues) {
    const auto link = *find_link(d.down, d.up);
    const Direction& back = dir(dir_id(link, d.down));
    observe_transfer(down.ledger, up.spec.identity, bytes, back.bytes);
  }
}

void Swarm::Impl::drop_requests(Direction& d, bool keep_head) {
  if (d.requests.empty()) return;
  settle(d);
  const double sent = block_bits(d.requests.front()) - d.head_bits;
  if (keep_head && sent > 0.0) {
    Node& down = nodes_[d.down];
    while (d.requests.size() > 1) {
      const Request r = d.requests.back();
      d.requests.pop_back();
      if (!down.pieces.block_received(r.piece, r.block)) {
        down.pieces.unmark_requested(r.piece, r.block);
      }
    }
    return;
  }
  // Partial progress on an abandoned block is wasted transfer.
  credit(d, static_cast<std::uint64_t>(std::floor(sent / 8.0)), true);
  Node& down = nodes_[d.down];
  for (const auto& r : d.requests) {
    if (!down.pieces.block_received(r.piece, r.block)) {
      down.pieces.unmark_requested(r.piece, r.block);
    }
  }
  d.requests.clear();
  d.head_bits = 0.0;
  refresh(d);
}

void Swarm::Impl::refresh(Direction& d) {
  // A choked direction stays active until its last in-flight block lands.
  const bool want = !d.requests.empty();
  if (want && d.active_pos == kNone) {
    d.active_pos = static_cast<std::uint32_t>(active_.size());
    active_.push_back(id_of(d));
    d.rate = 0.0;
    d.settled_at = queue_.now();
    queue_.request_recompute();
  } else if (!want && d.active_pos != kNone) {
    settle(d);
    const std::uint32_t pos = d.active_pos;
    const std::uint32_t moved = active_.back();
    active_[pos] = moved;
    active_.pop_back();
    if (pos < active_.size()) dir(moved).active_pos = pos;
    d.active_pos = kNone;
    d.rate = 0.0;
    d.received.record(queue_.now(), 0.0);
    queue_.cancel(d.completion);
    d.completion = {};
    queue_.request_recompute();
  }
}

void Swarm::Impl::ensure_completion(Direction& d) {
  if (d.active_pos == kNone || d.rate <= 0.0 || d.requests.empty() || d.completion.valid()) {
    return;
  }
  const SimTime at = queue_.now().after(d.head_bits / d.rate);
  d.completion = queue_.schedule(at, EventKind::kTransferProgress, d.up, d.down, id_of(d));
}

std::optional<Request> Swarm::Impl::pick_block(Node& down, const Node& up, const Direction& d) {
  auto& local = down.pieces;
  for (std::uint32_t piece : local.in_progress()) {
    if (local.unrequested_blocks(piece) == 0 || !up.pieces.has(piece)) continue;
    const auto blocks = cfg_.torrent.blocks_in_piece(piece);
    for (std::uint32_t b = 0; b < blocks; ++b) {
      if (!local.block_received(piece, b) && local.outstanding(piece, b) == 0) {
        return Request{piece, b};
      }
    }
  }
  if (auto piece = select_piece(local, down.availability, up.pieces, down.rng)) {
    return Request{*piece, 0};
  }
  if (local.unrequested_blocks() != 0 || local.is_complete()) return std::nullopt;
  down.endgame = true;
  // Spread duplicate requests: least-requested outstanding block first.
  std::optional<Request> best;
  std::uint32_t best_count = 0;
  for (std::uint32_t piece : local.in_progress()) {
    if (!up.pieces.has(piece)) continue;
    const auto blocks = cfg_.torrent.blocks_in_piece(piece);
    for (std::uint32_t b = 0; b < blocks; ++b) {
      if (local.block_received(piece, b) || d.has_request(piece, b)) continue;
      const std::uint32_t count = local.outstanding(piece, b);
      if (!best || count < best_count) {
        best = Request{piece, b};
        best_count = count;
      }
    }
  }
  return best;
}

void Swarm::Impl::try_fill(Direction& d) {
  Node& down = nodes_[d.down];
  if (down.phase != Phase::kDownloading || !d.unchoked) return;
  if (nodes_[d.up].phase == Phase::kGone) return;
  const bool was_empty = d.requests.empty();
  const bool was_endgame = down.endgame;
  while (d.requests.size() < cfg_.protocol.pipeline_depth) {
    auto r = pick_block(down, nodes_[d.up], d);
    if (!r) break;
    down.pieces.mark_requested(r->piece, r->block);
    d.requests.push_back(*r);
    ++stats_.messages;
  }
  if (was_empty && !d.requests.empty()) {
    d.head_bits = block_bits(d.requests.front());
    d.settled_at = queue_.now();
  }
  refresh(d);
  ensure_completion(d);
  if (!was_endgame && down.endgame) refill_all(d.down);
}

void Swarm::Impl::refill_all(NodeId n) {
  // Index loop: try_fill never changes the neighbor list.
  for (std::size_t i = 0; i < nodes_[n].neighbors.size(); ++i) {
    Direction& d = in_dir(n, nodes_[n].neighbors[i]);
    if (d.unchoked && d.requests.size() < cfg_.protocol.pipeline_depth) try_fill(d);
  }
}

void Swarm::Impl::cancel_duplicates(NodeId n, const Request& r, const Direction* except) {
  for (const auto& nb : nodes_[n].neighbors) {
    Direction& d = in_dir(n, nb);
    if (&d == except || d.requests.empty()) continue;
    auto it = std::find_if(d.requests.begin(), d.requests.end(), [&](const Request& x) {
      return x.piece == r.piece && x.block == r.block;
    });
    if (it == d.requests.end()) continue;
    ++stats_.messages;  // cancel
    if (it == d.requests.begin()) {
      settle(d);
      const double sent = block_bits(*it) - d.head_bits;
      credit(d, static_cast<std::uint64_t>(std::floor(sent / 8.0)), true);
      d.requests.pop_front();
      queue_.cancel(d.completion);
      d.completion = {};
      if (!d.requests.empty()) {
        d.head_bits = block_bits(d.requests.front());
        d.settled_at = queue_.now();
      }
    } else {
      d.requests.erase(it);
    }
    try_fill(d);
    refresh(d);
    ensure_completion(d);
  }
}

void Swarm::Impl::on_piece_complete(NodeId n, std::uint32_t piece) {
  Node& node = nodes_[n];
  for (std::size_t i = 0; i < node.neighbors.size(); ++i) {
    const Neighbor nb = node.neighbors[i];
    Node& peer = nodes_[nb.peer];
    ++stats_.messages;  // HAVE
    Direction& out = out_dir(n, nb);
    if (!peer.pieces.is_complete()) {
      ++peer.availability[piece];
      if (!peer.pieces.has(piece) && ++out.needed == 1) {
        out.interested = true;
        ++stats_.messages;
      }
    }
    Direction& in = in_dir(n, nb);
    if (peer.pieces.has(piece) && in.needed > 0 && --in.needed == 0) {
      in.interested = false;
      ++stats_.messages;
    }
    if (out.unchoked && peer.phase == Phase::kDownloading &&
        out.requests.size() < cfg_.protocol.pipeline_depth) {
      try_fill(out);
    }
  }
  if (node.pieces.is_complete()) on_complete(n);
}

void Swarm::Impl::on_complete(NodeId n) {
  Node& node = nodes_[n];
  const double now = queue_.now().seconds();
  node.td = now;
  node.phase = Phase::kSeeding;
  node.endgame = false;
  node.active = {};
  node.next_seed_round = queue_.now();
  if (node.rewarding) {
    node.tickets = reward_tickets(node.ledger, {cfg_.reward.ticket_normalization});
  }
  if (node.bytes_down - node.duplicate != cfg_.torrent.total_bytes) {
    fail("node " + std::to_string(n) + " completed with " +
         std::to_string(node.bytes_down - node.duplicate) + " non-duplicate bytes, expected " +
         std::to_string(cfg_.torrent.total_bytes));
  }
  for (const auto& nb : node.neighbors) {
    if (!in_dir(n, nb).requests.empty()) {
      fail("node " + std::to_string(n) + " completed with outstanding requests");
    }
  }
  if (node.spec.seed_duration_s <= 0.0) {
    queue_.schedule(queue_.now(), EventKind::kNodeDepart, n);
  } else if (std::isfinite(node.spec.seed_duration_s)) {
    queue_.schedule(queue_.now().after(node.spec.seed_duration_s), EventKind::kSeedExpiry, n);
  }
  if (--unfinished_ == 0) {
    // The run ends here; a leech's departure event would never dispatch.
    if (node.spec.seed_duration_s <= 0.0) node.leave = now;
    queue_.stop();
  }
}

void Swarm::Impl::apply_unchokes(NodeId u, const std::vector<Unchoke>& targets) {
  Node& node = nodes_[u];
  std::vector<NodeId> next;
  next.reserve(targets.size());
  for (const auto& t : targets) next.push_back(t.peer);
  std::sort(next.begin(), next.end());

  std::vector<NodeId> choked;
  for (NodeId p : node.unchoked) {
    if (std::binary_search(next.begin(), next.end(), p)) continue;
    const auto link = find_link(u, p);
    if (!link) continue;
    Direction& d = dir(dir_id(*link, u));
    d.unchoked = false;
    ++stats_.messages;
    drop_requests(d, true);
    choked.push_back(p);
  }
  for (const auto& t : targets) {
    const auto link = find_link(u, t.peer);
    if (!link) continue;
    Direction& d = dir(dir_id(*link, u));
    if (d.cap != t.cap || d.pool != t.pool) {
      d.cap = t.cap;
      d.pool = t.pool;
      if (d.active_pos != kNone) queue_.request_recompute();
    }
    if (!d.unchoked) {
      d.unchoked = true;
      ++stats_.messages;
      try_fill(d);
    }
  }
  node.unchoked = std::move(next);
  // Choked peers may re-request the dropped blocks elsewhere.
  for (NodeId p : choked) {
    if (nodes_[p].phase == Phase::kDownloading) refill_all(p);
  }
}

void Swarm::Impl::tft_round(NodeId u) {
  Node& node = nodes_[u];
  const SimTime now = queue_.now();
  std::vector<RateCandidate> cands;
  for (const auto& nb : node.neighbors) {
    if (!out_dir(u, nb).interested || nodes_[nb.peer].phase != Phase::kDownloading) continue;
    cands.push_back({nb.peer, in_dir(u, nb).received.average(now)});
  }
  ChokeParams params{cfg_.protocol.active_set, cfg_.protocol.optimistic_slots,
                     cfg_.protocol.scale_active_set};
  const std::size_t slots = active_set_size(params, node.spec.bandwidth.up_bps);
  const std::size_t regular = slots - cfg_.protocol.optimistic_slots;
  node.active = choke_round(cands, node.active, regular);
  std::vector<Unchoke> targets;
  for (NodeId p : node.active.regular) targets.push_back({p});
  if (node.active.optimistic) targets.push_back({*node.active.optimistic});
  apply_unchokes(u, targets);
}

void Swarm::Impl::tft_optimistic(NodeId u) {
  if (cfg_.protocol.optimistic_slots == 0) return;
  Node& node = nodes_[u];
  std::vector<NodeId> choked;
  for (const auto& nb : node.neighbors) {
    if (!out_dir(u, nb).interested || nodes_[nb.peer].phase != Phase::kDownloading) continue;
    if (node.active.optimistic == nb.peer) continue;
    if (std::find(node.active.regular.begin(), node.active.regular.end(), nb.peer) !=
        node.active.regular.end()) {
      continue;
    }
    choked.push_back(nb.peer);
  }
  if (auto pick = optimistic_round(choked, node.rng)) node.active.optimistic = pick;
  std::vector<Unchoke> targets;
  for (NodeId p : node.active.regular) targets.push_back({p});
  if (node.active.optimistic) targets.push_back({*node.active.optimistic});
  apply_unchokes(u, targets);
}

void Swarm::Impl::tyrant_round(NodeId u, bool probe) {
  Node& node = nodes_[u];
  const SimTime now = queue_.now();
  const double capacity = node.spec.bandwidth.up_bps;
  const double piece_bits = 8.0 * cfg_.torrent.piece_bytes;
  std::vector<TyrantCandidate> cands;
  std::vector<Unchoke> targets;
  for (const auto& nb : node.neighbors) {
    Direction& out = out_dir(u, nb);
    Direction& in = in_dir(u, nb);
    const Link& link = links_[nb.link];
    const bool wanted = out.interested && nodes_[nb.peer].phase == Phase::kDownloading;
    if (link.block_mode) {
      if (wanted && (in.blocks_round > 0 || probe)) targets.push_back({nb.peer});
      continue;
    }
    const double observed = in.received.average(now);
    // Without direct observations, guess the peer's per-slot upload from how
    // fast it has been announcing pieces.
    const int side = link.a == nb.peer ? 0 : 1;
    const double age = seconds_between(link.opened, now);
    const double announced =
        nodes_[nb.peer].pieces.complete_count() - link.pieces_at_open[side];
    const double fallback =
        age > 0.0 ? announced * piece_bits / age / static_cast<double>(cfg_.protocol.active_set)
                  : 0.0;
    if (!out.tyrant_tracked) {
      out.tyrant = tyrant_initial(capacity, cfg_.protocol.active_set, cfg_.tyrant);
      out.tyrant.down_bps = observed > 0.0 ? observed : fallback;
      out.tyrant_tracked = true;
    } else if (out.unchoked) {
      tyrant_update(out.tyrant, in.unchoked, observed, fallback, capacity, cfg_.tyrant);
    } else {
      out.tyrant.down_bps = observed > 0.0 ? observed : fallback;
    }
    if (wanted) cands.push_back({nb.peer, out.tyrant.down_bps, out.tyrant.up_bps});
  }
  for (const auto& c : tyrant_select(std::move(cands), capacity)) {
    targets.push_back({c.peer, c.cap_bps});
  }
  apply_unchokes(u, targets);
}

void Swarm::Impl::seed_round(NodeId u) {
  Node& node = nodes_[u];
  const SimTime now = queue_.now();
  const bool reward = node.seeding == SeedingKind::kRewardLottery;
  std::vector<SeedCandidate> cands;
  for (const auto& nb : node.neighbors) {
    if (!out_dir(u, nb).interested || nodes_[nb.peer].phase != Phase::kDownloading) continue;
    cands.push_back({nb.peer, nodes_[nb.peer].spec.identity, recognized_tyrant(nb.peer)});
  }
  if (reward && cfg_.reward.ignore_tyrants) cands = ignore_tyrants_filter(cands);
  std::vector<NodeId> ids;
  ids.reserve(cands.size());
  for (const auto& c : cands) ids.push_back(c.peer);

  const bool full_round = now >= node.next_seed_round;
  if (full_round) {
    while (node.next_seed_round <= now) {
      node.next_seed_round = node.next_seed_round.after(cfg_.seeding_round_s);
    }
  }
  const std::size_t slots = cfg_.seeding_slots;
  auto keep = [&](std::vector<NodeId>& held) {
    std::erase_if(held, [&](NodeId p) { return !std::binary_search(ids.begin(), ids.end(), p); });
  };
  auto excluding = [&](const std::vector<NodeId>& a, const std::vector<NodeId>& b) {
    std::vector<SeedCandidate> rest;
    for (const auto& c : cands) {
      if (std::find(a.begin(), a.end(), c.peer) == a.end() &&
          std::find(b.begin(), b.end(), c.peer) == b.end()) {
        rest.push_back(c);
      }
    }
    return rest;
  };
  auto round_robin_fill = [&](std::vector<NodeId>& held, std::size_t target,
                              const std::vector<SeedCandidate>& pool) {
    if (held.size() >= target) return;
    std::vector<NodeId> pool_ids;
    for (const auto& c : pool) pool_ids.push_back(c.peer);
    for (NodeId p : seed_round_robin(pool_ids, target - held.size(), node.cursor)) {
      held.push_back(p);
    }
  };

  std::vector<Unchoke> targets;
  if (!reward) {
    if (full_round) {
      node.seed_open = seed_round_robin(ids, slots, node.cursor);
    } else {
      keep(node.seed_open);
      round_robin_fill(node.seed_open, slots, excluding(node.seed_open, {}));
    }
    node.seed_reserved.clear();
    for (NodeId p : node.seed_open) targets.push_back({p});
    node.reserved_pool_bps = kUncapped;
    node.open_pool_bps = kUncapped;
  } else {
    const std::size_t reserved = reserved_slot_count(slots, cfg_.reward.reservation);
    if (full_round) {
      const auto a = reward_slot_assignment(node.tickets, cands, slots,
                                            cfg_.reward.reservation, node.cursor, node.rng);
      node.seed_reserved = a.reserved;
      node.seed_open = a.open;
    } else {
      keep(node.seed_reserved);
      keep(node.seed_open);
      if (node.seed_reserved.size() < reserved) {
        const auto rest = excluding(node.seed_reserved, node.seed_open);
        for (NodeId p : lottery_draw(node.tickets, rest,
                                     reserved - node.seed_reserved.size(), node.rng)) {
          node.seed_reserved.push_back(p);
        }
      }
      round_robin_fill(node.seed_open, slots - reserved,
                       excluding(node.seed_reserved, node.seed_open));
    }
    const double up = node.spec.bandwidth.up_bps;
    const double per_slot = up / static_cast<double>(slots);
    node.reserved_pool_bps = per_slot * static_cast<double>(node.seed_reserved.size());
    node.open_pool_bps = per_slot * static_cast<double>(slots - reserved);
    const auto reserved_pool = static_cast<std::int32_t>(2 * u);
    for (NodeId p : node.seed_reserved) targets.push_back({p, kUncapped, reserved_pool});
    for (NodeId p : node.seed_open) targets.push_back({p, kUncapped, reserved_pool + 1});
  }
  pool_caps_[2 * u] = node.reserved_pool_bps;
  pool_caps_[2 * u + 1] = node.open_pool_bps;
  apply_unchokes(u, targets);
}

void Swarm::Impl::on_join(NodeId n) {
  Node& node = nodes_[n];
  node.phase = node.pieces.is_complete() ? Phase::kSeeding : Phase::kDownloading;
  node.next_seed_round = queue_.now();
  announce(n, AnnounceKind::kJoin);
  node.reannounce = queue_.schedule(queue_.now().after(cfg_.protocol.reannounce_interval_s),
                                    EventKind::kTrackerReannounce, n);
}

void Swarm::Impl::on_depart(NodeId n) {
  Node& node = nodes_[n];
  if (node.phase == Phase::kGone) return;
  node.phase = Phase::kGone;
  node.leave = queue_.now().seconds();
  tracker_.announce(n, AnnounceKind::kDepart, 0, tracker_rng_);
  ++stats_.messages;
  queue_.cancel(node.reannounce);
  const auto neighbors = node.neighbors;
  for (const auto& nb : neighbors) disconnect(nb.link);
  node.unchoked.clear();
  for (const auto& nb : neighbors) {
    if (nodes_[nb.peer].phase == Phase::kDownloading) refill_all(nb.peer);
  }
  pool_caps_[2 * n] = kUncapped;
  pool_caps_[2 * n + 1] = kUncapped;
}

void Swarm::Impl::on_transfer(const Event& ev) {
  Direction& d = dir(static_cast<std::uint32_t>(ev.aux));
  d.completion = {};
  settle(d);
  const Request r = d.requests.front();
  d.requests.pop_front();
  const auto size = cfg_.torrent.block_size(r.piece, r.block);
  Node& down = nodes_[d.down];
  const bool duplicate = down.pieces.block_received(r.piece, r.block);
  credit(d, size, duplicate);
  ++stats_.blocks;
  ++stats_.messages;  // PIECE
  ++stats_.transfer_events;
  if (!d.requests.empty()) {
    d.head_bits = block_bits(d.requests.front());
    d.settled_at = queue_.now();
  }
  if (!duplicate) {
    ++d.blocks_round;
    const bool piece_done = down.pieces.receive(r.piece, r.block);
    if (down.endgame) cancel_duplicates(d.down, r, &d);
    if (piece_done) on_piece_complete(d.down, r.piece);
  }
  try_fill(d);
  refresh(d);
  ensure_completion(d);
}

void Swarm::Impl::on_optimistic_tick() {
  last_optimistic_ = queue_.now();
  for (NodeId u = 0; u < nodes_.size(); ++u) {
    Node& node = nodes_[u];
    if (node.phase == Phase::kDownloading && node.trading == TradingKind::kTft) {
      tft_optimistic(u);
    }
  }
  queue_.schedule(queue_.now().after(cfg_.protocol.optimistic_interval_s),
                  EventKind::kOptimisticRound);
}

void Swarm::Impl::on_choke_tick() {
  const SimTime now = queue_.now();
  const bool probe = last_optimistic_ == now;
  for (NodeId u = 0; u < nodes_.size(); ++u) {
    Node& node = nodes_[u];
    if (node.phase == Phase::kDownloading) {
      if (node.trading == TradingKind::kTyrant) {
        tyrant_round(u, probe);
      } else {
        tft_round(u);
      }
    } else if (node.phase == Phase::kSeeding) {
      seed_round(u);
    }
  }
  for (NodeId u = 0; u < nodes_.size(); ++u) {
    Node& node = nodes_[u];
    if (node.phase == Phase::kPending || node.phase == Phase::kGone) continue;
    for (const auto& nb : node.neighbors) in_dir(u, nb).blocks_round = 0;
    if (node.neighbors.size() < cfg_.protocol.min_neighbors &&
        seconds_between(node.last_announce, now) >= kEarlyAnnounceSpacingS) {
      announce(u, AnnounceKind::kPeriodic);
    }
  }
  // A request parked on a flow that gets no bandwidth is reissued elsewhere.
  const double timeout = cfg_.protocol.request_timeout_s;
  std::vector<std::uint32_t> stale;
  for (std::uint32_t id : active_) {
    const Direction& d = dir(id);
    if (d.rate <= 0.0 && seconds_between(d.settled_at, now) > timeout) stale.push_back(id);
  }
  for (std::uint32_t id : stale) {
    Direction& d = dir(id);
    const NodeId down = d.down;
    drop_requests(d);
    refill_all(down);
  }
  queue_.request_recompute();
  queue_.schedule(now.after(cfg_.protocol.choke_interval_s), EventKind::kChokeRound);
}

void Swarm::Impl::recompute() {
  edges_.clear();
  for (std::uint32_t id : active_) {
    const Direction& d = dir(id);
    edges_.push_back({d.up, d.down, d.cap, d.pool});
  }
  stats_.peak_edges = std::max(stats_.peak_edges, edges_.size());
  const FlowAllocation& alloc = allocator_.allocate(edges_, capacity_, pool_caps_);
  constexpr double kSlack = 1e-6;
  for (std::size_t i = 0; i < capacity_.size(); ++i) {
    if (alloc.residual_up[i] < -kSlack * std::max(1.0, capacity_[i].up_bps) ||
        alloc.residual_down[i] < -kSlack * std::max(1.0, capacity_[i].down_bps)) {
      fail("flow allocation exceeds the capacity of node " + std::to_string(i));
    }
  }
  const SimTime now = queue_.now();
  for (std::size_t i = 0; i < active_.size(); ++i) {
    Direction& d = dir(active_[i]);
    const double r = alloc.rates[i];
    if (r == d.rate && d.completion.valid()) continue;
    settle(d);
    if (r != d.rate) d.received.record(now, r);
    d.rate = r;
    queue_.cancel(d.completion);
    d.completion = {};
    ensure_completion(d);
  }
}

void Swarm::Impl::dispatch(const Event& ev) {
  switch (ev.kind) {
    case EventKind::kNodeJoin: on_join(ev.node); break;
    case EventKind::kNodeDepart:
    case EventKind::kSeedExpiry: on_depart(ev.node); break;
    case EventKind::kChokeRound: on_choke_tick(); break;
    case EventKind::kOptimisticRound: on_optimistic_tick(); break;
    case EventKind::kTransferProgress: on_transfer(ev); break;
    case EventKind::kTrackerReannounce:
      if (nodes_[ev.node].phase != Phase::kGone) {
        announce(ev.node, AnnounceKind::kPeriodic);
        nodes_[ev.node].reannounce =
            queue_.schedule(queue_.now().after(cfg_.protocol.reannounce_interval_s),
                            EventKind::kTrackerReannounce, ev.node);
      }
      break;
    case EventKind::kFlowRecompute: recompute(); break;
  }
}

RunResult Swarm::Impl::run() {
  const auto wall_start = std::chrono::steady_clock::now();
  const double horizon = cfg_.horizon_s > 0.0 ? cfg_.horizon_s : kSafetyHorizonS;
  if (unfinished_ > 0) {
    queue_.run_until(SimTime::from_seconds(horizon), [this](const Event& ev) { dispatch(ev); });
  }
  const double end = queue_.now().seconds();

  RunResult result;
  result.records.reserve(nodes_.size());
  std::uint64_t up = 0;
  std::uint64_t down = 0;
  for (const auto& n : nodes_) {
    NodeRecord rec;
    rec.id = n.spec.id;
    rec.role = n.spec.role;
    rec.trading = n.trading;
    rec.k_bps = n.spec.bandwidth.down_bps;
    rec.up_bps = n.spec.bandwidth.up_bps;
    rec.t0_s = n.spec.join_s;
    rec.td_s = n.td;
    rec.seed_duration_s = n.spec.seed_duration_s;
    rec.leave_s = n.leave;
    rec.bytes_up = n.bytes_up;
    rec.bytes_down = n.bytes_down;
    rec.duplicate_bytes = n.duplicate;
    rec.seeded_bytes_given = n.seeded_given;
    up += n.bytes_up;
    down += n.bytes_down;
    result.records.push_back(rec);
  }
  if (up != down) {
    fail("byte conservation broken: uploaded " + std::to_string(up) + ", downloaded " +
         std::to_string(down));
  }

  stats_.events = queue_.dispatched();
  stats_.recomputes = queue_.recomputes();
  stats_.sim_end_s = end;
  stats_.wall_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
  std::size_t mem = sizeof(Node) * nodes_.size() + sizeof(Link) * links_.size();
  for (const auto& n : nodes_) {
    mem += cfg_.torrent.total_blocks() + 8 * n.pieces.piece_count() +
           sizeof(Neighbor) * n.neighbors.capacity() + 64 * n.ledger.size();
  }
  mem += (sizeof(Event) + 8) * queue_.pending();
  stats_.memory_estimate_bytes = mem;
  result.stats = stats_;
  return result;
}

Swarm::Swarm(const ScenarioConfig& cfg) {
  cfg.validate();
  const auto joins = scenario_join_times(cfg);
  impl_ = std::make_unique<Impl>(cfg, build_population(cfg, joins));
}

Swarm::Swarm(const ScenarioConfig& cfg, std::vector<NodeSpec> nodes)
    : impl_(std::make_unique<Impl>(cfg, std::move(nodes))) {}

Swarm::~Swarm() = default;

RunResult Swarm::run() { return impl_->run(); }

}  // namespace swarmsim
