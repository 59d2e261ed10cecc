#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "rhpc/domain.hpp"

namespace rhpc {

/// Directed edge `from -> to`: agent `to` receives what `from` sends.
/// Indices are 0-based agent positions.
struct Edge {
  int from = 0;
  int to = 0;
  bool operator==(const Edge &) const = default;
  auto operator<=>(const Edge &) const = default;
};

struct CommGraph {
  int n_agents = 0;
  std::vector<Edge> edges;
  std::vector<int> pinned; ///< agents receiving the leader reference
  bool pcc_present = true;

  /// Senders of agent i, in edge-list order.
  std::vector<int> in_neighbors(int i) const;
};

enum class TopologyFault {
  None,
  BadIndex,
  SelfEdge,
  PinnedNotGfm,
  LeaderTree,     ///< leader + GFM subgraph has no spanning tree rooted at the leader
  GflUnreachable, ///< a GFL agent has no directed path from any GFM agent
};

struct TopologyCheck {
  TopologyFault fault = TopologyFault::None;
  int agent = -1; ///< offending agent (0-based) where applicable
  std::string message;
  bool ok() const { return fault == TopologyFault::None; }
};

TopologyCheck validate_topology(const CommGraph &graph, std::span<const DGSpec> specs);

// ---------------------------------------------------------------------------
// FDI attacks

/// Steps at which β(k) = 1: [start, stop) optionally duty-cycled.
struct AttackSchedule {
  long start = 0;
  long stop = -1;     ///< -1: never stops
  long on_steps = 0;  ///< 0: continuously on inside the window
  long off_steps = 0;

  bool active(long k) const;
};

enum class SignalKind { Constant, Ramp, Sinusoid, StealthyLowFreq };

/// Injected signal φ(k). Ramp and stealthy signals are measured from the
/// schedule start so they begin at zero offset.
struct AttackSignal {
  SignalKind kind = SignalKind::Constant;
  double value = 0.0;  ///< constant offset, ramp slope per step, or amplitude
  double period = 1.0; ///< steps (sinusoid kinds)
  double phase = 0.0;  ///< radians (stealthy)

  IncrementState evaluate(long k, long start) const;
};

struct AttackSpec {
  Edge link;
  AttackSchedule schedule;
  AttackSignal signal;

  IncrementState offset(long k) const { return signal.evaluate(k, schedule.start); }
};

struct FLocalCheck {
  bool ok = true;
  int agent = -1;
  int attacked_in_degree = 0;
};

/// Every agent must have at most f distinct attacked incoming links.
FLocalCheck validate_f_local(std::span<const AttackSpec> attacks, int f);

// ---------------------------------------------------------------------------
// Channel

struct Payload {
  IncrementState state;
  ActivationMatrix activation;
  long sent_at = 0;
  bool attacked = false;
  bool operator==(const Payload &) const = default;
};

/// Adds β(k)·φ(k) to the state; activation flags are left untouched.
Payload inject_fdi(Payload payload, const AttackSpec &attack, long k);

enum class DelayMode { Fixed, Uniform };

struct LinkParams {
  double loss_prob = 0.0; ///< α in [0, 1)
  int max_delay = 0;      ///< τ̄ in steps
  DelayMode delay_mode = DelayMode::Fixed;
  int fixed_delay = 0;    ///< used when delay_mode == Fixed; must be <= max_delay
};

/// Uniform double in [0, 1) from the top 53 bits of a 64-bit draw.
inline double uniform01(std::mt19937_64 &rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// splitmix64 finalizer; used to derive independent stream seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

struct LinkState {
  struct Queued {
    Payload payload;
    long deliver_at = 0;
  };

  Edge edge;
  LinkParams params;
  std::optional<AttackSpec> attack;
  std::deque<Queued> buffer;
  std::mt19937_64 loss_rng;
  std::mt19937_64 delay_rng;

  LinkState(Edge e, LinkParams p, std::uint64_t scenario_seed, std::uint64_t link_id,
            std::optional<AttackSpec> a = std::nullopt);

  /// Delay applied to a packet sent at step k. Consumes one delay draw when random.
  int draw_delay(long k);
};

/// Enqueues (after FDI injection) with probability 1-α. Returns whether the
/// packet was enqueued. Draws exactly one loss sample per call.
bool send(LinkState &link, Payload payload, long k);

struct DeliveryOutcome {
  enum class Status { Delivered, Lost };
  Status status = Status::Lost;
  std::optional<Payload> payload;
  bool attacked = false;
  int age = 0;

  bool delivered() const { return status == Status::Delivered; }
};

/// Newest payload due at or before k; older due payloads are discarded.
DeliveryOutcome collect(LinkState &link, long k);

/// Collect on every link whose receiver is `agent`. Result is in link order.
std::vector<std::pair<int, DeliveryOutcome>> collect_inbox(std::span<LinkState> links, int agent,
                                                           long k);

} // namespace rhpc
