#pragma once

// Actualization engine: turns static regions into timed occurrences.
// A replay owns all of its mutable state and produces a History value:
// the ordered occurrence list, the exicon ledger, and a per-tick token
// trajectory. Replays over the same model can run in parallel.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tmkit/core.hpp"

namespace tmkit::engine {

using tmkit::ActionKind;
using tmkit::ActionRef;
using tmkit::Diagnostic;
using tmkit::FlowEdge;
using tmkit::Location;
using tmkit::Port;
using tmkit::Severity;
using tmkit::StaticModel;
using tmkit::TriggerEdge;

using Tick = long;

inline constexpr Tick kDefaultMaxTick = 10'000;

enum class EngineErrorCode {
  UnknownAction,
  EmptyRegion,
  UnknownEvent,
  NegativeTick,
  InvalidDuration,
  TriggerTargetAmbiguous,
  UnknownOccurrence,
  AlreadyClosed,
  TickOutOfRange,
  MultiTokenUnsupported,
  InvalidModel,
  RegionNotInModel,
  MalformedHistory,
};

inline std::string_view to_string(EngineErrorCode code) {
  switch (code) {
    case EngineErrorCode::UnknownAction: return "UnknownAction";
    case EngineErrorCode::EmptyRegion: return "EmptyRegion";
    case EngineErrorCode::UnknownEvent: return "UnknownEvent";
    case EngineErrorCode::NegativeTick: return "NegativeTick";
    case EngineErrorCode::InvalidDuration: return "InvalidDuration";
    case EngineErrorCode::TriggerTargetAmbiguous: return "TriggerTargetAmbiguous";
    case EngineErrorCode::UnknownOccurrence: return "UnknownOccurrence";
    case EngineErrorCode::AlreadyClosed: return "AlreadyClosed";
    case EngineErrorCode::TickOutOfRange: return "TickOutOfRange";
    case EngineErrorCode::MultiTokenUnsupported: return "MultiTokenUnsupported";
    case EngineErrorCode::InvalidModel: return "InvalidModel";
    case EngineErrorCode::RegionNotInModel: return "RegionNotInModel";
    case EngineErrorCode::MalformedHistory: return "MalformedHistory";
  }
  return "?";
}

class EngineError : public std::runtime_error {
 public:
  EngineError(EngineErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  EngineErrorCode code() const { return code_; }

 private:
  EngineErrorCode code_;
};

// A static subgraph of the model: what an event actualizes.
struct Region {
  std::vector<ActionRef> actions;  // sorted, unique
  std::vector<FlowEdge> flow_edges;
  std::vector<TriggerEdge> trigger_edges;

  bool contains(const ActionRef& ref) const {
    return std::binary_search(actions.begin(), actions.end(), ref);
  }

  friend bool operator==(const Region&, const Region&) = default;
};

struct EventDef {
  std::string id;
  Region region;
  std::string label;                  // defaults to id
  std::vector<std::string> consumes;  // thimac ids, sorted
  // A terminal occurrence keeps its exicon open after its duration ends;
  // non-terminal occurrences close at start + duration.
  bool terminal = false;

  friend bool operator==(const EventDef&, const EventDef&) = default;
};

struct ScheduleEntry {
  Tick tick = 0;
  std::string event_id;
  Tick duration = 1;

  friend bool operator==(const ScheduleEntry&, const ScheduleEntry&) = default;
};

using Schedule = std::vector<ScheduleEntry>;

enum class ExiconStatus { Open, Closed };

// One existence container per occurrence. Ids are never reused.
struct Exicon {
  int id = 0;
  ExiconStatus status = ExiconStatus::Open;
  Tick opened_at = 0;
  std::optional<Tick> closed_at;

  friend bool operator==(const Exicon&, const Exicon&) = default;
};

struct Token {
  int id = 0;
  std::optional<std::string> payload;
  ActionRef location;
  bool processed = false;
  bool alive = true;
  int created_by = -1;  // occurrence index
  ActionRef origin;     // where creation left it
};

struct TokenSnapshot {
  int id = 0;
  ActionRef location;
  std::optional<std::string> payload;
  bool processed = false;

  friend bool operator==(const TokenSnapshot&, const TokenSnapshot&) = default;
};

struct Occurrence {
  int index = 0;
  std::string event_id;
  Tick start = 0;
  Tick duration = 1;
  int exicon_id = 0;

  Tick last_tick() const { return start + duration - 1; }
};

struct History {
  std::vector<Occurrence> occurrences;
  std::vector<Exicon> exicons;  // ledger, id order
  std::vector<std::vector<TokenSnapshot>> trajectory;  // per tick 0..final_tick
  std::vector<Token> tokens;    // every token ever created, final state
  std::vector<EventDef> events;  // definitions active during the replay
  std::vector<Diagnostic> diagnostics;
  Tick final_tick = -1;  // last occupied tick; -1 for an empty history
  std::vector<long> creates_by_tick;  // cumulative counts, per tick
  std::vector<long> kills_by_tick;

  const Exicon* find_exicon(int id) const {
    for (const Exicon& e : exicons)
      if (e.id == id) return &e;
    return nullptr;
  }
};

// --- event definition ------------------------------------------------------

// Builds the region spanned by `refs`: the refs themselves plus every model
// edge whose both endpoints are in the set. Appends W-DISCONNECTED to
// `diagnostics` when the region does not hang together.
inline EventDef define_event(const StaticModel& model,
                             std::vector<ActionRef> refs, std::string id,
                             std::string label = "",
                             std::vector<std::string> consumes = {},
                             bool terminal = false,
                             std::vector<Diagnostic>* diagnostics = nullptr) {
  if (refs.empty())
    throw EngineError(EngineErrorCode::EmptyRegion,
                      "event \"" + id + "\" has an empty region");
  for (const ActionRef& ref : refs)
    if (!model.resolves(ref))
      throw EngineError(EngineErrorCode::UnknownAction,
                        "event \"" + id + "\" references " + to_string(ref) +
                            " which does not resolve");
  for (const std::string& thimac : consumes)
    if (!model.find_thimac(thimac))
      throw EngineError(EngineErrorCode::UnknownAction,
                        "event \"" + id + "\" consumes unknown thimac \"" +
                            thimac + "\"");

  EventDef def;
  def.label = label.empty() ? id : std::move(label);
  def.id = std::move(id);
  def.terminal = terminal;
  std::sort(consumes.begin(), consumes.end());
  consumes.erase(std::unique(consumes.begin(), consumes.end()), consumes.end());
  def.consumes = std::move(consumes);

  std::sort(refs.begin(), refs.end());
  refs.erase(std::unique(refs.begin(), refs.end()), refs.end());
  def.region.actions = std::move(refs);
  for (const FlowEdge& e : model.flows)
    if (def.region.contains(e.src) && def.region.contains(e.dst))
      def.region.flow_edges.push_back(e);
  for (const TriggerEdge& e : model.triggers)
    if (def.region.contains(e.src) && def.region.contains(e.dst))
      def.region.trigger_edges.push_back(e);
  // canonical edge order, independent of the model's declaration order
  std::sort(def.region.flow_edges.begin(), def.region.flow_edges.end());
  std::sort(def.region.trigger_edges.begin(), def.region.trigger_edges.end());

  // Undirected connectivity over the region's own edges.
  if (diagnostics && def.region.actions.size() > 1) {
    const auto& nodes = def.region.actions;
    auto index_of = [&](const ActionRef& ref) {
      return std::lower_bound(nodes.begin(), nodes.end(), ref) - nodes.begin();
    };
    std::vector<std::vector<std::size_t>> adj(nodes.size());
    auto link = [&](const ActionRef& a, const ActionRef& b) {
      std::size_t i = index_of(a), j = index_of(b);
      adj[i].push_back(j);
      adj[j].push_back(i);
    };
    for (const FlowEdge& e : def.region.flow_edges) link(e.src, e.dst);
    for (const TriggerEdge& e : def.region.trigger_edges) link(e.src, e.dst);
    std::vector<bool> seen(nodes.size(), false);
    std::vector<std::size_t> stack{0};
    seen[0] = true;
    while (!stack.empty()) {
      std::size_t i = stack.back();
      stack.pop_back();
      for (std::size_t j : adj[i])
        if (!seen[j]) {
          seen[j] = true;
          stack.push_back(j);
        }
    }
    if (std::find(seen.begin(), seen.end(), false) != seen.end())
      diagnostics->push_back({Severity::Warning, "W-DISCONNECTED",
                              Location{Location::Kind::Event, def.id, -1},
                              "event \"" + def.id +
                                  "\" actualizes a disconnected region"});
  }
  return def;
}

// --- replay ----------------------------------------------------------------

struct ReplayLimits {
  Tick max_tick = kDefaultMaxTick;
};

namespace detail {

// Execution order inside a region: topological over its own edges (flows
// and triggers), lexicographic tie-break, cycles appended in sorted order.
inline std::vector<ActionRef> execution_order(const Region& region) {
  const auto& nodes = region.actions;
  std::vector<std::size_t> indegree(nodes.size(), 0);
  std::vector<std::vector<std::size_t>> out(nodes.size());
  auto index_of = [&](const ActionRef& ref) {
    return std::lower_bound(nodes.begin(), nodes.end(), ref) - nodes.begin();
  };
  auto add_edge = [&](const ActionRef& a, const ActionRef& b) {
    std::size_t i = index_of(a), j = index_of(b);
    out[i].push_back(j);
    ++indegree[j];
  };
  for (const FlowEdge& e : region.flow_edges) add_edge(e.src, e.dst);
  for (const TriggerEdge& e : region.trigger_edges) add_edge(e.src, e.dst);

  std::set<std::size_t> ready;  // ordered: nodes are sorted, so index order
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (indegree[i] == 0) ready.insert(i);
  std::vector<ActionRef> order;
  std::vector<bool> done(nodes.size(), false);
  while (!ready.empty()) {
    std::size_t i = *ready.begin();
    ready.erase(ready.begin());
    done[i] = true;
    order.push_back(nodes[i]);
    for (std::size_t j : out[i])
      if (--indegree[j] == 0 && !done[j]) ready.insert(j);
  }
  for (std::size_t i = 0; i < nodes.size(); ++i)  // cycle leftovers
    if (!done[i]) order.push_back(nodes[i]);
  return order;
}

// "owner = DAVID" -> "DAVID"; labels without '=' carry no payload.
inline std::optional<std::string> payload_from_label(std::string_view label) {
  auto pos = label.rfind('=');
  if (pos == std::string_view::npos) return std::nullopt;
  std::string_view tail = label.substr(pos + 1);
  while (!tail.empty() && (tail.front() == ' ' || tail.front() == '\t'))
    tail.remove_prefix(1);
  while (!tail.empty() && (tail.back() == ' ' || tail.back() == '\t'))
    tail.remove_suffix(1);
  return std::string(tail);
}

struct PendingClose {
  Tick due;
  int occurrence;
};

}  // namespace detail

// Deterministic replay of a schedule over a validated model. Occurrences at
// one tick run in schedule order; a trigger whose source executes at t
// enqueues the unique event containing its destination at t + 1.
inline History replay(const StaticModel& model,
                      const std::vector<EventDef>& events,
                      const Schedule& schedule,
                      const ReplayLimits& limits = {}) {
  {
    auto diags = validate(model);
    if (has_errors(diags))
      throw EngineError(EngineErrorCode::InvalidModel,
                        "model \"" + model.name + "\" does not validate: " +
                            diags.front().message);
  }
  auto find_event = [&](std::string_view id) -> const EventDef* {
    for (const EventDef& e : events)
      if (e.id == id) return &e;
    return nullptr;
  };
  for (const ScheduleEntry& entry : schedule) {
    if (!find_event(entry.event_id))
      throw EngineError(EngineErrorCode::UnknownEvent,
                        "schedule references unknown event \"" +
                            entry.event_id + "\"");
    if (entry.tick < 0)
      throw EngineError(EngineErrorCode::NegativeTick,
                        "schedule tick " + std::to_string(entry.tick) +
                            " for event \"" + entry.event_id + "\"");
    if (entry.duration < 1)
      throw EngineError(EngineErrorCode::InvalidDuration,
                        "duration " + std::to_string(entry.duration) +
                            " for event \"" + entry.event_id + "\"");
  }
  // Every trigger that can fire out of a region must have exactly one
  // defined event containing its destination.
  for (const TriggerEdge& trig : model.triggers) {
    bool can_fire_out = false;
    for (const EventDef& e : events)
      if (e.region.contains(trig.src) && !e.region.contains(trig.dst))
        can_fire_out = true;
    if (!can_fire_out) continue;
    int targets = 0;
    for (const EventDef& e : events)
      if (e.region.contains(trig.dst)) ++targets;
    if (targets != 1)
      throw EngineError(
          EngineErrorCode::TriggerTargetAmbiguous,
          "trigger " + to_string(trig.src) + " -> " + to_string(trig.dst) +
              " targets " + std::to_string(targets) + " defined events");
  }

  // Subsistence bound: every region must live inside this model.
  for (const EventDef& event : events)
    for (const ActionRef& r : event.region.actions)
      if (!model.resolves(r))
        throw EngineError(EngineErrorCode::UnknownAction,
                          "event \"" + event.id + "\" references " +
                              to_string(r) + " outside the model");

  History history;
  history.events = events;

  // Canonical edge order makes the replay a function of the model value,
  // not of the order edges were declared in.
  std::vector<FlowEdge> flows = model.flows;
  std::sort(flows.begin(), flows.end());
  std::vector<TriggerEdge> triggers = model.triggers;
  std::sort(triggers.begin(), triggers.end());

  std::map<Tick, std::vector<std::pair<const EventDef*, Tick>>> queue;
  for (const ScheduleEntry& entry : schedule)
    queue[entry.tick].emplace_back(find_event(entry.event_id), entry.duration);

  std::vector<detail::PendingClose> closes;
  std::vector<Token>& tokens = history.tokens;
  long creates = 0, kills = 0;
  int next_exicon = 1, next_token = 1;
  Tick final_occupied = -1;

  auto live_token_at = [&](const ActionRef& ref) -> Token* {
    for (Token& t : tokens)
      if (t.alive && t.location == ref) return &t;
    return nullptr;
  };
  auto live_token_in = [&](std::string_view thimac) -> Token* {
    for (Token& t : tokens)
      if (t.alive && t.location.thimac == thimac) return &t;
    return nullptr;
  };
  auto spawn = [&](const ActionRef& at, std::optional<std::string> payload,
                   int occurrence) -> Token& {
    tokens.push_back(Token{next_token++, std::move(payload), at, false, true,
                           occurrence, at});
    ++creates;
    return tokens.back();
  };
  auto kill = [&](Token& t) {
    t.alive = false;
    ++kills;
  };

  auto close_exicon = [&](int occurrence, Tick at) {
    Exicon& ex = history.exicons[history.occurrences[occurrence].exicon_id - 1];
    if (ex.status == ExiconStatus::Closed) return;
    ex.status = ExiconStatus::Closed;
    ex.closed_at = at;
  };

  auto execute = [&](const EventDef& event, Tick now, Tick duration) {
    int occ_index = static_cast<int>(history.occurrences.size());
    history.exicons.push_back(
        Exicon{next_exicon, ExiconStatus::Open, now, std::nullopt});
    history.occurrences.push_back(
        Occurrence{occ_index, event.id, now, duration, next_exicon});
    ++next_exicon;
    final_occupied = std::max(final_occupied, now + duration - 1);

    for (const ActionRef& ref : detail::execution_order(event.region)) {
      switch (ref.kind) {
        case ActionKind::Create: {
          // A create in an occupied holder replaces the held thing.
          if (Token* old = live_token_at(ref)) kill(*old);
          spawn(ref, detail::payload_from_label(event.label), occ_index);
          break;
        }
        case ActionKind::Process: {
          if (Token* t = live_token_in(ref.thimac)) t->processed = true;
          break;
        }
        default: {  // Release / Transfer / Receive: movement
          if (live_token_at(ref)) break;  // already settled here
          Token* moved = nullptr;
          for (const FlowEdge& e : flows) {
            if (!(e.dst == ref)) continue;
            if (Token* t = live_token_at(e.src)) {
              t->location = ref;
              moved = t;
              break;
            }
          }
          if (!moved && ref.kind == ActionKind::Release) {
            // Releasing from a thimac that holds nothing actualizes its
            // creation potential: the thing is assumed to already be there.
            const tmkit::Thimac* host = model.find_thimac(ref.thimac);
            if (host && host->declares(ActionKind::Create) &&
                !live_token_in(ref.thimac))
              spawn(ref, std::nullopt, occ_index);
          }
          break;
        }
      }
    }

    for (const std::string& thimac : event.consumes) {
      for (Token& t : tokens) {
        if (!t.alive || t.location.thimac != thimac) continue;
        kill(t);
        if (t.created_by >= 0) close_exicon(t.created_by, now);
      }
    }

    for (const TriggerEdge& trig : triggers) {
      if (!event.region.contains(trig.src) || event.region.contains(trig.dst))
        continue;
      const EventDef* target = nullptr;
      for (const EventDef& e : events)
        if (e.region.contains(trig.dst)) target = &e;
      if (target)  // uniqueness pre-checked at replay start
        queue[now + 1].emplace_back(target, Tick{1});
    }

    if (!event.terminal)
      closes.push_back(detail::PendingClose{now + duration, occ_index});
  };

  Tick now = 0;
  bool truncated = false;
  while (true) {
    bool queue_pending = !queue.empty();
    bool closes_pending = !closes.empty();
    if (!queue_pending && !closes_pending && now > final_occupied) break;
    if (now > limits.max_tick) {
      if (queue_pending) {
        history.diagnostics.push_back(
            {Severity::Error, "E-TICK-LIMIT", Location{},
             "replay cut off at tick " + std::to_string(limits.max_tick) +
                 " with work still queued"});
        truncated = true;
      }
      break;
    }

    if (auto it = queue.find(now); it != queue.end()) {
      auto batch = std::move(it->second);
      queue.erase(it);
      for (auto& [event, duration] : batch) execute(*event, now, duration);
    }

    for (auto it = closes.begin(); it != closes.end();) {
      if (it->due != now) {
        ++it;
        continue;
      }
      close_exicon(it->occurrence, now);
      // Tokens this occurrence created die with it unless the flow already
      // carried them onward, the holder is a storage, or they settled in a
      // receive.
      for (Token& t : tokens) {
        if (!t.alive || t.created_by != it->occurrence) continue;
        if (t.location != t.origin) continue;  // moved on
        const tmkit::Thimac* host = model.find_thimac(t.location.thimac);
        bool kept = (host && host->storage) ||
                    t.location.kind == ActionKind::Receive;
        if (!kept) kill(t);
      }
      it = closes.erase(it);
    }

    if (now <= final_occupied || queue_pending || closes_pending) {
      std::vector<TokenSnapshot> snap;
      for (const Token& t : tokens)
        if (t.alive)
          snap.push_back(TokenSnapshot{t.id, t.location, t.payload, t.processed});
      history.trajectory.push_back(std::move(snap));
      history.creates_by_tick.push_back(creates);
      history.kills_by_tick.push_back(kills);
    }
    ++now;
  }

  history.final_tick = truncated ? std::min<Tick>(final_occupied, limits.max_tick)
                                 : final_occupied;
  if (history.final_tick + 1 <
      static_cast<Tick>(history.trajectory.size())) {
    history.trajectory.resize(history.final_tick + 1);
    history.creates_by_tick.resize(history.final_tick + 1);
    history.kills_by_tick.resize(history.final_tick + 1);
  }
  return history;
}

// Reverts an occurrence to its region: closes its exicon at the history's
// final tick and kills the tokens it created. The static model is untouched.
inline void deactualize(History& history, int occurrence_index) {
  if (occurrence_index < 0 ||
      occurrence_index >= static_cast<int>(history.occurrences.size()))
    throw EngineError(EngineErrorCode::UnknownOccurrence,
                      "no occurrence #" + std::to_string(occurrence_index));
  const Occurrence& occ = history.occurrences[occurrence_index];
  auto ex_it = std::find_if(history.exicons.begin(), history.exicons.end(),
                            [&](const Exicon& e) { return e.id == occ.exicon_id; });
  if (ex_it == history.exicons.end())
    throw EngineError(EngineErrorCode::UnknownOccurrence,
                      "occurrence #" + std::to_string(occurrence_index) +
                          " has no ledger entry");
  Exicon& ex = *ex_it;
  if (ex.status == ExiconStatus::Closed)
    throw EngineError(EngineErrorCode::AlreadyClosed,
                      "occurrence #" + std::to_string(occurrence_index) +
                          " (event \"" + occ.event_id + "\") already closed");
  ex.status = ExiconStatus::Closed;
  ex.closed_at = std::max(history.final_tick, occ.start);
  for (Token& t : history.tokens)
    if (t.alive && t.created_by == occurrence_index) t.alive = false;
}

// --- movement chains (the arrow-in-flight construction) --------------------

enum class ChainStyle {
  Continuous,  // consecutive starts, no idle ticks
  Jump,        // one idle tick between position groups
};

struct MovementChain {
  StaticModel model;
  std::vector<EventDef> events;
  Schedule schedule;
};

// Source -> k middles -> destination, one event per generic action along
// the flow path (4k + 4 of them), scheduled in flow order one per tick.
// Jump style inserts an idle tick whenever the path enters a new thimac.
inline MovementChain build_movement_chain(int middle_count,
                                          ChainStyle style = ChainStyle::Continuous) {
  if (middle_count < 0)
    throw std::invalid_argument("middle count must be non-negative");
  MovementChain chain;
  chain.model = new_model("movement_" + std::to_string(middle_count));

  Thimac source;
  source.id = "source";
  source.actions = {ActionKind::Release, ActionKind::Transfer};
  source.implicit_create = true;
  chain.model.add_thimac(source);
  std::vector<std::string> hops{"source"};
  for (int i = 1; i <= middle_count; ++i) {
    Thimac middle;
    middle.id = "middle_" + std::to_string(i);
    middle.actions = {ActionKind::Transfer, ActionKind::Receive,
                      ActionKind::Release};
    chain.model.add_thimac(middle);
    hops.push_back(middle.id);
  }
  Thimac destination;
  destination.id = "destination";
  destination.actions = {ActionKind::Transfer, ActionKind::Receive};
  chain.model.add_thimac(destination);
  hops.push_back("destination");

  auto ref = [](std::string thimac, ActionKind kind,
                std::optional<Port> port = {}) {
    return ActionRef{std::move(thimac), kind, port};
  };

  std::vector<ActionRef> path;
  for (std::size_t i = 0; i + 1 < hops.size(); ++i) {
    const std::string& here = hops[i];
    if (i > 0) {  // middles pass the thing through
      path.push_back(ref(here, ActionKind::Transfer, Port::In));
      path.push_back(ref(here, ActionKind::Receive));
      chain.model.add_flow(path[path.size() - 2], path.back());
      chain.model.add_flow(path.back(), ref(here, ActionKind::Release));
    }
    path.push_back(ref(here, ActionKind::Release));
    path.push_back(ref(here, ActionKind::Transfer, Port::Out));
    chain.model.add_flow(path[path.size() - 2], path.back());
    chain.model.add_flow(path.back(),
                         ref(hops[i + 1], ActionKind::Transfer, Port::In));
  }
  path.push_back(ref("destination", ActionKind::Transfer, Port::In));
  path.push_back(ref("destination", ActionKind::Receive));
  chain.model.add_flow(path[path.size() - 2], path.back());

  const std::vector<ActionRef>& steps = path;

  Tick tick = 0;
  std::string previous_thimac;
  for (const ActionRef& step : steps) {
    if (style == ChainStyle::Jump && !previous_thimac.empty() &&
        step.thimac != previous_thimac)
      ++tick;  // minimum stay between positions
    previous_thimac = step.thimac;
    std::string event_id = step.thimac + "_" + std::string(to_keyword(step.kind));
    if (step.port)
      event_id += "_" + std::string(to_keyword(*step.port));
    chain.events.push_back(
        define_event(chain.model, {step}, event_id));
    chain.schedule.push_back(ScheduleEntry{tick, event_id, 1});
    ++tick;
  }
  return chain;
}

// --- continuity ------------------------------------------------------------

struct Boundary {
  int prev_occurrence = 0;
  int next_occurrence = 0;
  Tick prev_end = 0;    // last occupied tick of the earlier occurrence
  Tick next_start = 0;

  friend bool operator==(const Boundary&, const Boundary&) = default;
};

struct ContinuityReport {
  std::vector<Boundary> gaps;
  std::vector<Boundary> overlaps;
  std::vector<Boundary> adjacencies;

  bool continuous() const { return gaps.empty(); }
};

// Classifies every consecutive occurrence boundary of a single-token flight:
// shared tick = overlap, end + 1 = start = adjacency, anything later = gap.
inline ContinuityReport continuity_check(const History& history) {
  for (const auto& snap : history.trajectory)
    if (snap.size() > 1)
      throw EngineError(EngineErrorCode::MultiTokenUnsupported,
                        "continuity is defined for single-token flights; saw " +
                            std::to_string(snap.size()) + " live tokens");
  ContinuityReport report;
  for (std::size_t i = 0; i + 1 < history.occurrences.size(); ++i) {
    const Occurrence& prev = history.occurrences[i];
    const Occurrence& next = history.occurrences[i + 1];
    Boundary b{prev.index, next.index, prev.last_tick(), next.start};
    if (next.start <= prev.last_tick())
      report.overlaps.push_back(b);
    else if (next.start == prev.last_tick() + 1)
      report.adjacencies.push_back(b);
    else
      report.gaps.push_back(b);
  }
  return report;
}

// --- queries ---------------------------------------------------------------

inline const std::vector<TokenSnapshot>& token_state(const History& history,
                                                     Tick tick) {
  if (tick < 0 || tick > history.final_tick)
    throw EngineError(EngineErrorCode::TickOutOfRange,
                      "tick " + std::to_string(tick) + " outside 0.." +
                          std::to_string(history.final_tick));
  return history.trajectory[static_cast<std::size_t>(tick)];
}

inline std::vector<Exicon> exicon_ledger(const History& history) {
  return history.exicons;
}

// --- serialization ---------------------------------------------------------

namespace detail {

inline void append_quoted(std::string& out, std::string_view text) {
  out += '"';
  for (char c : text) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
}

}  // namespace detail

// Line-oriented canonical form: one line per occurrence, then one tokens@<t>
// block per tick. Byte-stable for identical histories.
inline std::string history_to_text(const History& history) {
  std::string out;
  for (const Occurrence& occ : history.occurrences) {
    out += "t=" + std::to_string(occ.start);
    out += " d=" + std::to_string(occ.duration);
    out += " event=" + occ.event_id;
    out += " exicon=" + std::to_string(occ.exicon_id);
    const Exicon* ex = history.find_exicon(occ.exicon_id);
    if (ex && ex->status == ExiconStatus::Closed)
      out += " closed@" + std::to_string(*ex->closed_at);
    out += '\n';
  }
  for (Tick t = 0; t <= history.final_tick; ++t) {
    out += "tokens@" + std::to_string(t) + '\n';
    for (const TokenSnapshot& s : history.trajectory[static_cast<std::size_t>(t)]) {
      out += "  token=" + std::to_string(s.id);
      out += " at=" + to_string(s.location);
      if (s.payload) {
        out += " payload=";
        detail::append_quoted(out, *s.payload);
      }
      if (s.processed) out += " processed";
      out += '\n';
    }
  }
  return out;
}

// Parses history_to_text output back into a History. `events` supplies the
// region definitions (matched by id) so the result can be rendered.
inline History history_from_text(std::string_view text,
                                 const std::vector<EventDef>& events) {
  History history;
  history.events = events;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  auto fail = [&](const std::string& what) -> EngineError {
    return EngineError(EngineErrorCode::MalformedHistory,
                       "line " + std::to_string(line_no) + ": " + what);
  };
  auto field = [&](std::string_view token, std::string_view key) {
    if (token.substr(0, key.size()) != key) throw fail("expected " + std::string(key));
    return std::string(token.substr(key.size()));
  };
  auto number = [&](const std::string& digits) -> long {
    try {
      std::size_t used = 0;
      long value = std::stol(digits, &used);
      if (used != digits.size()) throw fail("bad number " + digits);
      return value;
    } catch (const EngineError&) {
      throw;
    } catch (const std::exception&) {
      throw fail("bad number " + digits);
    }
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line.rfind("tokens@", 0) == 0) {
      Tick t = number(line.substr(7));
      if (t != static_cast<Tick>(history.trajectory.size()))
        throw fail("tokens blocks out of order");
      history.trajectory.emplace_back();
      history.final_tick = t;
      continue;
    }
    if (line.rfind("  token=", 0) == 0) {
      if (history.trajectory.empty()) throw fail("token line outside a block");
      std::istringstream fields{line};
      std::string tok;
      TokenSnapshot snap;
      fields >> tok;
      snap.id = static_cast<int>(number(field(tok, "token=")));
      fields >> tok;
      std::string at = field(tok, "at=");
      auto first_dot = at.find('.');
      if (first_dot == std::string::npos) throw fail("bad location " + at);
      snap.location.thimac = at.substr(0, first_dot);
      std::string rest = at.substr(first_dot + 1);
      auto second_dot = rest.find('.');
      std::string kind_word =
          second_dot == std::string::npos ? rest : rest.substr(0, second_dot);
      auto kind = action_kind_from_keyword(kind_word);
      if (!kind) throw fail("bad action " + kind_word);
      snap.location.kind = *kind;
      if (second_dot != std::string::npos) {
        std::string port_word = rest.substr(second_dot + 1);
        if (port_word != "in" && port_word != "out")
          throw fail("bad transfer port " + port_word);
        snap.location.port = port_word == "in" ? Port::In : Port::Out;
      }
      // payload (quoted, may contain spaces) and processed flag
      auto payload_pos = line.find(" payload=\"");
      if (payload_pos != std::string::npos) {
        std::string value;
        bool closed = false;
        for (std::size_t i = payload_pos + 10; i < line.size(); ++i) {
          if (line[i] == '\\' && i + 1 < line.size()) {
            value += line[++i];
          } else if (line[i] == '"') {
            closed = true;
            break;
          } else {
            value += line[i];
          }
        }
        if (!closed) throw fail("unterminated payload");
        snap.payload = value;
      }
      if (line.size() >= 10 && line.rfind(" processed") == line.size() - 10)
        snap.processed = true;
      history.trajectory.back().push_back(std::move(snap));
      continue;
    }
    if (line.rfind("t=", 0) == 0) {
      std::istringstream fields{line};
      std::string tok;
      Occurrence occ;
      occ.index = static_cast<int>(history.occurrences.size());
      fields >> tok;
      occ.start = number(field(tok, "t="));
      fields >> tok;
      occ.duration = number(field(tok, "d="));
      fields >> tok;
      occ.event_id = field(tok, "event=");
      fields >> tok;
      occ.exicon_id = static_cast<int>(number(field(tok, "exicon=")));
      Exicon ex{occ.exicon_id, ExiconStatus::Open, occ.start, std::nullopt};
      if (fields >> tok) {
        ex.status = ExiconStatus::Closed;
        ex.closed_at = number(field(tok, "closed@"));
      }
      history.exicons.push_back(ex);
      history.occurrences.push_back(std::move(occ));
      continue;
    }
    throw fail("unrecognized line: " + line);
  }
  history.creates_by_tick.assign(history.trajectory.size(), 0);
  history.kills_by_tick.assign(history.trajectory.size(), 0);
  return history;
}

}  // namespace tmkit::engine
