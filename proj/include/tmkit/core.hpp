#pragma once

// Static thinging-machine models: thimacs built from the five generic
// actions, flow edges between actions, and trigger edges between machines.
// A model is a value; build it with the add_* members, then run validate()
// to get the full list of well-formedness diagnostics.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace tmkit {

enum class ActionKind { Create, Process, Release, Transfer, Receive };

// Identifier policy: case-sensitive ASCII letters, digits and underscore,
// not starting with a digit and not colliding with a .tm keyword. Display
// names and labels are free-form UTF-8.
inline constexpr const char* kReservedWords[] = {
    "model",   "thimac",   "in",       "storage",  "implicit", "flow",
    "trigger", "event",    "schedule", "consumes", "terminal", "desc",
    "dur",     "t",        "create",   "process",  "release",  "transfer",
    "receive"};

inline bool is_reserved(std::string_view word) {
  for (const char* kw : kReservedWords)
    if (word == kw) return true;
  return false;
}

inline bool is_valid_identifier(std::string_view word) {
  if (word.empty()) return false;
  auto head = [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
  };
  if (!head(word[0])) return false;
  for (char c : word)
    if (!head(c) && !(c >= '0' && c <= '9')) return false;
  return true;
}

inline constexpr ActionKind kActionKinds[] = {
    ActionKind::Create, ActionKind::Process, ActionKind::Release,
    ActionKind::Transfer, ActionKind::Receive};

inline std::string_view to_keyword(ActionKind kind) {
  switch (kind) {
    case ActionKind::Create: return "create";
    case ActionKind::Process: return "process";
    case ActionKind::Release: return "release";
    case ActionKind::Transfer: return "transfer";
    case ActionKind::Receive: return "receive";
  }
  return "?";
}

inline std::optional<ActionKind> action_kind_from_keyword(std::string_view word) {
  for (ActionKind kind : kActionKinds)
    if (to_keyword(kind) == word) return kind;
  return std::nullopt;
}

// Boundary side of a transfer action. Meaningful only for ActionKind::Transfer.
enum class Port { In, Out };

inline std::string_view to_keyword(Port port) {
  return port == Port::In ? "in" : "out";
}

struct ActionRef {
  std::string thimac;
  ActionKind kind = ActionKind::Create;
  std::optional<Port> port;  // present iff kind == Transfer

  friend bool operator==(const ActionRef&, const ActionRef&) = default;
  friend auto operator<=>(const ActionRef&, const ActionRef&) = default;

  bool port_shape_ok() const {
    return port.has_value() == (kind == ActionKind::Transfer);
  }
};

inline std::string to_string(const ActionRef& ref) {
  std::string out = ref.thimac;
  out += '.';
  out += to_keyword(ref.kind);
  if (ref.port) {
    out += '.';
    out += to_keyword(*ref.port);
  }
  return out;
}

struct Thimac {
  std::string id;
  std::string name;  // display name; defaults to id
  std::optional<std::string> parent;
  std::set<ActionKind> actions;
  bool storage = false;
  // A named thimac with no declared create still carries the potential to
  // be created; when true, references to its Create action resolve.
  bool implicit_create = false;

  bool declares(ActionKind kind) const {
    if (actions.count(kind)) return true;
    return kind == ActionKind::Create && implicit_create;
  }

  friend bool operator==(const Thimac&, const Thimac&) = default;
};

struct FlowEdge {
  ActionRef src;
  ActionRef dst;
  std::optional<std::string> label;

  friend bool operator==(const FlowEdge&, const FlowEdge&) = default;
  friend auto operator<=>(const FlowEdge&, const FlowEdge&) = default;
};

struct TriggerEdge {
  ActionRef src;
  ActionRef dst;

  friend bool operator==(const TriggerEdge&, const TriggerEdge&) = default;
  friend auto operator<=>(const TriggerEdge&, const TriggerEdge&) = default;
};

// The flow grammar. Within one thimac the legal (src, dst) pairs are
//   create->process  create->release  receive->process  receive->release
//   process->release transfer(in)->receive  release->transfer(out)
// and the only legal cross-thimac pair is transfer(out)->transfer(in).
inline bool flow_pair_legal(ActionKind src_kind, std::optional<Port> src_port,
                            ActionKind dst_kind, std::optional<Port> dst_port,
                            bool same_thimac) {
  using K = ActionKind;
  if (!same_thimac) {
    return src_kind == K::Transfer && src_port == Port::Out &&
           dst_kind == K::Transfer && dst_port == Port::In;
  }
  if (src_kind == K::Create && dst_kind == K::Process) return true;
  if (src_kind == K::Create && dst_kind == K::Release) return true;
  if (src_kind == K::Receive && dst_kind == K::Process) return true;
  if (src_kind == K::Receive && dst_kind == K::Release) return true;
  if (src_kind == K::Process && dst_kind == K::Release) return true;
  if (src_kind == K::Transfer && src_port == Port::In && dst_kind == K::Receive)
    return true;
  if (src_kind == K::Release && dst_kind == K::Transfer && dst_port == Port::Out)
    return true;
  return false;
}

inline bool flow_pair_legal(const ActionRef& src, const ActionRef& dst) {
  return flow_pair_legal(src.kind, src.port, dst.kind, dst.port,
                         src.thimac == dst.thimac);
}

// A boundary violation is a transfer<->transfer edge inside one thimac or
// any cross-thimac edge that is not transfer(out)->transfer(in).
inline bool flow_pair_boundary_violation(const ActionRef& src,
                                         const ActionRef& dst) {
  if (flow_pair_legal(src, dst)) return false;
  if (src.thimac != dst.thimac) return true;
  return src.kind == ActionKind::Transfer && dst.kind == ActionKind::Transfer;
}

enum class ModelErrorCode {
  DuplicateId,
  UnknownParent,
  NestingCycle,
  IllegalFlowPair,
  BoundaryViolation,
  UnknownAction,
  SameThimacTrigger,
};

struct ModelError {
  ModelErrorCode code;
  std::string message;
};

enum class Severity { Warning, Error };

struct Location {
  enum class Kind { None, Thimac, Flow, Trigger, Event };
  Kind kind = Kind::None;
  std::string id;   // thimac/event id when applicable
  int index = -1;   // flow/trigger position when applicable
};

inline std::string to_string(const Location& loc) {
  switch (loc.kind) {
    case Location::Kind::None: return "model";
    case Location::Kind::Thimac: return "thimac " + loc.id;
    case Location::Kind::Flow: return "flow #" + std::to_string(loc.index);
    case Location::Kind::Trigger: return "trigger #" + std::to_string(loc.index);
    case Location::Kind::Event: return "event " + loc.id;
  }
  return "model";
}

struct Diagnostic {
  Severity severity = Severity::Error;
  std::string code;
  Location location;
  std::string message;

  bool is_error() const { return severity == Severity::Error; }
};

struct StaticModel {
  std::string name;
  std::vector<Thimac> thimacs;  // declaration order
  std::vector<FlowEdge> flows;
  std::vector<TriggerEdge> triggers;

  const Thimac* find_thimac(std::string_view id) const {
    for (const Thimac& t : thimacs)
      if (t.id == id) return &t;
    return nullptr;
  }

  Thimac* find_thimac(std::string_view id) {
    for (Thimac& t : thimacs)
      if (t.id == id) return &t;
    return nullptr;
  }

  bool resolves(const ActionRef& ref) const {
    if (!ref.port_shape_ok()) return false;
    const Thimac* t = find_thimac(ref.thimac);
    return t && t->declares(ref.kind);
  }

  // Walks the parent chain; true when adding child->candidate_parent would
  // close a cycle.
  bool would_cycle(std::string_view child, std::string_view candidate_parent) const {
    std::string_view cursor = candidate_parent;
    for (std::size_t steps = 0; steps <= thimacs.size() + 1; ++steps) {
      if (cursor == child) return true;
      const Thimac* t = find_thimac(cursor);
      if (!t || !t->parent) return false;
      cursor = *t->parent;
    }
    return true;  // ran off the step bound: pre-existing cycle
  }

  std::optional<ModelError> add_thimac(Thimac thimac) {
    if (find_thimac(thimac.id))
      return ModelError{ModelErrorCode::DuplicateId,
                        "thimac \"" + thimac.id + "\" is already declared"};
    if (thimac.parent) {
      if (thimac.id == *thimac.parent)
        return ModelError{ModelErrorCode::NestingCycle,
                          "thimac \"" + thimac.id + "\" cannot be its own parent"};
      if (!find_thimac(*thimac.parent))
        return ModelError{ModelErrorCode::UnknownParent,
                          "unknown parent thimac \"" + *thimac.parent + "\""};
      if (would_cycle(thimac.id, *thimac.parent))
        return ModelError{ModelErrorCode::NestingCycle,
                          "nesting \"" + thimac.id + "\" under \"" +
                              *thimac.parent + "\" would close a cycle"};
    }
    if (thimac.name.empty()) thimac.name = thimac.id;
    thimacs.push_back(std::move(thimac));
    return std::nullopt;
  }

  std::optional<ModelError> check_ref(const ActionRef& ref) const {
    const Thimac* t = find_thimac(ref.thimac);
    if (!t)
      return ModelError{ModelErrorCode::UnknownAction,
                        "unknown thimac \"" + ref.thimac + "\""};
    if (!ref.port_shape_ok())
      return ModelError{ModelErrorCode::UnknownAction,
                        ref.kind == ActionKind::Transfer
                            ? "transfer reference " + to_string(ref) +
                                  " needs an .in or .out port"
                            : to_string(ref) + " does not take a port"};
    if (!t->declares(ref.kind))
      return ModelError{ModelErrorCode::UnknownAction,
                        "thimac \"" + ref.thimac + "\" does not declare " +
                            std::string(to_keyword(ref.kind))};
    return std::nullopt;
  }

  std::optional<ModelError> add_flow(ActionRef src, ActionRef dst,
                                     std::optional<std::string> label = {}) {
    if (auto err = check_ref(src)) return err;
    if (auto err = check_ref(dst)) return err;
    if (!flow_pair_legal(src, dst)) {
      std::string msg = "flow " + to_string(src) + " -> " + to_string(dst) +
                        (src.thimac == dst.thimac ? " is not a legal pair"
                                                  : " may not cross thimacs");
      if (flow_pair_boundary_violation(src, dst))
        return ModelError{ModelErrorCode::BoundaryViolation, msg};
      return ModelError{ModelErrorCode::IllegalFlowPair, msg};
    }
    flows.push_back(FlowEdge{std::move(src), std::move(dst), std::move(label)});
    return std::nullopt;
  }

  std::optional<ModelError> add_trigger(ActionRef src, ActionRef dst) {
    if (auto err = check_ref(src)) return err;
    if (auto err = check_ref(dst)) return err;
    if (src.thimac == dst.thimac)
      return ModelError{ModelErrorCode::SameThimacTrigger,
                        "trigger " + to_string(src) + " -> " + to_string(dst) +
                            " stays inside one thimac"};
    triggers.push_back(TriggerEdge{std::move(src), std::move(dst)});
    return std::nullopt;
  }

  // Unchecked appends for loaders that defer legality to validate().
  void append_flow(FlowEdge edge) { flows.push_back(std::move(edge)); }
  void append_trigger(TriggerEdge edge) { triggers.push_back(std::move(edge)); }
};

inline StaticModel new_model(std::string name) {
  StaticModel model;
  model.name = std::move(name);
  return model;
}

namespace detail {

inline void check_ref_diagnostics(const StaticModel& model, const ActionRef& ref,
                                  Location loc, std::vector<Diagnostic>& out) {
  const Thimac* t = model.find_thimac(ref.thimac);
  if (!t) {
    out.push_back({Severity::Error, "E-UNKNOWN-THIMAC", loc,
                   "reference " + to_string(ref) + " names an unknown thimac"});
    return;
  }
  if (!ref.port_shape_ok()) {
    out.push_back({Severity::Error, "E-PORT", loc,
                   "reference " + to_string(ref) +
                       " must carry a port exactly when it is a transfer"});
    return;
  }
  if (!t->declares(ref.kind))
    out.push_back({Severity::Error, "E-UNKNOWN-ACTION", loc,
                   "thimac \"" + ref.thimac + "\" does not declare " +
                       std::string(to_keyword(ref.kind))});
}

}  // namespace detail

// Full well-formedness pass. Returns every violation; an empty vector means
// the model is clean. Pure: safe to call repeatedly.
inline std::vector<Diagnostic> validate(const StaticModel& model) {
  std::vector<Diagnostic> diags;

  for (const Thimac& t : model.thimacs) {
    Location loc{Location::Kind::Thimac, t.id, -1};
    if (!is_valid_identifier(t.id) || is_reserved(t.id))
      diags.push_back({Severity::Error, "E-BAD-ID", loc,
                       "\"" + t.id + "\" is not a usable thimac id"});
    if (t.parent && !model.find_thimac(*t.parent))
      diags.push_back({Severity::Error, "E-UNKNOWN-PARENT", loc,
                       "parent thimac \"" + *t.parent + "\" is not declared"});
    if (t.actions.empty() && !t.implicit_create)
      diags.push_back({Severity::Error, "E-NO-ACTIONS", loc,
                       "thimac \"" + t.id +
                           "\" declares no actions and no creation potential"});
    // Parent-chain walk with a step bound; exceeding it means a cycle.
    std::string_view cursor = t.id;
    bool cycle = false;
    for (std::size_t steps = 0;; ++steps) {
      const Thimac* cur = model.find_thimac(cursor);
      if (!cur || !cur->parent) break;
      if (*cur->parent == t.id || steps > model.thimacs.size()) {
        cycle = true;
        break;
      }
      cursor = *cur->parent;
    }
    if (cycle)
      diags.push_back({Severity::Error, "E-NESTING-CYCLE", loc,
                       "thimac \"" + t.id + "\" participates in a nesting cycle"});
  }

  for (std::size_t i = 0; i < model.flows.size(); ++i) {
    const FlowEdge& edge = model.flows[i];
    Location loc{Location::Kind::Flow, "", static_cast<int>(i)};
    std::size_t before = diags.size();
    detail::check_ref_diagnostics(model, edge.src, loc, diags);
    detail::check_ref_diagnostics(model, edge.dst, loc, diags);
    if (diags.size() != before) continue;
    if (!flow_pair_legal(edge.src, edge.dst)) {
      std::string code = flow_pair_boundary_violation(edge.src, edge.dst)
                             ? "E-BOUNDARY"
                             : "E-ILLEGAL-FLOW";
      diags.push_back({Severity::Error, code, loc,
                       "flow " + to_string(edge.src) + " -> " +
                           to_string(edge.dst) + " is not in the flow grammar"});
    }
  }

  for (std::size_t i = 0; i < model.triggers.size(); ++i) {
    const TriggerEdge& edge = model.triggers[i];
    Location loc{Location::Kind::Trigger, "", static_cast<int>(i)};
    std::size_t before = diags.size();
    detail::check_ref_diagnostics(model, edge.src, loc, diags);
    detail::check_ref_diagnostics(model, edge.dst, loc, diags);
    if (diags.size() != before) continue;
    if (edge.src.thimac == edge.dst.thimac)
      diags.push_back({Severity::Error, "E-SAME-THIMAC-TRIGGER", loc,
                       "trigger " + to_string(edge.src) + " -> " +
                           to_string(edge.dst) + " stays inside one thimac"});
  }

  // A thimac with no way to come into being: no create (explicit or
  // implicit) and no inbound cross-thimac flow.
  for (const Thimac& t : model.thimacs) {
    if (t.declares(ActionKind::Create)) continue;
    bool inbound = std::any_of(
        model.flows.begin(), model.flows.end(), [&](const FlowEdge& e) {
          return e.dst.thimac == t.id && e.src.thimac != t.id;
        });
    if (!inbound)
      diags.push_back({Severity::Warning, "W-NO-ORIGIN",
                       Location{Location::Kind::Thimac, t.id, -1},
                       "thimac \"" + t.id +
                           "\" has no create action and nothing flows into it"});
  }

  return diags;
}

inline bool has_errors(const std::vector<Diagnostic>& diags) {
  return std::any_of(diags.begin(), diags.end(),
                     [](const Diagnostic& d) { return d.is_error(); });
}

}  // namespace tmkit
