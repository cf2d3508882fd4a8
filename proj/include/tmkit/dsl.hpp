#pragma once

// Textual .tm model format: parse to a Document (model + events + schedule)
// and print back canonically. parse() is total: any byte sequence yields
// either a Document or positioned diagnostics, never a crash.

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tmkit/core.hpp"
#include "tmkit/engine.hpp"

namespace tmkit::dsl {

using engine::EventDef;
using engine::Schedule;
using engine::ScheduleEntry;

struct SourceSpan {
  int line = 1;    // 1-based
  int column = 1;  // 1-based
  int length = 0;

  friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
};

struct ParseDiagnostic {
  SourceSpan span;
  std::string message;
  std::vector<std::string> expected;
};

// Where each construct was declared, for positioning validate() output.
struct SpanIndex {
  std::map<std::string, SourceSpan> thimacs;
  std::vector<SourceSpan> flows;     // parallel to model.flows
  std::vector<SourceSpan> triggers;  // parallel to model.triggers
  std::map<std::string, SourceSpan> events;
  std::vector<SourceSpan> schedule;  // parallel to schedule entries
};

struct Document {
  StaticModel model;
  std::vector<EventDef> events;
  Schedule schedule;
  std::vector<Diagnostic> warnings;  // e.g. W-DISCONNECTED regions
  SpanIndex spans;
};

struct ParseResult {
  Document doc;
  std::vector<ParseDiagnostic> errors;

  bool ok() const { return errors.empty(); }
};

using tmkit::is_reserved;
using tmkit::is_valid_identifier;

namespace detail {

enum class TokenType {
  Ident, Int, String, LBrace, RBrace, LParen, RParen,
  Comma, Dot, Arrow, Equals, Colon, Bad, End,
};

struct Token {
  TokenType type = TokenType::End;
  std::string text;
  SourceSpan span;
};

inline std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto push = [&](TokenType type, std::string text, int at_col) {
    out.push_back(Token{type, std::move(text), SourceSpan{line, at_col, 0}});
    out.back().span.length = static_cast<int>(out.back().text.size());
  };
  auto is_ident_char = [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
           (c >= '0' && c <= '9') || c == '_';
  };
  while (i < src.size()) {
    char c = src[i];
    if (c == '\n') {
      ++line;
      col = 1;
      ++i;
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v') {
      ++col;
      ++i;
      continue;
    }
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') ++i;
      continue;
    }
    int at_col = col;
    if (is_ident_char(c) && !(c >= '0' && c <= '9')) {
      std::size_t start = i;
      while (i < src.size() && is_ident_char(src[i])) ++i;
      std::string word(src.substr(start, i - start));
      col += static_cast<int>(word.size());
      push(TokenType::Ident, std::move(word), at_col);
      continue;
    }
    if ((c >= '0' && c <= '9') ||
        (c == '-' && i + 1 < src.size() && src[i + 1] >= '0' &&
         src[i + 1] <= '9')) {
      std::size_t start = i;
      if (c == '-') ++i;
      while (i < src.size() && src[i] >= '0' && src[i] <= '9') ++i;
      std::string digits(src.substr(start, i - start));
      col += static_cast<int>(digits.size());
      push(digits.size() <= 12 ? TokenType::Int : TokenType::Bad,
           std::move(digits), at_col);
      continue;
    }
    if (c == '"') {
      std::string value;
      ++i;
      ++col;
      bool closed = false;
      while (i < src.size()) {
        char d = src[i];
        if (d == '\n') break;  // strings stay on one line
        ++i;
        ++col;
        if (d == '"') {
          closed = true;
          break;
        }
        if (d == '\\' && i < src.size() && src[i] != '\n') {
          value += src[i];
          ++i;
          ++col;
          continue;
        }
        value += d;
      }
      push(closed ? TokenType::String : TokenType::Bad, std::move(value), at_col);
      if (!closed) out.back().text = "unterminated string";
      continue;
    }
    if (c == '-' && i + 1 < src.size() && src[i + 1] == '>') {
      i += 2;
      col += 2;
      push(TokenType::Arrow, "->", at_col);
      continue;
    }
    TokenType type = TokenType::Bad;
    switch (c) {
      case '{': type = TokenType::LBrace; break;
      case '}': type = TokenType::RBrace; break;
      case '(': type = TokenType::LParen; break;
      case ')': type = TokenType::RParen; break;
      case ',': type = TokenType::Comma; break;
      case '.': type = TokenType::Dot; break;
      case '=': type = TokenType::Equals; break;
      case ':': type = TokenType::Colon; break;
      default: break;
    }
    ++i;
    ++col;
    push(type, std::string(1, c), at_col);
  }
  out.push_back(Token{TokenType::End, "", SourceSpan{line, col, 0}});
  return out;
}

class Parser {
 public:
  explicit Parser(std::string_view src) : tokens_(lex(src)) {}

  ParseResult run() {
    ParseResult result;
    doc_ = &result.doc;
    errors_ = &result.errors;

    if (at_keyword("model")) {
      next();
      Token name = peek();
      if (name.type == TokenType::Ident && !is_reserved(name.text)) {
        doc_->model.name = name.text;
        next();
      } else {
        error(name.span, "expected a model name", {"identifier"});
      }
    } else {
      error(peek().span, "a .tm file starts with a model declaration",
            {"model"});
    }

    while (!at_end() && !too_many_errors() && !too_large()) {
      if (at_keyword("thimac")) {
        parse_thimac(std::nullopt, 0);
      } else if (at_keyword("flow")) {
        parse_edge(/*trigger=*/false);
      } else if (at_keyword("trigger")) {
        parse_edge(/*trigger=*/true);
      } else if (at_keyword("event")) {
        parse_event();
      } else if (at_keyword("schedule")) {
        parse_schedule();
      } else if (at_keyword("model")) {
        error(peek().span, "duplicate model declaration", {});
        next();
        sync();
      } else {
        error(peek().span, "expected a declaration",
              {"thimac", "flow", "trigger", "event", "schedule"});
        next();
        sync();
      }
    }
    return result;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    std::size_t i = std::min(pos_ + ahead, tokens_.size() - 1);
    return tokens_[i];
  }
  void next() {
    if (pos_ + 1 < tokens_.size()) ++pos_;
  }
  bool at_end() const { return peek().type == TokenType::End; }
  bool at_keyword(std::string_view word) const {
    return peek().type == TokenType::Ident && peek().text == word;
  }
  bool too_many_errors() const { return errors_->size() >= 200; }

  // Safety valve against adversarial inputs: name resolution is linear in
  // the thimac count, so unbounded statement counts would go quadratic.
  bool too_large() {
    if (++statements_ <= 20'000) return false;
    if (!size_reported_) {
      size_reported_ = true;
      error(peek().span, "input exceeds the statement limit", {});
    }
    return true;
  }

  void error(SourceSpan span, std::string message,
             std::vector<std::string> expected) {
    errors_->push_back(ParseDiagnostic{span, std::move(message), std::move(expected)});
  }

  void sync() {
    while (!at_end()) {
      if (peek().type == TokenType::Ident &&
          (peek().text == "thimac" || peek().text == "flow" ||
           peek().text == "trigger" || peek().text == "event" ||
           peek().text == "schedule" || peek().text == "model"))
        return;
      next();
    }
  }

  bool expect(TokenType type, std::string_view what) {
    if (peek().type == type) {
      next();
      return true;
    }
    error(peek().span, "expected " + std::string(what), {std::string(what)});
    return false;
  }

  std::optional<std::string> parse_name_ident(std::string_view what) {
    const Token& tok = peek();
    if (tok.type != TokenType::Ident) {
      error(tok.span, "expected " + std::string(what), {"identifier"});
      return std::nullopt;
    }
    if (is_reserved(tok.text)) {
      error(tok.span, "\"" + tok.text + "\" is a reserved word", {"identifier"});
      next();
      return std::nullopt;
    }
    std::string name = tok.text;
    next();
    return name;
  }

  // Skips a brace-balanced block without registering anything.
  void skip_block() {
    int depth = 0;
    while (!at_end()) {
      if (peek().type == TokenType::LBrace) ++depth;
      if (peek().type == TokenType::RBrace && --depth <= 0) {
        next();
        return;
      }
      next();
    }
  }

  // thimac ID ["display"] [in PARENT] { body } — body holds action keywords,
  // storage/implicit markers, and nested thimac blocks.
  void parse_thimac(std::optional<std::string> enclosing, int depth) {
    SourceSpan keyword_span = peek().span;
    if (depth > 64) {
      error(keyword_span, "thimacs nest too deeply", {});
      next();  // 'thimac'
      if (peek().type == TokenType::Ident) next();
      skip_block();
      return;
    }
    next();  // 'thimac'
    auto id = parse_name_ident("a thimac id");
    if (!id) {
      sync();
      return;
    }
    SourceSpan id_span = keyword_span;
    Thimac thimac;
    thimac.id = *id;
    thimac.parent = std::move(enclosing);
    if (peek().type == TokenType::String) {
      thimac.name = peek().text;
      next();
    }
    if (at_keyword("in")) {
      next();
      auto parent = parse_name_ident("a parent thimac id");
      if (parent) {
        if (enclosing) {
          error(peek().span,
                "nested thimac \"" + thimac.id + "\" already has a parent", {});
        } else if (!doc_->model.find_thimac(*parent)) {
          error(peek().span, "unknown parent thimac \"" + *parent + "\"", {});
        } else {
          thimac.parent = *parent;
        }
      }
    }
    if (!expect(TokenType::LBrace, "'{'")) {
      sync();
      return;
    }
    bool has_implicit_marker = false;
    std::vector<std::string> pending_children;
    // Register the thimac before its body so nested blocks can name it as
    // parent; actions are filled in as the body is read. Nested blocks may
    // reallocate the thimac vector, so always re-find by id.
    bool added = true;
    if (auto err = doc_->model.add_thimac(thimac)) {
      error(id_span, err->message, {});
      added = false;  // keep reading the body for diagnostics only
    } else {
      doc_->spans.thimacs.emplace(thimac.id, id_span);
    }
    auto registered = [&]() -> Thimac* {
      return added ? doc_->model.find_thimac(thimac.id) : nullptr;
    };

    while (!at_end() && !too_many_errors() && !too_large()) {
      if (peek().type == TokenType::RBrace) {
        next();
        break;
      }
      if (peek().type == TokenType::Ident) {
        const std::string& word = peek().text;
        if (auto kind = action_kind_from_keyword(word)) {
          if (Thimac* t = registered()) t->actions.insert(*kind);
          next();
          continue;
        }
        if (word == "storage") {
          if (Thimac* t = registered()) t->storage = true;
          next();
          continue;
        }
        if (word == "implicit") {
          has_implicit_marker = true;
          next();
          continue;
        }
        if (word == "thimac") {
          parse_thimac(thimac.id, depth + 1);
          continue;
        }
        error(peek().span, "unknown item \"" + word + "\" in a thimac body",
              {"create", "process", "release", "transfer", "receive",
               "storage", "implicit", "thimac"});
        next();
        continue;
      }
      error(peek().span, "unexpected token in a thimac body", {"'}'"});
      next();
    }
    if (Thimac* t = registered())
      t->implicit_create = has_implicit_marker || t->actions.empty();
  }

  std::optional<ActionRef> parse_ref() {
    auto thimac = parse_name_ident("a thimac id");
    if (!thimac) return std::nullopt;
    if (!expect(TokenType::Dot, "'.'")) return std::nullopt;
    const Token& kw = peek();
    auto kind = kw.type == TokenType::Ident
                    ? action_kind_from_keyword(kw.text)
                    : std::nullopt;
    if (!kind) {
      error(kw.span,
            "expected an action keyword" +
                (kw.type == TokenType::Ident ? ", got \"" + kw.text + "\"" : ""),
            {"create", "process", "release", "transfer", "receive"});
      return std::nullopt;
    }
    next();
    ActionRef ref{*thimac, *kind, std::nullopt};
    if (peek().type == TokenType::Dot) {
      next();
      const Token& port = peek();
      if (port.type == TokenType::Ident && (port.text == "in" || port.text == "out")) {
        if (*kind != ActionKind::Transfer) {
          error(port.span,
                std::string(to_keyword(*kind)) + " takes no port", {});
          next();
          return std::nullopt;
        }
        ref.port = port.text == "in" ? Port::In : Port::Out;
        next();
      } else {
        error(port.span, "expected a transfer port", {"in", "out"});
        return std::nullopt;
      }
    }
    if (ref.kind == ActionKind::Transfer && !ref.port) {
      error(kw.span, "transfer references need a .in or .out port",
            {"in", "out"});
      return std::nullopt;
    }
    return ref;
  }

  // Referential checks happen at parse time; grammar legality is left to
  // validate() so it can be reported with a position by the caller.
  bool ref_resolves(const ActionRef& ref, SourceSpan span) {
    const Thimac* t = doc_->model.find_thimac(ref.thimac);
    if (!t) {
      error(span, "unknown thimac \"" + ref.thimac + "\"", {});
      return false;
    }
    if (!t->declares(ref.kind)) {
      error(span, "thimac \"" + ref.thimac + "\" does not declare " +
                      std::string(to_keyword(ref.kind)),
            {});
      return false;
    }
    return true;
  }

  void parse_edge(bool trigger) {
    SourceSpan keyword_span = peek().span;
    next();
    auto src = parse_ref();
    if (!src || !expect(TokenType::Arrow, "'->'")) {
      sync();
      return;
    }
    auto dst = parse_ref();
    if (!dst) {
      sync();
      return;
    }
    std::optional<std::string> label;
    if (!trigger && peek().type == TokenType::String) {
      label = peek().text;
      next();
    }
    if (!ref_resolves(*src, keyword_span) || !ref_resolves(*dst, keyword_span))
      return;
    if (trigger) {
      doc_->model.append_trigger(TriggerEdge{*src, *dst});
      doc_->spans.triggers.push_back(keyword_span);
    } else {
      doc_->model.append_flow(FlowEdge{*src, *dst, std::move(label)});
      doc_->spans.flows.push_back(keyword_span);
    }
  }

  void parse_event() {
    SourceSpan keyword_span = peek().span;
    next();
    auto id = parse_name_ident("an event id");
    if (!id || !expect(TokenType::Equals, "'='") ||
        !expect(TokenType::LBrace, "'{'")) {
      sync();
      return;
    }
    std::vector<ActionRef> refs;
    bool refs_ok = true;
    if (peek().type != TokenType::RBrace) {
      while (true) {
        SourceSpan ref_span = peek().span;
        auto ref = parse_ref();
        if (!ref) {
          refs_ok = false;
          break;
        }
        if (!ref_resolves(*ref, ref_span)) refs_ok = false;
        refs.push_back(std::move(*ref));
        if (peek().type == TokenType::Comma) {
          next();
          continue;
        }
        break;
      }
    }
    if (!expect(TokenType::RBrace, "'}'")) {
      sync();
      return;
    }
    std::string label;
    std::vector<std::string> consumes;
    bool terminal = false;
    while (true) {
      if (at_keyword("consumes")) {
        next();
        while (true) {
          SourceSpan span = peek().span;
          auto thimac = parse_name_ident("a thimac id");
          if (!thimac) break;
          if (!doc_->model.find_thimac(*thimac))
            error(span, "unknown thimac \"" + *thimac + "\" in consumes", {});
          else
            consumes.push_back(std::move(*thimac));
          if (peek().type == TokenType::Comma) {
            next();
            continue;
          }
          break;
        }
        continue;
      }
      if (at_keyword("terminal")) {
        terminal = true;
        next();
        continue;
      }
      if (at_keyword("desc")) {
        next();
        if (peek().type == TokenType::String) {
          label = peek().text;
          next();
        } else {
          error(peek().span, "desc takes a quoted string", {"string"});
        }
        continue;
      }
      break;
    }
    if (!refs_ok) return;
    for (const EventDef& existing : doc_->events)
      if (existing.id == *id) {
        error(keyword_span, "event \"" + *id + "\" is already declared", {});
        return;
      }
    try {
      doc_->events.push_back(engine::define_event(
          doc_->model, std::move(refs), *id, std::move(label),
          std::move(consumes), terminal, &doc_->warnings));
      doc_->spans.events.emplace(*id, keyword_span);
    } catch (const engine::EngineError& err) {
      error(keyword_span, err.what(), {});
    }
  }

  void parse_schedule() {
    SourceSpan keyword_span = peek().span;
    next();
    if (!at_keyword("t")) {
      error(peek().span, "expected t=<tick>", {"t"});
      sync();
      return;
    }
    next();
    if (!expect(TokenType::Equals, "'='")) {
      sync();
      return;
    }
    if (peek().type != TokenType::Int) {
      error(peek().span, "expected a tick number", {"integer"});
      sync();
      return;
    }
    long tick = std::stol(peek().text);
    next();
    if (!expect(TokenType::Colon, "':'")) {
      sync();
      return;
    }
    while (true) {
      auto event_id = parse_name_ident("an event id");
      if (!event_id) {
        sync();
        return;
      }
      long duration = 1;
      if (at_keyword("dur")) {
        next();
        if (!expect(TokenType::Equals, "'='")) {
          sync();
          return;
        }
        if (peek().type != TokenType::Int) {
          error(peek().span, "expected a duration", {"integer"});
          sync();
          return;
        }
        duration = std::stol(peek().text);
        next();
      }
      doc_->schedule.push_back(ScheduleEntry{tick, std::move(*event_id), duration});
      doc_->spans.schedule.push_back(keyword_span);
      if (peek().type == TokenType::Comma) {
        next();
        continue;
      }
      return;
    }
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  long statements_ = 0;
  bool size_reported_ = false;
  Document* doc_ = nullptr;
  std::vector<ParseDiagnostic>* errors_ = nullptr;
};

inline std::string quoted(std::string_view text) {
  std::string out = "\"";
  for (char c : text) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace detail

inline ParseResult parse(std::string_view text) {
  return detail::Parser(text).run();
}

// Canonical printing. Thimacs keep declaration order with children nested
// under their parents; flows print before triggers, both sorted by printed
// source then destination; schedule lines are grouped per tick.
// Rejects models that do not validate cleanly or cannot be reparsed.
inline std::string print(const StaticModel& model,
                         const std::vector<EventDef>& events,
                         const Schedule& schedule) {
  {
    auto diags = validate(model);
    if (has_errors(diags))
      throw std::invalid_argument("refusing to print an invalid model: " +
                                  diags.front().message);
  }
  auto check_id = [](const std::string& id, const char* what) {
    if (!is_valid_identifier(id) || is_reserved(id))
      throw std::invalid_argument(std::string(what) + " \"" + id +
                                  "\" is not a printable identifier");
  };
  check_id(model.name, "model name");
  for (const Thimac& t : model.thimacs) check_id(t.id, "thimac id");
  for (const EventDef& e : events) check_id(e.id, "event id");

  std::string out = "model " + model.name + "\n";

  std::map<std::string, std::vector<const Thimac*>> children;
  std::vector<const Thimac*> roots;
  for (const Thimac& t : model.thimacs) {
    if (t.parent)
      children[*t.parent].push_back(&t);
    else
      roots.push_back(&t);
  }

  auto print_thimac = [&](auto&& self, const Thimac& t, int depth) -> void {
    std::string indent(static_cast<std::size_t>(depth) * 2, ' ');
    out += indent + "thimac " + t.id;
    if (t.name != t.id) out += " " + detail::quoted(t.name);
    bool has_marker = t.storage || (t.implicit_create && !t.actions.empty());
    auto kids = children.find(t.id);
    bool has_kids = kids != children.end() && !kids->second.empty();
    if (t.actions.empty() && !has_marker && !has_kids) {
      out += " {}\n";
      return;
    }
    out += " {\n";
    if (!t.actions.empty()) {
      out += indent + " ";
      for (ActionKind kind : t.actions) out += " " + std::string(to_keyword(kind));
      out += '\n';
    }
    if (t.storage) out += indent + "  storage\n";
    if (t.implicit_create && !t.actions.empty()) out += indent + "  implicit\n";
    if (has_kids)
      for (const Thimac* kid : kids->second) self(self, *kid, depth + 1);
    out += indent + "}\n";
  };
  for (const Thimac* root : roots) {
    out += '\n';
    print_thimac(print_thimac, *root, 0);
  }

  std::vector<FlowEdge> flows = model.flows;
  std::sort(flows.begin(), flows.end(), [](const FlowEdge& a, const FlowEdge& b) {
    auto key = [](const FlowEdge& e) {
      return std::tuple(to_string(e.src), to_string(e.dst),
                        e.label.value_or(""));
    };
    return key(a) < key(b);
  });
  std::vector<TriggerEdge> triggers = model.triggers;
  std::sort(triggers.begin(), triggers.end(),
            [](const TriggerEdge& a, const TriggerEdge& b) {
              return std::tuple(to_string(a.src), to_string(a.dst)) <
                     std::tuple(to_string(b.src), to_string(b.dst));
            });
  if (!flows.empty() || !triggers.empty()) out += '\n';
  for (const FlowEdge& e : flows) {
    out += "flow " + to_string(e.src) + " -> " + to_string(e.dst);
    if (e.label) out += " " + detail::quoted(*e.label);
    out += '\n';
  }
  for (const TriggerEdge& e : triggers)
    out += "trigger " + to_string(e.src) + " -> " + to_string(e.dst) + "\n";

  if (!events.empty()) out += '\n';
  for (const EventDef& e : events) {
    out += "event " + e.id + " = { ";
    for (std::size_t i = 0; i < e.region.actions.size(); ++i) {
      if (i) out += ", ";
      out += to_string(e.region.actions[i]);
    }
    out += " }";
    if (!e.consumes.empty()) {
      out += " consumes ";
      for (std::size_t i = 0; i < e.consumes.size(); ++i) {
        if (i) out += ", ";
        out += e.consumes[i];
      }
    }
    if (e.terminal) out += " terminal";
    if (e.label != e.id) out += " desc " + detail::quoted(e.label);
    out += '\n';
  }

  if (!schedule.empty()) out += '\n';
  std::vector<ScheduleEntry> ordered = schedule;
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const ScheduleEntry& a, const ScheduleEntry& b) {
                     return a.tick < b.tick;
                   });
  for (std::size_t i = 0; i < ordered.size();) {
    long tick = ordered[i].tick;
    out += "schedule t=" + std::to_string(tick) + ": ";
    bool first = true;
    for (; i < ordered.size() && ordered[i].tick == tick; ++i) {
      if (!first) out += ", ";
      first = false;
      out += ordered[i].event_id;
      if (ordered[i].duration != 1)
        out += " dur=" + std::to_string(ordered[i].duration);
    }
    out += '\n';
  }
  return out;
}

inline std::string print(const Document& doc) {
  return print(doc.model, doc.events, doc.schedule);
}

// --- structural equality ----------------------------------------------------

// Order-insensitive comparison: thimacs as an id-keyed set, edges as
// multisets, events by id, schedule in replay order.
inline bool models_equal(const StaticModel& a, const StaticModel& b) {
  if (a.name != b.name) return false;
  if (a.thimacs.size() != b.thimacs.size()) return false;
  for (const Thimac& t : a.thimacs) {
    const Thimac* other = b.find_thimac(t.id);
    if (!other || !(t == *other)) return false;
  }
  auto sorted_flows = [](const StaticModel& m) {
    auto flows = m.flows;
    std::sort(flows.begin(), flows.end());
    return flows;
  };
  auto sorted_triggers = [](const StaticModel& m) {
    auto triggers = m.triggers;
    std::sort(triggers.begin(), triggers.end());
    return triggers;
  };
  return sorted_flows(a) == sorted_flows(b) &&
         sorted_triggers(a) == sorted_triggers(b);
}

inline bool documents_equal(const Document& a, const Document& b) {
  if (!models_equal(a.model, b.model)) return false;
  if (a.events.size() != b.events.size()) return false;
  for (const EventDef& e : a.events) {
    auto it = std::find_if(b.events.begin(), b.events.end(),
                           [&](const EventDef& o) { return o.id == e.id; });
    if (it == b.events.end() || !(e == *it)) return false;
  }
  auto replay_order = [](const Schedule& s) {
    Schedule ordered = s;
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](const ScheduleEntry& x, const ScheduleEntry& y) {
                       return x.tick < y.tick;
                     });
    return ordered;
  };
  return replay_order(a.schedule) == replay_order(b.schedule);
}

}  // namespace tmkit::dsl
