#pragma once

// Importers: semantic-network triples (.triples) and entity-relationship
// schemas (.er) translated into static TM models. Both translations are
// deterministic and always produce models that validate cleanly.
//
// Mapping rules
//   is_a(S, O)        S nests under O
//   has_a(S, O)       O nests under S
//   verb(S, O)        release -> transfer(out) =verb=> transfer(in) -> receive
//                     (a `can_a_<verb>` relation means the same, labeled <verb>)
//   entity            thimac with creation potential
//   attribute         nested value-holder thimac: create + storage
//   relationship      labeled transfer(out) -> transfer(in) flow between
//                     consecutive endpoints

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tmkit/core.hpp"
#include "tmkit/dsl.hpp"

namespace tmkit::importers {

using dsl::ParseDiagnostic;
using dsl::SourceSpan;

struct Triple {
  std::string subject;
  std::string relation;
  std::string object;
};

struct TriplesDoc {
  std::vector<Triple> triples;
  std::vector<SourceSpan> spans;  // parallel to triples
  std::vector<ParseDiagnostic> errors;

  bool ok() const { return errors.empty(); }
};

struct ErAttribute {
  std::string name;
  std::vector<ErAttribute> children;
};

struct ErEntity {
  std::string name;
  std::vector<ErAttribute> attributes;
};

struct ErRelationship {
  std::string name;
  std::vector<std::string> endpoints;
};

struct ErSchema {
  std::vector<ErEntity> entities;
  std::vector<ErRelationship> relationships;
};

struct ErDoc {
  ErSchema schema;
  std::vector<SourceSpan> entity_spans;
  std::vector<SourceSpan> relationship_spans;
  std::vector<ParseDiagnostic> errors;

  bool ok() const { return errors.empty(); }
};

enum class ImportErrorCode { ConflictingNesting, UnknownEndpoint };

struct ImportError {
  ImportErrorCode code;
  std::string message;
  int input_index = -1;  // triple / relationship position, when known
};

// --- input parsing ----------------------------------------------------------

// One `subject relation object` per line, whitespace separated; `_` joins
// multiword names; `#` starts a comment.
inline TriplesDoc parse_triples(std::string_view text) {
  TriplesDoc doc;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(
        pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    std::vector<std::string> words;
    std::vector<int> cols;
    int col = 1;
    std::size_t i = 0;
    while (i < line.size()) {
      if (line[i] == ' ' || line[i] == '\t' || line[i] == '\r') {
        ++i;
        ++col;
        continue;
      }
      std::size_t start = i;
      int at_col = col;
      while (i < line.size() && line[i] != ' ' && line[i] != '\t' &&
             line[i] != '\r') {
        ++i;
        ++col;
      }
      words.emplace_back(line.substr(start, i - start));
      cols.push_back(at_col);
    }
    if (!words.empty()) {
      if (words.size() != 3) {
        doc.errors.push_back(
            {SourceSpan{line_no, cols.front(), static_cast<int>(line.size())},
             "expected `subject relation object`, got " +
                 std::to_string(words.size()) + " words",
             {}});
      } else {
        bool shaped = true;
        for (std::size_t w = 0; w < 3; ++w) {
          // subject and object become thimac ids; the relation is only a
          // nesting keyword or a flow label
          bool usable = dsl::is_valid_identifier(words[w]) &&
                        (w == 1 || !dsl::is_reserved(words[w]));
          if (!usable) {
            doc.errors.push_back(
                {SourceSpan{line_no, cols[w], static_cast<int>(words[w].size())},
                 "\"" + words[w] + "\" is not a usable name",
                 {}});
            shaped = false;
          }
        }
        if (shaped) {
          doc.triples.push_back(Triple{words[0], words[1], words[2]});
          doc.spans.push_back(
              SourceSpan{line_no, cols.front(), static_cast<int>(line.size())});
        }
      }
    }
    if (eol == std::string_view::npos) break;
    pos = eol + 1;
  }
  return doc;
}

// entity NAME { attr; attr { nested; ... } }   rel NAME (A, B)
inline ErDoc parse_er(std::string_view text) {
  ErDoc doc;
  auto tokens = dsl::detail::lex(text);
  std::size_t pos = 0;
  using dsl::detail::TokenType;
  auto peek = [&]() -> const dsl::detail::Token& {
    return tokens[std::min(pos, tokens.size() - 1)];
  };
  auto next = [&] {
    if (pos + 1 < tokens.size()) ++pos;
  };
  auto fail = [&](const std::string& message) {
    doc.errors.push_back({peek().span, message, {}});
  };
  auto name_token = [&]() -> std::optional<std::string> {
    if (peek().type != TokenType::Ident || peek().text == "entity" ||
        peek().text == "rel") {
      fail("expected a name");
      return std::nullopt;
    }
    std::string name = peek().text;
    next();
    return name;
  };

  auto parse_attributes = [&](auto&& self, std::vector<ErAttribute>& out,
                              int depth) -> bool {
    // caller consumed '{'; reads until the matching '}'
    if (depth > 64) {
      fail("attributes nest too deeply");
      return false;
    }
    while (true) {
      if (peek().type == TokenType::RBrace) {
        next();
        return true;
      }
      if (peek().type == TokenType::End) {
        fail("unterminated attribute block");
        return false;
      }
      if (peek().type == TokenType::Ident) {
        ErAttribute attr;
        attr.name = peek().text;
        next();
        if (peek().type == TokenType::LBrace) {
          next();
          if (!self(self, attr.children, depth + 1)) return false;
        }
        out.push_back(std::move(attr));
        while (peek().type == TokenType::Comma ||
               (peek().type == TokenType::Bad && peek().text == ";"))
          next();
        continue;
      }
      if (peek().type == TokenType::Bad && peek().text == ";") {
        next();
        continue;
      }
      fail("expected an attribute name");
      return false;
    }
  };

  while (peek().type != TokenType::End && doc.errors.size() < 50) {
    if (peek().type == TokenType::Ident && peek().text == "entity") {
      SourceSpan span = peek().span;
      next();
      auto name = name_token();
      if (!name) {
        next();
        continue;
      }
      if (dsl::is_reserved(*name)) {
        doc.errors.push_back(
            {span, "\"" + *name + "\" cannot name an entity", {}});
        continue;
      }
      ErEntity entity;
      entity.name = *name;
      if (peek().type == TokenType::LBrace) {
        next();
        if (!parse_attributes(parse_attributes, entity.attributes, 0)) {
          next();
          continue;
        }
      }
      doc.schema.entities.push_back(std::move(entity));
      doc.entity_spans.push_back(span);
      continue;
    }
    if (peek().type == TokenType::Ident && peek().text == "rel") {
      SourceSpan span = peek().span;
      next();
      auto name = name_token();
      if (!name) {
        next();
        continue;
      }
      ErRelationship rel;
      rel.name = *name;
      if (peek().type != TokenType::LParen) {
        fail("expected '(' after the relationship name");
        next();
        continue;
      }
      next();
      bool ok = true;
      while (true) {
        auto endpoint = name_token();
        if (!endpoint) {
          ok = false;
          break;
        }
        rel.endpoints.push_back(std::move(*endpoint));
        if (peek().type == TokenType::Comma) {
          next();
          continue;
        }
        break;
      }
      if (ok && peek().type != TokenType::RParen) {
        fail("expected ')'");
        ok = false;
      } else if (ok) {
        next();
      }
      if (ok && rel.endpoints.size() < 2) {
        doc.errors.push_back({span, "a relationship needs at least 2 endpoints", {}});
        ok = false;
      }
      if (ok) {
        doc.schema.relationships.push_back(std::move(rel));
        doc.relationship_spans.push_back(span);
      }
      continue;
    }
    fail("expected `entity` or `rel`");
    next();
  }
  return doc;
}

// --- translation ------------------------------------------------------------

namespace detail {

inline Thimac* ensure_concept(StaticModel& model, const std::string& name) {
  if (Thimac* existing = model.find_thimac(name)) return existing;
  Thimac t;
  t.id = name;
  t.implicit_create = true;
  model.add_thimac(std::move(t));
  return model.find_thimac(name);
}

inline void add_verb_chain(StaticModel& model, const std::string& src,
                           const std::string& dst, const std::string& verb) {
  Thimac* from = model.find_thimac(src);
  Thimac* to = model.find_thimac(dst);
  from->actions.insert(ActionKind::Release);
  from->actions.insert(ActionKind::Transfer);
  to->actions.insert(ActionKind::Transfer);
  to->actions.insert(ActionKind::Receive);
  ActionRef release{src, ActionKind::Release, std::nullopt};
  ActionRef out{src, ActionKind::Transfer, Port::Out};
  ActionRef in{dst, ActionKind::Transfer, Port::In};
  ActionRef receive{dst, ActionKind::Receive, std::nullopt};
  model.append_flow(FlowEdge{release, out, std::nullopt});
  model.append_flow(FlowEdge{out, in, verb});
  model.append_flow(FlowEdge{in, receive, std::nullopt});
}

}  // namespace detail

// Translates a triple set. Names become thimacs in first-mention order;
// nesting conflicts (a pair nested both ways, or any nesting cycle) throw.
inline StaticModel import_triples(const std::vector<Triple>& triples,
                                  std::string model_name = "imported") {
  StaticModel model = new_model(std::move(model_name));
  for (const Triple& triple : triples) {
    detail::ensure_concept(model, triple.subject);
    detail::ensure_concept(model, triple.object);
  }
  for (std::size_t i = 0; i < triples.size(); ++i) {
    const Triple& triple = triples[i];
    std::string child, parent;
    if (triple.relation == "is_a") {
      child = triple.subject;
      parent = triple.object;
    } else if (triple.relation == "has_a") {
      child = triple.object;
      parent = triple.subject;
    } else {
      std::string verb = triple.relation;
      if (verb.rfind("can_a_", 0) == 0) verb = verb.substr(6);
      detail::add_verb_chain(model, triple.subject, triple.object, verb);
      continue;
    }
    Thimac* t = model.find_thimac(child);
    if (t->parent) continue;  // first classification wins
    if (model.would_cycle(child, parent))
      throw ImportError{ImportErrorCode::ConflictingNesting,
                        "\"" + child + "\" and \"" + parent +
                            "\" cannot nest both ways",
                        static_cast<int>(i)};
    t->parent = parent;
  }
  return model;
}

// Translates an ER schema. Attribute thimac ids are path-qualified
// (<parent>_<attr>) so the same attribute name may appear under several
// entities; display names keep the bare attribute name.
inline StaticModel import_er(const ErSchema& schema,
                             std::string model_name = "imported") {
  StaticModel model = new_model(std::move(model_name));
  for (const ErEntity& entity : schema.entities) {
    Thimac t;
    t.id = entity.name;
    t.implicit_create = true;
    model.add_thimac(std::move(t));
    auto add_attributes = [&](auto&& self, const std::vector<ErAttribute>& attrs,
                              const std::string& parent_id) -> void {
      for (const ErAttribute& attr : attrs) {
        Thimac holder;
        holder.id = parent_id + "_" + attr.name;
        holder.name = attr.name;
        holder.parent = parent_id;
        holder.actions = {ActionKind::Create};
        holder.storage = true;
        model.add_thimac(std::move(holder));
        self(self, attr.children, parent_id + "_" + attr.name);
      }
    };
    add_attributes(add_attributes, entity.attributes, entity.name);
  }
  for (std::size_t i = 0; i < schema.relationships.size(); ++i) {
    const ErRelationship& rel = schema.relationships[i];
    for (const std::string& endpoint : rel.endpoints)
      if (!model.find_thimac(endpoint) ||
          model.find_thimac(endpoint)->parent.has_value())
        throw ImportError{ImportErrorCode::UnknownEndpoint,
                          "relationship \"" + rel.name +
                              "\" references unknown entity \"" + endpoint + "\"",
                          static_cast<int>(i)};
    for (std::size_t e = 0; e + 1 < rel.endpoints.size(); ++e) {
      if (rel.endpoints[e] == rel.endpoints[e + 1])
        continue;  // a self hop has no boundary to cross
      Thimac* a = model.find_thimac(rel.endpoints[e]);
      Thimac* b = model.find_thimac(rel.endpoints[e + 1]);
      a->actions.insert(ActionKind::Transfer);
      b->actions.insert(ActionKind::Transfer);
      model.append_flow(
          FlowEdge{ActionRef{a->id, ActionKind::Transfer, Port::Out},
                   ActionRef{b->id, ActionKind::Transfer, Port::In}, rel.name});
    }
  }
  return model;
}

}  // namespace tmkit::importers
