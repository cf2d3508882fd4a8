#pragma once

// Deterministic DOT output for static models and histories.
//
// Style table
//   thimac            cluster, rounded box; storage thimacs dashed
//   action            ellipse node "<thimac>.<kind>", one per declared kind
//   flow              solid edge; transfer ports as tail/head labels
//   trigger           dashed edge
//   highlighted event region nodes/edges colored, plus a legend row
//
// Layout is the consumer's job; only structure and styling are guaranteed.

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "tmkit/core.hpp"
#include "tmkit/engine.hpp"

namespace tmkit::render {

using engine::History;

struct RenderOptions {
  std::vector<std::string> highlight_events;
  bool show_labels = true;
  std::vector<std::string> palette = {"red",    "blue",      "darkgreen",
                                      "orange", "purple",    "brown",
                                      "crimson", "cadetblue", "goldenrod"};
};

namespace detail {

inline std::string quote(std::string_view text) {
  std::string out = "\"";
  for (char c : text) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

inline std::string node_id(const ActionRef& ref) {
  return ref.thimac + "." + std::string(to_keyword(ref.kind));
}

// Highlight assignments: node/edge -> color, last writer wins so a replayed
// region shows the most recent occurrence that touched it.
struct Highlights {
  std::map<std::string, std::string> node_colors;
  std::map<std::string, std::string> edge_colors;
  std::vector<std::string> legend;  // one row per annotation

  void paint(const engine::Region& region, const std::string& color) {
    for (const ActionRef& ref : region.actions)
      node_colors[node_id(ref)] = color;
    for (const FlowEdge& e : region.flow_edges)
      edge_colors[node_id(e.src) + "->" + node_id(e.dst)] = color;
    for (const TriggerEdge& e : region.trigger_edges)
      edge_colors[node_id(e.src) + "->" + node_id(e.dst)] = color;
  }
};

inline std::string body(const StaticModel& model, const RenderOptions& options,
                        const Highlights& highlights, bool legend_block) {
  std::string out;
  out += "digraph " + quote(model.name.empty() ? "model" : model.name) + " {\n";
  out += "  graph [compound=true, fontname=\"Helvetica\"];\n";
  out += "  node [shape=ellipse, fontname=\"Helvetica\"];\n";

  std::map<std::string, std::vector<const Thimac*>> children;
  std::vector<const Thimac*> roots;
  for (const Thimac& t : model.thimacs) {
    if (t.parent)
      children[*t.parent].push_back(&t);
    else
      roots.push_back(&t);
  }

  auto emit_thimac = [&](auto&& self, const Thimac& t, int depth) -> void {
    std::string indent(static_cast<std::size_t>(depth) * 2, ' ');
    out += indent + "subgraph " + quote("cluster_" + t.id) + " {\n";
    out += indent + "  label=" + quote(t.name) + ";\n";
    out += indent + "  style=" + std::string(t.storage ? "\"rounded,dashed\""
                                                       : "\"rounded\"") + ";\n";
    for (ActionKind kind : t.actions) {
      std::string id = t.id + "." + std::string(to_keyword(kind));
      out += indent + "  " + quote(id) + " [label=" +
             quote(std::string(to_keyword(kind))) + "";
      if (auto hit = highlights.node_colors.find(id);
          hit != highlights.node_colors.end())
        out += ", color=" + hit->second + ", penwidth=2";
      out += "];\n";
    }
    auto kids = children.find(t.id);
    if (kids != children.end())
      for (const Thimac* kid : kids->second) self(self, *kid, depth + 1);
    out += indent + "}\n";
  };
  for (const Thimac* root : roots) emit_thimac(emit_thimac, *root, 1);

  auto emit_edge = [&](const ActionRef& src, const ActionRef& dst,
                       const std::optional<std::string>& label, bool dashed) {
    std::string key = node_id(src) + "->" + node_id(dst);
    out += "  " + quote(node_id(src)) + " -> " + quote(node_id(dst));
    std::vector<std::string> attrs;
    if (dashed) attrs.push_back("style=dashed");
    if (options.show_labels && label) attrs.push_back("label=" + quote(*label));
    if (src.port) attrs.push_back("taillabel=" + quote(std::string(to_keyword(*src.port))));
    if (dst.port) attrs.push_back("headlabel=" + quote(std::string(to_keyword(*dst.port))));
    if (auto hit = highlights.edge_colors.find(key);
        hit != highlights.edge_colors.end()) {
      attrs.push_back("color=" + hit->second);
      attrs.push_back("penwidth=2");
    }
    if (!attrs.empty()) {
      out += " [";
      for (std::size_t i = 0; i < attrs.size(); ++i) {
        if (i) out += ", ";
        out += attrs[i];
      }
      out += "]";
    }
    out += ";\n";
  };
  for (const FlowEdge& e : model.flows) emit_edge(e.src, e.dst, e.label, false);
  for (const TriggerEdge& e : model.triggers)
    emit_edge(e.src, e.dst, std::nullopt, true);

  if (legend_block || !highlights.legend.empty()) {
    out += "  subgraph \"cluster_legend\" {\n";
    out += "    label=\"events\";\n";
    out += "    node [shape=plaintext];\n";
    for (std::size_t i = 0; i < highlights.legend.size(); ++i)
      out += "    \"legend_" + std::to_string(i) + "\" [label=" +
             quote(highlights.legend[i]) + "];\n";
    out += "  }\n";
  }
  out += "}\n";
  return out;
}

}  // namespace detail

// Static view: every thimac as a (nested) cluster, every declared action as
// a node, solid flows and dashed triggers. Byte-stable for equal inputs.
// Events listed in options.highlight_events (resolved against `events`) are
// colored from the palette.
inline std::string render_static(const StaticModel& model,
                                 const RenderOptions& options = {},
                                 const std::vector<engine::EventDef>& events = {}) {
  if (auto diags = validate(model); has_errors(diags))
    throw engine::EngineError(engine::EngineErrorCode::InvalidModel,
                              "cannot render: " + diags.front().message);
  detail::Highlights highlights;
  if (!options.highlight_events.empty() && options.palette.empty())
    throw engine::EngineError(engine::EngineErrorCode::InvalidModel,
                              "a highlight palette must not be empty");
  for (std::size_t i = 0; i < options.highlight_events.size(); ++i) {
    const std::string& wanted = options.highlight_events[i];
    for (const engine::EventDef& e : events)
      if (e.id == wanted) {
        const std::string& color = options.palette[i % options.palette.size()];
        highlights.paint(e.region, color);
        highlights.legend.push_back(wanted + " " + color);
      }
  }
  return detail::body(model, options, highlights, /*legend_block=*/false);
}

// Dynamic view: the static drawing with each occurrence's region colored and
// an `E@t=<start>` legend row per occurrence, in chronology order.
inline std::string render_history(const StaticModel& model,
                                  const History& history,
                                  const RenderOptions& options = {}) {
  if (auto diags = validate(model); has_errors(diags))
    throw engine::EngineError(engine::EngineErrorCode::InvalidModel,
                              "cannot render: " + diags.front().message);
  if (options.palette.empty())
    throw engine::EngineError(engine::EngineErrorCode::InvalidModel,
                              "a highlight palette must not be empty");
  detail::Highlights highlights;
  for (const engine::Occurrence& occ : history.occurrences) {
    const engine::EventDef* def = nullptr;
    for (const engine::EventDef& e : history.events)
      if (e.id == occ.event_id) def = &e;
    if (!def)
      throw engine::EngineError(engine::EngineErrorCode::RegionNotInModel,
                                "occurrence of \"" + occ.event_id +
                                    "\" has no event definition");
    for (const ActionRef& ref : def->region.actions)
      if (!model.resolves(ref))
        throw engine::EngineError(engine::EngineErrorCode::RegionNotInModel,
                                  "region of \"" + def->id +
                                      "\" is not part of the model");
    const std::string& color =
        options.palette[static_cast<std::size_t>(occ.index) %
                        options.palette.size()];
    highlights.paint(def->region, color);
    highlights.legend.push_back(occ.event_id + "@t=" +
                                std::to_string(occ.start) + " " + color);
  }
  return detail::body(model, options, highlights, /*legend_block=*/true);
}

}  // namespace tmkit::render
