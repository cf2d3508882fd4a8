#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <sstream>

#include "tmkit/tmkit.hpp"

using namespace tmkit;
using namespace tmkit::render;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

dsl::Document corpus(const std::string& name) {
  auto result = dsl::parse(slurp(std::string(CORPUS_DIR) + "/" + name));
  REQUIRE(result.ok());
  return std::move(result.doc);
}

std::size_t count_occurrences(const std::string& text, const std::string& needle) {
  std::size_t count = 0, pos = 0;
  while ((pos = text.find(needle, pos)) != std::string::npos) {
    ++count;
    pos += needle.size();
  }
  return count;
}

// Structural smoke check standing in for a DOT grammar run: the digraph
// header, balanced braces and quotes, and statements that end in ; or {.
void check_dot_shape(const std::string& dot) {
  REQUIRE(dot.rfind("digraph ", 0) == 0);
  int depth = 0;
  bool in_string = false;
  for (std::size_t i = 0; i < dot.size(); ++i) {
    char c = dot[i];
    if (in_string) {
      if (c == '\\')
        ++i;
      else if (c == '"')
        in_string = false;
      continue;
    }
    if (c == '"') in_string = true;
    if (c == '{') ++depth;
    if (c == '}') {
      --depth;
      REQUIRE(depth >= 0);
    }
  }
  CHECK(depth == 0);
  CHECK_FALSE(in_string);
  std::istringstream lines{dot};
  std::string line;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    char last = line.back();
    CHECK((last == '{' || last == '}' || last == ';'));
  }
}

}  // namespace

TEST_CASE("single thimac renders one cluster and one node") {
  auto model = new_model("tiny");
  Thimac t;
  t.id = "X";
  t.actions = {ActionKind::Create};
  model.add_thimac(t);
  std::string dot = render_static(model);
  check_dot_shape(dot);
  CHECK(count_occurrences(dot, "subgraph \"cluster_") == 1);
  CHECK(count_occurrences(dot, "\"X.create\"") == 1);
}

TEST_CASE("canary corpus renders clusters and a dashed trigger") {
  auto doc = corpus("canary.tm");
  std::string dot = render_static(doc.model, {}, doc.events);
  check_dot_shape(dot);
  CHECK(count_occurrences(dot, "subgraph \"cluster_") >= 5);
  CHECK(dot.find("style=dashed") != std::string::npos);
  CHECK(dot.find("\"Shark.process\" -> \"Attack.create\" [style=dashed") !=
        std::string::npos);
  CHECK(dot.find("label=\"fly\"") != std::string::npos);
}

TEST_CASE("every model element appears exactly once") {
  auto doc = corpus("canary.tm");
  const StaticModel& model = doc.model;
  std::string dot = render_static(model, {}, doc.events);
  for (const Thimac& t : model.thimacs) {
    CHECK(count_occurrences(dot, "\"cluster_" + t.id + "\"") == 1);
    for (ActionKind kind : t.actions)
      CHECK(count_occurrences(dot, "\"" + t.id + "." +
                                       std::string(to_keyword(kind)) + "\"") >=
            1);
  }
  std::size_t edge_lines = 0;
  std::istringstream lines{dot};
  std::string line;
  while (std::getline(lines, line))
    if (line.find(" -> ") != std::string::npos) ++edge_lines;
  CHECK(edge_lines == model.flows.size() + model.triggers.size());
}

TEST_CASE("parcel clusters nest three deep") {
  auto doc = corpus("parcels.tm");
  std::string dot = render_static(doc.model, {}, doc.events);
  check_dot_shape(dot);
  auto john = dot.find("\"cluster_John\"");
  auto c = dot.find("\"cluster_John_c\"");
  auto length = dot.find("\"cluster_John_c_length\"");
  REQUIRE(john != std::string::npos);
  REQUIRE(c != std::string::npos);
  REQUIRE(length != std::string::npos);
  CHECK(john < c);
  CHECK(c < length);
  CHECK(dot.find("label=\"length\"") != std::string::npos);  // display name
  // storage holders are drawn dashed
  CHECK(dot.find("style=\"rounded,dashed\"") != std::string::npos);
}

TEST_CASE("rendering is deterministic") {
  auto doc = corpus("canary.tm");
  CHECK(render_static(doc.model, {}, doc.events) ==
        render_static(doc.model, {}, doc.events));
  auto history = engine::replay(doc.model, doc.events, doc.schedule);
  CHECK(render_history(doc.model, history) ==
        render_history(doc.model, history));
}

TEST_CASE("empty history render equals the static render plus a legend") {
  auto doc = corpus("canary.tm");
  auto empty = engine::replay(doc.model, doc.events, {});
  std::string base = render_static(doc.model);
  std::string dot = render_history(doc.model, empty);
  check_dot_shape(dot);
  CHECK(dot.find("\"cluster_legend\"") != std::string::npos);
  CHECK(count_occurrences(dot, "\"legend_") == 0);  // legend is empty
  // removing the legend block gives the static drawing
  auto legend_pos = dot.find("  subgraph \"cluster_legend\"");
  REQUIRE(legend_pos != std::string::npos);
  std::string stripped = dot;
  stripped.erase(legend_pos, dot.rfind("}\n") - legend_pos - 2);
  CHECK(stripped.substr(0, legend_pos) == base.substr(0, legend_pos));
}

TEST_CASE("replayed histories annotate each occurrence in order") {
  auto doc = corpus("canary.tm");
  auto history = engine::replay(doc.model, doc.events, doc.schedule);
  std::string dot = render_history(doc.model, history);
  check_dot_shape(dot);
  CHECK(count_occurrences(dot, "\"legend_") == 10);
  CHECK(dot.find("E1@t=0") != std::string::npos);
  CHECK(dot.find("E7@t=5") != std::string::npos);
  CHECK(dot.find("E10@t=8") != std::string::npos);
  CHECK(dot.find("E1@t=0") < dot.find("E10@t=8"));
}

TEST_CASE("movement chain history shows 4k+4 annotated events") {
  auto chain = engine::build_movement_chain(1);
  auto history = engine::replay(chain.model, chain.events, chain.schedule);
  std::string dot = render_history(chain.model, history);
  check_dot_shape(dot);
  CHECK(count_occurrences(dot, "\"legend_") == 8);
}

TEST_CASE("static highlights color the named regions") {
  auto doc = corpus("canary.tm");
  RenderOptions options;
  options.highlight_events = {"E1"};
  std::string dot = render_static(doc.model, options, doc.events);
  CHECK(dot.find("\"canary_1.create\" [label=\"create\", color=red") !=
        std::string::npos);
  CHECK(dot.find("\"legend_0\" [label=\"E1 red\"]") != std::string::npos);

  options.palette.clear();
  CHECK_THROWS_AS(render_static(doc.model, options, doc.events),
                  engine::EngineError);
}

TEST_CASE("label display can be switched off") {
  auto doc = corpus("canary.tm");
  RenderOptions options;
  options.show_labels = false;
  std::string dot = render_static(doc.model, options, doc.events);
  check_dot_shape(dot);
  CHECK(dot.find("label=\"fly\"") == std::string::npos);
  CHECK(dot.find("label=\"Canary\"") != std::string::npos);  // clusters keep names
}

TEST_CASE("invalid models do not render") {
  auto model = new_model("bad");
  Thimac x;
  x.id = "X";
  x.actions = {ActionKind::Process, ActionKind::Receive};
  model.add_thimac(x);
  model.append_flow(FlowEdge{ActionRef{"X", ActionKind::Process, {}},
                             ActionRef{"X", ActionKind::Receive, {}},
                             std::nullopt});
  CHECK_THROWS_AS(render_static(model), engine::EngineError);
}

TEST_CASE("foreign histories are rejected") {
  auto doc = corpus("canary.tm");
  auto lute = corpus("lute.tm");
  auto history = engine::replay(lute.model, lute.events, lute.schedule);
  CHECK_THROWS_AS(render_history(doc.model, history), engine::EngineError);
}
