#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <random>
#include <sstream>

#include "support/model_gen.hpp"
#include "tmkit/tmkit.hpp"

using namespace tmkit;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

TEST_CASE("minimal model parses") {
  auto result = dsl::parse("model M\nthimac X { create }");
  REQUIRE(result.ok());
  CHECK(result.doc.model.name == "M");
  REQUIRE(result.doc.model.thimacs.size() == 1);
  const Thimac& x = result.doc.model.thimacs[0];
  CHECK(x.id == "X");
  CHECK(x.actions == std::set<ActionKind>{ActionKind::Create});
  CHECK_FALSE(x.implicit_create);
}

TEST_CASE("empty bodies imply creation potential") {
  auto result = dsl::parse("model M\nthimac X {}\nthimac Y { storage }");
  REQUIRE(result.ok());
  CHECK(result.doc.model.find_thimac("X")->implicit_create);
  CHECK(result.doc.model.find_thimac("Y")->implicit_create);
  CHECK(result.doc.model.find_thimac("Y")->storage);
}

TEST_CASE("canary corpus parses to the expected shape") {
  auto result = dsl::parse(slurp(std::string(CORPUS_DIR) + "/canary.tm"));
  REQUIRE(result.ok());
  const StaticModel& model = result.doc.model;

  int top_level = 0;
  for (const Thimac& t : model.thimacs)
    if (!t.parent) ++top_level;
  CHECK(top_level >= 5);
  for (const char* id : {"Canary", "Ostrich", "Shark", "Sky", "Human"}) {
    const Thimac* t = model.find_thimac(id);
    REQUIRE(t != nullptr);
    CHECK_FALSE(t->parent.has_value());
  }

  // The release -> transfer -> transfer -> receive chain into the sky.
  auto has_flow = [&](const ActionRef& src, const ActionRef& dst) {
    for (const FlowEdge& e : model.flows)
      if (e.src == src && e.dst == dst) return true;
    return false;
  };
  CHECK(has_flow({"Canary", ActionKind::Release, {}},
                 {"Canary", ActionKind::Transfer, Port::Out}));
  CHECK(has_flow({"Canary", ActionKind::Transfer, Port::Out},
                 {"Sky", ActionKind::Transfer, Port::In}));
  CHECK(has_flow({"Sky", ActionKind::Transfer, Port::In},
                 {"Sky", ActionKind::Receive, {}}));
  CHECK(validate(model).empty());
  CHECK(result.doc.events.size() == 10);
  CHECK(result.doc.schedule.size() == 10);
}

TEST_CASE("typo in an action keyword is reported with expectations") {
  auto result = dsl::parse("thimac X { creat }");
  REQUIRE_FALSE(result.ok());
  bool found = false;
  for (const auto& e : result.errors) {
    if (e.span.line != 1) continue;
    if (e.message.find("creat") == std::string::npos) continue;
    found = true;
    CHECK(std::find(e.expected.begin(), e.expected.end(), "create") !=
          e.expected.end());
    CHECK(std::find(e.expected.begin(), e.expected.end(), "receive") !=
          e.expected.end());
  }
  CHECK(found);
}

TEST_CASE("print of an empty model") {
  CHECK(dsl::print(new_model("M"), {}, {}) == "model M\n");
}

TEST_CASE("print requires printable identifiers") {
  // the in-memory model may carry names the textual format cannot express
  CHECK_THROWS_AS(dsl::print(new_model(""), {}, {}), std::invalid_argument);
  CHECK_THROWS_AS(dsl::print(new_model("two words"), {}, {}),
                  std::invalid_argument);
  CHECK_THROWS_AS(dsl::print(new_model("model"), {}, {}),
                  std::invalid_argument);  // reserved word
}

TEST_CASE("print rejects invalid models") {
  auto model = new_model("M");
  Thimac x;
  x.id = "X";
  x.actions = {ActionKind::Process, ActionKind::Receive};
  model.add_thimac(x);
  model.append_flow(FlowEdge{ActionRef{"X", ActionKind::Process, {}},
                             ActionRef{"X", ActionKind::Receive, {}},
                             std::nullopt});
  CHECK_THROWS_AS(dsl::print(model, {}, {}), std::invalid_argument);
}

TEST_CASE("corpus files are canonical fixed points") {
  for (const char* name : {"canary.tm", "parcels.tm", "lute.tm", "zeno.tm",
                           "birds.tm"}) {
    std::string text = slurp(std::string(CORPUS_DIR) + "/" + name);
    auto result = dsl::parse(text);
    REQUIRE(result.ok());
    INFO(name);
    CHECK(dsl::print(result.doc) == text);
  }
}

TEST_CASE("printing is stable across parse-print cycles") {
  std::string text = slurp(std::string(CORPUS_DIR) + "/parcels.tm");
  auto once = dsl::print(dsl::parse(text).doc);
  auto twice = dsl::print(dsl::parse(once).doc);
  CHECK(once == twice);
}

TEST_CASE("round-trip: parse(print(doc)) preserves structure") {
  std::mt19937 rng(2024);
  for (int round = 0; round < 200; ++round) {
    auto doc = testgen::random_document(rng);
    REQUIRE_FALSE(has_errors(validate(doc.model)));
    std::string text = dsl::print(doc);
    auto reparsed = dsl::parse(text);
    INFO("round " << round << "\n" << text);
    REQUIRE(reparsed.ok());
    CHECK(dsl::documents_equal(doc, reparsed.doc));
    CHECK(dsl::print(reparsed.doc) == text);
  }
}

TEST_CASE("parse is total over fuzzed inputs") {
  std::mt19937 rng(99);
  std::size_t line_guard = 0;
  for (int round = 0; round < 3000; ++round) {
    std::string bytes = testgen::random_bytes(rng);
    dsl::ParseResult result;
    REQUIRE_NOTHROW(result = dsl::parse(bytes));
    // Position fidelity: spans stay within the input.
    std::size_t lines = 1 + std::count(bytes.begin(), bytes.end(), '\n');
    for (const auto& e : result.errors) {
      CHECK(e.span.line >= 1);
      CHECK(static_cast<std::size_t>(e.span.line) <= lines + 1);
      CHECK(e.span.column >= 1);
      CHECK_FALSE(e.message.empty());
    }
    line_guard += result.errors.size();
  }
  CHECK(line_guard > 0);  // fuzzing actually hit error paths
}

TEST_CASE("adversarial inputs stay bounded") {
  SECTION("deep nesting is cut off, not overflowed") {
    std::string text = "model M\n";
    for (int i = 0; i < 5000; ++i)
      text += "thimac t" + std::to_string(i) + " { ";
    auto result = dsl::parse(text);
    CHECK_FALSE(result.ok());
    CHECK(result.doc.model.thimacs.size() <= 66);
  }
  SECTION("statement floods hit the size limit") {
    std::string text = "model M\n";
    for (int i = 0; i < 30000; ++i)
      text += "thimac t" + std::to_string(i) + " {}\n";
    auto result = dsl::parse(text);
    CHECK_FALSE(result.ok());
    bool limited = false;
    for (const auto& e : result.errors)
      if (e.message.find("statement limit") != std::string::npos) limited = true;
    CHECK(limited);
  }
}

TEST_CASE("schedule entries merge canonically") {
  auto result = dsl::parse(
      "model M\nthimac X { create }\n"
      "event a = { X.create }\nevent b = { X.create }\n"
      "schedule t=4: b\nschedule t=0: a, b dur=3\nschedule t=4: a\n");
  REQUIRE(result.ok());
  std::string text = dsl::print(result.doc);
  CHECK(text.find("schedule t=0: a, b dur=3\nschedule t=4: b, a\n") !=
        std::string::npos);
  auto again = dsl::parse(text);
  REQUIRE(again.ok());
  CHECK(dsl::documents_equal(result.doc, again.doc));
}

TEST_CASE("duplicate declarations are diagnosed") {
  auto dup_thimac = dsl::parse("model M\nthimac X { create }\nthimac X {}");
  CHECK_FALSE(dup_thimac.ok());
  auto dup_event = dsl::parse(
      "model M\nthimac X { create }\nevent e = { X.create }\nevent e = { X.create }");
  CHECK_FALSE(dup_event.ok());
}

TEST_CASE("references must resolve at parse time") {
  auto unknown_thimac = dsl::parse("model M\nflow A.create -> A.process");
  CHECK_FALSE(unknown_thimac.ok());
  auto undeclared_action =
      dsl::parse("model M\nthimac A { create }\nflow A.create -> A.process");
  CHECK_FALSE(undeclared_action.ok());
  auto bad_port =
      dsl::parse("model M\nthimac A { create }\nevent e = { A.create.out }");
  CHECK_FALSE(bad_port.ok());
  auto missing_port = dsl::parse(
      "model M\nthimac A { create transfer }\nevent e = { A.transfer }");
  CHECK_FALSE(missing_port.ok());
}

TEST_CASE("illegal flows parse and surface as validate errors") {
  auto result = dsl::parse(
      "model M\nthimac X { create process receive }\n"
      "flow X.process -> X.receive\n");
  REQUIRE(result.ok());  // grammar legality is validate's business
  auto diags = validate(result.doc.model);
  REQUIRE_FALSE(diags.empty());
  CHECK(diags[0].code == "E-ILLEGAL-FLOW");
  CHECK(diags[0].location.kind == Location::Kind::Flow);
  CHECK(result.doc.spans.flows.size() == 1);
  CHECK(result.doc.spans.flows[0].line == 3);
}

TEST_CASE("event clauses: consumes, terminal, desc, payload labels") {
  auto result = dsl::parse(
      "model M\nthimac Lute { create }\nthimac Smash { create process }\n"
      "event smash = { Smash.process } consumes Lute terminal desc \"type = x\"\n");
  REQUIRE(result.ok());
  REQUIRE(result.doc.events.size() == 1);
  const auto& e = result.doc.events[0];
  CHECK(e.consumes == std::vector<std::string>{"Lute"});
  CHECK(e.terminal);
  CHECK(e.label == "type = x");
}

TEST_CASE("disconnected regions warn but parse") {
  auto result = dsl::parse(
      "model M\nthimac A { create }\nthimac B { create }\n"
      "event e = { A.create, B.create }\n");
  REQUIRE(result.ok());
  REQUIRE(result.doc.warnings.size() == 1);
  CHECK(result.doc.warnings[0].code == "W-DISCONNECTED");
  CHECK(result.doc.warnings[0].severity == Severity::Warning);
}
