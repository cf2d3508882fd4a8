#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

#include "support/model_gen.hpp"
#include "tmkit/tmkit.hpp"

using namespace tmkit;
using namespace tmkit::importers;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// Isomorphism for importer fidelity: same thimac nesting, same flow-chain
// multiset. Model names and display names are out of scope.
bool same_nesting_and_flows(const StaticModel& a, const StaticModel& b) {
  auto nesting = [](const StaticModel& m) {
    std::vector<std::pair<std::string, std::string>> pairs;
    for (const Thimac& t : m.thimacs)
      pairs.emplace_back(t.id, t.parent.value_or(""));
    std::sort(pairs.begin(), pairs.end());
    return pairs;
  };
  auto flows = [](const StaticModel& m) {
    auto edges = m.flows;
    std::sort(edges.begin(), edges.end());
    return edges;
  };
  return nesting(a) == nesting(b) && flows(a) == flows(b);
}

bool has_flow(const StaticModel& m, const ActionRef& src, const ActionRef& dst,
              const std::optional<std::string>& label) {
  for (const FlowEdge& e : m.flows)
    if (e.src == src && e.dst == dst && e.label == label) return true;
  return false;
}

}  // namespace

TEST_CASE("triples: classification nests, verbs flow") {
  auto doc = parse_triples(
      "canary is_a bird\n"
      "bird can_a_fly sky\n");
  REQUIRE(doc.ok());
  auto model = import_triples(doc.triples);

  REQUIRE(model.find_thimac("canary"));
  CHECK(model.find_thimac("canary")->parent == "bird");
  CHECK(model.find_thimac("canary")->implicit_create);
  CHECK(has_flow(model, {"bird", ActionKind::Release, {}},
                 {"bird", ActionKind::Transfer, Port::Out}, std::nullopt));
  CHECK(has_flow(model, {"bird", ActionKind::Transfer, Port::Out},
                 {"sky", ActionKind::Transfer, Port::In}, "fly"));
  CHECK(has_flow(model, {"sky", ActionKind::Transfer, Port::In},
                 {"sky", ActionKind::Receive, {}}, std::nullopt));
  CHECK(validate(model).empty());
}

TEST_CASE("triples: free verbs label the crossing") {
  auto doc = parse_triples("shark attacks human\n");
  REQUIRE(doc.ok());
  auto model = import_triples(doc.triples);
  CHECK(has_flow(model, {"shark", ActionKind::Transfer, Port::Out},
                 {"human", ActionKind::Transfer, Port::In}, "attacks"));
  CHECK(validate(model).empty());
}

TEST_CASE("triples: has_a nests the object under the subject") {
  auto doc = parse_triples("bird has_a wings\n");
  REQUIRE(doc.ok());
  auto model = import_triples(doc.triples);
  CHECK(model.find_thimac("wings")->parent == "bird");
}

TEST_CASE("empty triple set gives an empty model") {
  auto doc = parse_triples("# nothing here\n\n");
  REQUIRE(doc.ok());
  CHECK(doc.triples.empty());
  auto model = import_triples(doc.triples);
  CHECK(model.thimacs.empty());
  CHECK(validate(model).empty());
}

TEST_CASE("conflicting nesting is rejected") {
  auto doc = parse_triples("a is_a b\nb is_a a\n");
  REQUIRE(doc.ok());
  try {
    import_triples(doc.triples);
    FAIL("expected ConflictingNesting");
  } catch (const ImportError& err) {
    CHECK(err.code == ImportErrorCode::ConflictingNesting);
    CHECK(err.input_index == 1);
  }
}

TEST_CASE("triple lines must have three usable words") {
  auto short_line = parse_triples("one two\n");
  REQUIRE_FALSE(short_line.ok());
  CHECK(short_line.errors[0].span.line == 1);
  auto bad_name = parse_triples("a is_a 9lives\n");
  CHECK_FALSE(bad_name.ok());
  // a keyword cannot name a concept, but it may serve as a verb label
  CHECK_FALSE(parse_triples("event is_a thing\n").ok());
  auto verb = parse_triples("smith create blade\n");
  REQUIRE(verb.ok());
  auto model = import_triples(verb.triples);
  CHECK(validate(model).empty());
  CHECK(has_flow(model, {"smith", ActionKind::Transfer, Port::Out},
                 {"blade", ActionKind::Transfer, Port::In}, "create"));
}

TEST_CASE("er entity names must be usable thimac ids") {
  auto doc = parse_er("entity event { }");
  CHECK_FALSE(doc.ok());
  // reserved words are fine as (path-qualified) attribute names
  auto attrs = parse_er("entity Deed { event }");
  REQUIRE(attrs.ok());
  auto model = import_er(attrs.schema);
  CHECK(validate(model).empty());
  REQUIRE(model.find_thimac("Deed_event"));
  CHECK(model.find_thimac("Deed_event")->name == "event");
}

TEST_CASE("birds triples reproduce the authored corpus model") {
  auto doc = parse_triples(slurp(std::string(CORPUS_DIR) + "/birds.triples"));
  REQUIRE(doc.ok());
  auto imported = import_triples(doc.triples);
  CHECK(validate(imported).empty());

  auto fixture = dsl::parse(slurp(std::string(CORPUS_DIR) + "/birds.tm"));
  REQUIRE(fixture.ok());
  CHECK(same_nesting_and_flows(imported, fixture.doc.model));

  // every concept name appears exactly once
  for (const char* name : {"canary", "ostrich", "bird", "fish", "shark",
                           "animal", "wings", "sky", "human"}) {
    int count = 0;
    for (const Thimac& t : imported.thimacs)
      if (t.id == name) ++count;
    CHECK(count == 1);
  }
  CHECK(imported.thimacs.size() == 9);
}

TEST_CASE("er: entities, nested attributes, relationships") {
  auto doc = parse_er(slurp(std::string(CORPUS_DIR) + "/parcels.er"));
  REQUIRE(doc.ok());
  REQUIRE(doc.schema.entities.size() == 6);
  CHECK(doc.schema.relationships.size() == 4);
  auto imported = import_er(doc.schema);
  CHECK(validate(imported).empty());

  // three-level nesting: John > c > {length, endpoints}
  REQUIRE(imported.find_thimac("John_c"));
  CHECK(imported.find_thimac("John_c")->parent == "John");
  CHECK(imported.find_thimac("John_c")->name == "c");
  REQUIRE(imported.find_thimac("John_c_length"));
  CHECK(imported.find_thimac("John_c_length")->parent == "John_c");
  CHECK(imported.find_thimac("John_c_length")->storage);
  CHECK(imported.find_thimac("John_c_length")->actions ==
        std::set<ActionKind>{ActionKind::Create});

  // street-side flows
  CHECK(has_flow(imported, {"John", ActionKind::Transfer, Port::Out},
                 {"street_1st", ActionKind::Transfer, Port::In}, "adjacent_to"));

  auto fixture = dsl::parse(slurp(std::string(CORPUS_DIR) + "/parcels.tm"));
  REQUIRE(fixture.ok());
  CHECK(same_nesting_and_flows(imported, fixture.doc.model));
}

TEST_CASE("er: entity with no attributes is a bare potential thimac") {
  auto doc = parse_er("entity Lone { }");
  REQUIRE(doc.ok());
  auto model = import_er(doc.schema);
  REQUIRE(model.thimacs.size() == 1);
  CHECK(model.thimacs[0].implicit_create);
  CHECK(model.thimacs[0].actions.empty());
  CHECK(validate(model).empty());
}

TEST_CASE("er: unknown endpoints are rejected") {
  auto doc = parse_er("entity A { }\nrel touches (A, Ghost)");
  REQUIRE(doc.ok());
  try {
    import_er(doc.schema);
    FAIL("expected UnknownEndpoint");
  } catch (const ImportError& err) {
    CHECK(err.code == ImportErrorCode::UnknownEndpoint);
    CHECK(err.input_index == 0);
  }
}

TEST_CASE("er parse errors carry positions") {
  auto doc = parse_er("entity A { \nrel broken A, B)");
  CHECK_FALSE(doc.ok());
  for (const auto& e : doc.errors) CHECK(e.span.line >= 1);
}

TEST_CASE("imported models always validate cleanly") {
  std::mt19937 rng(31);
  static const char* const names[] = {"ash", "beech", "cedar", "dune", "elm",
                                      "fern", "grove", "heath"};
  for (int round = 0; round < 120; ++round) {
    SECTION("triples round " + std::to_string(round)) {}
    // random well-formed triples: nesting edges follow a strict order so no
    // cycles arise; verbs are free-form
    std::vector<Triple> triples;
    int n = testgen::pick(rng, 0, 10);
    for (int i = 0; i < n; ++i) {
      int a = testgen::pick(rng, 0, 6);
      int b = testgen::pick(rng, a + 1, 7);
      switch (testgen::pick(rng, 0, 2)) {
        case 0:
          triples.push_back({names[a], "is_a", names[b]});
          break;
        case 1:
          triples.push_back({names[b], "has_a", names[a]});
          break;
        default:
          triples.push_back({names[a], "carries", names[b]});
      }
    }
    auto model = import_triples(triples);
    auto diags = validate(model);
    INFO("round " << round);
    CHECK(diags.empty());

    // determinism and name preservation
    auto again = import_triples(triples);
    CHECK(dsl::print(model, {}, {}) == dsl::print(again, {}, {}));
    for (const Triple& t : triples) {
      CHECK(model.find_thimac(t.subject) != nullptr);
      CHECK(model.find_thimac(t.object) != nullptr);
    }
  }
}

TEST_CASE("imported er schemas always validate cleanly") {
  std::mt19937 rng(37);
  static const char* const names[] = {"north", "south", "east", "west", "mid"};
  for (int round = 0; round < 120; ++round) {
    ErSchema schema;
    int entity_count = testgen::pick(rng, 1, 5);
    for (int i = 0; i < entity_count; ++i) {
      ErEntity entity;
      entity.name = names[i];
      int attrs = testgen::pick(rng, 0, 3);
      for (int a = 0; a < attrs; ++a) {
        ErAttribute attr;
        attr.name = "a" + std::to_string(a);
        if (testgen::chance(rng, 0.3))
          attr.children.push_back(ErAttribute{"deep", {}});
        entity.attributes.push_back(std::move(attr));
      }
      schema.entities.push_back(std::move(entity));
    }
    int rels = testgen::pick(rng, 0, 4);
    for (int r = 0; r < rels; ++r) {
      ErRelationship rel;
      rel.name = "r" + std::to_string(r);
      rel.endpoints.push_back(names[testgen::pick(rng, 0, entity_count - 1)]);
      rel.endpoints.push_back(names[testgen::pick(rng, 0, entity_count - 1)]);
      schema.relationships.push_back(std::move(rel));
    }
    auto model = import_er(schema);
    INFO("round " << round);
    CHECK(validate(model).empty());
    auto again = import_er(schema);
    CHECK(dsl::print(model, {}, {}) == dsl::print(again, {}, {}));
  }
}

TEST_CASE("import output is valid canonical DSL") {
  auto doc = parse_triples(slurp(std::string(CORPUS_DIR) + "/birds.triples"));
  REQUIRE(doc.ok());
  auto model = import_triples(doc.triples);
  std::string text = dsl::print(model, {}, {});
  auto reparsed = dsl::parse(text);
  REQUIRE(reparsed.ok());
  CHECK(dsl::models_equal(model, reparsed.doc.model));
}
