#include "doctest.h"
#include "regpipe/regdoc.hpp"
#include "support.hpp"

using namespace regpipe;
using regdoc::ClauseId;

namespace {
ClauseId id(const char* s) { return ClauseId::parse(s); }

std::vector<std::string> ids(const regdoc::RegDocument& doc) {
  std::vector<std::string> out;
  for (const auto& c : regdoc::preorder(doc)) out.push_back(c.str());
  return out;
}
}  // namespace

TEST_CASE("clause ids parse, print and order") {
  CHECK(id("5.2.1").str() == "5.2.1");
  CHECK(id("5.2.1.").str() == "5.2.1");
  CHECK(id("A3/1.2").str() == "A3/1.2");
  CHECK(*id("5.2.1").parent() == id("5.2"));
  CHECK_FALSE(id("5").parent().has_value());
  CHECK(id("5.10") > id("5.9"));
  CHECK(id("9") < id("A1/1"));
  CHECK_FALSE(ClauseId::try_parse("5.0").has_value());
  CHECK_FALSE(ClauseId::try_parse("").has_value());
  CHECK_THROWS_AS(ClauseId::parse("x"), regdoc::RegDocError);
}

TEST_CASE("F1 parses into nine body clauses and one annex clause") {
  auto doc = regdoc::parse_document(testing::fixture("F1.txt"));
  CHECK(ids(doc) == std::vector<std::string>{"1", "1.1", "2", "2.1", "5", "5.1", "5.2", "6", "6.4", "A3/1"});
  CHECK(doc.clauses.at(id("5")).children == std::vector<ClauseId>{id("5.1"), id("5.2")});
  CHECK(doc.clauses.at(id("A3/1")).text == "Test track conditions shall be dry.");
  CHECK(doc.roots.size() == 5);
}

TEST_CASE("parse errors") {
  auto kind = [](const std::string& text) {
    try {
      regdoc::parse_document(text);
    } catch (const regdoc::RegDocError& e) {
      return e.kind();
    }
    FAIL("no error");
    return regdoc::RegDocErrc::BadClauseId;
  };
  CHECK(kind("") == regdoc::RegDocErrc::EmptyDocument);
  CHECK(kind("just prose\nno headers\n") == regdoc::RegDocErrc::EmptyDocument);
  CHECK(kind("5. S\n5.1. a\n5.1. b\n") == regdoc::RegDocErrc::DuplicateClauseId);
  CHECK(kind("5. S\n5.2.1. deep\n") == regdoc::RegDocErrc::OrphanClause);
}

TEST_CASE("continuation lines and whitespace are normalised") {
  auto doc = regdoc::parse_document("Title page\n1.   Scope\n   applies   to\n\tvehicles\n");
  CHECK(doc.clauses.at(id("1")).text == "Scope applies to vehicles");
}

TEST_CASE("references in F1") {
  auto doc = regdoc::parse_document(testing::fixture("F1.txt"));
  auto refs = regdoc::extract_references(doc.clauses.at(id("5.2")), doc);
  REQUIRE(refs.size() == 1);
  CHECK(refs[0] == regdoc::CrossRef{id("5.2"), id("6.4"), regdoc::RefKind::Paragraph, true});
  CHECK(regdoc::extract_references(doc.clauses.at(id("1.1")), doc).empty());

  regdoc::Clause extra{id("1.1"), "see paragraph 9.9.9.", {}};
  auto dangling = regdoc::extract_references(extra, doc);
  REQUIRE(dangling.size() == 1);
  CHECK(dangling[0].target == id("9.9.9"));
  CHECK_FALSE(dangling[0].resolved);

  auto g = regdoc::build_reference_graph(doc);
  CHECK(g.edge_count() == 3);
  CHECK(regdoc::dump_references(g) ==
        "5.1 -> 5.2 [resolved]\n5.2 -> 6.4 [resolved]\n6.4 -> 5.1 [resolved]\n");
}

TEST_CASE("enumerations and annex references") {
  auto doc = regdoc::parse_document(testing::fixture("F1.txt"));
  regdoc::Clause c{id("1.1"), "Paragraphs 5.1. and 5.2. apply; see also Annex 3 and paragraph 2.", {}};
  auto refs = regdoc::extract_references(c, doc);
  REQUIRE(refs.size() == 4);
  CHECK(refs[0].target == id("5.1"));
  CHECK(refs[1].target == id("5.2"));
  CHECK(refs[2].target == id("A3/1"));
  CHECK(refs[2].kind == regdoc::RefKind::Annex);
  CHECK(refs[3].target == id("2"));
}

TEST_CASE("regulation text round trip is a fixpoint") {
  auto doc = regdoc::parse_document(testing::fixture("F1.txt"));
  auto again = regdoc::parse_document(regdoc::to_regulation_text(doc));
  CHECK(again == doc);
}
