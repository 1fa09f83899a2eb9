#include "doctest.h"
#include "regpipe/ocl.hpp"
#include "support.hpp"

using namespace regpipe;
using ocl::Outcome;

namespace {
struct Fixture {
  mm::MetaModel model = mm::parse_plantuml(testing::fixture("P1.puml"));
  mm::ModelInstance inst = mm::parse_instance(testing::fixture("I1.xml"));

  Outcome on(const std::string& body, const std::string& object = "v1", const std::string& ctx = "Vehicle") const {
    auto cs = ocl::parse_ocl("context " + ctx + " inv: " + body);
    return ocl::evaluate(cs.at(0), object, inst, model).outcome;
  }
};
}  // namespace

TEST_CASE("parsing") {
  auto cs = ocl::parse_ocl("context Vehicle inv MinSensors: self.sensors->size() >= 1");
  REQUIRE(cs.size() == 1);
  CHECK(cs[0].context_class == "Vehicle");
  CHECK(cs[0].name == std::optional<std::string>("MinSensors"));

  auto p = ocl::parse_ocl("context Vehicle inv: self.maxSpeed > 0 and self.sensors->notEmpty()");
  const auto& body = std::get<ocl::BinaryExpr>(p.at(0).body->node);
  CHECK(body.op == ocl::BinaryOp::And);

  CHECK_THROWS_AS(ocl::parse_ocl("context inv:"), ocl::OclError);
  CHECK_THROWS_AS(ocl::parse_ocl("context A inv X: true\ncontext A inv X: false"), ocl::OclError);
  CHECK_THROWS_AS(ocl::parse_ocl("context A inv: self.xs->forAll(y)"), ocl::OclError);
  CHECK_THROWS_AS(ocl::parse_ocl("context A inv: q > 1"), ocl::OclError);
}

TEST_CASE("printing round-trips through the parser") {
  for (const char* src : {"self.a + 1 * 2 - (3 - 4)", "not (a implies b) or c and d", "-(-1)", "1 - -2",
                          "self.xs->select(x | x.v > 1.5)->collect(y | y.w)->sum() <> 0",
                          "'it\\'s' = self.name", "(a or b) and c", "a implies (b implies c)"}) {
    auto e = ocl::parse_expression(src, {"a", "b", "c", "d"});
    auto again = ocl::parse_expression(ocl::to_string(*e), {"a", "b", "c", "d"});
    CHECK(ocl::structurally_equal(*e, *again));
  }
}

TEST_CASE("verdicts on I1") {
  Fixture f;
  CHECK(f.on("self.sensors->size() >= 1") == Outcome::Pass);
  CHECK(f.on("self.sensors->select(s | s.type = 'radar')->size() = 1") == Outcome::Pass);
  CHECK(f.on("self.maxSpeed / 0 > 1") == Outcome::Invalid);
  CHECK(f.on("self.maxSpeed > 100") == Outcome::Fail);
  CHECK(f.on("self.name + 1 = 2") == Outcome::Invalid);
  CHECK(f.on("self.maxSpeed = 60.0") == Outcome::Pass);
  CHECK(f.on("self.range > 100", "s1", "Sensor") == Outcome::Pass);
  CHECK(f.on("self.sensors.range->sum() = 230.0") == Outcome::Pass);

  auto bare = f;
  bare.inst = mm::parse_instance(testing::fixture("I1_no_sensors.xml"));
  CHECK(bare.on("self.sensors->forAll(s | s.range > 0.0)") == Outcome::Pass);
  CHECK(bare.on("self.sensors->exists(s | s.range > 0.0)") == Outcome::Fail);
  CHECK(bare.on("self.sensors->size() = 0") == Outcome::Pass);
}

TEST_CASE("three-valued truth tables") {
  Fixture f;
  f.inst.objects.at("v1").attributes.erase("maxSpeed");
  const std::string U = "(self.maxSpeed > 0)";
  const std::map<std::string, std::string> vals{{"T", "true"}, {"F", "false"}, {"U", U}};
  CHECK(f.on(U) == Outcome::Invalid);
  for (const auto& [n, v] : vals) {
    CHECK(f.on("(" + v + " and false) = false") == Outcome::Pass);
    CHECK(f.on("(" + v + " or true) = true") == Outcome::Pass);
    CHECK(f.on("false implies " + v) == Outcome::Pass);
  }
  CHECK(f.on(U + " and true") == Outcome::Invalid);
  CHECK(f.on("not " + U) == Outcome::Invalid);
  CHECK(f.on(U + " or false") == Outcome::Invalid);
}

TEST_CASE("check_all fans out over conforming objects") {
  Fixture f;
  auto r = ocl::check_all(ocl::parse_ocl(testing::fixture("C1.ocl")), f.inst, f.model);
  CHECK(r.all_pass());
  CHECK(r.verdicts.size() == 5);
  CHECK(r.summary.at(Outcome::Pass) == 5);
  CHECK(ocl::check_all({}, f.inst, f.model).verdicts.empty());
  auto sensor = ocl::check_all(ocl::parse_ocl("context Sensor inv: self.range > 0"), f.inst, f.model);
  CHECK(sensor.verdicts.size() == 2);
  CHECK(sensor.verdicts[0].constraint == "Sensor#1");
  CHECK_THROWS_AS(ocl::check_all(ocl::parse_ocl("context Truck inv: true"), f.inst, f.model), ocl::OclError);
}
