#include "doctest.h"
#include "regpipe/mmcore.hpp"
#include "support.hpp"

using namespace regpipe;
using mm::ViolationKind;

namespace {
mm::MmErrc parse_error(const std::string& text) {
  try {
    mm::parse_plantuml(text);
  } catch (const mm::MmError& e) {
    return e.kind();
  }
  FAIL("no error");
  return mm::MmErrc::SyntaxError;
}

bool has(const mm::ConformanceReport& r, const std::string& obj, const std::string& feature, ViolationKind k) {
  for (const auto& v : r.violations) {
    if (v.object_id == obj && v.feature == feature && v.kind == k) return true;
  }
  return false;
}
}  // namespace

TEST_CASE("P1 metamodel") {
  auto m = mm::parse_plantuml(testing::fixture("P1.puml"));
  REQUIRE(m.classes().size() == 2);
  const auto* sensors = m.find_reference("Vehicle", "sensors");
  REQUIRE(sensors != nullptr);
  CHECK(sensors->target == "Sensor");
  CHECK(sensors->containment);
  CHECK(sensors->lower == 1);
  CHECK_FALSE(sensors->upper.has_value());
  CHECK(m.find_attribute("Sensor", "range")->type == mm::AttrType::Real);
  CHECK(mm::parse_plantuml("@startuml\n@enduml").classes().empty());
}

TEST_CASE("PlantUML errors") {
  CHECK(parse_error("@startuml\nclass A\nclass B\nA <|-- B\nB <|-- A\n@enduml") == mm::MmErrc::InheritanceCycle);
  CHECK(parse_error("@startuml\nclass A\nA --> B : r\n@enduml") == mm::MmErrc::UndefinedClassInRelation);
  CHECK(parse_error("@startuml\nclass A { x : Colour }\n@enduml") == mm::MmErrc::UnknownType);
  CHECK(parse_error("@startuml\nclass {\n@enduml") == mm::MmErrc::SyntaxError);
  CHECK(parse_error("@startuml\nskinparam x\n@enduml") == mm::MmErrc::SyntaxError);
}

TEST_CASE("canonical form is order-independent and round-trips") {
  auto a = mm::parse_plantuml(testing::fixture("P1.puml"));
  auto b = mm::parse_plantuml(
      "@startuml\nclass Sensor {\n range : Real\n type : String\n}\nclass Vehicle {\n maxSpeed : Int\n name : String\n}\n"
      "Vehicle *-- \"1..*\" Sensor : sensors\n@enduml\n");
  CHECK(mm::to_canonical(a) == mm::to_canonical(b));
  CHECK(mm::parse_metamodel(mm::to_canonical(a)) == a);
  CHECK_THROWS_AS(mm::parse_metamodel("metamodel\nclass A\n  ref r : Missing [0..1]\n"), mm::MmError);
}

TEST_CASE("I1 instance") {
  auto inst = mm::parse_instance(testing::fixture("I1.xml"));
  REQUIRE(inst.objects.size() == 3);
  CHECK(inst.objects.at("v1").links.at("sensors").targets == std::vector<std::string>{"s1", "s2"});
  CHECK(mm::parse_instance(mm::serialize_instance(inst)) == inst);
  CHECK(mm::parse_instance("<objects/>").objects.empty());
  CHECK_THROWS_AS(mm::parse_instance("<objects><obj class=\"A\" id=\"v1\"/><obj class=\"A\" id=\"v1\"/></objects>"),
                  mm::MmError);
}

TEST_CASE("conformance of I1 and simple mutants") {
  auto m = mm::parse_plantuml(testing::fixture("P1.puml"));
  auto inst = mm::parse_instance(testing::fixture("I1.xml"));
  CHECK(mm::check_conformance(inst, m).conforms());

  auto bare = mm::parse_instance(testing::fixture("I1_no_sensors.xml"));
  CHECK(has(mm::check_conformance(bare, m), "v1", "sensors", ViolationKind::MultiplicityViolation));

  auto dangling = inst;
  dangling.objects.at("v1").links["sensors"].targets.push_back("s9");
  CHECK(has(mm::check_conformance(dangling, m), "v1", "sensors", ViolationKind::DanglingReference));

  auto retyped = inst;
  retyped.objects.at("v1").attributes["maxSpeed"] = "fast";
  CHECK(has(mm::check_conformance(retyped, m), "v1", "maxSpeed", ViolationKind::TypeMismatch));

  auto missing = inst;
  missing.objects.at("s2").attributes.erase("type");
  CHECK(has(mm::check_conformance(missing, m), "s2", "type", ViolationKind::MultiplicityViolation));

  auto unknown = inst;
  unknown.objects.at("s1").class_name = "Lidar";
  CHECK(has(mm::check_conformance(unknown, m), "s1", "", ViolationKind::UnknownClass));
}

TEST_CASE("report order is by object then feature") {
  auto m = mm::parse_plantuml(testing::fixture("P1.puml"));
  auto inst = mm::parse_instance(testing::fixture("I1.xml"));
  inst.objects.at("s2").attributes["range"] = "x";
  inst.objects.at("s1").attributes["type"] = "radar";
  inst.objects.at("s1").attributes["zoom"] = "2";
  inst.objects.at("v1").attributes.erase("name");
  auto r = mm::check_conformance(inst, m);
  REQUIRE(r.violations.size() == 3);
  CHECK(r.violations[0].object_id == "s1");
  CHECK(r.violations[1].object_id == "s2");
  CHECK(r.violations[2].object_id == "v1");
}
