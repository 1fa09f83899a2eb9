#include <functional>

#include "harness.hpp"
#include "regpipe/mmcore.hpp"
#include "support.hpp"

namespace acceptance {
namespace {

using mm::ViolationKind;

struct Mutant {
  std::string label;
  ViolationKind kind;
  std::string object;  // the object the report must name
  std::function<void(mm::ModelInstance&, std::map<std::string, mm::MetaClass>&)> apply;
};

mm::Object sensor(const std::string& id, const std::string& type, const std::string& range) {
  return {id, "Sensor", {{"type", type}, {"range", range}}, {}};
}

void set_sensor_upper(std::map<std::string, mm::MetaClass>& classes, unsigned upper) {
  for (auto& r : classes.at("Vehicle").references) {
    if (r.name == "sensors") r.upper = upper;
  }
}

std::vector<Mutant> mutants() {
  using I = mm::ModelInstance;
  using C = std::map<std::string, mm::MetaClass>;
  return {
      // delete a required attribute
      {"drop v1.name", ViolationKind::MultiplicityViolation, "v1",
       [](I& i, C&) { i.objects.at("v1").attributes.erase("name"); }},
      {"drop s1.type", ViolationKind::MultiplicityViolation, "s1",
       [](I& i, C&) { i.objects.at("s1").attributes.erase("type"); }},
      {"drop s2.range", ViolationKind::MultiplicityViolation, "s2",
       [](I& i, C&) { i.objects.at("s2").attributes.erase("range"); }},
      // retype an attribute value
      {"v1.maxSpeed = fast", ViolationKind::TypeMismatch, "v1",
       [](I& i, C&) { i.objects.at("v1").attributes["maxSpeed"] = "fast"; }},
      {"v1.maxSpeed = 60.5", ViolationKind::TypeMismatch, "v1",
       [](I& i, C&) { i.objects.at("v1").attributes["maxSpeed"] = "60.5"; }},
      {"s2.range = true", ViolationKind::TypeMismatch, "s2",
       [](I& i, C&) { i.objects.at("s2").attributes["range"] = "true"; }},
      // drop links below the lower bound
      {"v1.sensors removed", ViolationKind::MultiplicityViolation, "v1",
       [](I& i, C&) { i.objects.at("v1").links.erase("sensors"); }},
      {"v1.sensors emptied", ViolationKind::MultiplicityViolation, "v1",
       [](I& i, C&) { i.objects.at("v1").links.at("sensors").targets.clear(); }},
      {"sensors deleted", ViolationKind::MultiplicityViolation, "v1",
       [](I& i, C&) {
         i.objects.at("v1").links.erase("sensors");
         i.objects.erase("s1");
         i.objects.erase("s2");
       }},
      // exceed an upper bound (the fixture bound is unlimited, so it is tightened)
      {"sensors bound 1", ViolationKind::MultiplicityViolation, "v1", [](I&, C& c) { set_sensor_upper(c, 1); }},
      {"sensors bound 2 with s3", ViolationKind::MultiplicityViolation, "v1",
       [](I& i, C& c) {
         set_sensor_upper(c, 2);
         i.objects.emplace("s3", sensor("s3", "lidar", "60.0"));
         i.objects.at("v1").links.at("sensors").targets.push_back("s3");
       }},
      {"sensors bound 1 with s3", ViolationKind::MultiplicityViolation, "v1",
       [](I& i, C& c) {
         set_sensor_upper(c, 1);
         i.objects.emplace("s3", sensor("s3", "lidar", "60.0"));
         i.objects.at("v1").links.at("sensors").targets = {"s3"};
         i.objects.at("v1").links.at("sensors").targets.push_back("s1");
       }},
      // dangle a reference
      {"v1.sensors += s9", ViolationKind::DanglingReference, "v1",
       [](I& i, C&) { i.objects.at("v1").links.at("sensors").targets.push_back("s9"); }},
      {"v1.sensors[0] = S1", ViolationKind::DanglingReference, "v1",
       [](I& i, C&) { i.objects.at("v1").links.at("sensors").targets[0] = "S1"; }},
      {"s2 deleted", ViolationKind::DanglingReference, "v1", [](I& i, C&) { i.objects.erase("s2"); }},
      // containment cycles
      {"v1 contains itself", ViolationKind::ContainmentCycle, "v1",
       [](I& i, C&) { i.objects.at("v1").links.at("sensors").targets.push_back("v1"); }},
      {"s1 in two vehicles", ViolationKind::ContainmentCycle, "s1",
       [](I& i, C&) {
         mm::Object v2{"v2", "Vehicle", {{"name", "other"}, {"maxSpeed", "10"}}, {}};
         v2.links["sensors"] = mm::Link{{"s1"}, true};
         i.objects.emplace("v2", std::move(v2));
       }},
      {"v1 and v2 contain each other", ViolationKind::ContainmentCycle, "v2",
       [](I& i, C&) {
         mm::Object v2{"v2", "Vehicle", {{"name", "other"}, {"maxSpeed", "10"}}, {}};
         v2.links["sensors"] = mm::Link{{"v1"}, true};
         i.objects.emplace("v2", std::move(v2));
         i.objects.at("v1").links.at("sensors").targets.push_back("v2");
       }},
  };
}

}  // namespace

Result mutation_kill() {
  Result res;
  const auto model = mm::parse_plantuml(regpipe::testing::fixture("P1.puml"));
  const auto inst = mm::parse_instance(regpipe::testing::fixture("I1.xml"));
  if (!mm::check_conformance(inst, model).conforms()) {
    res.fail("unmutated I1 reports violations");
    return res;
  }
  std::map<ViolationKind, int> killed;
  int total = 0;
  for (const auto& m : mutants()) {
    auto mutated = inst;
    auto classes = model.classes();
    m.apply(mutated, classes);
    const auto report = mm::check_conformance(mutated, mm::MetaModel(classes));
    bool named = false;
    for (const auto& v : report.violations) named = named || (v.object_id == m.object && v.kind == m.kind);
    ++total;
    if (!named) {
      res.fail("mutant '" + m.label + "' survived: no " + std::string(mm::to_string(m.kind)) + " on " + m.object);
      return res;
    }
    ++killed[m.kind];
  }
  for (auto kind : {ViolationKind::MultiplicityViolation, ViolationKind::TypeMismatch,
                    ViolationKind::DanglingReference, ViolationKind::ContainmentCycle}) {
    if (killed[kind] < 3) res.fail("too few mutants of kind " + std::string(mm::to_string(kind)));
  }
  if (res.pass) res.detail = std::to_string(total) + " mutants over 6 mutation kinds killed, clean fixture passes";
  return res;
}

}  // namespace acceptance
