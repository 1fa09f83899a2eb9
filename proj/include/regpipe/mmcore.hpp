#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "regpipe/error.hpp"

namespace regpipe::mm {

enum class MmErrc {
  SyntaxError,
  UnknownType,
  UndefinedClassInRelation,
  InheritanceCycle,
  DuplicateObjectId,
};
using MmError = KindedError<MmErrc>;

enum class AttrType { String, Int, Real, Bool };
std::string_view to_string(AttrType t);
std::optional<AttrType> attr_type_from(std::string_view name);

// Upper bound of a multiplicity; nullopt is "*".
using UpperBound = std::optional<unsigned>;

struct Attribute {
  std::string name;
  AttrType type = AttrType::String;
  bool required = true;
  friend bool operator==(const Attribute&, const Attribute&) = default;
};

struct Reference {
  std::string name;
  std::string target;
  bool containment = false;
  unsigned lower = 0;
  UpperBound upper = 1u;

  bool many() const { return !upper || *upper > 1; }
  friend bool operator==(const Reference&, const Reference&) = default;
};

std::string multiplicity_str(unsigned lower, UpperBound upper);

// Features are kept sorted by name so structurally equal classes compare
// equal regardless of declaration order.
struct MetaClass {
  std::string name;
  std::optional<std::string> supertype;
  std::vector<Attribute> attributes;
  std::vector<Reference> references;
  friend bool operator==(const MetaClass&, const MetaClass&) = default;
};

class MetaModel {
 public:
  MetaModel() = default;
  // Validates the class set: supertypes and reference targets exist,
  // inheritance is acyclic, feature names are unique along the chain.
  explicit MetaModel(std::map<std::string, MetaClass> classes);

  const std::map<std::string, MetaClass>& classes() const { return classes_; }
  const MetaClass* find(std::string_view name) const;

  // True if `cls` is `ancestor` or inherits from it.
  bool conforms(std::string_view cls, std::string_view ancestor) const;
  const Attribute* find_attribute(std::string_view cls, std::string_view name) const;
  const Reference* find_reference(std::string_view cls, std::string_view name) const;
  // Own and inherited features, most-derived first.
  std::vector<const Attribute*> all_attributes(std::string_view cls) const;
  std::vector<const Reference*> all_references(std::string_view cls) const;

  friend bool operator==(const MetaModel&, const MetaModel&) = default;

 private:
  std::map<std::string, MetaClass> classes_;
};

MetaModel parse_plantuml(std::string_view text);

// Ecore-style canonical text. Classes and features sorted by name:
//   metamodel
//   class Vehicle
//     attr maxSpeed : Int [1]
//     contains sensors : Sensor [1..*]
std::string to_canonical(const MetaModel& mm);
MetaModel parse_metamodel(std::string_view text);
// Dispatches on "@startuml" to the PlantUML parser, else canonical text.
MetaModel load_metamodel(std::string_view text);

// --- instances ---

struct Link {
  std::vector<std::string> targets;
  bool nested = false;  // written as child elements rather than ref- attributes
  friend bool operator==(const Link&, const Link&) = default;
};

struct Object {
  std::string id;
  std::string class_name;
  std::map<std::string, std::string> attributes;  // raw lexical values
  std::map<std::string, Link> links;
  friend bool operator==(const Object&, const Object&) = default;
};

struct ModelInstance {
  std::map<std::string, Object> objects;

  const Object* find(std::string_view id) const;
  friend bool operator==(const ModelInstance&, const ModelInstance&) = default;
};

ModelInstance parse_instance(std::string_view text);
// Inverse of parse_instance; requires nested links to form a forest.
std::string serialize_instance(const ModelInstance& inst);

// Lexical coercion of a raw attribute value.
using AttrValue = std::variant<std::string, long long, double, bool>;
std::optional<AttrValue> coerce(std::string_view raw, AttrType type);

enum class ViolationKind {
  UnknownClass,
  UnknownFeature,
  TypeMismatch,
  MultiplicityViolation,
  DanglingReference,
  ContainmentCycle,
};
std::string_view to_string(ViolationKind k);

struct Violation {
  std::string object_id;
  std::string feature;  // empty for object-level findings
  ViolationKind kind;
  std::string message;
  friend bool operator==(const Violation&, const Violation&) = default;
};

struct ConformanceReport {
  std::vector<Violation> violations;
  bool conforms() const { return violations.empty(); }
};

ConformanceReport check_conformance(const ModelInstance& inst, const MetaModel& mm);
std::string format_report(const ConformanceReport& report);

}  // namespace regpipe::mm

namespace regpipe {
template <>
std::string_view error_kind_name(mm::MmErrc kind) noexcept;
}
