#include <algorithm>
#include <functional>
#include <set>

#include "regpipe/mmcore.hpp"

namespace regpipe::mm {

std::string_view to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::UnknownClass: return "UnknownClass";
    case ViolationKind::UnknownFeature: return "UnknownFeature";
    case ViolationKind::TypeMismatch: return "TypeMismatch";
    case ViolationKind::MultiplicityViolation: return "MultiplicityViolation";
    case ViolationKind::DanglingReference: return "DanglingReference";
    case ViolationKind::ContainmentCycle: return "ContainmentCycle";
  }
  return "Violation";
}

namespace {

// Objects lying on a cycle of the containment graph (Tarjan SCC).
std::set<std::string> containment_cycle_members(const std::map<std::string, std::vector<std::string>>& edges) {
  std::map<std::string, int> index;
  std::map<std::string, int> low;
  std::set<std::string> on_stack;
  std::vector<std::string> stack;
  std::set<std::string> result;
  int counter = 0;

  std::function<void(const std::string&)> visit = [&](const std::string& v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack.insert(v);
    auto it = edges.find(v);
    if (it != edges.end()) {
      for (const std::string& w : it->second) {
        if (!index.count(w)) {
          visit(w);
          low[v] = std::min(low[v], low[w]);
        } else if (on_stack.count(w)) {
          low[v] = std::min(low[v], index[w]);
        }
      }
    }
    if (low[v] == index[v]) {
      std::vector<std::string> component;
      for (;;) {
        std::string w = stack.back();
        stack.pop_back();
        on_stack.erase(w);
        component.push_back(w);
        if (w == v) break;
      }
      bool self_loop = false;
      if (it != edges.end()) self_loop = std::find(it->second.begin(), it->second.end(), v) != it->second.end();
      if (component.size() > 1 || self_loop) result.insert(component.begin(), component.end());
    }
  };
  for (const auto& [v, _] : edges) {
    if (!index.count(v)) visit(v);
  }
  return result;
}

}  // namespace

ConformanceReport check_conformance(const ModelInstance& inst, const MetaModel& mm) {
  ConformanceReport report;
  auto& out = report.violations;
  const auto add = [&](const std::string& obj, const std::string& feature, ViolationKind kind, std::string msg) {
    out.push_back({obj, feature, kind, std::move(msg)});
  };

  std::map<std::string, std::vector<std::string>> containment;  // container -> contained
  std::map<std::string, std::vector<std::string>> containers;   // contained -> containers

  for (const auto& [id, obj] : inst.objects) {
    const MetaClass* cls = mm.find(obj.class_name);
    if (cls == nullptr) {
      add(id, "", ViolationKind::UnknownClass, "class '" + obj.class_name + "' is not in the metamodel");
      continue;
    }
    for (const auto& [name, raw] : obj.attributes) {
      const Attribute* attr = mm.find_attribute(obj.class_name, name);
      if (attr == nullptr) {
        add(id, name, ViolationKind::UnknownFeature,
            obj.class_name + " has no attribute '" + name + "'");
      } else if (!coerce(raw, attr->type)) {
        add(id, name, ViolationKind::TypeMismatch,
            "'" + raw + "' is not a valid " + std::string(to_string(attr->type)));
      }
    }
    for (const Attribute* attr : mm.all_attributes(obj.class_name)) {
      if (attr->required && !obj.attributes.count(attr->name)) {
        add(id, attr->name, ViolationKind::MultiplicityViolation, "required attribute is missing");
      }
    }
    for (const auto& [name, link] : obj.links) {
      const Reference* ref = mm.find_reference(obj.class_name, name);
      if (ref == nullptr) {
        add(id, name, ViolationKind::UnknownFeature, obj.class_name + " has no reference '" + name + "'");
        continue;
      }
      if (link.nested && !ref->containment) {
        add(id, name, ViolationKind::TypeMismatch, "objects nested under non-containment reference");
      }
      for (const std::string& target : link.targets) {
        const Object* t = inst.find(target);
        if (t == nullptr) {
          add(id, name, ViolationKind::DanglingReference, "no object with id '" + target + "'");
          continue;
        }
        if (!mm.conforms(t->class_name, ref->target)) {
          add(id, name, ViolationKind::TypeMismatch,
              "'" + target + "' is a " + t->class_name + ", expected " + ref->target);
        }
        if (ref->containment) {
          containment[id].push_back(target);
          containers[target].push_back(id);
        }
      }
      const std::size_t n = link.targets.size();
      if (n < ref->lower || (ref->upper && n > *ref->upper)) {
        add(id, name, ViolationKind::MultiplicityViolation,
            std::to_string(n) + " targets outside [" + multiplicity_str(ref->lower, ref->upper) + "]");
      }
    }
    for (const Reference* ref : mm.all_references(obj.class_name)) {
      if (ref->lower > 0 && !obj.links.count(ref->name)) {
        add(id, ref->name, ViolationKind::MultiplicityViolation,
            "0 targets outside [" + multiplicity_str(ref->lower, ref->upper) + "]");
      }
    }
  }

  for (const auto& [child, parents] : containers) {
    std::set<std::string> distinct(parents.begin(), parents.end());
    if (parents.size() > 1) {
      std::string list;
      for (const auto& p : distinct) list += (list.empty() ? "" : ", ") + p;
      add(child, "", ViolationKind::ContainmentCycle, "contained more than once (by " + list + ")");
    }
  }
  for (const std::string& id : containment_cycle_members(containment)) {
    add(id, "", ViolationKind::ContainmentCycle, "object is part of a containment cycle");
  }

  std::sort(out.begin(), out.end(), [](const Violation& a, const Violation& b) {
    return std::tie(a.object_id, a.feature, a.kind, a.message) < std::tie(b.object_id, b.feature, b.kind, b.message);
  });
  return report;
}

std::string format_report(const ConformanceReport& report) {
  std::string out;
  for (const auto& v : report.violations) {
    out += v.object_id + "\t" + (v.feature.empty() ? "-" : v.feature) + "\t" + std::string(to_string(v.kind)) +
           "\t" + v.message + "\n";
  }
  return out;
}

}  // namespace regpipe::mm
