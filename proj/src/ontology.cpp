#include "ctxg/ontology.hpp"

#include <algorithm>
#include <deque>

#include "ctxg/errors.hpp"
#include "ctxg/text.hpp"

namespace ctxg::onto {

std::string_view to_string(ContextKind kind) {
  switch (kind) {
    case ContextKind::situational: return "situational";
    case ContextKind::cultural: return "cultural";
    case ContextKind::ethical: return "ethical";
  }
  return "?";
}

ContextKind parse_context_kind(std::string_view name) {
  if (name == "situational") return ContextKind::situational;
  if (name == "cultural") return ContextKind::cultural;
  if (name == "ethical") return ContextKind::ethical;
  throw ConfigError("unknown context kind: '" + std::string(name) + "'");
}

std::string_view top_concept(ContextKind kind) {
  switch (kind) {
    case ContextKind::situational: return "Situation";
    case ContextKind::cultural: return "Culture";
    case ContextKind::ethical: return "EthicalContext";
  }
  return "?";
}

ConceptExpr ConceptExpr::atomic(std::string name) {
  ConceptExpr e;
  e.kind_ = Kind::atomic;
  e.name_ = std::move(name);
  return e;
}

ConceptExpr ConceptExpr::exists(std::string role, std::string filler) {
  ConceptExpr e;
  e.kind_ = Kind::exists;
  e.name_ = std::move(role);
  e.filler_ = std::move(filler);
  return e;
}

ConceptExpr ConceptExpr::conjunction(std::vector<ConceptExpr> parts) {
  std::vector<ConceptExpr> flat;
  for (auto& p : parts) {
    if (p.kind_ == Kind::conjunction) {
      for (auto& inner : p.parts_) {
        if (std::find(flat.begin(), flat.end(), inner) == flat.end()) {
          flat.push_back(std::move(inner));
        }
      }
    } else if (std::find(flat.begin(), flat.end(), p) == flat.end()) {
      flat.push_back(std::move(p));
    }
  }
  if (flat.empty()) {
    throw ConfigError("empty conjunction");
  }
  if (flat.size() == 1) return std::move(flat.front());
  ConceptExpr e;
  e.kind_ = Kind::conjunction;
  e.parts_ = std::move(flat);
  return e;
}

std::string ConceptExpr::to_text() const {
  switch (kind_) {
    case Kind::atomic:
      return name_;
    case Kind::exists:
      return "Some(" + name_ + " " + filler_ + ")";
    case Kind::conjunction: {
      std::string out = "And(";
      for (std::size_t i = 0; i < parts_.size(); ++i) {
        if (i > 0) out.push_back(' ');
        out += parts_[i].to_text();
      }
      out.push_back(')');
      return out;
    }
  }
  return {};
}

bool ConceptExpr::operator==(const ConceptExpr& other) const {
  return kind_ == other.kind_ && name_ == other.name_ &&
         filler_ == other.filler_ && parts_ == other.parts_;
}

std::string to_text(const Axiom& axiom) {
  if (const auto* s = std::get_if<Subsumption>(&axiom)) {
    return "SubClassOf(" + s->sub + " " + s->sup + ")";
  }
  const auto& e = std::get<Equivalence>(axiom);
  return "EquivalentTo(" + e.lhs + " " + e.rhs.to_text() + ")";
}

bool axioms_equal(const Axiom& a, const Axiom& b) {
  return a == b;
}

bool Ontology::has_concept(const std::string& name) const {
  return concepts_.count(name) > 0;
}

bool Ontology::has_role(const std::string& name) const {
  return roles_.count(name) > 0;
}

const Equivalence* Ontology::definition(const std::string& name) const {
  auto it = definition_index_.find(name);
  if (it == definition_index_.end()) return nullptr;
  return &std::get<Equivalence>(axioms_[it->second]);
}

bool Ontology::is_subsumed(const std::string& sub,
                           const std::string& sup) const {
  if (!has_concept(sub)) {
    throw UnknownConceptError("unknown concept: '" + sub + "'");
  }
  if (!has_concept(sup)) {
    throw UnknownConceptError("unknown concept: '" + sup + "'");
  }
  if (sub == sup) return true;
  std::set<std::string> seen{sub};
  std::deque<std::string> queue{sub};
  while (!queue.empty()) {
    const std::string current = queue.front();
    queue.pop_front();
    auto it = edges_.find(current);
    if (it == edges_.end()) continue;
    for (const auto& next : it->second) {
      if (next == sup) return true;
      if (seen.insert(next).second) queue.push_back(next);
    }
  }
  return false;
}

std::vector<std::pair<std::string, std::string>> Ontology::classify() const {
  std::vector<std::pair<std::string, std::string>> pairs;
  for (const auto& name : concepts_) {
    std::set<std::string> seen{name};
    std::deque<std::string> queue{name};
    while (!queue.empty()) {
      const std::string current = queue.front();
      queue.pop_front();
      auto it = edges_.find(current);
      if (it == edges_.end()) continue;
      for (const auto& next : it->second) {
        if (seen.insert(next).second) queue.push_back(next);
      }
    }
    seen.erase(name);
    for (const auto& sup : seen) pairs.emplace_back(name, sup);
  }
  std::sort(pairs.begin(), pairs.end());
  return pairs;
}

std::vector<std::pair<std::string, std::string>> Ontology::required_roles(
    const std::string& name) const {
  if (!has_concept(name)) {
    throw UnknownConceptError("unknown concept: '" + name + "'");
  }
  const Equivalence* def = definition(name);
  if (def == nullptr) return {};
  std::vector<std::pair<std::string, std::string>> out;
  auto add = [&out](const ConceptExpr& e) {
    if (e.kind() == ConceptExpr::Kind::exists) {
      out.emplace_back(e.role(), e.filler());
    }
  };
  if (def->rhs.kind() == ConceptExpr::Kind::conjunction) {
    for (const auto& part : def->rhs.parts()) add(part);
  } else {
    add(def->rhs);
  }
  return out;
}

bool Ontology::operator==(const Ontology& other) const {
  return concepts_ == other.concepts_ && roles_ == other.roles_ &&
         axioms_ == other.axioms_;
}

Ontology::Builder& Ontology::Builder::declare_concept(std::string name) {
  if (!text::is_identifier(name)) {
    throw ConfigError("invalid concept name: '" + name + "'");
  }
  concepts_.insert(std::move(name));
  return *this;
}

Ontology::Builder& Ontology::Builder::declare_role(std::string name) {
  if (!text::is_identifier(name)) {
    throw ConfigError("invalid role name: '" + name + "'");
  }
  roles_.insert(std::move(name));
  return *this;
}

Ontology::Builder& Ontology::Builder::subclass(std::string sub,
                                               std::string sup) {
  axioms_.push_back(Subsumption{std::move(sub), std::move(sup)});
  return *this;
}

Ontology::Builder& Ontology::Builder::equivalent(std::string lhs,
                                                 ConceptExpr rhs) {
  axioms_.push_back(Equivalence{std::move(lhs), std::move(rhs)});
  return *this;
}

Ontology Ontology::Builder::build() && {
  Ontology o;
  o.concepts_ = std::move(concepts_);
  o.roles_ = std::move(roles_);

  auto require_concept = [&o](const std::string& name) {
    if (!o.has_concept(name)) {
      throw UnknownConceptError("undeclared concept: '" + name + "'");
    }
  };
  auto require_role = [&o](const std::string& name) {
    if (!o.has_role(name)) {
      throw UnknownConceptError("undeclared role: '" + name + "'");
    }
  };
  auto check_expr = [&](const ConceptExpr& e, auto&& self) -> void {
    switch (e.kind()) {
      case ConceptExpr::Kind::atomic:
        require_concept(e.concept_name());
        break;
      case ConceptExpr::Kind::exists:
        require_role(e.role());
        require_concept(e.filler());
        break;
      case ConceptExpr::Kind::conjunction:
        for (const auto& p : e.parts()) self(p, self);
        break;
    }
  };

  // drop exact duplicates, keep canonical (text-sorted) order
  std::vector<Axiom> unique;
  for (auto& a : axioms_) {
    bool dup = false;
    for (const auto& u : unique) {
      if (axioms_equal(a, u)) {
        dup = true;
        break;
      }
    }
    if (!dup) unique.push_back(std::move(a));
  }
  std::sort(unique.begin(), unique.end(),
            [](const Axiom& a, const Axiom& b) {
              return to_text(a) < to_text(b);
            });
  o.axioms_ = std::move(unique);

  for (std::size_t i = 0; i < o.axioms_.size(); ++i) {
    const Axiom& a = o.axioms_[i];
    if (const auto* s = std::get_if<Subsumption>(&a)) {
      require_concept(s->sub);
      require_concept(s->sup);
      o.edges_[s->sub].push_back(s->sup);
    } else {
      const auto& e = std::get<Equivalence>(a);
      require_concept(e.lhs);
      check_expr(e.rhs, check_expr);
      auto [it, inserted] = o.definition_index_.emplace(e.lhs, i);
      if (!inserted) {
        throw ConflictError("concept '" + e.lhs +
                            "' has more than one definition");
      }
      if (e.rhs.kind() == ConceptExpr::Kind::atomic) {
        o.edges_[e.lhs].push_back(e.rhs.concept_name());
      } else if (e.rhs.kind() == ConceptExpr::Kind::conjunction) {
        for (const auto& part : e.rhs.parts()) {
          if (part.kind() == ConceptExpr::Kind::atomic) {
            o.edges_[e.lhs].push_back(part.concept_name());
          }
        }
      }
    }
  }

  // acyclicity of the subsumption graph (iterative DFS, three colors)
  std::map<std::string, std::vector<std::string>> sub_edges;
  for (const auto& a : o.axioms_) {
    if (const auto* s = std::get_if<Subsumption>(&a)) {
      sub_edges[s->sub].push_back(s->sup);
    }
  }
  std::map<std::string, int> color;  // 0 white, 1 gray, 2 black
  for (const auto& start : o.concepts_) {
    if (color[start] != 0) continue;
    std::vector<std::pair<std::string, std::size_t>> stack{{start, 0}};
    color[start] = 1;
    while (!stack.empty()) {
      auto& [node, idx] = stack.back();
      const auto& outs = sub_edges[node];
      if (idx < outs.size()) {
        const std::string& next = outs[idx++];
        if (color[next] == 1) {
          throw ConflictError("subsumption cycle through '" + next + "'");
        }
        if (color[next] == 0) {
          color[next] = 1;
          stack.emplace_back(next, 0);
        }
      } else {
        color[node] = 2;
        stack.pop_back();
      }
    }
  }

  return o;
}

Ontology builtin_ontology(ContextKind kind) {
  Ontology::Builder b;
  switch (kind) {
    case ContextKind::situational:
      for (const char* c : {"Situation", "Context", "Location", "Time",
                            "Activity", "SpatialThing", "TemporalThing",
                            "Event"}) {
        b.declare_concept(c);
      }
      for (const char* r : {"hasLocation", "hasTime", "hasActivity"}) {
        b.declare_role(r);
      }
      b.subclass("Situation", "Context");
      b.equivalent("Situation",
                   ConceptExpr::conjunction(
                       {ConceptExpr::exists("hasLocation", "Location"),
                        ConceptExpr::exists("hasTime", "Time"),
                        ConceptExpr::exists("hasActivity", "Activity")}));
      b.subclass("Location", "SpatialThing");
      b.subclass("Time", "TemporalThing");
      b.subclass("Activity", "Event");
      break;
    case ContextKind::cultural:
      for (const char* c : {"Culture", "Context", "Region", "EthnicGroup",
                            "Religion", "Value", "SpatialThing", "SocialGroup",
                            "BeliefSystem", "AbstractConcept"}) {
        b.declare_concept(c);
      }
      for (const char* r :
           {"hasRegion", "hasEthnicGroup", "hasReligion", "hasValue"}) {
        b.declare_role(r);
      }
      b.subclass("Culture", "Context");
      b.equivalent("Culture",
                   ConceptExpr::conjunction(
                       {ConceptExpr::exists("hasRegion", "Region"),
                        ConceptExpr::exists("hasEthnicGroup", "EthnicGroup"),
                        ConceptExpr::exists("hasReligion", "Religion"),
                        ConceptExpr::exists("hasValue", "Value")}));
      b.subclass("Region", "SpatialThing");
      b.subclass("EthnicGroup", "SocialGroup");
      b.subclass("Religion", "BeliefSystem");
      b.subclass("Value", "AbstractConcept");
      break;
    case ContextKind::ethical:
      for (const char* c : {"EthicalContext", "Context", "EthicalPrinciple",
                            "Value", "EthicalNorm", "AbstractConcept"}) {
        b.declare_concept(c);
      }
      for (const char* r : {"hasPrinciple", "hasValue", "hasNorm"}) {
        b.declare_role(r);
      }
      b.subclass("EthicalContext", "Context");
      b.equivalent(
          "EthicalContext",
          ConceptExpr::conjunction(
              {ConceptExpr::exists("hasPrinciple", "EthicalPrinciple"),
               ConceptExpr::exists("hasValue", "Value"),
               ConceptExpr::exists("hasNorm", "EthicalNorm")}));
      b.subclass("EthicalPrinciple", "AbstractConcept");
      b.subclass("Value", "AbstractConcept");
      b.subclass("EthicalNorm", "AbstractConcept");
      break;
  }
  return std::move(b).build();
}

Ontology merge(const Ontology& a, const Ontology& b) {
  // definitions must agree on shared names
  for (const auto& ax : a.axioms()) {
    if (const auto* e = std::get_if<Equivalence>(&ax)) {
      const Equivalence* other = b.definition(e->lhs);
      if (other != nullptr && !(other->rhs == e->rhs)) {
        throw ConflictError("conflicting definitions for '" + e->lhs + "'");
      }
    }
  }
  Ontology::Builder builder;
  for (const auto& c : a.concepts()) builder.declare_concept(c);
  for (const auto& c : b.concepts()) builder.declare_concept(c);
  for (const auto& r : a.roles()) builder.declare_role(r);
  for (const auto& r : b.roles()) builder.declare_role(r);
  auto add_axioms = [&builder](const Ontology& o) {
    for (const auto& ax : o.axioms()) {
      if (const auto* s = std::get_if<Subsumption>(&ax)) {
        builder.subclass(s->sub, s->sup);
      } else {
        const auto& e = std::get<Equivalence>(ax);
        builder.equivalent(e.lhs, e.rhs);
      }
    }
  };
  add_axioms(a);
  add_axioms(b);
  return std::move(builder).build();
}

Ontology merged_builtin_ontology() {
  return merge(merge(builtin_ontology(ContextKind::situational),
                     builtin_ontology(ContextKind::cultural)),
               builtin_ontology(ContextKind::ethical));
}

}  // namespace ctxg::onto
