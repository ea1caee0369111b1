// Independent oracles and random-input generators used across the test
// suites. Everything here recomputes expectations from first principles and
// stays off the library's implementation paths wherever the result being
// checked is produced by one.
#ifndef CTXG_TESTS_ORACLES_HPP
#define CTXG_TESTS_ORACLES_HPP

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ctxg/context.hpp"
#include "ctxg/corpus.hpp"
#include "ctxg/metrics.hpp"
#include "ctxg/ontology.hpp"
#include "ctxg/rng.hpp"
#include "ctxg/text.hpp"

namespace oracles {

// ---------------------------------------------------------------------------
// Graph reachability: brute-force BFS over an explicit told-edge list built
// straight from the axioms (re-deriving the edge rule independently).
// ---------------------------------------------------------------------------

inline std::map<std::string, std::set<std::string>> told_edges(
    const ctxg::onto::Ontology& o) {
  std::map<std::string, std::set<std::string>> edges;
  for (const auto& ax : o.axioms()) {
    if (const auto* s = std::get_if<ctxg::onto::Subsumption>(&ax)) {
      edges[s->sub].insert(s->sup);
    } else {
      const auto& e = std::get<ctxg::onto::Equivalence>(ax);
      using Kind = ctxg::onto::ConceptExpr::Kind;
      if (e.rhs.kind() == Kind::atomic) {
        edges[e.lhs].insert(e.rhs.concept_name());
      } else if (e.rhs.kind() == Kind::conjunction) {
        for (const auto& part : e.rhs.parts()) {
          if (part.kind() == Kind::atomic) {
            edges[e.lhs].insert(part.concept_name());
          }
        }
      }
    }
  }
  return edges;
}

inline bool bfs_reachable(
    const std::map<std::string, std::set<std::string>>& edges,
    const std::string& from, const std::string& to) {
  if (from == to) return true;
  std::set<std::string> seen{from};
  std::vector<std::string> frontier{from};
  while (!frontier.empty()) {
    const std::string node = frontier.back();
    frontier.pop_back();
    auto it = edges.find(node);
    if (it == edges.end()) continue;
    for (const auto& next : it->second) {
      if (next == to) return true;
      if (seen.insert(next).second) frontier.push_back(next);
    }
  }
  return false;
}

inline std::vector<std::pair<std::string, std::string>> closure_pairs(
    const ctxg::onto::Ontology& o) {
  const auto edges = told_edges(o);
  std::vector<std::pair<std::string, std::string>> pairs;
  for (const auto& a : o.concepts()) {
    for (const auto& b : o.concepts()) {
      if (a != b && bfs_reachable(edges, a, b)) pairs.emplace_back(a, b);
    }
  }
  std::sort(pairs.begin(), pairs.end());
  return pairs;
}

// ---------------------------------------------------------------------------
// Random generators
// ---------------------------------------------------------------------------

inline std::string random_identifier(ctxg::rng::Rng& r,
                                     std::size_t max_extra = 8) {
  static const char first[] =
      "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ";
  static const char rest[] =
      "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_";
  std::string s(1, first[r.below(sizeof(first) - 1)]);
  const std::size_t extra = r.below(max_extra + 1);
  for (std::size_t i = 0; i < extra; ++i) {
    s.push_back(rest[r.below(sizeof(rest) - 1)]);
  }
  return s;
}

// Random acyclic ontology over up to max_concepts concepts: subsumption
// edges only go "downhill" in a fixed concept numbering, so the subsumption
// graph is a DAG by construction.
inline ctxg::onto::Ontology random_ontology(ctxg::rng::Rng& r,
                                            std::size_t max_concepts = 12) {
  using namespace ctxg::onto;
  const std::size_t n = 2 + r.below(max_concepts - 1);
  const std::size_t n_roles = 1 + r.below(3);
  std::vector<std::string> concepts;
  std::vector<std::string> roles;
  Ontology::Builder b;
  for (std::size_t i = 0; i < n; ++i) {
    concepts.push_back("C" + std::to_string(i));
    b.declare_concept(concepts.back());
  }
  for (std::size_t i = 0; i < n_roles; ++i) {
    roles.push_back("r" + std::to_string(i));
    b.declare_role(roles.back());
  }
  // subsumption edges i -> j with i < j
  const std::size_t n_edges = r.below(2 * n);
  for (std::size_t e = 0; e < n_edges; ++e) {
    const std::size_t i = r.below(n - 1);
    const std::size_t j = i + 1 + r.below(n - i - 1);
    b.subclass(concepts[i], concepts[j]);
  }
  // a few definitions with mixed atomic / exists conjuncts; lhs chosen
  // distinct, atomic conjuncts only point to later concepts (stays acyclic
  // in the told closure too, though cycles would be legal there)
  const std::size_t n_defs = r.below(std::min<std::size_t>(n - 1, 4));
  std::set<std::size_t> defined;
  for (std::size_t d = 0; d < n_defs; ++d) {
    const std::size_t lhs = r.below(n - 1);
    if (!defined.insert(lhs).second) continue;
    std::vector<ConceptExpr> parts;
    const std::size_t n_parts = 2 + r.below(2);
    for (std::size_t p = 0; p < n_parts; ++p) {
      if (r.bernoulli(0.5)) {
        const std::size_t target = lhs + 1 + r.below(n - lhs - 1);
        parts.push_back(ConceptExpr::atomic(concepts[target]));
      } else {
        parts.push_back(ConceptExpr::exists(roles[r.below(roles.size())],
                                            concepts[r.below(n)]));
      }
    }
    b.equivalent(concepts[lhs], ConceptExpr::conjunction(std::move(parts)));
  }
  return std::move(b).build();
}

inline ctxg::repr::ContextValue random_value(ctxg::rng::Rng& r) {
  if (r.bernoulli(0.3)) {
    return ctxg::repr::ContextValue::concept_ref(random_identifier(r));
  }
  static const char chars[] =
      "abcdefghijklmnopqrstuvwxyz ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789"
      "\"\\\n\t.,:;!?-";
  std::string s;
  const std::size_t len = 1 + r.below(16);
  for (std::size_t i = 0; i < len; ++i) {
    s.push_back(chars[r.below(sizeof(chars) - 1)]);
  }
  if (ctxg::text::trim(s).empty()) s = "x" + s;
  return ctxg::repr::ContextValue::literal(s);
}

inline ctxg::repr::Triple random_triple(ctxg::rng::Rng& r) {
  return {random_identifier(r), random_identifier(r), random_value(r)};
}

inline ctxg::repr::ContextElement random_element(ctxg::rng::Rng& r,
                                                 std::size_t index) {
  ctxg::repr::ContextElement e;
  e.id = "ctx" + std::to_string(index) + random_identifier(r, 4);
  const auto kinds = {ctxg::onto::ContextKind::situational,
                      ctxg::onto::ContextKind::cultural,
                      ctxg::onto::ContextKind::ethical};
  e.kind = *(kinds.begin() + static_cast<long>(r.below(3)));
  const std::size_t n_preds = r.below(5);
  for (std::size_t i = 0; i < n_preds; ++i) {
    e.predicates.emplace(random_identifier(r), random_value(r));
  }
  return e;
}

// ---------------------------------------------------------------------------
// Metric recomputation from raw rows, written as direct counting loops.
// ---------------------------------------------------------------------------

inline double brute_bda(const std::vector<ctxg::metrics::PredictionRow>& rows) {
  std::size_t agree = 0;
  for (const auto& row : rows) {
    if (row.label == row.predicted) ++agree;
  }
  return static_cast<double>(agree) / static_cast<double>(rows.size());
}

inline double brute_btca(const std::vector<ctxg::metrics::PredictionRow>& rows,
                         bool positives_only) {
  std::size_t universe = 0;
  std::size_t correct = 0;
  for (const auto& row : rows) {
    if (positives_only && row.label != 1) continue;
    ++universe;
    if (row.true_type == row.predicted_type) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(universe);
}

struct BruteGroupStats {
  double positive_rate = 0.0;
  double tpr = 0.0;
  std::size_t total = 0;
};

inline std::map<std::string, BruteGroupStats> brute_groups(
    const std::vector<ctxg::metrics::PredictionRow>& rows,
    const std::string& attribute) {
  std::map<std::string, std::size_t> total, pred_pos, actual_pos, tp;
  for (const auto& row : rows) {
    auto it = row.attributes.find(attribute);
    const std::string g = it == row.attributes.end() ? "unknown" : it->second;
    ++total[g];
    if (row.predicted == 1) ++pred_pos[g];
    if (row.label == 1) {
      ++actual_pos[g];
      if (row.predicted == 1) ++tp[g];
    }
  }
  std::map<std::string, BruteGroupStats> out;
  for (const auto& [g, n] : total) {
    BruteGroupStats s;
    s.total = n;
    s.positive_rate =
        static_cast<double>(pred_pos[g]) / static_cast<double>(n);
    s.tpr = actual_pos[g] == 0 ? 0.0
                               : static_cast<double>(tp[g]) /
                                     static_cast<double>(actual_pos[g]);
    out[g] = s;
  }
  return out;
}

}  // namespace oracles

#endif  // CTXG_TESTS_ORACLES_HPP
