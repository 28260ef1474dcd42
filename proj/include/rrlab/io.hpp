#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "json.hpp"
#include "rrlab/displacement.hpp"
#include "rrlab/evaluator.hpp"
#include "rrlab/graph.hpp"
#include "rrlab/lattice.hpp"
#include "rrlab/regularity.hpp"
#include "rrlab/selection.hpp"
#include "rrlab/subset_sum.hpp"

namespace rrlab::io {

using json = nlohmann::json;

inline json to_json(const Point& p) { return json(std::vector<Coord>(p.coords().begin(), p.coords().end())); }

inline Point point_from_json(const json& j) {
  if (!j.is_array()) throw ValidationError("a point must be a JSON array of integers, got " + j.dump());
  std::vector<Coord> coords;
  for (const auto& c : j) {
    if (!c.is_number_integer()) throw ValidationError("point coordinates must be integers: " + j.dump());
    coords.push_back(c.get<Coord>());
  }
  return Point(coords);
}

// Object key used wherever a point indexes a JSON map, e.g. "[7,11]".
inline std::string point_key(const Point& p) { return to_json(p).dump(); }

inline Point point_from_key(const std::string& key) {
  json j;
  try {
    j = json::parse(key);
  } catch (const json::parse_error&) {
    throw ValidationError("bad point key '" + key + "'");
  }
  return point_from_json(j);
}

inline json to_json(const Domain& d) {
  json out = json::array();
  for (const auto& p : d) out.push_back(to_json(p));
  return out;
}

inline Domain domain_from_json(const json& j, std::size_t k) {
  if (!j.is_array()) throw ValidationError("a domain must be a JSON array of points");
  std::vector<Point> pts;
  for (const auto& p : j) pts.push_back(point_from_json(p));
  return Domain(k, std::move(pts));
}

inline json to_json(const CoordSet& e) { return json(e.values()); }

inline CoordSet coordset_from_json(const json& j) {
  if (!j.is_array()) throw ValidationError("E must be a JSON array of integers");
  std::vector<Coord> v;
  for (const auto& c : j) v.push_back(c.get<Coord>());
  return CoordSet(std::move(v));
}

inline json to_json(const DownwardGraph& g) {
  json edges = json::array();
  for (const auto& [from, to] : g.edges()) edges.push_back(json::array({to_json(from), to_json(to)}));
  return {{"k", g.dimension()}, {"vertices", to_json(g.domain())}, {"edges", edges}};
}

inline DownwardGraph graph_from_json(const json& j) {
  if (!j.is_object() || !j.contains("k") || !j.contains("vertices") || !j.contains("edges")) {
    throw ValidationError("graph JSON needs keys k, vertices, edges");
  }
  const auto k = j.at("k").get<std::size_t>();
  Domain d = domain_from_json(j.at("vertices"), k);
  std::vector<Edge> edges;
  for (const auto& e : j.at("edges")) {
    if (!e.is_array() || e.size() != 2) throw ValidationError("an edge must be a pair of points: " + e.dump());
    edges.emplace_back(point_from_json(e[0]), point_from_json(e[1]));
  }
  return DownwardGraph(std::move(d), edges);
}

inline json labeled_to_json(std::span<const LabeledMember> committee) {
  json out = json::array();
  for (const auto& m : committee) out.push_back(json::array({to_json(m.point), m.label}));
  return out;
}

inline json to_json(const TableRule& t) {
  json out = json::array();
  for (const auto& [key, value] : t.entries()) {
    out.push_back({{"z", to_json(key.z)}, {"committee", labeled_to_json(key.committee)}, {"value", value}});
  }
  return out;
}

// Arity comes from the entries; `fallback_arity` is used for an empty table.
inline TableRule table_rule_from_json(const json& j, std::size_t fallback_arity = 1) {
  if (!j.is_array()) throw ValidationError("a table rule must be a JSON list of entries");
  const std::size_t r = j.empty() ? fallback_arity : j.front().at("committee").size();
  TableRule t(r);
  for (const auto& e : j) {
    std::vector<LabeledMember> committee;
    for (const auto& m : e.at("committee")) {
      if (!m.is_array() || m.size() != 2) throw ValidationError("a committee slot must be [point, label]");
      committee.push_back({point_from_json(m[0]), m[1].get<Value>()});
    }
    t.add(point_from_json(e.at("z")), std::move(committee), e.at("value").get<Value>());
  }
  return t;
}

inline json committees_to_json(const CommitteeSpec& spec) {
  json out = json::object();
  for (const auto& [z, list] : spec.declared_committees()) {
    json tuples = json::array();
    for (const auto& c : list) {
      json members = json::array();
      for (const auto& y : c) members.push_back(to_json(y));
      tuples.push_back(members);
    }
    out[point_key(z)] = tuples;
  }
  return out;
}

inline CommitteeSpec committees_from_json(const json& j, std::size_t r) {
  if (!j.is_object()) throw ValidationError("declared committees must be a JSON object keyed by vertex");
  std::map<Point, std::vector<Committee>> declared;
  for (const auto& [key, tuples] : j.items()) {
    auto& list = declared[point_from_key(key)];
    for (const auto& t : tuples) {
      Committee c;
      for (const auto& y : t) c.push_back(point_from_json(y));
      list.push_back(std::move(c));
    }
  }
  return CommitteeSpec::declared(r, std::move(declared));
}

inline std::map<Point, Value> rho_table_from_json(const json& j) {
  if (!j.is_array()) throw ValidationError("a rho table must be a JSON list of {point, value}");
  std::map<Point, Value> out;
  for (const auto& e : j) out[point_from_json(e.at("point"))] = e.at("value").get<Value>();
  return out;
}

inline json rho_table_to_json(const std::map<Point, Value>& table) {
  json out = json::array();
  for (const auto& [p, v] : table) out.push_back({{"point", to_json(p)}, {"value", v}});
  return out;
}

inline json to_json(const Evaluation& e) {
  json out = json::object();
  for (std::size_t i = 0; i < e.domain().size(); ++i) {
    out[point_key(e.domain()[i])] = {{"value", e.results()[i].value}, {"phi_empty", e.results()[i].phi_empty}};
  }
  return out;
}

inline Evaluation evaluation_from_json(const json& j, EvalKind kind) {
  if (!j.is_object() || j.empty()) throw ValidationError("an evaluation must be a nonempty JSON object");
  std::vector<std::pair<Point, VertexResult>> rows;
  for (const auto& [key, v] : j.items()) {
    rows.emplace_back(point_from_key(key), VertexResult{v.at("value").get<Value>(), v.at("phi_empty").get<bool>()});
  }
  const std::size_t k = rows.front().first.dimension();
  std::vector<Point> pts;
  for (const auto& r : rows) pts.push_back(r.first);
  Domain d(k, pts);
  std::vector<VertexResult> results(d.size());
  for (const auto& [p, r] : rows) results[*d.index_of(p)] = r;
  return Evaluation(kind, std::move(d), std::move(results));
}

inline json to_json(const RegularityVerdict& v) {
  json classes = json::array();
  for (const auto& c : v.classes) {
    json item = {{"type", std::vector<int>(c.type.ranks().begin(), c.type.ranks().end())},
                 {"case", to_string(c.kind)},
                 {"points", c.points}};
    if (c.kind == ClassCase::Constant) item["constant"] = c.constant;
    if (c.witness) item["witness"] = to_json(*c.witness);
    if (c.partner) item["partner"] = to_json(*c.partner);
    if (!c.reason.empty()) item["reason"] = c.reason;
    classes.push_back(item);
  }
  return {{"regular", v.regular},
          {"regressive_values", std::vector<Value>(v.regressive_values.begin(), v.regressive_values.end())},
          {"classes", classes}};
}

inline json to_json(const RegularWitness& w) {
  return {{"k", w.d.dimension()},
          {"kind", to_string(w.values.kind())},
          {"E", to_json(w.e)},
          {"D", to_json(w.d)},
          {"values", to_json(w.values)},
          {"verdict", to_json(w.verdict)}};
}

inline json to_json(const Provenance& p) { return p.key(); }

inline Provenance provenance_from_key(const std::string& key) {
  if (key.rfind("diag:", 0) == 0) return Provenance::diagonal(std::stoul(key.substr(5)));
  if (key.rfind("lower:", 0) == 0) return Provenance::lower(point_from_key(key.substr(6)));
  throw ValidationError("bad provenance key '" + key + "'");
}

inline json to_json(const LogBoundReport& r) {
  return {{"ok", r.ok},
          {"all_positive", r.all_positive},
          {"threshold", r.threshold},
          {"displacements", r.displacements},
          {"small_count", r.small_count},
          {"small_distinct", r.small_distinct}};
}

inline json to_json(const DisplacementInstance& inst) {
  json elements = json::array();
  for (const auto& el : inst.elements) {
    json from = json::array();
    for (const auto& p : el.from) from.push_back(p.key());
    elements.push_back({{"value", el.value}, {"from", from}});
  }
  return {{"E", to_json(inst.e)},
          {"k", inst.k},
          {"t", inst.t},
          {"p", inst.p()},
          {"elements", elements},
          {"rho_diag", inst.rho_diag},
          {"flags",
           {{"regressively_regular", inst.flags.regressively_regular},
            {"diag_in_EL", inst.flags.diag_in_lower},
            {"diag_equals_rho", inst.flags.diag_equals_rho}}},
          {"log_bound", to_json(inst.log_bound)}};
}

// Parses and re-validates an instance: element values must be unique,
// provenances well formed, rho values present for the whole diagonal.
inline DisplacementInstance instance_from_json(const json& j) {
  DisplacementInstance inst;
  inst.e = coordset_from_json(j.at("E"));
  inst.k = j.at("k").get<std::size_t>();
  inst.t = j.at("t").get<std::size_t>();
  if (inst.e.size() < 2 || inst.k < 2 || inst.k > kMaxDimension || inst.t < 1) {
    throw ValidationError("instance parameters need p >= 2, 2 <= k <= 8, t >= 1");
  }
  for (const auto& v : j.at("rho_diag")) inst.rho_diag.push_back(v.get<Value>());
  if (inst.rho_diag.size() != inst.e.size()) throw ValidationError("rho_diag must hold one value per element of E");
  std::vector<std::pair<Value, Provenance>> raw;
  std::set<Value> seen;
  for (const auto& el : j.at("elements")) {
    const Value v = el.at("value").get<Value>();
    if (!seen.insert(v).second) throw ValidationError("duplicate element value " + std::to_string(v));
    const auto& from = el.at("from");
    if (!from.is_array() || from.empty()) throw ValidationError("every element needs at least one provenance");
    for (const auto& key : from) {
      Provenance p = provenance_from_key(key.get<std::string>());
      if (p.kind == Provenance::Kind::Diag && p.index >= inst.e.size()) {
        throw ValidationError("diagonal index out of range: " + key.get<std::string>());
      }
      if (p.kind == Provenance::Kind::Lower) {
        if (p.point.dimension() != inst.k) throw DimensionError("lower-set point of the wrong dimension");
        for (Coord c : p.point.coords()) {
          if (!inst.e.contains(c)) throw ValidationError("lower-set point outside E^k: " + key.get<std::string>());
        }
      }
      raw.emplace_back(v, std::move(p));
    }
  }
  inst.elements = merge_elements(std::move(raw));
  const auto& flags = j.at("flags");
  inst.flags.regressively_regular = flags.at("regressively_regular").get<bool>();
  inst.flags.diag_in_lower = flags.at("diag_in_EL").get<bool>();
  inst.flags.diag_equals_rho = flags.value("diag_equals_rho", false);
  inst.log_bound = is_log_bounded(inst.rho_diag, inst.e, inst.k, inst.t);
  return inst;
}

inline json to_json(const SolveResult& s) {
  return {{"solvable", s.solvable()},
          {"witness", s.solvable() ? json(s.keys) : json(nullptr)},
          {"witness_values", s.solvable() ? json(s.witness->values) : json(nullptr)},
          {"stats",
           {{"subsets_explored", s.stats.subsets_explored},
            {"neg", s.stats.neg},
            {"small", s.stats.small},
            {"big", s.stats.big}}}};
}

inline json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("cannot parse " + path.string() + ": " + e.what());
  }
}

// Writes via a temporary file in the same directory and renames it into place.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace rrlab::io
