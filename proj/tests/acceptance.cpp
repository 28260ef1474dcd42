// Acceptance suite: one PASS/FAIL line per criterion; exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rrlab/rrlab.hpp"

using namespace rrlab;

namespace {

// Pinned limits.
constexpr double kFixtureSeconds = 1.0;
constexpr double kAgreementSeconds = 60.0;
constexpr double kBenchSeconds = 120.0;
constexpr std::size_t kAgreementTriples = 1000;
constexpr std::size_t kAgreementMaxDomain = 60;
constexpr std::size_t kJumpFreePairs = 500;
constexpr std::size_t kCapPairs = 500;
constexpr std::size_t kOracleInstances = 2000;
constexpr std::size_t kOracleMaxSet = 20;

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

int failures = 0;

void report(const std::string& id, bool ok, const std::string& what, const std::string& detail) {
  std::cout << (ok ? "[PASS] " : "[FAIL] ") << id << " " << what << ": " << detail << std::endl;
  if (!ok) ++failures;
}

void info(const std::string& id, const std::string& detail) { std::cout << "[INFO] " << id << " " << detail << std::endl; }

std::string join(const std::vector<Value>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
  return out;
}

SelectionRule random_rule(std::size_t r, std::mt19937_64& rng) {
  switch (rng() % 4) {
    case 0: return SelectionRule::min_rule(r);
    case 1: return SelectionRule::max_rule(r);
    case 2: return SelectionRule::undefined(r);
    default: return SelectionRule::index_rule(r, rng(), 0.1 + 0.1 * static_cast<double>(rng() % 5));
  }
}

RhoFamily random_rho(const Domain& d, std::mt19937_64& rng) {
  switch (rng() % 3) {
    case 0: return RhoFamily::min();
    case 1: return RhoFamily::offset(static_cast<Value>(rng() % 4));
    default: {
      std::map<Point, Value> t;
      for (const auto& x : d) {
        if (rng() % 3 == 0) t[x] = min_coord(x) + static_cast<Value>(rng() % 5);
      }
      return RhoFamily::table(std::move(t));
    }
  }
}

// Random declared committees: up to three per vertex, members drawn from
// the out-neighbours.
CommitteeSpec random_declared(const DownwardGraph& g, std::size_t r, std::mt19937_64& rng) {
  std::map<Point, std::vector<Committee>> declared;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto adj = g.out_indices(i);
    if (adj.empty()) continue;
    const std::size_t count = rng() % 4;
    for (std::size_t c = 0; c < count; ++c) {
      std::vector<Point> members;
      const std::size_t size = 1 + rng() % r;
      for (std::size_t m = 0; m < size; ++m) members.push_back(g.domain()[adj[rng() % adj.size()]]);
      declared[g.domain()[i]].push_back(pad_committee(members, r));
    }
  }
  return CommitteeSpec::declared(r, std::move(declared));
}

struct Model {
  DownwardGraph graph;
  SelectionRule rule = SelectionRule::min_rule(1);
  CommitteeSpec spec = CommitteeSpec::exhaustive(1);
};

Model random_model(const Domain& d, std::mt19937_64& rng, const AmbientGraph* ambient = nullptr) {
  Model m;
  const double density = 0.05 + 0.05 * static_cast<double>(rng() % 8);
  m.graph = ambient ? ambient->induce(d) : gen_random_downward(d.dimension(), d, density, rng());
  const bool declared = rng() % 3 == 0;
  const std::size_t r = declared ? 1 + rng() % 3 : 1 + rng() % 2;
  m.rule = random_rule(r, rng);
  m.spec = declared ? random_declared(m.graph, r, rng) : CommitteeSpec::exhaustive(r);
  return m;
}

// ---------------------------------------------------------------------------

void ac1_fixture() {
  const auto t0 = clock_type::now();
  const auto ex = committee_example();
  const auto s = eval_s_hat(ex.graph, ex.rule(), ex.committees);
  std::vector<Value> values, labels;
  for (const auto& t : ex.terminals) {
    values.push_back(s.value(t));
    labels.push_back(s.label(t));
  }
  const double secs = seconds_since(t0);
  const bool ok = s.value(ex.boss) == 3 && values == std::vector<Value>{2, 3, 4, 5, 6, 8, 8, 9} &&
                  labels == std::vector<Value>{2, 1, 1, 5, 4, 4, 7, 3} && secs < kFixtureSeconds;
  std::ostringstream d;
  d << "boss " << ex.boss.to_string() << " = " << s.value(ex.boss) << ", terminal values " << join(values)
    << ", labels passed up " << join(labels) << ", " << secs * 1000 << " ms";
  report("AC1", ok, "committee fixture reproduction", d.str());
}

void ac2_agreement() {
  const auto t0 = clock_type::now();
  std::mt19937_64 rng(0xA2);
  std::size_t mismatches = 0, checked = 0, nonempty = 0, largest = 0;
  std::string first;
  for (std::size_t trial = 0; trial < kAgreementTriples; ++trial) {
    const std::size_t k = 2 + rng() % 2;
    const Domain d = random_domain(k, 3 + static_cast<Coord>(rng() % 6), 5 + rng() % (kAgreementMaxDomain - 4), rng);
    largest = std::max(largest, d.size());
    const Model m = random_model(d, rng);
    const RhoFamily rho = random_rho(d, rng);
    const auto s = eval_s_hat(m.graph, m.rule, m.spec);
    const auto h = eval_h_rho(m.graph, m.rule, m.spec, rho);
    const auto cmp = compare_evaluations(s, h, rho);
    checked += cmp.checked;
    for (const auto& r : s.results()) nonempty += !r.phi_empty;
    if (!cmp.ok() && first.empty()) first = "trial " + std::to_string(trial) + " at " +
                                            cmp.mismatches.front().point.to_string() + ": " +
                                            cmp.mismatches.front().reason;
    mismatches += cmp.mismatches.size();
  }
  const double secs = seconds_since(t0);
  std::ostringstream d;
  d << kAgreementTriples << " triples, max |D| " << largest << ", " << checked << " vertices (" << nonempty
    << " with defined outputs), " << mismatches << " mismatches, " << secs << " s";
  if (!first.empty()) d << "; first: " << first;
  report("AC2", mismatches == 0 && largest <= kAgreementMaxDomain && secs < kAgreementSeconds,
         "s-hat vs h-rho agreement", d.str());
}

void ac3_jump_free() {
  std::mt19937_64 rng(0xA3);
  std::size_t pairs = 0, attempts = 0, strict = 0, violations = 0, removed_total = 0;
  std::string first;
  while (pairs < kJumpFreePairs && attempts < 20 * kJumpFreePairs) {
    ++attempts;
    const std::size_t k = 2 + rng() % 2;
    const Domain b_dom = random_domain(k, 3 + static_cast<Coord>(rng() % 4), 6 + rng() % 20, rng);
    const AmbientGraph amb = AmbientGraph::random(0.2 + 0.1 * static_cast<double>(rng() % 5), rng());
    Model m = random_model(b_dom, rng, &amb);
    const DownwardGraph gb = m.graph;
    const Point x = b_dom[rng() % b_dom.size()];
    const Coord xn = max_norm(x);

    // Shrink A from B: drop vertices while s-hat on the remaining A_x still
    // matches s-hat on B; also drop some vertices above x.
    const auto eb = eval_s_hat(gb, m.rule, m.spec.restricted_to(gb));
    std::vector<Point> a_pts(b_dom.begin(), b_dom.end());
    std::vector<Point> order = a_pts;
    std::shuffle(order.begin(), order.end(), rng);
    std::size_t removed = 0;
    for (const auto& v : order) {
      if (v == x || rng() % 2) continue;
      std::vector<Point> trial;
      for (const auto& p : a_pts) {
        if (!(p == v)) trial.push_back(p);
      }
      const Domain td(k, trial);
      const auto ga = amb.induce(td);
      const auto ea = eval_s_hat(ga, m.rule, m.spec.restricted_to(ga));
      bool agree = true;
      for (const auto& y : td) {
        if (max_norm(y) < xn && ea.value(y) != eb.value(y)) agree = false;
      }
      if (agree) {
        a_pts = std::move(trial);
        ++removed;
      }
    }
    const auto ga = amb.induce(Domain(k, a_pts));
    const auto r = check_jump_free_pair(ga, gb, m.rule, m.spec, x);
    if (!r.premise_held) continue;
    ++pairs;
    removed_total += removed;
    strict += r.s_a > r.s_b;
    if (!r.holds) {
      ++violations;
      if (first.empty()) first = "x " + x.to_string() + ": s_A " + std::to_string(r.s_a) + " < s_B " + std::to_string(r.s_b);
    }
  }
  std::ostringstream d;
  d << pairs << " nested pairs with premise satisfied (" << attempts << " drawn, " << removed_total
    << " vertices removed in total), s_A(x) > s_B(x) strictly in " << strict << ", violations " << violations;
  if (!first.empty()) d << "; first: " << first;
  report("AC3", pairs >= kJumpFreePairs && violations == 0, "jump-free nested pairs", d.str());
}

void ac4_cap_reduction() {
  std::mt19937_64 rng(0xA4);
  std::size_t differing = 0, discarded = 0, reduced = 0;
  std::string first;
  for (std::size_t trial = 0; trial < kCapPairs; ++trial) {
    const std::size_t k = 2 + rng() % 2;
    const std::size_t p = 2 + rng() % 2;
    std::vector<Coord> ev;
    while (ev.size() < p) {
      const Coord v = static_cast<Coord>(rng() % 7);
      if (std::find(ev.begin(), ev.end(), v) == ev.end()) ev.push_back(v);
    }
    const CoordSet e(ev);
    const Domain c = cube(e, k);
    std::vector<Point> pts(c.begin(), c.end());
    const std::size_t extra = rng() % 15;
    for (std::size_t i = 0; i < extra; ++i) {
      std::vector<Coord> coords(k);
      for (auto& v : coords) v = static_cast<Coord>(rng() % static_cast<std::uint64_t>(e.back() + 4));
      pts.emplace_back(coords);
    }
    const Domain d(k, pts);
    const AmbientGraph amb = AmbientGraph::random(0.15 + 0.1 * static_cast<double>(rng() % 6), rng());
    Model m = random_model(d, rng, &amb);
    const RhoFamily rho = random_rho(d, rng);
    const auto red = restrict_capped(d, e, k);
    discarded += red.discarded.size();
    reduced += red.domain.size() < d.size();
    const auto gd = amb.induce(d);
    const auto gr = amb.induce(red.domain);
    const auto hd = eval_h_rho(gd, m.rule, m.spec.restricted_to(gd), rho).restricted(c);
    const auto hr = eval_h_rho(gr, m.rule, m.spec.restricted_to(gr), rho).restricted(c);
    if (!(hd == hr) || !is_capped(red.domain, e)) {
      ++differing;
      if (first.empty()) first = "trial " + std::to_string(trial);
    }
  }
  std::ostringstream d;
  d << kCapPairs << " (D,E) pairs, " << reduced << " actually reduced, " << discarded << " vertices discarded, "
    << differing << " with a changed restriction to E^k";
  if (!first.empty()) d << "; first: " << first;
  report("AC4", differing == 0, "cap reduction", d.str());
}

void ac5_regressive_bound() {
  std::size_t witnesses = 0, bad = 0, with_constant = 0, exhausted = 0;
  std::size_t largest[9] = {};
  std::string first;
  for (std::size_t k = 2; k <= 3; ++k) {
    const std::uint64_t kk = k == 2 ? 4 : 27;
    for (std::size_t p = 2; p <= 3; ++p) {
      for (std::uint64_t seed = 0; seed < (k == 2 ? 40u : 12u); ++seed) {
        std::mt19937_64 rng(seed * 131 + k * 7 + p);
        const std::size_t r = 1 + rng() % 2;
        SearchBounds b;
        b.n_min = static_cast<Coord>(seed % 4);
        b.n_max = b.n_min + (k == 2 ? 5 : 3);
        b.max_filler = k == 2 ? 4 : 2;
        b.max_domains_per_e = k == 2 ? 300 : 60;
        const auto amb = AmbientGraph::random(0.3 + 0.1 * static_cast<double>(seed % 6), seed);
        const auto rule = random_rule(r, rng);
        const auto rep = search_regular(amb, rule, CommitteeSpec::exhaustive(r), RhoFamily::min(), k, p, b);
        if (!rep.witness) {
          ++exhausted;
          continue;
        }
        ++witnesses;
        const auto& w = *rep.witness;
        // Self-certification: recompute the verdict from scratch.
        const auto g = amb.induce(w.d);
        const auto h = eval_h_rho(g, rule, CommitteeSpec::exhaustive(r), RhoFamily::min());
        const auto verdict = check_regressive_regular(h, w.e, k);
        const std::size_t n = verdict.regressive_values.size();
        largest[k] = std::max(largest[k], n);
        for (const auto& cls : verdict.classes) {
          if (cls.kind == ClassCase::Constant) {
            ++with_constant;
            break;
          }
        }
        const bool ok = verdict.regular && h == w.values && n <= ordered_bell(k) && ordered_bell(k) <= kk;
        if (!ok) {
          ++bad;
          if (first.empty()) first = "k=" + std::to_string(k) + " seed " + std::to_string(seed);
        }
      }
    }
  }
  std::ostringstream d;
  d << witnesses << " search witnesses (" << with_constant << " with a constant class, " << exhausted
    << " searches exhausted), max |regressive values| " << largest[2] << " for k=2 (bound " << ordered_bell(2)
    << " <= 4), " << largest[3] << " for k=3 (bound " << ordered_bell(3) << " <= 27), " << bad << " violations";
  if (!first.empty()) d << "; first: " << first;
  report("AC5", bad == 0 && witnesses > 0 && with_constant > 0, "regressive-value bound on search outputs", d.str());
}

void ac6_mass_bound() {
  std::size_t instances = 0, sum_fail = 0, each_fail = 0, point_sum_fail = 0, le_floor_fail = 0;
  std::size_t bad_points = 0, bad_points_h_zero = 0;
  std::string first;
  auto check = [&](const GeneratedInstance& gi, const std::string& label) {
    ++instances;
    const auto& inst = gi.instance;
    const Value floor = inst.e.front();
    const Value bound = small_threshold(inst.e, inst.k);
    const auto ls = lower_sets(gi.h, inst.e, inst.k);
    // Sum over the set of displacement values, and over the points of E_L.
    const MassReport mass = lower_mass(inst);
    Value point_sum = 0;
    bool each = true, le = true;
    for (const auto& x : ls.below_floor) {
      const Value dv = delta(inst.e, gi.h.value(x));
      const Value mag = dv < 0 ? -dv : dv;
      point_sum += mag;
      if (mag >= floor) {
        each = false;
        ++bad_points;
        bad_points_h_zero += gi.h.value(x) == 0;
        if (first.empty()) {
          first = label + ": x " + x.to_string() + " has h(x) = " + std::to_string(gi.h.value(x)) +
                  ", |delta h(x)| = " + std::to_string(mag) + " = e_0";
        }
      }
      if (mag > floor) le = false;
    }
    sum_fail += !(mass.total < bound);
    each_fail += !each;
    le_floor_fail += !le;
    point_sum_fail += !(point_sum < bound);
  };

  // The smallest case: E = {1,2}, every cube point drops to (0,0).
  {
    const CoordSet e{1, 2};
    const Domain c = cube(e, 2);
    std::vector<Edge> edges;
    for (const auto& x : c) edges.emplace_back(x, Point{0, 0});
    GeneratedInstance gi;
    gi.e = e;
    gi.graph = DownwardGraph(c.united(Domain(2, {{0, 0}})), edges);
    gi.rho = RhoFamily::table({{Point{1, 1}, 20}, {Point{2, 2}, 30}});
    gi.h = eval_h_rho(gi.graph, gi.rule, gi.spec, gi.rho);
    gi.instance = build_instance(gi.h, e, 2, 1, gi.rho);
    check(gi, "E={1,2}, D=E^2+{(0,0)}, all edges to (0,0)");
  }
  for (std::uint64_t seed = 0; seed < 400; ++seed) {
    check(layered_regular_instance(2 + seed % 2, 2 + seed % 7, 1 + seed % 2, seed), "layered seed " + std::to_string(seed));
  }
  std::size_t random_found = 0;
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    if (auto gi = random_regular_instance(seed, 1)) {
      ++random_found;
      check(*gi, "random seed " + std::to_string(seed));
    }
  }
  std::ostringstream d;
  d << instances << " regular instances (" << random_found << " from random rules); sum over the value set "
    << "< e_0 k^k fails in " << sum_fail << "; each |delta h(x)| < e_0 fails in " << each_fail << " instances ("
    << bad_points << " points of E_L, " << bad_points_h_zero << " of them with h(x) = 0)";
  if (!first.empty()) d << "; first: " << first;
  report("AC6", sum_fail == 0 && each_fail == 0, "lower-set mass bound", d.str());
  info("AC6", "|delta h(x)| <= e_0 fails in " + std::to_string(le_floor_fail) +
                  " instances; equality occurs exactly when h(x) = 0, since delta h(x) = h(x) - e_0");
  info("AC6", "sum over the points of E_L (not the value set) reaches e_0 k^k in " + std::to_string(point_sum_fail) +
                  " instances");
}

void ac7_oracle() {
  std::size_t instances = 0, disagreements = 0, bad_witness = 0, solvable = 0, skipped = 0, random_used = 0;
  std::string first;
  auto check = [&](const DisplacementInstance& inst, const std::string& label) {
    if (inst.elements.size() > kOracleMaxSet) {
      ++skipped;
      return;
    }
    ++instances;
    const auto s = structured_solve(inst);
    const auto b = brute_solve(inst);
    const auto values = inst.values();
    if (s.solvable() != b.solvable()) {
      ++disagreements;
      if (first.empty()) first = label;
    }
    if (s.witness && !verify_witness(values, *s.witness)) ++bad_witness;
    if (b.witness && !verify_witness(values, *b.witness)) ++bad_witness;
    solvable += s.solvable();
  };
  std::uint64_t seed = 0;
  while (instances < kOracleInstances * 3 / 4) {
    const std::size_t p = 2 + seed % 12;
    const std::size_t t = 1 + seed % 3;
    check(layered_regular_instance(2 + (seed % 5 == 0), p, t, seed).instance, "layered seed " + std::to_string(seed));
    ++seed;
  }
  std::uint64_t rseed = 0;
  while (instances < kOracleInstances) {
    if (auto gi = random_regular_instance(rseed, 1 + rseed % 2)) {
      ++random_used;
      check(gi->instance, "random seed " + std::to_string(rseed));
    }
    ++rseed;
  }
  std::ostringstream d;
  d << instances << " instances with |S| <= " << kOracleMaxSet << " (" << random_used << " from random rules, " << skipped
    << " larger skipped), " << solvable << " solvable, " << disagreements << " disagreements, " << bad_witness
    << " invalid witnesses";
  if (!first.empty()) d << "; first: " << first;
  report("AC7", instances >= kOracleInstances && disagreements == 0 && bad_witness == 0,
         "structured vs brute-force decisions", d.str());
}

void ac8_complexity() {
  const auto t0 = clock_type::now();
  const std::vector<std::size_t> ps{4, 8, 16, 32};
  const auto gen = [](std::size_t p, std::uint64_t s) { return layered_regular_instance(2, p, 1, s).instance; };
  const auto rows = bench_scaling(gen, ps, 1, 2, 5, 0xA8);
  bool ok = true;
  bool brute_exact = true;
  std::ostringstream table;
  table << "    p  |S|  neg small big  structured  bound   brute(2^|S|-1)   brute run\n";
  for (const auto& row : rows) {
    ok = ok && row.error.empty() && row.structured_explored <= 16 * row.p && row.within_budget;
    if (row.brute_explored && !row.solvable) brute_exact = brute_exact && *row.brute_explored == row.brute_space;
    char line[160];
    std::snprintf(line, sizeof line, "  %3zu  %3zu  %3zu %5zu %3zu  %10llu  %5zu  %15llu  %10s\n", row.p, row.set_size,
                  row.neg, row.small, row.big, static_cast<unsigned long long>(row.structured_explored), 16 * row.p,
                  static_cast<unsigned long long>(row.brute_space),
                  row.brute_explored ? std::to_string(*row.brute_explored).c_str() : "-");
    table << line;
  }
  const double secs = seconds_since(t0);
  std::ostringstream d;
  d << rows.size() << " instances for p in {4,8,16,32}, every structured count <= 16p, unsolvable brute counts equal 2^|S|-1: "
    << (brute_exact ? "yes" : "no") << ", " << secs << " s";
  report("AC8", ok && brute_exact && secs < kBenchSeconds, "structured enumeration bound", d.str());
  std::cout << table.str();
}

}  // namespace

int main() {
  std::cout << "rrlab acceptance suite" << std::endl;
  const std::vector<std::pair<const char*, std::function<void()>>> criteria{
      {"AC1", ac1_fixture}, {"AC2", ac2_agreement},  {"AC3", ac3_jump_free}, {"AC4", ac4_cap_reduction},
      {"AC5", ac5_regressive_bound}, {"AC6", ac6_mass_bound}, {"AC7", ac7_oracle}, {"AC8", ac8_complexity},
  };
  for (const auto& [id, fn] : criteria) {
    try {
      fn();
    } catch (const std::exception& ex) {
      report(id, false, "aborted", ex.what());
    }
  }
  info("AC9", "existence statements over infinite families are not checked directly; AC2-AC5 cover their "
              "finite mechanisms (layer recursion, jump freeness, cap reduction, self-certifying search witnesses "
              "with bounded exhaustion reports)");
  std::cout << (failures ? std::to_string(failures) + " criteria failed" : std::string("all criteria passed"))
            << std::endl;
  return failures ? 1 : 0;
}
