// rrlab: generate downward lattice graphs, evaluate committee models, search
// for regressively regular witnesses, build displacement instances, solve
// and benchmark them.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rrlab/io.hpp"
#include "rrlab/rrlab.hpp"

namespace {

using rrlab::io::json;

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kValidation = 2,
  kContract = 3,
  kExhausted = 4,
};

void emit(const std::string& out, const std::string& content) {
  if (out.empty() || out == "-") {
    std::cout << content;
  } else {
    rrlab::io::write_file_atomic(out, content);
  }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::pair<std::string, std::string> split_spec(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) return {spec, ""};
  return {spec.substr(0, colon), spec.substr(colon + 1)};
}

// Options shared by the commands that evaluate h-rho or s-hat.
struct ModelOptions {
  std::string rule;
  std::string committees;
  std::string rho = "min";
  std::size_t r = 0;  // 0: take from the graph bundle, else 1
};

void add_model_options(CLI::App* cmd, ModelOptions& m) {
  cmd->add_option("--rule", m.rule, "Selection rule: min | max | undefined | index:SEED[:P_UNDEF] | table:FILE");
  cmd->add_option("--committees", m.committees, "Committees: exhaustive:CAP | explicit:FILE");
  cmd->add_option("--rho", m.rho, "Base values: min | offset:C | table:FILE")->capture_default_str();
  cmd->add_option("--r", m.r, "Committee arity r >= 1")->check(CLI::Range(std::size_t{1}, std::size_t{64}));
}

std::size_t arity(const ModelOptions& m, const json& bundle) {
  if (m.r) return m.r;
  if (bundle.is_object() && bundle.contains("r")) return bundle.at("r").get<std::size_t>();
  return 1;
}

rrlab::SelectionRule make_rule(const ModelOptions& m, std::size_t r, const json& bundle) {
  std::string spec = m.rule;
  if (spec.empty()) {
    if (bundle.is_object() && bundle.contains("rule")) {
      return rrlab::SelectionRule::table(rrlab::io::table_rule_from_json(bundle.at("rule").at("entries"), r));
    }
    spec = "min";
  }
  const auto [kind, arg] = split_spec(spec);
  if (kind == "min") return rrlab::SelectionRule::min_rule(r);
  if (kind == "max") return rrlab::SelectionRule::max_rule(r);
  if (kind == "undefined") return rrlab::SelectionRule::undefined(r);
  if (kind == "index") {
    const auto [seed, prob] = split_spec(arg);
    if (seed.empty()) throw rrlab::ValidationError("index rule needs a seed: index:SEED[:P_UNDEF]");
    return rrlab::SelectionRule::index_rule(r, std::stoull(seed), prob.empty() ? 0.25 : std::stod(prob));
  }
  if (kind == "table") {
    auto table = rrlab::io::table_rule_from_json(rrlab::io::read_json_file(arg), r);
    if (table.arity() != r) throw rrlab::ValidationError("table rule arity does not match --r");
    return rrlab::SelectionRule::table(std::move(table));
  }
  throw rrlab::ValidationError("unknown rule '" + spec + "'");
}

rrlab::CommitteeSpec make_committees(const ModelOptions& m, std::size_t r, const json& bundle) {
  if (m.committees.empty()) {
    if (bundle.is_object() && bundle.contains("committees")) {
      return rrlab::io::committees_from_json(bundle.at("committees"), r);
    }
    return rrlab::CommitteeSpec::exhaustive(r);
  }
  const auto [kind, arg] = split_spec(m.committees);
  if (kind == "exhaustive") {
    return rrlab::CommitteeSpec::exhaustive(r, arg.empty() ? rrlab::CommitteeSpec::kDefaultCap : std::stoull(arg));
  }
  if (kind == "explicit") return rrlab::io::committees_from_json(rrlab::io::read_json_file(arg), r);
  throw rrlab::ValidationError("unknown committee mode '" + m.committees + "'");
}

rrlab::RhoFamily make_rho(const std::string& spec) {
  const auto [kind, arg] = split_spec(spec);
  if (kind == "min") return rrlab::RhoFamily::min();
  if (kind == "offset") return rrlab::RhoFamily::offset(std::stoll(arg));
  if (kind == "table") return rrlab::RhoFamily::table(rrlab::io::rho_table_from_json(rrlab::io::read_json_file(arg)));
  throw rrlab::ValidationError("unknown rho '" + spec + "'");
}

// ---------------------------------------------------------------------------

struct GenOptions {
  std::size_t k = 2;
  rrlab::Coord n_max = 6;
  std::size_t points = 20;
  double density = 0.3;
  std::uint64_t seed = 1;
  std::string fixture;
  std::string out;
};

int cmd_gen(const GenOptions& o) {
  if (!o.fixture.empty()) {
    if (o.fixture != "fig2") throw rrlab::ValidationError("unknown fixture '" + o.fixture + "'");
    const auto ex = rrlab::committee_example();
    json j = rrlab::io::to_json(ex.graph);
    j["r"] = ex.committees.arity();
    j["committees"] = rrlab::io::committees_to_json(ex.committees);
    j["rule"] = {{"kind", "table"}, {"entries", rrlab::io::to_json(ex.table)}};
    j["boss"] = rrlab::io::to_json(ex.boss);
    json terminals = json::array();
    for (const auto& t : ex.terminals) terminals.push_back(rrlab::io::to_json(t));
    j["terminals"] = terminals;
    j["notes"] = ex.notes;
    emit(o.out, dump(j));
    return kOk;
  }
  std::mt19937_64 rng(o.seed);
  const auto d = rrlab::random_domain(o.k, o.n_max, o.points, rng);
  const auto g = rrlab::gen_random_downward(o.k, d, o.density, o.seed);
  emit(o.out, dump(rrlab::io::to_json(g)));
  return kOk;
}

struct EvalOptions {
  std::string graph;
  std::string mode = "shat";
  bool compare = false;
  ModelOptions model;
  std::string out;
};

int cmd_eval(const EvalOptions& o) {
  const json bundle = rrlab::io::read_json_file(o.graph);
  const auto g = rrlab::io::graph_from_json(bundle);
  rrlab::require_downward(g);
  const std::size_t r = arity(o.model, bundle);
  const auto rule = make_rule(o.model, r, bundle);
  const auto spec = make_committees(o.model, r, bundle);
  const auto rho = make_rho(o.model.rho);
  rrlab::EvalOptions eopts;
  eopts.threads = rrlab::thread_budget();

  const bool both = o.compare || o.mode == "both";
  if (!both) {
    if (o.mode == "shat") {
      emit(o.out, dump(rrlab::io::to_json(rrlab::eval_s_hat(g, rule, spec, eopts))));
    } else if (o.mode == "hrho") {
      emit(o.out, dump(rrlab::io::to_json(rrlab::eval_h_rho(g, rule, spec, rho, eopts))));
    } else {
      throw rrlab::ValidationError("--mode must be shat, hrho or both");
    }
    return kOk;
  }
  const auto s = rrlab::eval_s_hat(g, rule, spec, eopts);
  const auto h = rrlab::eval_h_rho(g, rule, spec, rho, eopts);
  json j = {{"shat", rrlab::io::to_json(s)}, {"hrho", rrlab::io::to_json(h)}};
  if (o.compare) {
    const auto report = rrlab::compare_evaluations(s, h, rho);
    json mismatches = json::array();
    for (const auto& m : report.mismatches) {
      mismatches.push_back({{"point", rrlab::io::to_json(m.point)}, {"reason", m.reason}});
    }
    j["compare"] = {{"checked", report.checked}, {"mismatches", mismatches}};
  }
  emit(o.out, dump(j));
  return kOk;
}

struct SearchOptions {
  std::size_t k = 2;
  std::size_t p = 2;
  rrlab::SearchBounds bounds;
  std::uint64_t seed = 1;
  double density = 0.3;
  std::string graph;
  ModelOptions model;
  std::string out;
};

int cmd_search(SearchOptions o) {
  json bundle;
  std::optional<rrlab::AmbientGraph> ambient;
  if (!o.graph.empty()) {
    bundle = rrlab::io::read_json_file(o.graph);
    auto g = rrlab::io::graph_from_json(bundle);
    rrlab::require_downward(g);
    ambient = rrlab::AmbientGraph::from_graph(std::move(g));
  } else {
    ambient = rrlab::AmbientGraph::random(o.density, o.seed);
  }
  const std::size_t r = arity(o.model, bundle);
  const auto rule = make_rule(o.model, r, bundle);
  const auto spec = make_committees(o.model, r, bundle);
  const auto rho = make_rho(o.model.rho);
  o.bounds.threads = rrlab::thread_budget();

  const auto report = rrlab::search_regular(*ambient, rule, spec, rho, o.k, o.p, o.bounds);
  json stats = {{"e_candidates", report.e_candidates}, {"domains_evaluated", report.domains_evaluated}};
  if (report.exhausted()) {
    json j = {{"exhausted", true},
              {"search", stats},
              {"bounds",
               {{"n_min", o.bounds.n_min},
                {"n_max", o.bounds.n_max},
                {"max_filler", o.bounds.max_filler},
                {"max_domains_per_e", o.bounds.max_domains_per_e}}}};
    emit(o.out, dump(j));
    return kExhausted;
  }
  json j = rrlab::io::to_json(*report.witness);
  j["search"] = stats;
  emit(o.out, dump(j));
  return kOk;
}

struct BuildOptions {
  std::string input;
  std::size_t t = 1;
  std::string rho = "min";
  std::string e;
  bool allow_unbounded = false;
  std::string out;
};

int cmd_build(const BuildOptions& o) {
  const json doc = rrlab::io::read_json_file(o.input);
  const json& values = doc.contains("values") ? doc.at("values") : doc;
  if (doc.contains("kind") && doc.at("kind") != "hrho") throw rrlab::ValidationError("build needs an h-rho evaluation");
  const auto h = rrlab::io::evaluation_from_json(values, rrlab::EvalKind::HRho);
  rrlab::CoordSet e;
  if (!o.e.empty()) {
    std::vector<rrlab::Coord> v;
    std::stringstream ss(o.e);
    for (std::string item; std::getline(ss, item, ',');) v.push_back(std::stoll(item));
    e = rrlab::CoordSet(v);
  } else if (doc.contains("E")) {
    e = rrlab::io::coordset_from_json(doc.at("E"));
  } else {
    throw rrlab::ValidationError("no E given: pass --E or a search certificate");
  }
  if (e.size() < 2) throw rrlab::ValidationError("E needs at least two elements");
  const std::size_t k = h.domain().dimension();
  const auto rho = make_rho(o.rho);

  // The stored values must be consistent with the chosen rho.
  for (const auto& x : h.domain()) {
    const auto& r = h.at(x);
    if (r.phi_empty && r.value != rho(h.domain(), x)) {
      throw rrlab::ValidationError("value at " + x.to_string() + " does not match rho '" + rho.name() + "'");
    }
    if (!r.phi_empty && r.value >= rrlab::max_norm(x)) {
      throw rrlab::ValidationError("value at " + x.to_string() + " is not below max although outputs were defined");
    }
  }
  rrlab::BuildOptions bopts;
  bopts.require_log_bound = !o.allow_unbounded;
  const auto inst = rrlab::build_instance(h, e, k, o.t, rho, bopts);
  emit(o.out, dump(rrlab::io::to_json(inst)));
  return kOk;
}

struct SolveOptions {
  std::string input;
  bool brute = false;
  std::size_t brute_cap = rrlab::kBruteCap;
  std::string out;
};

json solve_one(const json& doc, const SolveOptions& o) {
  const auto inst = rrlab::io::instance_from_json(doc);
  const auto result = o.brute ? rrlab::brute_solve(inst, o.brute_cap) : rrlab::structured_solve(inst);
  json j = rrlab::io::to_json(result);
  j["solver"] = o.brute ? "brute" : "structured";
  return j;
}

int cmd_solve(const SolveOptions& o) {
  if (std::filesystem::path(o.input).extension() == ".jsonl") {
    std::ifstream in(o.input);
    if (!in) throw std::runtime_error("cannot open " + o.input);
    std::string out;
    for (std::string line; std::getline(in, line);) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      out += solve_one(json::parse(line), o).dump() + "\n";
    }
    emit(o.out, out);
    return kOk;
  }
  emit(o.out, dump(solve_one(rrlab::io::read_json_file(o.input), o)));
  return kOk;
}

struct BenchOptions {
  std::size_t k = 2;
  std::size_t t = 1;
  std::vector<std::size_t> ps{4, 8, 16, 32};
  std::size_t reps = 3;
  std::uint64_t seed = 1;
  bool timing = false;
  std::string out;
  std::string plot;
};

int cmd_bench(const BenchOptions& o) {
  const auto gen = [&](std::size_t p, std::uint64_t seed) {
    return rrlab::layered_regular_instance(o.k, p, o.t, seed).instance;
  };
  const auto rows = rrlab::bench_scaling(gen, o.ps, o.t, o.k, o.reps, o.seed);
  std::ostringstream csv;
  csv << "p,rep,set_size,neg,small,big,solvable,structured_explored,budget,within_budget,brute_explored,brute_space,"
         "total_bits";
  if (o.timing) csv << ",structured_ms,brute_ms";
  csv << ",error\n";
  std::ostringstream dat;
  dat << "# p structured_explored budget brute_space\n";
  bool ok = true;
  for (const auto& row : rows) {
    csv << row.p << ',' << row.rep << ',' << row.set_size << ',' << row.neg << ',' << row.small << ',' << row.big << ','
        << (row.solvable ? 1 : 0) << ',' << row.structured_explored << ',' << row.budget << ','
        << (row.within_budget ? 1 : 0) << ',' << (row.brute_explored ? std::to_string(*row.brute_explored) : "") << ','
        << row.brute_space << ',' << row.total_bits;
    if (o.timing) csv << ',' << row.structured_ms << ',' << (row.brute_ms ? std::to_string(*row.brute_ms) : "");
    csv << ',' << row.error << '\n';
    dat << row.p << ' ' << row.structured_explored << ' ' << row.budget << ' ' << row.brute_space << '\n';
    ok = ok && row.within_budget && row.error.empty();
  }
  emit(o.out, csv.str());
  std::string plot = o.plot;
  if (plot.empty() && !o.out.empty() && o.out != "-") plot = o.out + ".dat";
  if (!plot.empty()) rrlab::io::write_file_atomic(plot, dat.str());
  return ok ? kOk : kValidation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rrlab: committee models on downward lattice graphs and displacement subset sums"};
  app.require_subcommand(1);

  const auto k_range = CLI::Range(std::size_t{2}, rrlab::kMaxDimension);

  GenOptions gen;
  auto* g = app.add_subcommand("gen", "Write a seeded random downward graph, or a built-in fixture");
  g->add_option("--k", gen.k, "Dimension k >= 2")->check(k_range)->capture_default_str();
  g->add_option("--n-max", gen.n_max, "Largest coordinate")->check(CLI::NonNegativeNumber)->capture_default_str();
  g->add_option("--points", gen.points, "Number of vertices")->capture_default_str();
  g->add_option("--density", gen.density, "Edge probability")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  g->add_option("--seed", gen.seed)->capture_default_str();
  g->add_option("--fixture", gen.fixture, "Built-in fixture (fig2)");
  g->add_option("--out", gen.out, "Output path (stdout if omitted)");

  EvalOptions ev;
  auto* e = app.add_subcommand("eval", "Evaluate s-hat and/or h-rho on a graph");
  e->add_option("graph", ev.graph, "Graph JSON")->required()->check(CLI::ExistingFile);
  e->add_option("--mode", ev.mode, "shat | hrho | both")->capture_default_str();
  e->add_flag("--compare", ev.compare, "Evaluate both and compare them pointwise");
  add_model_options(e, ev.model);
  e->add_option("--out", ev.out);

  SearchOptions se;
  auto* s = app.add_subcommand("search", "Bounded search for a capped regressively regular witness");
  s->add_option("--k", se.k)->check(k_range)->capture_default_str();
  s->add_option("--p", se.p, "|E| >= 2")->check(CLI::Range(std::size_t{2}, std::size_t{64}))->capture_default_str();
  s->add_option("--n-min", se.bounds.n_min)->check(CLI::NonNegativeNumber)->capture_default_str();
  s->add_option("--n-max", se.bounds.n_max)->check(CLI::NonNegativeNumber)->capture_default_str();
  s->add_option("--max-filler", se.bounds.max_filler)->capture_default_str();
  s->add_option("--max-domains", se.bounds.max_domains_per_e, "Candidate domains per E")->capture_default_str();
  s->add_option("--seed", se.seed, "Seed of the random ambient graph")->capture_default_str();
  s->add_option("--density", se.density, "Edge probability of the ambient graph")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  s->add_option("--graph", se.graph, "Use a graph file as the ambient graph")->check(CLI::ExistingFile);
  add_model_options(s, se.model);
  s->add_option("--out", se.out);

  BuildOptions bu;
  auto* b = app.add_subcommand("build", "Build a displacement subset-sum instance");
  b->add_option("input", bu.input, "Search certificate, or h-rho evaluation with --E")
      ->required()
      ->check(CLI::ExistingFile);
  b->add_option("--t", bu.t, "t >= 1")->check(CLI::Range(std::size_t{1}, std::size_t{64}))->capture_default_str();
  b->add_option("--rho", bu.rho)->capture_default_str();
  b->add_option("--E", bu.e, "Comma-separated E (overrides the certificate)");
  b->add_flag("--allow-unbounded", bu.allow_unbounded, "Do not require rho to be t-log bounded");
  b->add_option("--out", bu.out);

  SolveOptions so;
  auto* sv = app.add_subcommand("solve", "Solve a displacement instance (target 0)");
  sv->add_option("input", so.input, "Instance JSON, or .jsonl with one instance per line")
      ->required()
      ->check(CLI::ExistingFile);
  sv->add_flag("--brute", so.brute, "Use the exhaustive solver (needed for non-regular instances)");
  sv->add_option("--brute-cap", so.brute_cap)->capture_default_str();
  sv->add_option("--out", so.out);

  BenchOptions be;
  auto* bn = app.add_subcommand("bench", "Scaling table: structured vs brute-force subset counts");
  bn->add_option("--k", be.k)->check(k_range)->capture_default_str();
  bn->add_option("--t", be.t)->check(CLI::Range(std::size_t{1}, std::size_t{64}))->capture_default_str();
  bn->add_option("--p", be.ps, "Values of p")->delimiter(',')->check(CLI::Range(std::size_t{2}, std::size_t{4096}));
  bn->add_option("--reps", be.reps)->capture_default_str();
  bn->add_option("--seed", be.seed)->capture_default_str();
  bn->add_flag("--timing", be.timing, "Add wall-time columns (makes output run-dependent)");
  bn->add_option("--out", be.out, "CSV output (stdout if omitted)");
  bn->add_option("--plot", be.plot, "Plot data output (default: <out>.dat)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? kOk : kValidation;
  }

  try {
    if (*g) return cmd_gen(gen);
    if (*e) return cmd_eval(ev);
    if (*s) return cmd_search(se);
    if (*b) return cmd_build(bu);
    if (*sv) return cmd_solve(so);
    if (*bn) return cmd_bench(be);
  } catch (const rrlab::ContractViolation& ex) {
    std::cerr << "contract violation: " << ex.what() << "\n";
    return kContract;
  } catch (const rrlab::ValidationError& ex) {
    std::cerr << "validation failure: " << ex.what() << "\n";
    return kValidation;
  } catch (const nlohmann::json::exception& ex) {
    std::cerr << "validation failure: malformed JSON: " << ex.what() << "\n";
    return kValidation;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kFailure;
  }
  return kFailure;
}
