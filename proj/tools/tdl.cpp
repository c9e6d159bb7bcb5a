// Command-line front end. Exit status: 0 true/sat, 1 false/unsat, 2 usage or
// input errors, 3 resource caps and unknown answers.

#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

#include "tdl/folog.hpp"
#include "tdl/formula.hpp"
#include "tdl/kripke.hpp"
#include "tdl/mc.hpp"
#include "tdl/reductions.hpp"
#include "tdl/sat.hpp"

namespace fs = std::filesystem;
using namespace tdl;

namespace {

constexpr int kTrue = 0, kFalse = 1, kUsage = 2, kResource = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write " + path.string());
  out << text;
}

// Writes to the file if given, otherwise to stdout.
void emit(const std::string& out, const std::string& text) {
  if (out.empty()) std::cout << text;
  else write_file(out, text);
}

std::string formula_text(const std::string& inline_text, const std::string& file) {
  if (!inline_text.empty() && !file.empty())
    throw UsageError("give --formula or --formula-file, not both");
  if (!file.empty()) return read_file(file);
  if (inline_text.empty()) throw UsageError("a formula is required");
  return inline_text;
}

long long millis_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::steady_clock::now() - t0)
      .count();
}

void verdict(const std::string& v, const std::string& strategy, long long ms,
             const std::string& extra = "") {
  std::cout << "verdict=" << v << " strategy=" << strategy << " millis=" << ms
            << extra << '\n';
}

// ------------------------------------------------------------------ check

struct Instance {
  std::string path;
  std::string formula_file;
};

std::vector<Instance> collect_instances(const std::vector<std::string>& paths) {
  std::vector<Instance> out;
  auto add = [&](const fs::path& p) {
    fs::path f = p;
    f.replace_extension(".formula");
    out.push_back({p.string(), fs::exists(f) ? f.string() : ""});
  };
  for (const auto& s : paths) {
    fs::path p(s);
    if (fs::is_directory(p)) {
      std::vector<fs::path> files;
      for (const auto& e : fs::directory_iterator(p))
        if (e.path().extension() == ".kripke") files.push_back(e.path());
      std::sort(files.begin(), files.end());
      for (const auto& f : files) add(f);
    } else if (p.extension() == ".formula") {
      continue;  // companion of a .kripke file
    } else {
      add(p);
    }
  }
  return out;
}

struct CheckOutcome {
  int status = kTrue;
  std::string line;
  std::string error;
};

CheckOutcome check_one(const Instance& inst, const std::string& formula,
                       const std::string& strategy, int arity,
                       const EvalConfig& cfg) {
  CheckOutcome o;
  auto t0 = std::chrono::steady_clock::now();
  try {
    auto loaded = load_kripke(read_file(inst.path));
    std::string text = formula;
    if (text.empty()) {
      if (inst.formula_file.empty())
        throw UsageError(inst.path + ": no --formula and no companion .formula file");
      text = read_file(inst.formula_file);
    }
    Formula f = parse(text);
    const auto& k = loaded.structure;
    const auto& t = loaded.team;
    bool value;
    std::string used = strategy;
    if (strategy == "auto") {
      auto r = check(k, t, f, cfg);
      value = r.value;
      used = r.strategy;
    } else if (strategy == "eval") {
      value = eval(k, t, f, cfg);
    } else if (strategy == "poormans") {
      value = eval_poormans(k, t, f);
    } else if (strategy == "vee_bounded") {
      value = eval_vee_bounded(k, t, f, arity);
    } else if (strategy == "nor_unary") {
      value = eval_nor_unary(k, t, f);
    } else if (strategy == "few_deps") {
      value = eval_few_deps(k, t, f, arity);
    } else {
      throw UsageError("unknown strategy " + strategy);
    }
    o.status = value ? kTrue : kFalse;
    std::ostringstream line;
    line << "verdict=" << (value ? "true" : "false") << " strategy=" << used
         << " millis=" << millis_since(t0);
    o.line = line.str();
  } catch (const ResourceError& e) {
    o.status = kResource;
    o.error = e.what();
  } catch (const RefusalError& e) {
    o.status = kResource;
    o.error = e.what();
  } catch (const std::exception& e) {
    o.status = kUsage;
    o.error = e.what();
  }
  if (o.line.empty()) {
    std::ostringstream line;
    line << "verdict=unknown strategy=" << strategy
         << " millis=" << millis_since(t0);
    o.line = line.str();
  }
  return o;
}

int run_check(const std::vector<std::string>& paths, const std::string& inline_f,
              const std::string& file_f, const std::string& strategy, int arity,
              int jobs, const EvalConfig& cfg) {
  if (!inline_f.empty() && !file_f.empty())
    throw UsageError("give --formula or --formula-file, not both");
  std::string formula = file_f.empty() ? inline_f : read_file(file_f);
  auto instances = collect_instances(paths);
  if (instances.empty()) throw UsageError("no instances given");
  std::vector<CheckOutcome> results(instances.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < instances.size();)
      results[i] = check_one(instances[i], formula, strategy, arity, cfg);
  };
  int n = std::max(1, std::min<int>(jobs, static_cast<int>(instances.size())));
  std::vector<std::thread> pool;
  for (int i = 1; i < n; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  int status = kTrue;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    std::cout << r.line;
    if (instances.size() > 1) std::cout << " instance=" << instances[i].path;
    std::cout << '\n';
    if (!r.error.empty()) std::cerr << instances[i].path << ": " << r.error << '\n';
    status = std::max(status, r.status);
  }
  return status;
}

// -------------------------------------------------------------------- sat

int run_sat(const std::string& inline_f, const std::string& file_f,
            int max_worlds, const std::string& witness) {
  auto t0 = std::chrono::steady_clock::now();
  Formula f = parse(formula_text(inline_f, file_f));
  SatConfig cfg;
  cfg.max_worlds = max_worlds;
  SatOutcome r = sat(f, cfg);
  std::string extra;
  if (r.answer == SatAnswer::Sat && r.witness && !witness.empty()) {
    const auto& w = *r.witness;
    write_file(witness, store_kripke(w.structure, w.structure.singleton(w.world)));
    extra = " witness=" + witness;
  }
  const char* v = r.answer == SatAnswer::Sat     ? "sat"
                  : r.answer == SatAnswer::Unsat ? "unsat"
                                                 : "unknown";
  verdict(v, r.method, millis_since(t0), extra);
  if (r.answer == SatAnswer::Sat) return kTrue;
  if (r.answer == SatAnswer::Unsat) return kFalse;
  return kResource;
}

// --------------------------------------------------------------- classify

int run_classify(const std::string& ops, const std::string& arity,
                 const std::string& problem) {
  FragmentSignature sig;
  std::stringstream in(ops);
  for (std::string op; std::getline(in, op, ',');) {
    if (op.empty()) continue;
    auto k = op_kind_from_name(op);
    if (!k) throw UsageError("unknown operator " + op);
    sig.ops |= *k;
  }
  if (arity != "unbounded") {
    try {
      sig.arity = std::stoi(arity);
    } catch (const std::exception&) {
      throw UsageError("--arity takes an integer or 'unbounded'");
    }
    if (*sig.arity < 0) throw UsageError("--arity must be non-negative");
  }
  Problem p;
  if (problem == "sat") p = Problem::Sat;
  else if (problem == "mc") p = Problem::Mc;
  else throw UsageError("--problem is sat or mc");
  auto v = classify(sig, p);
  std::cout << v.text() << '\n';
  if (!v.citation.empty()) std::cerr << v.citation << '\n';
  return kTrue;
}

// -------------------------------------------------------------------- gen

void write_mc(const McInstance& m, const std::string& dir) {
  if (dir.empty()) throw UsageError("--out is required");
  fs::path d(dir);
  write_file(d / "instance.kripke", store_kripke(m.structure, m.team));
  write_file(d / "instance.formula", render(m.formula) + "\n");
}

Formula random_mdl(std::mt19937& rng, int props, int depth) {
  std::uniform_int_distribution<int> pick(0, depth == 0 ? 2 : 8), prop(1, props);
  std::string p = "p" + std::to_string(prop(rng));
  switch (pick(rng)) {
    case 0: return Formula::atom(p);
    case 1: return Formula::neg_atom(p);
    case 2: return Formula::dep({}, p);
    case 3: return Formula::conj(random_mdl(rng, props, depth - 1),
                                 random_mdl(rng, props, depth - 1));
    case 4: return Formula::split_or(random_mdl(rng, props, depth - 1),
                                     random_mdl(rng, props, depth - 1));
    case 5: return Formula::classical_or(random_mdl(rng, props, depth - 1),
                                         random_mdl(rng, props, depth - 1));
    case 6: return Formula::box(random_mdl(rng, props, depth - 1));
    case 7: return Formula::dia(random_mdl(rng, props, depth - 1));
    default: {
      std::string q = "p" + std::to_string(prop(rng));
      return Formula::dep({q}, p);
    }
  }
}

struct GenOptions {
  std::string variant, cnf, qbf, dqbf, qcsp, tiles, formula, formula_file, out,
      kind = "cnf", border;
  int m = 1, n = 1, vars = 3, clauses = 4, depth = 3, worlds = 3;
  unsigned seed = 1;
};

int run_gen(const std::string& what, const GenOptions& o) {
  if (what == "3sat-mc") {
    CnfInstance c = parse_dimacs(read_file(o.cnf));
    McInstance m;
    if (o.variant == "wedge-vee") m = gen_mc_wedge_vee(c);
    else if (o.variant == "diamond") m = gen_mc_diamond(c);
    else if (o.variant == "box-vee") m = gen_mc_box_vee(c);
    else if (o.variant == "diamond-wedge") m = gen_mc_diamond_wedge(c);
    else if (o.variant == "diamond-vee") m = gen_mc_diamond_vee(c);
    else if (o.variant == "vee-nor") m = gen_mc_vee_nor(c);
    else throw UsageError("unknown --variant " + o.variant);
    write_mc(m, o.out);
  } else if (what == "qbf-mc") {
    QbfInstance q = parse_qdimacs(read_file(o.qbf));
    if (o.variant == "sor") write_mc(gen_mc_midl_qbf_sor(q), o.out);
    else if (o.variant == "diamond") write_mc(gen_mc_midl_qbf_diamond(q), o.out);
    else throw UsageError("unknown --variant " + o.variant);
  } else if (what == "taut-mc") {
    write_mc(gen_mc_pidl_taut(parse(formula_text(o.formula, o.formula_file))), o.out);
  } else if (what == "sat-dqbf") {
    emit(o.out, render(gen_sat_dqbf(parse_dqdimacs(read_file(o.dqbf)))) + "\n");
  } else if (what == "sat-qbf3") {
    emit(o.out, render(gen_sat_qbf3(parse_qdimacs(read_file(o.qbf)))) + "\n");
  } else if (what == "sat-qcsp") {
    emit(o.out, render(gen_sat_qcsp(parse_qcsp(read_file(o.qcsp)))) + "\n");
  } else if (what == "grid") {
    emit(o.out, store_fo(gen_grid(o.m, o.n)));
  } else if (what == "phi-grid") {
    emit(o.out, render(gen_phi_grid()) + "\n");
  } else if (what == "phi-infgrid") {
    emit(o.out, render(gen_phi_infgrid()) + "\n");
  } else if (what == "phi-tiling") {
    TileSet ts = load_tiles(read_file(o.tiles));
    FoFormula f = gen_phi_tiling(ts);
    std::string c = o.border.empty() ? ts.border.value_or("") : o.border;
    if (!c.empty()) f = FoFormula::conj(f, gen_phi_border(ts, c));
    emit(o.out, render(f) + "\n");
  } else if (what == "random") {
    std::mt19937 rng(o.seed);
    if (o.kind == "cnf") {
      CnfInstance c{o.vars, {}};
      for (int i = 0; i < o.clauses; ++i) {
        std::uniform_int_distribution<int> var(1, o.vars), sign(0, 1), len(1, 3);
        Clause cl;
        for (int l = len(rng); l > 0; --l) cl.push_back(sign(rng) ? var(rng) : -var(rng));
        c.clauses.push_back(cl);
      }
      emit(o.out, write_dimacs(c));
    } else if (o.kind == "qbf") {
      QbfInstance q;
      q.num_vars = o.vars;
      for (int v = 1; v <= o.vars; ++v)
        q.prefix.push_back({v % 2 ? Quant::Forall : Quant::Exists, {v}});
      std::uniform_int_distribution<int> var(1, o.vars), sign(0, 1), len(1, 3);
      for (int i = 0; i < o.clauses; ++i) {
        Clause cl;
        for (int l = len(rng); l > 0; --l) cl.push_back(sign(rng) ? var(rng) : -var(rng));
        q.clauses.push_back(cl);
      }
      emit(o.out, write_qdimacs(q));
    } else if (o.kind == "mdl") {
      emit(o.out, render(random_mdl(rng, o.vars, o.depth)) + "\n");
    } else if (o.kind == "kripke") {
      KripkeStructure k;
      for (int w = 0; w < o.worlds; ++w) k.add_world("w" + std::to_string(w));
      for (int p = 1; p <= o.vars; ++p) k.declare_prop("p" + std::to_string(p));
      std::bernoulli_distribution coin(0.5);
      Team t(o.worlds);
      for (int w = 0; w < o.worlds; ++w) {
        for (int v = 0; v < o.worlds; ++v)
          if (coin(rng)) k.add_edge(w, v);
        for (int p = 1; p <= o.vars; ++p)
          if (coin(rng)) k.set_label(w, "p" + std::to_string(p));
        if (coin(rng)) t.set(w);
      }
      emit(o.out, store_kripke(k, t));
    } else {
      throw UsageError("--kind is cnf, qbf, mdl or kripke");
    }
  } else {
    throw UsageError("unknown generator " + what);
  }
  return kTrue;
}

// -------------------------------------------------------------- translate

int run_translate(const std::string& from, const std::string& to,
                  const std::string& inline_f, const std::string& file_f,
                  const std::string& structure, const std::string& out) {
  std::string text = formula_text(inline_f, file_f);
  if (from == "mdl" && to == "d2") {
    if (structure.empty()) throw UsageError("--structure is required");
    auto loaded = load_kripke(read_file(structure));
    auto tr = translate_mdl_to_d2(parse(text), loaded.structure, loaded.team);
    emit(out, store_fo(tr.structure, tr.team) + "formula: " + render(tr.formula) + "\n");
  } else if (from == "d2" && to == "if2") {
    emit(out, render(translate_d2_to_if2(parse_fo(text))) + "\n");
  } else if (from == "if2" && to == "d3") {
    emit(out, render(translate_if2_to_d3(parse_fo(text))) + "\n");
  } else if (from == "d" && to == "eso") {
    auto tr = translate_d_to_eso(parse_fo(text));
    std::ostringstream s;
    s << "team: " << tr.team_relation << '(';
    for (std::size_t i = 0; i < tr.team_vars.size(); ++i)
      s << (i ? "," : "") << tr.team_vars[i];
    s << ")\nexists:";
    for (const auto& [r, a] : tr.relations) s << ' ' << r << '/' << a;
    s << "\nmatrix: " << render(tr.matrix) << '\n';
    emit(out, s.str());
  } else {
    throw UsageError("supported translations: mdl->d2, d2->if2, if2->d3, d->eso");
  }
  return kTrue;
}

// ----------------------------------------------------------------- oracle

int run_oracle(const std::string& problem, const std::string& file,
               const std::string& inline_f, const std::string& file_f,
               const std::string& structure, const std::string& tiles) {
  auto t0 = std::chrono::steady_clock::now();
  bool v;
  bool sat_style = true;
  std::string name;
  if (problem == "3sat") {
    v = oracle_sat3(parse_dimacs(read_file(file)));
    name = "oracle_sat3";
  } else if (problem == "qbf") {
    v = oracle_qbf(parse_qdimacs(read_file(file)));
    sat_style = false;
    name = "oracle_qbf";
  } else if (problem == "dqbf") {
    v = oracle_dqbf(parse_dqdimacs(read_file(file)));
    sat_style = false;
    name = "oracle_dqbf";
  } else if (problem == "qcsp") {
    v = oracle_qcsp(parse_qcsp(read_file(file)));
    sat_style = false;
    name = "oracle_qcsp";
  } else if (problem == "taut") {
    v = oracle_taut(parse(formula_text(inline_f, file_f)));
    sat_style = false;
    name = "oracle_taut";
  } else if (problem == "fo") {
    if (structure.empty()) throw UsageError("--structure is required");
    auto loaded = load_fo(read_file(structure));
    FoFormula f = parse_fo(formula_text(inline_f, file_f));
    v = fo_eval(loaded.structure, loaded.team.value_or(FoTeam::unit()), f);
    sat_style = false;
    name = "fo_eval";
  } else if (problem == "tiling") {
    if (structure.empty() || tiles.empty())
      throw UsageError("--structure and --tiles are required");
    auto a = load_fo(read_file(structure)).structure;
    TileSet ts = load_tiles(read_file(tiles));
    v = tile_bruteforce(a, ts, ts.border).has_value();
    name = "tile_bruteforce";
  } else {
    throw UsageError("unknown problem " + problem);
  }
  verdict(sat_style ? (v ? "sat" : "unsat") : (v ? "true" : "false"), name,
          millis_since(t0));
  return v ? kTrue : kFalse;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Model checking and satisfiability for modal team logics"};
  app.require_subcommand(1);

  EvalConfig cfg;
  std::vector<std::string> check_paths;
  std::string formula, formula_file, strategy = "auto";
  int arity = 1, jobs = 1;
  auto* check_cmd = app.add_subcommand("check", "Model check structure files");
  check_cmd->add_option("instances", check_paths, "Kripke files or directories")
      ->required();
  check_cmd->add_option("--formula", formula, "Formula text");
  check_cmd->add_option("--formula-file", formula_file, "File holding the formula");
  check_cmd->add_option("--strategy", strategy,
                        "auto, eval, poormans, vee_bounded, nor_unary, few_deps");
  check_cmd->add_option("--arity", arity, "Dependence arity bound for few_deps/vee_bounded");
  check_cmd->add_option("--jobs", jobs, "Instances checked in parallel");
  check_cmd->add_option("--split-cap", cfg.split_cap, "Largest team split by | or ->");
  check_cmd->add_option("--diamond-cap", cfg.diamond_cap, "Largest image searched by <>");

  int max_worlds = 8;
  std::string witness;
  auto* sat_cmd = app.add_subcommand("sat", "Decide satisfiability");
  sat_cmd->add_option("--formula", formula, "Formula text");
  sat_cmd->add_option("--formula-file", formula_file, "File holding the formula");
  sat_cmd->add_option("--max-worlds", max_worlds, "Bound for the model search");
  sat_cmd->add_option("--witness", witness, "Write a satisfying structure here");

  std::string ops, arity_text = "unbounded", problem = "sat";
  auto* cls_cmd = app.add_subcommand("classify", "Complexity of a fragment");
  cls_cmd->add_option("--ops", ops, "Comma-separated operators")->required();
  cls_cmd->add_option("--arity", arity_text, "Integer bound or 'unbounded'");
  cls_cmd->add_option("--problem", problem, "sat or mc");

  GenOptions g;
  std::string gen_what;
  auto* gen_cmd = app.add_subcommand("gen", "Generate instances");
  gen_cmd->add_option("what", gen_what,
                      "3sat-mc, qbf-mc, taut-mc, sat-dqbf, sat-qbf3, sat-qcsp, grid, "
                      "phi-grid, phi-infgrid, phi-tiling, random")
      ->required();
  gen_cmd->add_option("--variant", g.variant, "Reduction variant");
  gen_cmd->add_option("--cnf", g.cnf, "DIMACS input");
  gen_cmd->add_option("--qbf", g.qbf, "QDIMACS input");
  gen_cmd->add_option("--dqbf", g.dqbf, "DQDIMACS input");
  gen_cmd->add_option("--qcsp", g.qcsp, "QDIMACS input with 1-in-3 clauses");
  gen_cmd->add_option("--tiles", g.tiles, "Tile set file");
  gen_cmd->add_option("--border", g.border, "Border color");
  gen_cmd->add_option("--formula", g.formula, "Formula text");
  gen_cmd->add_option("--formula-file", g.formula_file, "File holding the formula");
  gen_cmd->add_option("--out", g.out, "Output file or directory");
  gen_cmd->add_option("-m", g.m, "Grid width");
  gen_cmd->add_option("-n", g.n, "Grid height");
  gen_cmd->add_option("--seed", g.seed, "Random seed");
  gen_cmd->add_option("--kind", g.kind, "cnf, qbf, mdl or kripke");
  gen_cmd->add_option("--vars", g.vars, "Variables or propositions");
  gen_cmd->add_option("--clauses", g.clauses, "Clauses");
  gen_cmd->add_option("--depth", g.depth, "Formula depth");
  gen_cmd->add_option("--worlds", g.worlds, "Worlds");

  std::string from, to, structure, out;
  auto* tr_cmd = app.add_subcommand("translate", "Translate between logics");
  tr_cmd->add_option("--from", from, "mdl, d2, if2 or d")->required();
  tr_cmd->add_option("--to", to, "d2, if2, d3 or eso")->required();
  tr_cmd->add_option("--formula", formula, "Formula text");
  tr_cmd->add_option("--formula-file", formula_file, "File holding the formula");
  tr_cmd->add_option("--structure", structure, "Kripke file for mdl->d2");
  tr_cmd->add_option("--out", out, "Output file");

  std::string oracle_problem, oracle_file, tiles;
  auto* or_cmd = app.add_subcommand("oracle", "Brute-force reference solvers");
  or_cmd->add_option("problem", oracle_problem,
                     "3sat, qbf, dqbf, qcsp, taut, fo or tiling")
      ->required();
  or_cmd->add_option("file", oracle_file, "Instance file");
  or_cmd->add_option("--formula", formula, "Formula text");
  or_cmd->add_option("--formula-file", formula_file, "File holding the formula");
  or_cmd->add_option("--structure", structure, "First-order structure file");
  or_cmd->add_option("--tiles", tiles, "Tile set file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*check_cmd)
      return run_check(check_paths, formula, formula_file, strategy, arity, jobs, cfg);
    if (*sat_cmd) return run_sat(formula, formula_file, max_worlds, witness);
    if (*cls_cmd) return run_classify(ops, arity_text, problem);
    if (*gen_cmd) return run_gen(gen_what, g);
    if (*tr_cmd) return run_translate(from, to, formula, formula_file, structure, out);
    if (*or_cmd)
      return run_oracle(oracle_problem, oracle_file, formula, formula_file, structure, tiles);
  } catch (const ResourceError& e) {
    std::cerr << "resource limit: " << e.what() << '\n';
    verdict("unknown", "refused", 0);
    return kResource;
  } catch (const RefusalError& e) {
    std::cerr << "refused: " << e.what() << '\n';
    verdict("unknown", "refused", 0);
    return kResource;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
