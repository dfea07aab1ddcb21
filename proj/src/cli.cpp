#include "confik/cli.hpp"

#include "confik/dimacs.hpp"
#include "confik/error.hpp"
#include "confik/feature_model.hpp"
#include "confik/osd.hpp"
#include "confik/reasoning.hpp"
#include "confik/service.hpp"
#include "confik/session.hpp"
#include "confik/simulate.hpp"
#include "confik/synth.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <ostream>
#include <sstream>

namespace confik {

namespace {

constexpr std::uint64_t kProductLimit = 1'000'000;

struct Input {
  std::string name; // file stem
  std::optional<FeatureModel> model;
  ClauseSet cs;
};

std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error(ErrorKind::SemanticError, "cannot read '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

bool looks_like_dimacs(const std::string &path, const std::string &text) {
  std::string ext = std::filesystem::path(path).extension().string();
  if (ext == ".cnf" || ext == ".dimacs")
    return true;
  std::size_t start = text.find_first_not_of(" \t\r\n");
  return start != std::string::npos &&
         (text.compare(start, 5, "p cnf") == 0 || text.compare(start, 2, "c ") == 0);
}

Input load(const std::string &path) {
  std::string text = read_file(path);
  Input in{std::filesystem::path(path).stem().string(), std::nullopt, ClauseSet{}};
  if (looks_like_dimacs(path, text)) {
    in.cs = read_dimacs(text);
  } else {
    in.model = parse_model(text);
    in.cs = to_cnf(in.model->vars(), translate(*in.model));
  }
  return in;
}

std::string names(const VarSet &set, const VarTable &vars) {
  if (set.empty())
    return "(none)";
  std::string out;
  for (VarId v : set)
    out += (out.empty() ? "" : " ") + vars.name(v);
  return out;
}

std::pair<std::string, std::string> split_assignment(const std::string &item) {
  std::size_t eq = item.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == item.size())
    throw Error(ErrorKind::Usage, "expected NAME=VALUE, got '" + item + "'");
  return {item.substr(0, eq), item.substr(eq + 1)};
}

bool parse_bool(const std::string &text) {
  if (text == "1" || text == "true")
    return true;
  if (text == "0" || text == "false")
    return false;
  throw Error(ErrorKind::Usage, "expected a truth value, got '" + text + "'");
}

Session decided_session(const ClauseSet &cs, const std::vector<std::string> &decisions) {
  Session s = new_session(cs);
  for (const std::string &item : decisions) {
    auto [name, value] = split_assignment(item);
    s = apply_decision(s, cs.vars().lookup(name), parse_bool(value));
  }
  return s;
}

void print_session(std::ostream &out, const Session &s) {
  const VarTable &vars = s.base().vars();
  std::size_t width = 0;
  for (VarId v : s.user_vars())
    width = std::max(width, vars.name(v).size());
  for (VarId v : s.user_vars()) {
    std::string name = vars.name(v);
    name.resize(width, ' ');
    out << name << "  " << to_string(s.status(v));
    if (s.highlight().count(v))
      out << "  *";
    out << "\n";
  }
}

std::string format_tuple(const OsdProblem &p, const Tuple &t) {
  std::string out;
  for (std::size_t i = 0; i < t.size(); ++i)
    out += (i ? " " : "") + p.names()[i] + "=" + std::to_string(t[i]);
  return out;
}

void cmd_check(std::ostream &out, const std::string &file) {
  Input in = load(file);
  out << "features: " << in.cs.vars().user_count() << "\n";
  out << "clauses: " << in.cs.clauses().size() << "\n";
  bool sat = solve(in.cs).has_value();
  out << "satisfiable: " << (sat ? "yes" : "no") << "\n";
  auto products = count_models(in.cs, kProductLimit);
  out << "products: " << (products ? std::to_string(*products) : "> " + std::to_string(kProductLimit))
      << "\n";
}

void cmd_dispensable(std::ostream &out, const std::string &file,
                     const std::vector<std::string> &decisions) {
  Input in = load(file);
  Session s = decided_session(in.cs, decisions);
  DispensabilityReport r = dispensable_vars(s.current());
  const VarTable &vars = in.cs.vars();
  VarSet user, auto_false;
  for (const Decision &d : s.decisions())
    if (d.origin == Origin::User)
      user.insert(d.var);
  for (VarId v : r.dispensable)
    if (!r.forced_false.count(v))
      auto_false.insert(v);
  VarSet forced_true, forced_false;
  for (VarId v : r.forced_true)
    if (!user.count(v))
      forced_true.insert(v);
  for (VarId v : r.forced_false)
    if (!user.count(v))
      forced_false.insert(v);
  out << "forced-true: " << names(forced_true, vars) << "\n";
  out << "forced-false: " << names(forced_false, vars) << "\n";
  out << "auto-false: " << names(auto_false, vars) << "\n";
  out << "needs-attention: " << names(r.needs_attention, vars) << "\n";
}

void cmd_minmodels(std::ostream &out, const std::string &file,
                   const std::vector<std::string> &decisions) {
  Input in = load(file);
  Session s = decided_session(in.cs, decisions);
  MinimalModelSet mm = enumerate_minimal_models(s.current());
  for (const VarSet &m : mm.models)
    out << format_set(m, in.cs.vars()) << "\n";
  out << "count: " << mm.models.size() << "\n";
}

void cmd_complete(std::ostream &out, const std::string &file,
                  const std::vector<std::string> &decisions, const std::string &mode) {
  Input in = load(file);
  Session s = decided_session(in.cs, decisions);
  s = mode == "blind" ? complete_blind(s) : shopping_principle(s);
  print_session(out, s);
  out << "complete: " << (is_complete(s) ? "yes" : "no") << "\n";
}

struct SimulateArgs {
  std::vector<std::string> files;
  std::vector<std::size_t> synthetic;
  std::size_t runs = 1000;
  std::uint64_t seed = 1;
  std::optional<std::uint64_t> model_seed;
  unsigned threads = 0;
  std::string csv;
};

void cmd_simulate(std::ostream &out, const SimulateArgs &a) {
  if (a.files.empty() && a.synthetic.empty())
    throw Error(ErrorKind::Usage, "nothing to simulate: give model files or --synthetic");
  std::vector<std::pair<std::string, ClauseSet>> inputs;
  for (const std::string &f : a.files) {
    Input in = load(f);
    inputs.emplace_back(in.name, std::move(in.cs));
  }
  std::uint64_t model_seed = a.model_seed.value_or(a.seed);
  for (std::size_t i = 0; i < a.synthetic.size(); ++i) {
    FeatureModel fm = generate_model(a.synthetic[i], derive_seed(model_seed, i));
    inputs.emplace_back("synth" + std::to_string(i) + "-" + std::to_string(a.synthetic[i]),
                        to_cnf(fm.vars(), translate(fm)));
  }
  std::vector<TableRow> rows;
  for (auto &[name, cs] : inputs)
    rows.push_back({name, cs.vars().user_count(), cs.clauses().size(),
                    simulate_manual(cs, a.runs, a.seed, a.threads)});
  out << format_table(rows);
  for (const TableRow &r : rows)
    if (r.stats.aborted_runs)
      out << r.name << ": " << r.stats.aborted_runs << " of " << r.stats.runs
          << " runs aborted (more than " << kMinimalModelGuard << " minimal models)\n";
  if (!a.csv.empty()) {
    std::ofstream csv(a.csv, std::ios::binary);
    if (!csv)
      throw Error(ErrorKind::SemanticError, "cannot write '" + a.csv + "'");
    csv << csv_header();
    for (const TableRow &r : rows)
      csv << csv_row(r);
  }
}

void cmd_osd(std::ostream &out, const std::string &file, const std::vector<std::string> &refine) {
  OsdProblem p = parse_osd(read_file(file));
  std::vector<Refinement> refinements;
  for (const std::string &item : refine) {
    auto [name, value] = split_assignment(item);
    auto index = p.index_of(name);
    if (!index)
      throw Error(ErrorKind::UnknownVariable, "unknown variable '" + name + "'");
    try {
      refinements.push_back({*index, std::stoll(value)});
    } catch (const std::exception &) {
      throw Error(ErrorKind::Usage, "expected an integer, got '" + value + "'");
    }
  }
  std::vector<Tuple> all = solutions(p, refinements);
  std::vector<Tuple> best = optimal_solutions(p, refinements);
  out << "solutions: " << all.size() << "\n";
  out << "optimal: " << best.size() << "\n";
  for (const Tuple &t : best)
    out << "  " << format_tuple(p, t) << "\n";
  if (best.empty())
    return;
  ValueClassification vc = classify_values(p, refinements);
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < p.domains()[i].size(); ++j)
      out << p.names()[i] << "=" << p.domains()[i][j] << ": " << to_string(vc.classes[i][j])
          << "\n";
}

int exit_code(const Error &e) { return e.kind() == ErrorKind::Usage ? 1 : 2; }

} // namespace

int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"Interactive configuration with minimal-model reasoning"};
  app.name("confik");
  app.require_subcommand(1);

  std::string file;
  std::vector<std::string> decisions;

  auto *check = app.add_subcommand("check", "Size, satisfiability and product count of a model");
  check->add_option("file", file, "Feature model (.fm) or DIMACS (.cnf)")->required();

  auto *dispensable = app.add_subcommand("dispensable", "Forced and dispensable variables");
  dispensable->add_option("file", file)->required();
  dispensable->add_option("--decide", decisions, "User decision NAME=0|1, repeatable");

  auto *minmodels = app.add_subcommand("minmodels", "List the minimal models");
  minmodels->add_option("file", file)->required();
  minmodels->add_option("--decide", decisions, "User decision NAME=0|1, repeatable");

  std::string mode = "shopping";
  auto *complete = app.add_subcommand("complete", "Finish a configuration and print every status");
  complete->add_option("file", file)->required();
  complete->add_option("--decide", decisions, "User decision NAME=0|1, repeatable");
  complete->add_option("--mode", mode, "shopping: auto-false dispensable variables; blind: any model")
      ->check(CLI::IsMember({"shopping", "blind"}));

  SimulateArgs sim;
  auto *simulate = app.add_subcommand("simulate", "Random manual configuration runs");
  simulate->add_option("files", sim.files, "Models to simulate");
  simulate->add_option("--synthetic", sim.synthetic, "Also simulate a generated model of N features");
  simulate->add_option("--runs", sim.runs, "Runs per model")->check(CLI::PositiveNumber);
  simulate->add_option("--seed", sim.seed, "Seed of the runs");
  simulate->add_option("--model-seed", sim.model_seed, "Seed of the generated models (default: --seed)");
  simulate->add_option("--threads", sim.threads, "Worker threads (0: all cores)");
  simulate->add_option("--csv", sim.csv, "Also write the table as CSV");

  std::vector<std::string> refine;
  auto *osd = app.add_subcommand("osd", "Finite-domain problems with a preference");
  osd->require_subcommand(1);
  auto *classify = osd->add_subcommand("classify", "Optimal solutions and value classification");
  classify->add_option("file", file, "Problem in the OSD text format")->required();
  classify->add_option("--refine", refine, "Fix NAME=VALUE, repeatable");

  std::size_t features = 20;
  std::uint64_t gen_seed = 1;
  auto *generate = app.add_subcommand("generate", "Print a random feature model");
  generate->add_option("--features", features)->check(CLI::PositiveNumber);
  generate->add_option("--seed", gen_seed);

  auto *dimacs = app.add_subcommand("dimacs", "Print the CNF of a model in DIMACS format");
  dimacs->add_option("file", file)->required();

  ServeOptions serve_opts;
  std::string serve_model;
  auto *serve_cmd = app.add_subcommand("serve", "HTTP/JSON configuration service");
  serve_cmd->add_option("--host", serve_opts.host);
  serve_cmd->add_option("--port", serve_opts.port)->check(CLI::Range(0, 65535));
  serve_cmd->add_option("--model", serve_model, "Default model for new sessions");
  serve_cmd->add_option("--static", serve_opts.static_dir, "Directory served under /");
  serve_cmd->add_option("--snapshot", serve_opts.snapshot_path, "Sessions dump written on shutdown");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (check->parsed()) {
      cmd_check(out, file);
    } else if (dispensable->parsed()) {
      cmd_dispensable(out, file, decisions);
    } else if (minmodels->parsed()) {
      cmd_minmodels(out, file, decisions);
    } else if (complete->parsed()) {
      cmd_complete(out, file, decisions, mode);
    } else if (simulate->parsed()) {
      cmd_simulate(out, sim);
    } else if (classify->parsed()) {
      cmd_osd(out, file, refine);
    } else if (generate->parsed()) {
      out << print_model(generate_model(features, gen_seed));
    } else if (dimacs->parsed()) {
      out << write_dimacs(load(file).cs);
    } else if (serve_cmd->parsed()) {
      if (!serve_model.empty()) {
        serve_opts.model_text = read_file(serve_model);
        serve_opts.model_name = std::filesystem::path(serve_model).stem().string();
        parse_model(serve_opts.model_text); // reject a broken default up front
      }
      return serve(serve_opts, err);
    }
  } catch (const Error &e) {
    err << "error: " << e.what() << "\n";
    return exit_code(e);
  }
  return 0;
}

} // namespace confik
