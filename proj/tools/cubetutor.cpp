#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "cubetutor/bias.hpp"
#include "cubetutor/macros.hpp"
#include "cubetutor/replay.hpp"
#include "cubetutor/service.hpp"
#include "cubetutor/value_table.hpp"

using namespace cubetutor;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

PartialGoal resolve_goal(const std::string& name) {
  if (auto g = named_goal(name)) return *g;
  std::string pattern = slurp(name);
  while (!pattern.empty() && std::isspace(static_cast<unsigned char>(pattern.back()))) pattern.pop_back();
  return PartialGoal::from_pattern(pattern);
}

struct SolveArgs {
  std::string facelets, goal = "solved", table;
  double weight = 1.0;
  std::size_t budget = kDefaultNodeBudget;
};

int run_solve(const SolveArgs& a) {
  const CubeState start = parse_facelets(a.facelets);
  const PartialGoal goal = resolve_goal(a.goal);
  std::unique_ptr<HeuristicProvider> h;
  if (!a.table.empty()) {
    h = std::make_unique<ValueTable>(ValueTable::load(a.table));
  } else if (a.goal == "white-cross") {
    const TableParams p;
    h = std::make_unique<ValueTable>(train_value_table(goal, p.samples, p.max_depth, p.iterations, p.seed));
  } else {
    h = std::make_unique<MisplacedBound>();
  }
  const SearchOutcome out = astar_solve(start, goal, *h, a.weight, a.budget);
  if (!out.solved()) {
    std::cerr << "budget exhausted after " << out.result.nodes_expanded << " nodes\n";
    return 1;
  }
  std::cout << format_moves(out.result.path) << "\n";
  std::cout << "moves: " << out.result.cost() << "\nnodes expanded: " << out.result.nodes_expanded << "\n";
  return 0;
}

struct DiscoverArgs {
  std::string goal = "white-cross", out;
  std::size_t configs = 200, macro_cap = 48;
  std::uint64_t seed = 1;
  int depth_min = 1, depth_max = 20, complexity_cap = 8;
};

int run_discover(const DiscoverArgs& a) {
  const auto goal = named_goal(a.goal);
  if (!goal) throw std::invalid_argument("discover-macros needs a named goal: solved or white-cross");
  LearnParams p;
  p.config_count = a.configs;
  p.seed = a.seed;
  p.depth = {a.depth_min, a.depth_max};
  p.complexity_cap = a.complexity_cap;
  p.macro_cap = a.macro_cap;
  HeuristicCache cache(p.tables);
  const auto t0 = std::chrono::steady_clock::now();
  const LearnResult r = learn_macro_library(*goal, a.goal, p, cache);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  for (const auto& m : r.library.macros)
    std::cout << m.name << "  " << format_moves(m.sequence) << "  if " << to_string(m.precondition) << "\n";
  std::cout << r.library.macros.size() << " macros, " << r.unsolved.size() << " of " << a.configs
            << " configurations unsolved (" << r.stop_reason << "), " << secs << " s\n";
  if (!a.out.empty()) {
    save_library(r.library, a.out);
    std::cout << "wrote " << a.out << "\n";
  }
  return 0;
}

struct AuditArgs {
  std::string corpus = "data/eec.csv", metric = "die", valence = "data/valence.tsv", out;
  std::vector<std::string> systems = {"lexicon"};
};

int run_audit_cmd(const AuditArgs& a) {
  const TemplateCorpus corpus = load_corpus_csv(a.corpus);
  const ValenceLexicon lex = ValenceLexicon::load(a.valence);
  std::vector<std::pair<std::string, SentimentScorer>> systems;
  for (const auto& s : a.systems) {
    if (s == "lexicon")
      systems.emplace_back(s, [&lex](std::string_view t) -> std::optional<double> {
        return score_sentiment(normalize(t), lex).intensity;
      });
    else if (s == "constant") systems.emplace_back(s, constant_scorer(0.3));
    else if (s == "gender-skewed") systems.emplace_back(s, gender_skewed_scorer(corpus));
    else throw std::invalid_argument("unknown system " + s + " (lexicon, constant, gender-skewed)");
  }
  const AuditReport report = run_audit(expand_templates(corpus), systems, a.metric);
  const std::string json = audit_to_json(report);
  if (a.out.empty()) {
    std::cout << json << "\n";
  } else {
    write_atomic(a.out, json + "\n");
  }
  for (const auto& r : report.rating.systems)
    std::cerr << r.system << ": " << a.metric << " " << r.score << ", rating " << r.rating << "\n";
  return 0;
}

struct ReplayArgs {
  std::string transcript, profiles = "data/profiles", valence = "data/valence.tsv", abuse = "data/abuse.txt",
                          templates = "data/templates.tsv", library = "data/white_cross_library.json";
};

int run_replay(const ReplayArgs& a) {
  const ValenceLexicon valence = ValenceLexicon::load(a.valence);
  const AbuseLexicon abuse = AbuseLexicon::load(a.abuse);
  const TemplateSet templates = TemplateSet::load(a.templates);
  const MacroLibrary library = load_library(a.library);
  const ProfileStore profiles(a.profiles);
  DialogueServices sv;
  sv.valence = &valence;
  sv.abuse = &abuse;
  sv.templates = &templates;
  sv.libraries["white-cross"] = &library;
  sv.profiles = &profiles;
  const ReplayResult r = replay(read_transcript_jsonl(slurp(a.transcript)), sv);
  for (const auto& d : r.diffs) std::cout << format_diff(d) << "\n";
  std::cout << r.sessions << " session(s), " << r.user_turns << " user turns, " << r.bot_lines << " bot lines, "
            << r.diffs.size() << " difference(s)\n";
  return r.diffs.empty() ? 0 : 1;
}

struct TrainArgs {
  std::string goal = "white-cross", out;
  TableParams params;
};

int run_train(const TrainArgs& a) {
  const PartialGoal goal = resolve_goal(a.goal);
  const ValueTable t = train_value_table(goal, a.params.samples, a.params.max_depth, a.params.iterations, a.params.seed);
  std::cout << t.size() << " patterns, " << t.info().iterations_run << " sweeps, residual " << t.bellman_residual()
            << "\n";
  t.save(a.out);
  std::cout << "wrote " << a.out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rubik's cube tutor: search, macro discovery, dialogue service and bias audits"};
  app.require_subcommand(1);

  std::string config_path;
  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP service");
  serve_cmd->add_option("--config", config_path, "JSON config file");

  SolveArgs solve;
  auto* solve_cmd = app.add_subcommand("solve", "Search for a move sequence reaching a goal");
  solve_cmd->add_option("facelets", solve.facelets, "54-character facelet string")->required();
  solve_cmd->add_option("--goal", solve.goal, "solved, white-cross or a pattern file");
  solve_cmd->add_option("--weight", solve.weight, "heuristic weight (>= 1)");
  solve_cmd->add_option("--budget", solve.budget, "node budget");
  solve_cmd->add_option("--table", solve.table, "value table file");

  DiscoverArgs disc;
  auto* disc_cmd = app.add_subcommand("discover-macros", "Learn a macro library from scrambles");
  disc_cmd->add_option("--goal", disc.goal);
  disc_cmd->add_option("--configs", disc.configs);
  disc_cmd->add_option("--seed", disc.seed);
  disc_cmd->add_option("--depth-min", disc.depth_min);
  disc_cmd->add_option("--depth-max", disc.depth_max);
  disc_cmd->add_option("--complexity-cap", disc.complexity_cap);
  disc_cmd->add_option("--macro-cap", disc.macro_cap);
  disc_cmd->add_option("--out", disc.out, "library JSON to write");

  AuditArgs audit;
  auto* audit_cmd = app.add_subcommand("audit", "Rate sentiment scorers for gender bias");
  audit_cmd->add_option("--corpus", audit.corpus);
  audit_cmd->add_option("--system", audit.systems, "lexicon, constant or gender-skewed (repeatable)");
  audit_cmd->add_option("--metric", audit.metric)->check(CLI::IsMember({"die", "wrs"}));
  audit_cmd->add_option("--valence", audit.valence);
  audit_cmd->add_option("--out", audit.out, "write the JSON report here");

  ReplayArgs rep;
  auto* replay_cmd = app.add_subcommand("replay", "Re-run a recorded conversation and diff the bot lines");
  replay_cmd->add_option("transcript", rep.transcript)->required();
  replay_cmd->add_option("--profiles", rep.profiles);
  replay_cmd->add_option("--valence", rep.valence);
  replay_cmd->add_option("--abuse", rep.abuse);
  replay_cmd->add_option("--templates", rep.templates);
  replay_cmd->add_option("--library", rep.library);

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train-heuristic", "Train and save a value table");
  train_cmd->add_option("--goal", train.goal);
  train_cmd->add_option("--samples", train.params.samples);
  train_cmd->add_option("--depth", train.params.max_depth);
  train_cmd->add_option("--iterations", train.params.iterations);
  train_cmd->add_option("--seed", train.params.seed);
  train_cmd->add_option("--out", train.out)->required();

  std::string moves, from;
  auto* apply_cmd = app.add_subcommand("apply", "Print the facelets after a move sequence");
  apply_cmd->add_option("moves", moves)->required();
  apply_cmd->add_option("--from", from, "start facelets (default solved)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (*serve_cmd) {
      ServiceConfig c = config_path.empty() ? ServiceConfig{} : load_config(config_path);
      apply_env_overrides(c);
      TutorService service(c);
      std::cerr << "listening on " << c.host << ":" << c.port << "\n";
      return serve(service);
    }
    if (*solve_cmd) return run_solve(solve);
    if (*disc_cmd) return run_discover(disc);
    if (*audit_cmd) return run_audit_cmd(audit);
    if (*replay_cmd) return run_replay(rep);
    if (*train_cmd) return run_train(train);
    if (*apply_cmd) {
      const CubeState start = from.empty() ? solved_state() : parse_facelets(from);
      std::cout << format_facelets(apply_sequence(start, parse_moves(moves))) << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
