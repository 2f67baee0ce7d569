// rvheal: synthesize monitors, run healing scenarios, check monitors against the oracle.

#include <exception>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "rvheal/harness.hpp"

namespace {

using namespace rvheal;

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << content;
  if (!out.flush()) throw std::runtime_error("write to '" + path + "' failed");
}

int cmd_synth(const std::string& text, const std::string& dot, const std::string& table) {
  const auto f = ltl::parse(text);
  const auto m = monitor::build_monitor(f);
  if (!dot.empty()) write_file(dot, monitor::export_dot(m));
  if (!table.empty()) write_file(table, monitor::export_table(m));

  std::map<ltl::Verdict, std::size_t> census;
  for (monitor::StateId q = 0; q < m.state_count(); ++q) ++census[m.output(q)];
  std::cout << "formula: " << ltl::unparse(f) << "\n"
            << "states: " << m.state_count() << "\n";
  for (auto v : {ltl::Verdict::Top, ltl::Verdict::Bottom, ltl::Verdict::Inconclusive})
    std::cout << ltl::to_string(v) << ": " << census[v] << "\n";
  return 0;
}

int cmd_run(const std::string& scenario_path, const std::string& csv, std::string events,
            std::optional<std::uint64_t> seed, const std::string& mode_text) {
  const auto scenario = harness::load_scenario(scenario_path);
  harness::RunOptions opts;
  opts.seed = seed;
  if (!mode_text.empty()) opts.mode = mape::parse_mode(mode_text);
  const auto result = harness::run_scenario(scenario, opts);
  if (events.empty()) events = csv + ".events.jsonl";
  write_file(csv, harness::render_csv(result, scenario.architecture));
  write_file(events, harness::render_event_log(result.final_architecture));

  std::size_t diagnoses = 0;
  for (const auto& r : result.records) {
    diagnoses += r.diagnoses.size();
    if (r.execution_error)
      std::cerr << "loop " << r.loop << ": healing stopped: " << *r.execution_error << "\n";
  }
  std::cout << "loops: " << result.records.size() << "\n"
            << "injections: " << result.schedule.size() << "\n"
            << "diagnoses: " << diagnoses << "\n"
            << "utility: " << harness::format_double(result.initial_utility) << " -> "
            << harness::format_double(result.final_architecture.utility()) << "\n";
  return 0;
}

int cmd_oracle_check(const std::string& corpus_path, int max_len) {
  std::ifstream in(corpus_path);
  if (!in) throw std::runtime_error("cannot open corpus '" + corpus_path + "'");
  const auto corpus = harness::read_corpus(in);
  bool ok = true;
  for (const auto& f : corpus) {
    const auto r = harness::check_formula(f, max_len);
    std::cout << (r.passed() ? "PASS " : "FAIL ") << ltl::unparse(f) << "  states=" << r.monitor_states
              << " traces=" << r.traces << " mismatches=" << r.mismatches << "\n";
    if (r.first_mismatch) {
      std::cout << "  first mismatch on [";
      for (std::size_t i = 0; i < r.first_mismatch->trace.size(); ++i)
        std::cout << (i ? " " : "") << ltl::to_string(r.first_mismatch->trace[i]);
      std::cout << "]: monitor " << ltl::to_string(r.first_mismatch->monitor) << ", oracle "
                << ltl::to_string(r.first_mismatch->oracle) << "\n";
    }
    ok = ok && r.passed();
  }
  std::cout << corpus.size() << " formula(s), " << (ok ? "all passed" : "FAILURES") << "\n";
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Runtime-verification-driven self-healing toolkit"};
  app.require_subcommand(1);

  std::string formula, dot, table;
  auto* synth = app.add_subcommand("synth", "Build the minimized monitor for an LTL formula");
  synth->add_option("formula", formula, "LTL formula")->required();
  synth->add_option("--dot", dot, "Write the monitor as a DOT graph");
  synth->add_option("--table", table, "Write the transition table");

  std::string scenario, csv, events, mode;
  std::optional<std::uint64_t> seed;
  auto* run = app.add_subcommand("run", "Run a scenario through the healing loop");
  run->add_option("scenario", scenario, "Scenario JSON file")->required();
  run->add_option("--csv", csv, "Per-loop CSV output")->required();
  run->add_option("--events", events, "Event log output (default: <csv>.events.jsonl)");
  run->add_option("--seed", seed, "Override the scenario seed");
  run->add_option("--mode", mode, "Override the scenario mode")->check(CLI::IsMember({"rv", "baseline"}));

  std::string corpus;
  int max_len = 6;
  auto* oracle = app.add_subcommand("oracle-check", "Compare monitors with the bounded oracle");
  oracle->add_option("corpus", corpus, "Formula corpus, one per line")->required();
  oracle->add_option("--max-trace-len", max_len, "Longest trace checked")->check(CLI::Range(0, 12));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Usage errors share exit code 2 with input errors; --help stays 0.
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*synth) return cmd_synth(formula, dot, table);
    if (*run) return cmd_run(scenario, csv, events, seed, mode);
    if (*oracle) return cmd_oracle_check(corpus, max_len);
  } catch (const std::exception& e) {
    std::cerr << "rvheal: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
