#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rvheal/arch.hpp"
#include "rvheal/fault.hpp"
#include "rvheal/ltl.hpp"
#include "rvheal/mape.hpp"
#include "rvheal/monitor.hpp"

namespace rvheal::harness {

inline constexpr int kScenarioSchema = 1;

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RandomInjections {
  std::size_t count = 0;
  /// Latest loop an injection may land on; defaults to loops - 1.
  std::optional<int> max_loop;
};

/// Loop indices run from 0 to loops - 1.
struct Scenario {
  mape::Mode mode = mape::Mode::Rv;
  std::uint64_t seed = 0;
  int loops = 1;
  arch::ArchitectureDescription architecture;
  /// Targets as written in the file: component name, component id, or connector id.
  std::vector<fault::InjectionSpec> injections;
  std::optional<RandomInjections> random;
};

/// Missing `components` and `connectors` select the default architecture.
/// `injections` is either an array of {loop, kind, target} or an object
/// {"random": {"count": N, "maxLoop": M}}.
Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario(const std::filesystem::path& path);

/// Explicit injections with targets resolved to ids, followed by the random
/// ones drawn from `seed`; stable-sorted by loop.
std::vector<fault::InjectionSpec> resolve_schedule(const Scenario& s, const arch::Architecture& a,
                                                   std::uint64_t seed);

struct RunOptions {
  std::optional<std::uint64_t> seed;
  std::optional<mape::Mode> mode;
};

struct RunResult {
  std::uint64_t seed = 0;
  mape::Mode mode = mape::Mode::Rv;
  std::vector<fault::InjectionSpec> schedule;
  std::vector<mape::RunRecord> records;
  arch::Architecture final_architecture;
  /// Utility of the freshly loaded architecture.
  double initial_utility = 0.0;
};

RunResult run_scenario(const Scenario& s, const RunOptions& opts = {});

inline constexpr std::string_view kCsvColumns =
    "loop,injected_kind,injected_target,diagnosed_kind,diagnosed_target,root_target,actions,"
    "detect_us,heal_us,utility";

/// Header comment, column row, then one row per injection/diagnosis pair
/// (injections matched to same-kind same-target diagnoses of their loop).
/// A loop with neither gets one row with empty failure columns.
std::string render_csv(const RunResult& r, const arch::ArchitectureDescription& desc);

/// One JSON object per line, in sequence order.
std::string render_event_log(const arch::Architecture& a);

/// Shortest round-trip decimal form.
std::string format_double(double x);

class CorpusError : public std::runtime_error {
 public:
  CorpusError(const std::string& msg, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + msg), line(line) {}
  std::size_t line;
};

/// One formula per line; blank lines and lines starting with '#' are skipped.
std::vector<ltl::Formula> read_corpus(std::istream& in);

inline constexpr std::size_t kMaxOracleAtoms = 3;

using MonitorFactory = std::function<monitor::MooreMonitor(const ltl::Formula&)>;

struct OracleMismatch {
  std::vector<ltl::Letter> trace;
  ltl::Verdict monitor;
  ltl::Verdict oracle;
};

struct OracleCheckResult {
  ltl::Formula formula;
  std::size_t monitor_states = 0;
  std::size_t traces = 0;
  std::size_t mismatches = 0;
  std::optional<OracleMismatch> first_mismatch;

  bool passed() const { return mismatches == 0; }
};

/// Compares the monitor against verdict_oracle on every trace of length
/// 0..max_trace_len over 2^atoms. Rejects formulas with more than
/// kMaxOracleAtoms atoms.
OracleCheckResult check_formula(const ltl::Formula& f, int max_trace_len,
                                const MonitorFactory& factory = {},
                                ltl::OracleBounds bounds = {});

}  // namespace rvheal::harness
