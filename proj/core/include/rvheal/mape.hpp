#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "rvheal/arch.hpp"
#include "rvheal/fault.hpp"
#include "rvheal/ltl.hpp"
#include "rvheal/monitor.hpp"

namespace rvheal::mape {

using arch::Architecture;
using arch::TemplateId;
using fault::FailureKind;
using ltl::Letter;
using ltl::Verdict;

enum class TargetKind { Component, Connector };

/// Failure property with ungrounded atoms.
struct MonitorTemplate {
  TemplateId id;
  ltl::Formula formula;
  TargetKind target_kind;
  FailureKind guards;
};

/// PHI1 = G(!isUnknown), PHI2 = G(isStarted && lowException),
/// PHI3 = G(present),
/// PHI4 = G(isStartedComponent1 && isStartedComponent2 && connector).
const std::vector<MonitorTemplate>& monitor_templates();
const MonitorTemplate& monitor_template(TemplateId id);

/// Template formula with its atoms grounded on `target`.
ltl::Formula grounded_formula(TemplateId id, const Architecture& a, const std::string& target);

using InstanceKey = std::pair<TemplateId, std::string>;

struct MonitorInstance {
  TemplateId templ;
  std::string target;
  std::shared_ptr<const monitor::MooreMonitor> monitor;
  monitor::StateId state = 0;
  Verdict last_verdict = Verdict::Inconclusive;

  InstanceKey key() const { return {templ, target}; }
  void reset();
};

/// PHI1-PHI3 per component and PHI4 per connector, ordered by (template, target).
std::vector<MonitorInstance> instantiate_monitors(const Architecture& a);

/// PHI1/PHI2 instances of a removed component are dormant and not fed.
bool is_live(const MonitorInstance& m, const Architecture& a);

/// One valuation letter per live instance, sampled from the current model.
std::map<InstanceKey, Letter> monitor_phase(const Architecture& a,
                                            const std::vector<MonitorInstance>& instances);

struct FailureDiagnosis {
  FailureKind kind;
  std::string target;
  int loop = 0;
  Letter violating_letter;
  /// Equal to `target` unless deep analysis found an unhealthy provider.
  std::string root_target;

  friend bool operator==(const FailureDiagnosis&, const FailureDiagnosis&) = default;
};

/// A property instance observed violated in the current loop.
struct Violation {
  TemplateId templ;
  std::string target;
  Letter letter;
};

/// Turns violations into diagnoses: one per cause. PHI2 defers to CF1 when
/// the component is UNKNOWN; PHI4 defers when an endpoint has its own
/// diagnosis this loop or is not started. Records each diagnosis in the
/// model and runs deep analysis once a component's failure counter exceeds
/// the threshold.
std::vector<FailureDiagnosis> classify(std::vector<Violation> violations, Architecture& a, int loop);

/// Steps every live instance on its letter and classifies the instances
/// that moved into BOTTOM.
std::vector<FailureDiagnosis> analyze(std::vector<MonitorInstance>& instances,
                                      const std::map<InstanceKey, Letter>& letters,
                                      Architecture& a, int loop);

/// Breadth-first search over the providers `component` requires (nearest
/// first, ties by id) for the first unhealthy one; `component` if none.
std::string deep_analysis(const Architecture& a, const std::string& component);

struct HealingAction {
  enum class Type { Restart, Recreate, Reconnect };
  Type type;
  std::string target;
  /// Index of the first diagnosis that asked for this action.
  std::size_t diagnosis = 0;

  std::string to_string() const;
  bool same_as(const HealingAction& o) const { return type == o.type && target == o.target; }
};

struct HealingPlan {
  std::vector<HealingAction> actions;
  std::vector<FailureDiagnosis> provoking;

  bool empty() const { return actions.empty(); }
};

/// CF1 -> Restart; CF2 -> Restart + Reconnect broken adjacent connectors;
/// CF3 -> Recreate + Reconnect dangling connectors; CF4 -> Reconnect.
/// A retargeted root is healed first. Duplicates keep their first position.
HealingPlan plan(const std::vector<FailureDiagnosis>& diagnoses, const Architecture& a);

/// Instances whose monitored atoms an action changes.
std::set<InstanceKey> touched_by(const HealingAction& action, const Architecture& a);

struct ExecutionReport {
  std::size_t applied = 0;
  std::optional<std::string> error;
};

/// Applies the plan through the model; every touched instance is reset to
/// its initial state. Stops at the first invalid action, keeping what was
/// already applied.
ExecutionReport execute(const HealingPlan& p, Architecture& a,
                        std::vector<MonitorInstance>& instances, int loop);

/// Scenario-1 reconstruction: the same four conditions checked directly on
/// the model each loop, latched until the target is healed.
class BaselineAnalyzer {
 public:
  std::vector<FailureDiagnosis> analyze(Architecture& a, int loop);
  void healed(const HealingPlan& p, const Architecture& a, std::size_t applied);

 private:
  std::set<InstanceKey> latched_;
};

enum class Mode { Rv, Baseline };

std::string_view to_string(Mode m);
std::optional<Mode> parse_mode(std::string_view s);

struct RunRecord {
  int loop = 0;
  std::vector<fault::InjectionReport> injections;
  std::vector<FailureDiagnosis> diagnoses;
  HealingPlan plan;
  std::optional<std::string> execution_error;
  std::int64_t inject_us = 0;
  /// From the first injection being applied to diagnosis emission.
  std::int64_t detect_us = 0;
  /// Plan plus execute.
  std::int64_t heal_us = 0;
  double utility = 0.0;
};

/// Owns the architecture and the monitor instances for one run.
class HealingLoop {
 public:
  HealingLoop(Architecture a, std::vector<fault::InjectionSpec> schedule, Mode mode);

  /// Inject, Monitor, Analyze, Plan, Execute. `loop` must strictly increase.
  RunRecord run_iteration(int loop);

  Architecture& architecture() { return arch_; }
  const Architecture& architecture() const { return arch_; }
  const std::vector<MonitorInstance>& instances() const { return instances_; }
  Mode mode() const { return mode_; }

 private:
  Architecture arch_;
  std::vector<fault::InjectionSpec> schedule_;
  Mode mode_;
  std::vector<MonitorInstance> instances_;
  BaselineAnalyzer baseline_;
  std::optional<int> last_loop_;
};

}  // namespace rvheal::mape
