#include "rvheal/mape.hpp"

#include <algorithm>
#include <chrono>
#include <deque>

namespace rvheal::mape {

using arch::ComponentState;
using arch::EventKind;
using arch::ModelEvent;
using ltl::Formula;
using ltl::Proposition;

namespace props = arch::props;

const std::vector<MonitorTemplate>& monitor_templates() {
  static const std::vector<MonitorTemplate> templates = {
      {TemplateId::Phi1, ltl::parse("G (!isUnknown)"), TargetKind::Component, FailureKind::CF1},
      {TemplateId::Phi2, ltl::parse("G (isStarted && lowException)"), TargetKind::Component,
       FailureKind::CF2},
      {TemplateId::Phi3, ltl::parse("G (present)"), TargetKind::Component, FailureKind::CF3},
      {TemplateId::Phi4,
       ltl::parse("G (isStartedComponent1 && isStartedComponent2 && connector)"),
       TargetKind::Connector, FailureKind::CF4},
  };
  return templates;
}

const MonitorTemplate& monitor_template(TemplateId id) {
  return monitor_templates().at(static_cast<std::size_t>(id));
}

Formula grounded_formula(TemplateId id, const Architecture& a, const std::string& target) {
  const auto& t = monitor_template(id);
  auto on = [](std::string_view prop, const std::string& tgt) {
    return Proposition{std::string(prop), tgt};
  };
  if (t.target_kind == TargetKind::Connector) {
    const auto* k = a.find_connector(target);
    if (!k) throw arch::ModelError("no connector '" + target + "' to monitor");
    return ltl::substitute(t.formula, {{"isStartedComponent1", on(props::kIsStarted, k->source)},
                                       {"isStartedComponent2", on(props::kIsStarted, k->target)},
                                       {"connector", on(props::kConnector, target)}});
  }
  std::vector<std::pair<std::string, Proposition>> binding;
  for (auto p : {props::kIsUnknown, props::kIsStarted, props::kLowException, props::kPresent})
    binding.emplace_back(std::string(p), on(p, target));
  return ltl::substitute(t.formula, binding);
}

void MonitorInstance::reset() {
  state = monitor->initial();
  last_verdict = monitor->output(state);
}

std::vector<MonitorInstance> instantiate_monitors(const Architecture& a) {
  std::vector<MonitorInstance> out;
  auto add = [&](TemplateId id, const std::string& target) {
    auto m = std::make_shared<const monitor::MooreMonitor>(
        monitor::build_monitor(grounded_formula(id, a, target)));
    MonitorInstance inst{id, target, std::move(m)};
    inst.reset();
    out.push_back(std::move(inst));
  };
  for (auto id : {TemplateId::Phi1, TemplateId::Phi2, TemplateId::Phi3})
    for (const auto& [cid, c] : a.components()) add(id, cid);
  for (const auto& [kid, k] : a.connectors()) add(TemplateId::Phi4, kid);
  return out;
}

bool is_live(const MonitorInstance& m, const Architecture& a) {
  switch (m.templ) {
    case TemplateId::Phi1:
    case TemplateId::Phi2:
      return a.find_component(m.target) != nullptr;
    case TemplateId::Phi3:
      return a.find_component(m.target) || a.is_removed(m.target);
    case TemplateId::Phi4:
      return a.find_connector(m.target) != nullptr;
  }
  return false;
}

std::map<InstanceKey, Letter> monitor_phase(const Architecture& a,
                                            const std::vector<MonitorInstance>& instances) {
  std::map<InstanceKey, Letter> out;
  for (const auto& m : instances)
    if (is_live(m, a)) out.emplace(m.key(), a.valuation(m.templ, m.target));
  return out;
}

std::string deep_analysis(const Architecture& a, const std::string& component) {
  std::set<std::string> seen{component};
  std::deque<std::string> queue{component};
  while (!queue.empty()) {
    const std::string c = queue.front();
    queue.pop_front();
    if (c != component && !a.healthy(c)) return c;
    if (!a.find_component(c)) continue;
    std::vector<std::string> providers;
    for (const auto& [kid, k] : a.connectors())
      if (k.source == c) providers.push_back(k.target);
    std::sort(providers.begin(), providers.end());
    for (auto& p : providers)
      if (seen.insert(p).second) queue.push_back(std::move(p));
  }
  return component;
}

std::vector<FailureDiagnosis> classify(std::vector<Violation> violations, Architecture& a, int loop) {
  std::sort(violations.begin(), violations.end(), [](const Violation& x, const Violation& y) {
    return std::tie(x.templ, x.target) < std::tie(y.templ, y.target);
  });
  std::vector<FailureDiagnosis> out;
  std::set<std::string> diagnosed_components;
  for (auto& v : violations) {
    FailureKind kind = monitor_template(v.templ).guards;
    switch (v.templ) {
      case TemplateId::Phi1:
      case TemplateId::Phi3:
        break;
      case TemplateId::Phi2: {
        const auto* c = a.find_component(v.target);
        if (c && c->state == ComponentState::Unknown) continue;  // reported as CF1
        break;
      }
      case TemplateId::Phi4: {
        const auto* k = a.find_connector(v.target);
        const bool endpoint_diagnosed =
            diagnosed_components.count(k->source) || diagnosed_components.count(k->target);
        const bool endpoint_down =
            !v.letter.count(arch::grounded(props::kIsStarted, k->source)) ||
            !v.letter.count(arch::grounded(props::kIsStarted, k->target));
        if (endpoint_diagnosed || endpoint_down) continue;
        break;
      }
    }
    if (v.templ != TemplateId::Phi4) diagnosed_components.insert(v.target);
    out.push_back(FailureDiagnosis{kind, v.target, loop, std::move(v.letter), v.target});
  }

  for (auto& d : out) {
    a.apply_event(ModelEvent{0, loop, EventKind::FailureDiagnosed, d.target,
                             std::string(fault::to_string(d.kind))});
    const arch::Component* c = a.find_component(d.target);
    if (!c) {
      auto it = a.removed().find(d.target);
      c = it == a.removed().end() ? nullptr : &it->second;
    }
    if (c && c->failure_counter > a.failure_threshold()) d.root_target = deep_analysis(a, d.target);
  }
  return out;
}

std::vector<FailureDiagnosis> analyze(std::vector<MonitorInstance>& instances,
                                      const std::map<InstanceKey, Letter>& letters,
                                      Architecture& a, int loop) {
  std::vector<Violation> violations;
  for (auto& m : instances) {
    auto it = letters.find(m.key());
    if (it == letters.end()) continue;
    const Verdict before = m.last_verdict;
    std::tie(m.state, m.last_verdict) = m.monitor->step(m.state, it->second);
    if (m.last_verdict == Verdict::Bottom && before != Verdict::Bottom)
      violations.push_back({m.templ, m.target, it->second});
  }
  return classify(std::move(violations), a, loop);
}

std::string HealingAction::to_string() const {
  switch (type) {
    case Type::Restart:
      return "Restart(" + target + ")";
    case Type::Recreate:
      return "Recreate(" + target + ")";
    case Type::Reconnect:
      return "Reconnect(" + target + ")";
  }
  return target;
}

HealingPlan plan(const std::vector<FailureDiagnosis>& diagnoses, const Architecture& a) {
  using Type = HealingAction::Type;
  HealingPlan p;
  p.provoking = diagnoses;
  std::set<std::string> recreated;

  auto add = [&](Type type, const std::string& target, std::size_t idx) {
    HealingAction action{type, target, idx};
    if (std::none_of(p.actions.begin(), p.actions.end(),
                     [&](const HealingAction& x) { return x.same_as(action); }))
      p.actions.push_back(std::move(action));
  };
  auto reconnect_adjacent = [&](const std::string& c, std::size_t idx) {
    for (const auto* k : a.adjacent_connectors(c)) {
      if (k->connected) continue;
      const std::string& other = k->source == c ? k->target : k->source;
      if (other == c || a.find_component(other) || recreated.count(other))
        add(Type::Reconnect, k->id, idx);
    }
  };
  auto bring_back = [&](const std::string& c, std::size_t idx) {
    if (a.find_component(c)) {
      add(Type::Restart, c, idx);
    } else {
      add(Type::Recreate, c, idx);
      recreated.insert(c);
    }
    reconnect_adjacent(c, idx);
  };

  for (std::size_t i = 0; i < diagnoses.size(); ++i) {
    const auto& d = diagnoses[i];
    if (d.root_target != d.target) bring_back(d.root_target, i);
    switch (d.kind) {
      case FailureKind::CF1:
        add(Type::Restart, d.target, i);
        break;
      case FailureKind::CF2:
        add(Type::Restart, d.target, i);
        reconnect_adjacent(d.target, i);
        break;
      case FailureKind::CF3:
        add(Type::Recreate, d.target, i);
        recreated.insert(d.target);
        reconnect_adjacent(d.target, i);
        break;
      case FailureKind::CF4:
        add(Type::Reconnect, d.target, i);
        break;
    }
  }
  return p;
}

std::set<InstanceKey> touched_by(const HealingAction& action, const Architecture& a) {
  std::set<InstanceKey> out;
  if (action.type == HealingAction::Type::Reconnect) {
    out.emplace(TemplateId::Phi4, action.target);
    return out;
  }
  for (auto id : {TemplateId::Phi1, TemplateId::Phi2, TemplateId::Phi3}) out.emplace(id, action.target);
  for (const auto* k : a.adjacent_connectors(action.target)) out.emplace(TemplateId::Phi4, k->id);
  return out;
}

ExecutionReport execute(const HealingPlan& p, Architecture& a,
                        std::vector<MonitorInstance>& instances, int loop) {
  ExecutionReport report;
  for (const auto& action : p.actions) {
    try {
      switch (action.type) {
        case HealingAction::Type::Restart:
          a.change_state(action.target, ComponentState::Started, loop);
          break;
        case HealingAction::Type::Recreate:
          a.apply_event(ModelEvent{0, loop, EventKind::ComponentRestored, action.target, {}});
          break;
        case HealingAction::Type::Reconnect:
          a.apply_event(ModelEvent{0, loop, EventKind::ConnectorReconnected, action.target, {}});
          break;
      }
    } catch (const arch::ModelError& e) {
      report.error = action.to_string() + ": " + e.what();
      break;
    }
    ++report.applied;
    const auto touched = touched_by(action, a);
    for (auto& m : instances)
      if (touched.count(m.key())) m.reset();
  }
  return report;
}

std::vector<FailureDiagnosis> BaselineAnalyzer::analyze(Architecture& a, int loop) {
  std::vector<Violation> violations;
  auto report = [&](TemplateId t, const std::string& target) {
    if (latched_.emplace(t, target).second) violations.push_back({t, target, a.valuation(t, target)});
  };
  for (const auto& [id, c] : a.components()) {
    if (c.state == ComponentState::Unknown) report(TemplateId::Phi1, id);
    if (c.state != ComponentState::Started || c.exception_count > a.exception_threshold())
      report(TemplateId::Phi2, id);
  }
  for (const auto& [id, c] : a.removed()) report(TemplateId::Phi3, id);
  for (const auto& [id, k] : a.connectors()) {
    auto started = [&](const std::string& cid) {
      const auto* c = a.find_component(cid);
      return c && c->state == ComponentState::Started;
    };
    if (!(k.connected && started(k.source) && started(k.target))) report(TemplateId::Phi4, id);
  }
  return classify(std::move(violations), a, loop);
}

void BaselineAnalyzer::healed(const HealingPlan& p, const Architecture& a, std::size_t applied) {
  for (std::size_t i = 0; i < applied && i < p.actions.size(); ++i)
    for (const auto& key : touched_by(p.actions[i], a)) latched_.erase(key);
}

std::string_view to_string(Mode m) { return m == Mode::Rv ? "rv" : "baseline"; }

std::optional<Mode> parse_mode(std::string_view s) {
  if (s == "rv") return Mode::Rv;
  if (s == "baseline") return Mode::Baseline;
  return std::nullopt;
}

HealingLoop::HealingLoop(Architecture a, std::vector<fault::InjectionSpec> schedule, Mode mode)
    : arch_(std::move(a)), schedule_(std::move(schedule)), mode_(mode) {
  if (mode_ == Mode::Rv) instances_ = instantiate_monitors(arch_);
}

RunRecord HealingLoop::run_iteration(int loop) {
  if (last_loop_ && loop <= *last_loop_)
    throw std::logic_error("loop index must strictly increase (" + std::to_string(loop) +
                           " after " + std::to_string(*last_loop_) + ")");
  last_loop_ = loop;
  using clock = std::chrono::steady_clock;
  auto micros = [](clock::duration d) {
    return std::chrono::duration_cast<std::chrono::microseconds>(d).count();
  };

  RunRecord r;
  r.loop = loop;
  const auto t0 = clock::now();
  for (const auto& spec : fault::due_injections(schedule_, loop))
    r.injections.push_back(fault::inject(arch_, spec));
  const auto t1 = clock::now();

  if (mode_ == Mode::Rv) {
    const auto letters = monitor_phase(arch_, instances_);
    r.diagnoses = analyze(instances_, letters, arch_, loop);
  } else {
    r.diagnoses = baseline_.analyze(arch_, loop);
  }
  const auto t2 = clock::now();

  r.plan = plan(r.diagnoses, arch_);
  const auto exec = execute(r.plan, arch_, instances_, loop);
  if (mode_ == Mode::Baseline) baseline_.healed(r.plan, arch_, exec.applied);
  r.execution_error = exec.error;
  const auto t3 = clock::now();

  r.inject_us = micros(t1 - t0);
  r.detect_us = micros(t2 - t0);
  r.heal_us = micros(t3 - t2);
  r.utility = arch_.utility();
  return r;
}

}  // namespace rvheal::mape
