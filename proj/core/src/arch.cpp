#include "rvheal/arch.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <set>

#include "json.hpp"

namespace rvheal::arch {

std::string_view to_string(ComponentState s) {
  switch (s) {
    case ComponentState::Undeployed:
      return "UNDEPLOYED";
    case ComponentState::Deployed:
      return "DEPLOYED";
    case ComponentState::Started:
      return "STARTED";
    case ComponentState::Unknown:
      return "UNKNOWN";
  }
  return "UNKNOWN";
}

std::optional<ComponentState> parse_component_state(std::string_view s) {
  for (auto st : {ComponentState::Undeployed, ComponentState::Deployed, ComponentState::Started,
                  ComponentState::Unknown})
    if (to_string(st) == s) return st;
  return std::nullopt;
}

namespace {
constexpr EventKind kAllKinds[] = {
    EventKind::StateChanged,    EventKind::ExceptionRaised,      EventKind::ComponentRemoved,
    EventKind::ComponentRestored, EventKind::ConnectorBroken, EventKind::ConnectorReconnected,
    EventKind::FailureDiagnosed,
};
}  // namespace

std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::StateChanged:
      return "StateChanged";
    case EventKind::ExceptionRaised:
      return "ExceptionRaised";
    case EventKind::ComponentRemoved:
      return "ComponentRemoved";
    case EventKind::ComponentRestored:
      return "ComponentRestored";
    case EventKind::ConnectorBroken:
      return "ConnectorBroken";
    case EventKind::ConnectorReconnected:
      return "ConnectorReconnected";
    case EventKind::FailureDiagnosed:
      return "FailureDiagnosed";
  }
  return "StateChanged";
}

std::optional<EventKind> parse_event_kind(std::string_view s) {
  for (auto k : kAllKinds)
    if (to_string(k) == s) return k;
  return std::nullopt;
}

std::string to_json_line(const ModelEvent& e) {
  nlohmann::ordered_json j;
  j["seq"] = e.seq;
  j["loop"] = e.loop;
  j["kind"] = std::string(to_string(e.kind));
  j["target"] = e.target;
  j["detail"] = e.detail;
  return j.dump();
}

std::string_view to_string(TemplateId t) {
  switch (t) {
    case TemplateId::Phi1:
      return "PHI1";
    case TemplateId::Phi2:
      return "PHI2";
    case TemplateId::Phi3:
      return "PHI3";
    case TemplateId::Phi4:
      return "PHI4";
  }
  return "PHI1";
}

std::string grounded(std::string_view prop, std::string_view target) {
  std::string out(prop);
  out += '@';
  out += target;
  return out;
}

std::string component_id(std::string_view name) {
  std::string out;
  bool gap = false;
  for (char c : name) {
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
      if (gap && !out.empty()) out += '_';
      gap = false;
      out += c;
    } else {
      gap = true;
    }
  }
  if (out.empty() || !std::isalpha(static_cast<unsigned char>(out.front()))) out = "c_" + out;
  return out;
}

ArchitectureDescription default_architecture() {
  ArchitectureDescription d;
  d.components = {
      {"Authentication Service", 3.0, {"IAuthentication"}, {"IUserData"}},
      {"User Management Service", 2.0, {"IUserData"}, {"IPersistence"}},
      {"Persistence Service", 4.0, {"IPersistence"}, {}},
      {"Query Service", 5.0, {"IQuery"}, {"IPersistence", "IItemFilter"}},
      {"Item Management Service", 3.0, {"IItem"}, {"IPersistence", "IInventory"}},
      {"Inventory Service", 2.0, {"IInventory"}, {}},
      {"Reputation Service", 1.0, {"IReputation"}, {}},
      {"Bid and Buy Service", 5.0, {"IBidAndBuy"}, {"IQuery", "IAuthentication"}},
      {"Future Sales Item Filter", 1.5, {"IItemFilter"}, {}},
  };
  d.connectors = {
      {"k1", "Authentication Service", "IUserData", "User Management Service", "IUserData"},
      {"k2", "User Management Service", "IPersistence", "Persistence Service", "IPersistence"},
      {"k3", "Query Service", "IPersistence", "Persistence Service", "IPersistence"},
      {"k4", "Query Service", "IItemFilter", "Future Sales Item Filter", "IItemFilter"},
      {"k5", "Item Management Service", "IPersistence", "Persistence Service", "IPersistence"},
      {"k6", "Item Management Service", "IInventory", "Inventory Service", "IInventory"},
      {"k7", "Bid and Buy Service", "IQuery", "Query Service", "IQuery"},
      {"k8", "Bid and Buy Service", "IAuthentication", "Authentication Service",
       "IAuthentication"},
  };
  return d;
}

Architecture Architecture::load(const ArchitectureDescription& desc) {
  if (desc.exception_threshold <= 0) throw ModelError("exceptionThreshold must be positive");
  if (desc.failure_threshold <= 0) throw ModelError("failureThreshold must be positive");
  Architecture a;
  a.exception_threshold_ = desc.exception_threshold;
  a.failure_threshold_ = desc.failure_threshold;

  for (const auto& spec : desc.components) {
    if (spec.name.empty()) throw ModelError("component with empty name");
    if (!(spec.criticality >= 0.0)) throw ModelError("component '" + spec.name + "' has negative criticality");
    Component c;
    c.id = component_id(spec.name);
    c.name = spec.name;
    c.criticality = spec.criticality;
    c.provides = spec.provides;
    c.requires_ = spec.requires_;
    if (a.components_.count(c.id) || a.names_.count(spec.name))
      throw ModelError("duplicate component id '" + c.id + "'");
    a.names_.emplace(spec.name, c.id);
    a.components_.emplace(c.id, std::move(c));
  }

  auto lookup = [&](const std::string& ref) -> const Component& {
    if (auto it = a.components_.find(ref); it != a.components_.end()) return it->second;
    if (auto it = a.names_.find(ref); it != a.names_.end()) return a.components_.at(it->second);
    throw ModelError("connector references missing component '" + ref + "'");
  };
  auto has = [](const std::vector<std::string>& v, const std::string& x) {
    return std::find(v.begin(), v.end(), x) != v.end();
  };

  std::set<std::pair<std::string, std::string>> wired;
  for (const auto& spec : desc.connectors) {
    if (!ltl::is_identifier(spec.id)) throw ModelError("connector id '" + spec.id + "' is not an identifier");
    if (a.connectors_.count(spec.id) || a.components_.count(spec.id))
      throw ModelError("duplicate id '" + spec.id + "'");
    const Component& src = lookup(spec.source);
    const Component& dst = lookup(spec.target);
    if (!has(src.requires_, spec.source_interface))
      throw ModelError("connector '" + spec.id + "': component '" + src.id +
                       "' does not require interface '" + spec.source_interface + "'");
    if (!has(dst.provides, spec.target_interface))
      throw ModelError("connector '" + spec.id + "': component '" + dst.id +
                       "' does not provide interface '" + spec.target_interface + "'");
    if (!wired.emplace(src.id, spec.source_interface).second)
      throw ModelError("connector '" + spec.id + "': required interface '" + spec.source_interface +
                       "' of '" + src.id + "' is already wired");
    a.connectors_.emplace(spec.id, Connector{spec.id, src.id, spec.source_interface, dst.id,
                                             spec.target_interface, true});
  }
  return a;
}

const Component* Architecture::find_component(std::string_view id) const {
  auto it = components_.find(id);
  return it == components_.end() ? nullptr : &it->second;
}

const Connector* Architecture::find_connector(std::string_view id) const {
  auto it = connectors_.find(id);
  return it == connectors_.end() ? nullptr : &it->second;
}

bool Architecture::is_removed(std::string_view id) const { return removed_.find(id) != removed_.end(); }

std::optional<std::string> Architecture::resolve(std::string_view ref) const {
  if (components_.find(ref) != components_.end() || removed_.find(ref) != removed_.end() ||
      connectors_.find(ref) != connectors_.end())
    return std::string(ref);
  if (auto it = names_.find(ref); it != names_.end()) return it->second;
  return std::nullopt;
}

std::uint64_t Architecture::change_state(const std::string& id, ComponentState to, int loop) {
  const Component* c = find_component(id);
  if (!c) throw ModelError("unknown component '" + id + "'");
  std::string detail(to_string(c->state));
  detail += "->";
  detail += to_string(to);
  return apply_event(ModelEvent{0, loop, EventKind::StateChanged, id, std::move(detail)});
}

std::uint64_t Architecture::apply_event(ModelEvent e) {
  auto component = [&]() -> Component& {
    auto it = components_.find(e.target);
    if (it == components_.end())
      throw ModelError(std::string(to_string(e.kind)) + ": unknown component '" + e.target + "'");
    return it->second;
  };
  auto connector = [&]() -> Connector& {
    auto it = connectors_.find(e.target);
    if (it == connectors_.end())
      throw ModelError(std::string(to_string(e.kind)) + ": unknown connector '" + e.target + "'");
    return it->second;
  };

  switch (e.kind) {
    case EventKind::StateChanged: {
      Component& c = component();
      std::string_view detail = e.detail;
      std::string_view to = detail;
      if (auto arrow = detail.find("->"); arrow != std::string_view::npos) {
        auto from = parse_component_state(detail.substr(0, arrow));
        if (!from || *from != c.state)
          throw ModelError("StateChanged '" + e.detail + "' does not match current state " +
                           std::string(to_string(c.state)) + " of '" + c.id + "'");
        to = detail.substr(arrow + 2);
      }
      auto next = parse_component_state(to);
      if (!next) throw ModelError("StateChanged: invalid state '" + std::string(to) + "'");
      c.state = *next;
      // Entering STARTED is a (re)start: the exception window begins afresh.
      if (*next == ComponentState::Started) c.exception_count = 0;
      break;
    }
    case EventKind::ExceptionRaised:
      ++component().exception_count;
      break;
    case EventKind::ComponentRemoved: {
      Component& c = component();
      for (auto& [id, k] : connectors_)
        if (k.source == c.id || k.target == c.id) k.connected = false;
      Component stored = c;
      components_.erase(e.target);
      removed_.insert_or_assign(stored.id, std::move(stored));
      break;
    }
    case EventKind::ComponentRestored: {
      auto it = removed_.find(e.target);
      if (it == removed_.end())
        throw ModelError("ComponentRestored: '" + e.target + "' was never removed");
      Component c = std::move(it->second);
      removed_.erase(it);
      c.state = ComponentState::Started;
      c.exception_count = 0;
      components_.emplace(c.id, std::move(c));
      break;
    }
    case EventKind::ConnectorBroken: {
      Connector& k = connector();
      if (!k.connected) throw ModelError("ConnectorBroken: '" + k.id + "' is already broken");
      k.connected = false;
      break;
    }
    case EventKind::ConnectorReconnected: {
      Connector& k = connector();
      if (k.connected) throw ModelError("ConnectorReconnected: '" + k.id + "' is connected");
      if (!find_component(k.source) || !find_component(k.target))
        throw ModelError("ConnectorReconnected: an endpoint of '" + k.id + "' is missing");
      k.connected = true;
      break;
    }
    case EventKind::FailureDiagnosed: {
      if (auto it = components_.find(e.target); it != components_.end()) {
        ++it->second.failure_counter;
      } else if (auto rt = removed_.find(e.target); rt != removed_.end()) {
        ++rt->second.failure_counter;
      } else if (!find_connector(e.target)) {
        throw ModelError("FailureDiagnosed: unknown target '" + e.target + "'");
      }
      break;
    }
  }
  e.seq = last_seq() + 1;
  log_.push_back(std::move(e));
  return log_.back().seq;
}

std::vector<ModelEvent> Architecture::drain_events(std::uint64_t since_seq) const {
  std::vector<ModelEvent> out;
  auto it = std::upper_bound(log_.begin(), log_.end(), since_seq,
                             [](std::uint64_t s, const ModelEvent& e) { return s < e.seq; });
  out.assign(it, log_.end());
  return out;
}

std::vector<const Connector*> Architecture::adjacent_connectors(std::string_view component) const {
  std::vector<const Connector*> out;
  for (const auto& [id, k] : connectors_)
    if (k.source == component || k.target == component) out.push_back(&k);
  return out;
}

bool Architecture::healthy(std::string_view id) const {
  const Component* c = find_component(id);
  if (!c || c->state != ComponentState::Started || c->exception_count > exception_threshold_)
    return false;
  for (const auto& [kid, k] : connectors_)
    if (k.source == id && !k.connected) return false;
  return true;
}

double Architecture::utility() const {
  double u = 0.0;
  for (const auto& [id, c] : components_)
    if (healthy(id)) u += c.criticality;
  return u;
}

ltl::Letter Architecture::valuation(TemplateId t, std::string_view target) const {
  ltl::Letter out;
  const std::string tgt(target);
  auto started = [&](const std::string& id) {
    const Component* c = find_component(id);
    return c && c->state == ComponentState::Started;
  };
  switch (t) {
    case TemplateId::Phi1:
    case TemplateId::Phi2: {
      const Component* c = find_component(target);
      if (!c) throw ModelError("valuation: unknown component '" + tgt + "'");
      if (t == TemplateId::Phi1) {
        if (c->state == ComponentState::Unknown) out.insert(grounded(props::kIsUnknown, tgt));
      } else {
        if (c->state == ComponentState::Started) out.insert(grounded(props::kIsStarted, tgt));
        if (c->exception_count <= exception_threshold_)
          out.insert(grounded(props::kLowException, tgt));
      }
      break;
    }
    case TemplateId::Phi3:
      if (find_component(target)) {
        out.insert(grounded(props::kPresent, tgt));
      } else if (!is_removed(target)) {
        throw ModelError("valuation: unknown component '" + tgt + "'");
      }
      break;
    case TemplateId::Phi4: {
      const Connector* k = find_connector(target);
      if (!k) throw ModelError("valuation: unknown connector '" + tgt + "'");
      if (started(k->source)) out.insert(grounded(props::kIsStarted, k->source));
      if (started(k->target)) out.insert(grounded(props::kIsStarted, k->target));
      if (k->connected) out.insert(grounded(props::kConnector, tgt));
      break;
    }
  }
  return out;
}

Architecture replay(const ArchitectureDescription& desc, const std::vector<ModelEvent>& log) {
  Architecture a = Architecture::load(desc);
  for (const auto& e : log) a.apply_event(e);
  return a;
}

}  // namespace rvheal::arch
