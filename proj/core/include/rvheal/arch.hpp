#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rvheal/ltl.hpp"

namespace rvheal::arch {

enum class ComponentState { Undeployed, Deployed, Started, Unknown };

std::string_view to_string(ComponentState s);
std::optional<ComponentState> parse_component_state(std::string_view s);

struct Component {
  std::string id;
  std::string name;
  double criticality = 0.0;
  ComponentState state = ComponentState::Started;
  int exception_count = 0;
  /// Number of failures diagnosed on this component so far.
  int failure_counter = 0;
  std::vector<std::string> provides;
  std::vector<std::string> requires_;

  friend bool operator==(const Component&, const Component&) = default;
};

/// Wires `source`'s required interface to `target`'s provided interface.
struct Connector {
  std::string id;
  std::string source;
  std::string source_interface;
  std::string target;
  std::string target_interface;
  bool connected = true;

  friend bool operator==(const Connector&, const Connector&) = default;
};

enum class EventKind {
  StateChanged,
  ExceptionRaised,
  ComponentRemoved,
  ComponentRestored,
  ConnectorBroken,
  ConnectorReconnected,
  FailureDiagnosed,
};

std::string_view to_string(EventKind k);
std::optional<EventKind> parse_event_kind(std::string_view s);

struct ModelEvent {
  std::uint64_t seq = 0;
  int loop = 0;
  EventKind kind = EventKind::StateChanged;
  std::string target;
  /// `OLD->NEW` for StateChanged, the failure kind for FailureDiagnosed.
  std::string detail;

  friend bool operator==(const ModelEvent&, const ModelEvent&) = default;
};

/// JSON object with fields seq, loop, kind, target, detail in that order.
std::string to_json_line(const ModelEvent& e);

struct ComponentSpec {
  std::string name;
  double criticality = 1.0;
  std::vector<std::string> provides;
  std::vector<std::string> requires_;
};

struct ConnectorSpec {
  std::string id;
  std::string source;
  std::string source_interface;
  std::string target;
  std::string target_interface;
};

struct ArchitectureDescription {
  std::vector<ComponentSpec> components;
  std::vector<ConnectorSpec> connectors;
  int exception_threshold = 3;
  int failure_threshold = 2;
};

/// Nine-service marketplace with eight connectors. Only the Query Service is
/// taken from the reference scenario; the rest of the topology is plumbing.
ArchitectureDescription default_architecture();

/// Identifier derived from a display name: runs of characters outside
/// [A-Za-z0-9_] become '_' ("Query Service" -> "Query_Service").
std::string component_id(std::string_view name);

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Which of the four monitored failure properties a valuation is for.
enum class TemplateId { Phi1, Phi2, Phi3, Phi4 };

std::string_view to_string(TemplateId t);

/// Proposition names grounded by `Architecture::valuation`.
namespace props {
inline constexpr std::string_view kIsUnknown = "isUnknown";
inline constexpr std::string_view kIsStarted = "isStarted";
inline constexpr std::string_view kLowException = "lowException";
inline constexpr std::string_view kPresent = "present";
inline constexpr std::string_view kConnector = "connector";
}  // namespace props

std::string grounded(std::string_view prop, std::string_view target);

class Architecture {
 public:
  /// All components STARTED, all connectors connected, counters zero.
  static Architecture load(const ArchitectureDescription& desc);

  const std::map<std::string, Component, std::less<>>& components() const { return components_; }
  const std::map<std::string, Connector, std::less<>>& connectors() const { return connectors_; }
  const std::map<std::string, Component, std::less<>>& removed() const { return removed_; }

  const Component* find_component(std::string_view id) const;
  const Connector* find_connector(std::string_view id) const;
  bool is_removed(std::string_view id) const;

  /// Accepts a component id, a display name, or a connector id.
  std::optional<std::string> resolve(std::string_view name_or_id) const;

  int exception_threshold() const { return exception_threshold_; }
  int failure_threshold() const { return failure_threshold_; }

  /// Single mutation funnel. Assigns the next sequence number (the incoming
  /// seq is ignored), applies the event and appends it to the log.
  std::uint64_t apply_event(ModelEvent e);

  std::uint64_t change_state(const std::string& id, ComponentState to, int loop);

  const std::vector<ModelEvent>& event_log() const { return log_; }
  std::vector<ModelEvent> drain_events(std::uint64_t since_seq) const;
  std::uint64_t last_seq() const { return log_.empty() ? 0 : log_.back().seq; }

  /// Connectors having `component` as source or target, ordered by id.
  std::vector<const Connector*> adjacent_connectors(std::string_view component) const;

  /// STARTED, exceptions within threshold, and every outgoing connector connected.
  bool healthy(std::string_view component) const;
  double utility() const;

  /// Grounded atoms true for `target` under the given property template.
  ltl::Letter valuation(TemplateId t, std::string_view target) const;

  friend bool operator==(const Architecture&, const Architecture&) = default;

 private:
  std::map<std::string, Component, std::less<>> components_;
  std::map<std::string, Connector, std::less<>> connectors_;
  std::map<std::string, Component, std::less<>> removed_;
  std::map<std::string, std::string, std::less<>> names_;  // display name -> id
  std::vector<ModelEvent> log_;
  int exception_threshold_ = 3;
  int failure_threshold_ = 2;
};

/// Re-applies `log` to a freshly loaded `desc`.
Architecture replay(const ArchitectureDescription& desc, const std::vector<ModelEvent>& log);

}  // namespace rvheal::arch
