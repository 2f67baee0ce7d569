#include "rvheal/fault.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <set>

namespace rvheal::fault {

using arch::Architecture;
using arch::ComponentState;
using arch::EventKind;
using arch::ModelEvent;

std::string_view to_string(FailureKind k) {
  switch (k) {
    case FailureKind::CF1:
      return "CF1";
    case FailureKind::CF2:
      return "CF2";
    case FailureKind::CF3:
      return "CF3";
    case FailureKind::CF4:
      return "CF4";
  }
  return "CF1";
}

std::optional<FailureKind> parse_failure_kind(std::string_view s) {
  for (auto k : {FailureKind::CF1, FailureKind::CF2, FailureKind::CF3, FailureKind::CF4})
    if (to_string(k) == s) return k;
  return std::nullopt;
}

InjectionReport inject(Architecture& a, const InjectionSpec& spec) {
  InjectionReport report{spec, {}, std::chrono::steady_clock::now()};
  const std::string label = std::string(to_string(spec.kind)) + " on '" + spec.target + "'";
  auto emit = [&](EventKind kind, const std::string& target, std::string detail = {}) {
    report.emitted_events.push_back(a.apply_event(ModelEvent{0, spec.loop, kind, target, std::move(detail)}));
  };

  if (spec.kind == FailureKind::CF4) {
    const auto* k = a.find_connector(spec.target);
    if (!k) throw InjectionError(label + ": no such connector");
    if (!k->connected) throw InjectionError(label + ": connector is already broken");
    emit(EventKind::ConnectorBroken, spec.target);
    return report;
  }

  const auto* c = a.find_component(spec.target);
  if (!c) throw InjectionError(label + ": no such component");
  switch (spec.kind) {
    case FailureKind::CF1:
      if (c->state == ComponentState::Unknown)
        throw InjectionError(label + ": component is already UNKNOWN");
      report.emitted_events.push_back(a.change_state(spec.target, ComponentState::Unknown, spec.loop));
      break;
    case FailureKind::CF2: {
      if (c->exception_count > a.exception_threshold())
        throw InjectionError(label + ": exception count is already above threshold");
      const int burst = a.exception_threshold() + 1 - c->exception_count;
      for (int i = 0; i < burst; ++i) emit(EventKind::ExceptionRaised, spec.target);
      // The failing component's provided interfaces are disconnected too.
      std::vector<std::string> provided;
      for (const auto* k : a.adjacent_connectors(spec.target))
        if (k->target == spec.target && k->connected) provided.push_back(k->id);
      for (const auto& id : provided) emit(EventKind::ConnectorBroken, id);
      break;
    }
    case FailureKind::CF3:
      emit(EventKind::ComponentRemoved, spec.target);
      break;
    case FailureKind::CF4:
      break;
  }
  return report;
}

std::vector<InjectionSpec> due_injections(const std::vector<InjectionSpec>& schedule, int loop) {
  std::vector<InjectionSpec> out;
  std::copy_if(schedule.begin(), schedule.end(), std::back_inserter(out),
               [loop](const InjectionSpec& s) { return s.loop == loop; });
  return out;
}

namespace {

// Uniform draw in [0, bound) without std::uniform_int_distribution, whose
// output is implementation-defined.
std::uint64_t draw(std::mt19937_64& gen, std::uint64_t bound) {
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound + 1) % bound;
  while (true) {
    const std::uint64_t x = gen();
    if (x <= limit) return x % bound;
  }
}

}  // namespace

std::vector<InjectionSpec> random_schedule(std::uint64_t seed, const Architecture& a,
                                           std::size_t count, int max_loop) {
  if (max_loop < 1) throw std::invalid_argument("random_schedule: max_loop must be >= 1");
  if (count == 0) return {};
  std::vector<std::string> components;
  for (const auto& [id, c] : a.components()) components.push_back(id);
  std::vector<std::string> connectors;
  for (const auto& [id, k] : a.connectors()) connectors.push_back(id);

  const std::size_t slots = static_cast<std::size_t>(max_loop) * (components.size() + connectors.size());
  if (count > slots)
    throw InjectionError("random_schedule: " + std::to_string(count) + " injections exceed the " +
                         std::to_string(slots) + " distinct (loop, target) slots");

  std::vector<FailureKind> kinds;
  if (!components.empty()) kinds = {FailureKind::CF1, FailureKind::CF2, FailureKind::CF3};
  if (!connectors.empty()) kinds.push_back(FailureKind::CF4);

  auto footprint = [&](FailureKind kind, const std::string& target) {
    std::set<std::string> out;
    if (kind == FailureKind::CF4) {
      const auto* k = a.find_connector(target);
      out = {k->source, k->target};
    } else {
      out = {target};
    }
    return out;
  };

  std::mt19937_64 gen(seed);
  std::vector<InjectionSpec> out;
  std::map<int, std::set<std::string>> touched;  // loop -> components touched
  const std::size_t max_attempts = 10'000 + 100 * count;
  for (std::size_t attempt = 0; out.size() < count; ++attempt) {
    if (attempt >= max_attempts)
      throw InjectionError("random_schedule: could not place " + std::to_string(count) +
                           " non-interfering injections within " + std::to_string(max_loop) +
                           " loops");
    const FailureKind kind = kinds[draw(gen, kinds.size())];
    const auto& pool = kind == FailureKind::CF4 ? connectors : components;
    const std::string& target = pool[draw(gen, pool.size())];
    const int loop = 1 + static_cast<int>(draw(gen, static_cast<std::uint64_t>(max_loop)));
    const auto fp = footprint(kind, target);
    auto& used = touched[loop];
    const bool clash = std::any_of(out.begin(), out.end(), [&](const InjectionSpec& s) {
      return s.loop == loop && s.target == target;
    }) || std::any_of(fp.begin(), fp.end(), [&](const std::string& c) { return used.count(c) > 0; });
    if (clash) continue;
    used.insert(fp.begin(), fp.end());
    out.push_back({loop, kind, target});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const InjectionSpec& x, const InjectionSpec& y) { return x.loop < y.loop; });
  return out;
}

}  // namespace rvheal::fault
