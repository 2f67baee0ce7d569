#include <gtest/gtest.h>

#include <random>

#include "rvheal/arch.hpp"

namespace {

using namespace rvheal::arch;

ArchitectureDescription pair_description(double c1 = 2, double c2 = 3) {
  ArchitectureDescription d;
  d.components = {{"Front", c1, {"IFront"}, {"IBack"}}, {"Back", c2, {"IBack"}, {}}};
  d.connectors = {{"k1", "Front", "IBack", "Back", "IBack"}};
  return d;
}

ModelEvent event(EventKind kind, const std::string& target, int loop = 0) {
  return ModelEvent{0, loop, kind, target, {}};
}

TEST(Load, DefaultArchitecture) {
  const auto a = Architecture::load(default_architecture());
  EXPECT_EQ(a.components().size(), 9u);
  EXPECT_EQ(a.connectors().size(), 8u);
  ASSERT_NE(a.find_component("Query_Service"), nullptr);
  EXPECT_EQ(a.find_component("Query_Service")->name, "Query Service");
  for (const auto& [id, c] : a.components()) {
    EXPECT_EQ(c.state, ComponentState::Started) << id;
    EXPECT_EQ(c.exception_count, 0);
    EXPECT_EQ(c.failure_counter, 0);
  }
  for (const auto& [id, k] : a.connectors()) EXPECT_TRUE(k.connected) << id;
  EXPECT_TRUE(a.event_log().empty());
  EXPECT_EQ(a.utility(), 26.5);
  EXPECT_EQ(a.resolve("Query Service"), "Query_Service");
  EXPECT_EQ(a.resolve("k2"), "k2");
  EXPECT_EQ(a.resolve("nope"), std::nullopt);
}

TEST(Load, EmptyArchitecture) {
  const auto a = Architecture::load({});
  EXPECT_TRUE(a.components().empty());
  EXPECT_EQ(a.utility(), 0.0);
}

TEST(Load, ValidationErrors) {
  auto d = pair_description();
  d.connectors[0].target_interface = "IMissing";
  EXPECT_THROW(Architecture::load(d), ModelError);

  d = pair_description();
  d.connectors[0].source = "Ghost";
  EXPECT_THROW(Architecture::load(d), ModelError);

  d = pair_description();
  d.components.push_back(d.components[0]);
  EXPECT_THROW(Architecture::load(d), ModelError);

  d = pair_description();
  d.connectors.push_back({"k2", "Front", "IBack", "Back", "IBack"});
  EXPECT_THROW(Architecture::load(d), ModelError);

  d = pair_description();
  d.exception_threshold = 0;
  EXPECT_THROW(Architecture::load(d), ModelError);
  d = pair_description();
  d.failure_threshold = -1;
  EXPECT_THROW(Architecture::load(d), ModelError);
}

TEST(ComponentId, Sanitizes) {
  EXPECT_EQ(component_id("Query Service"), "Query_Service");
  EXPECT_EQ(component_id("Bid and Buy  Service"), "Bid_and_Buy_Service");
  EXPECT_EQ(component_id("2fa-gate"), "c_2fa_gate");
}

TEST(ApplyEvent, StateChange) {
  auto a = Architecture::load(pair_description());
  const auto seq = a.change_state("Front", ComponentState::Unknown, 1);
  EXPECT_EQ(seq, 1u);
  EXPECT_EQ(a.find_component("Front")->state, ComponentState::Unknown);
  EXPECT_EQ(a.event_log().back().detail, "STARTED->UNKNOWN");
  EXPECT_EQ(to_json_line(a.event_log().back()),
            R"({"seq":1,"loop":1,"kind":"StateChanged","target":"Front","detail":"STARTED->UNKNOWN"})");
}

TEST(ApplyEvent, ExceptionsExceedThreshold) {
  auto a = Architecture::load(pair_description());
  for (int i = 0; i < 4; ++i) a.apply_event(event(EventKind::ExceptionRaised, "Back"));
  EXPECT_EQ(a.find_component("Back")->exception_count, 4);
  EXPECT_FALSE(a.valuation(TemplateId::Phi2, "Back").count("lowException@Back"));
}

TEST(ApplyEvent, RemovalAndRestore) {
  auto a = Architecture::load(pair_description());
  a.apply_event(event(EventKind::ExceptionRaised, "Back"));
  a.apply_event(event(EventKind::ComponentRemoved, "Back"));
  EXPECT_EQ(a.find_component("Back"), nullptr);
  EXPECT_TRUE(a.is_removed("Back"));
  EXPECT_FALSE(a.find_connector("k1")->connected);
  EXPECT_THROW(a.apply_event(event(EventKind::ConnectorReconnected, "k1")), ModelError);

  a.apply_event(event(EventKind::ComponentRestored, "Back"));
  ASSERT_NE(a.find_component("Back"), nullptr);
  EXPECT_EQ(a.find_component("Back")->state, ComponentState::Started);
  EXPECT_EQ(a.find_component("Back")->exception_count, 0);
  EXPECT_FALSE(a.is_removed("Back"));
  a.apply_event(event(EventKind::ConnectorReconnected, "k1"));
  EXPECT_EQ(a.utility(), 5.0);
}

TEST(ApplyEvent, Errors) {
  auto a = Architecture::load(pair_description());
  EXPECT_THROW(a.apply_event(event(EventKind::ExceptionRaised, "Ghost")), ModelError);
  EXPECT_THROW(a.apply_event(event(EventKind::ComponentRestored, "Front")), ModelError);
  EXPECT_THROW(a.apply_event(event(EventKind::ConnectorBroken, "Front")), ModelError);
  EXPECT_THROW(a.apply_event(event(EventKind::ConnectorReconnected, "k1")), ModelError);
  a.apply_event(event(EventKind::ConnectorBroken, "k1"));
  EXPECT_THROW(a.apply_event(event(EventKind::ConnectorBroken, "k1")), ModelError);
  // Failed events leave no trace in the log.
  EXPECT_EQ(a.event_log().size(), 1u);
}

TEST(Valuation, Examples) {
  auto a = Architecture::load(pair_description());
  EXPECT_EQ(a.valuation(TemplateId::Phi2, "Front"), (rvheal::ltl::Letter{"isStarted@Front", "lowException@Front"}));
  EXPECT_EQ(a.valuation(TemplateId::Phi1, "Front"), rvheal::ltl::Letter{});
  EXPECT_EQ(a.valuation(TemplateId::Phi3, "Front"), rvheal::ltl::Letter{"present@Front"});
  EXPECT_EQ(a.valuation(TemplateId::Phi4, "k1"),
            (rvheal::ltl::Letter{"isStarted@Front", "isStarted@Back", "connector@k1"}));

  a.change_state("Front", ComponentState::Unknown, 0);
  EXPECT_EQ(a.valuation(TemplateId::Phi1, "Front"), rvheal::ltl::Letter{"isUnknown@Front"});
  EXPECT_EQ(a.valuation(TemplateId::Phi2, "Front"), rvheal::ltl::Letter{"lowException@Front"});

  a.change_state("Front", ComponentState::Started, 0);
  a.apply_event(event(EventKind::ConnectorBroken, "k1"));
  EXPECT_EQ(a.valuation(TemplateId::Phi4, "k1"), (rvheal::ltl::Letter{"isStarted@Front", "isStarted@Back"}));

  a.apply_event(event(EventKind::ComponentRemoved, "Back"));
  EXPECT_EQ(a.valuation(TemplateId::Phi3, "Back"), rvheal::ltl::Letter{});
  EXPECT_THROW(a.valuation(TemplateId::Phi1, "Back"), ModelError);
  EXPECT_THROW(a.valuation(TemplateId::Phi3, "Ghost"), ModelError);
}

TEST(Valuation, IsPure) {
  auto a = Architecture::load(default_architecture());
  a.change_state("Query_Service", ComponentState::Unknown, 0);
  for (auto t : {TemplateId::Phi1, TemplateId::Phi2, TemplateId::Phi3})
    EXPECT_EQ(a.valuation(t, "Query_Service"), a.valuation(t, "Query_Service"));
}

TEST(Utility, Examples) {
  auto a = Architecture::load(pair_description());
  EXPECT_EQ(a.utility(), 5.0);
  a.change_state("Front", ComponentState::Unknown, 0);
  EXPECT_EQ(a.utility(), 3.0);
  a.change_state("Front", ComponentState::Started, 0);
  a.apply_event(event(EventKind::ConnectorBroken, "k1"));
  EXPECT_EQ(a.utility(), 3.0);
  a.apply_event(event(EventKind::ConnectorReconnected, "k1"));
  EXPECT_EQ(a.utility(), 5.0);
}

TEST(DrainEvents, Examples) {
  auto a = Architecture::load(pair_description());
  EXPECT_TRUE(a.drain_events(0).empty());
  a.apply_event(event(EventKind::ExceptionRaised, "Front"));
  a.apply_event(event(EventKind::ExceptionRaised, "Back"));
  a.apply_event(event(EventKind::ConnectorBroken, "k1"));
  const auto tail = a.drain_events(1);
  ASSERT_EQ(tail.size(), 2u);
  EXPECT_EQ(tail[0].seq, 2u);
  EXPECT_EQ(tail[1].seq, 3u);
  EXPECT_TRUE(a.drain_events(3).empty());
  EXPECT_TRUE(a.drain_events(10).empty());
  EXPECT_EQ(a.event_log().size(), 3u);
}

// Random valid mutations: replay equality, the utility/health equivalence,
// and inverse events restoring valuations.
TEST(Property, RandomMutations) {
  const auto desc = default_architecture();
  std::mt19937_64 gen(31);
  for (int run = 0; run < 50; ++run) {
    auto a = Architecture::load(desc);
    double total = 0;
    for (const auto& c : desc.components) total += c.criticality;
    for (int step = 0; step < 60; ++step) {
      std::vector<std::string> comps, removed, conns;
      for (const auto& [id, c] : a.components()) comps.push_back(id);
      for (const auto& [id, c] : a.removed()) removed.push_back(id);
      for (const auto& [id, k] : a.connectors()) conns.push_back(id);
      const auto pick = [&](const std::vector<std::string>& v) { return v[gen() % v.size()]; };
      try {
        switch (gen() % 7) {
          case 0:
            a.change_state(pick(comps), ComponentState::Unknown, step);
            break;
          case 1:
            a.change_state(pick(comps), ComponentState::Started, step);
            break;
          case 2:
            a.apply_event(event(EventKind::ExceptionRaised, pick(comps), step));
            break;
          case 3:
            if (comps.size() > 1) a.apply_event(event(EventKind::ComponentRemoved, pick(comps), step));
            break;
          case 4:
            if (!removed.empty()) a.apply_event(event(EventKind::ComponentRestored, pick(removed), step));
            break;
          case 5: {
            const auto k = pick(conns);
            const auto before = a.valuation(TemplateId::Phi4, k);
            if (a.find_connector(k)->connected) {
              a.apply_event(event(EventKind::ConnectorBroken, k, step));
              a.apply_event(event(EventKind::ConnectorReconnected, k, step));
              ASSERT_EQ(a.valuation(TemplateId::Phi4, k), before);
            }
            break;
          }
          default:
            a.apply_event(event(EventKind::ConnectorReconnected, pick(conns), step));
            break;
        }
      } catch (const ModelError&) {
        // Invalid for the current state; skipped.
      }
      bool all_healthy = a.removed().empty();
      for (const auto& [id, c] : a.components()) all_healthy = all_healthy && a.healthy(id);
      ASSERT_EQ(a.utility() == total, all_healthy);
      ASSERT_EQ(replay(desc, a.event_log()), a);
    }
  }
}

}  // namespace
