#include "rvheal/harness.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace rvheal::harness {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& msg) { throw ScenarioError("scenario: " + msg); }

const json& field(const json& obj, const char* name, const std::string& where) {
  auto it = obj.find(name);
  if (it == obj.end()) fail(where + ": missing field '" + name + "'");
  return *it;
}

template <typename T>
T get_as(const json& v, const std::string& where) {
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    fail(where + ": wrong type (" + v.type_name() + ")");
  }
}

int get_int(const json& v, const std::string& where) {
  if (!v.is_number_integer()) fail(where + ": expected an integer");
  return get_as<int>(v, where);
}

std::vector<std::string> get_strings(const json& v, const std::string& where) {
  if (!v.is_array()) fail(where + ": expected an array of strings");
  std::vector<std::string> out;
  for (const auto& s : v) {
    if (!s.is_string()) fail(where + ": expected an array of strings");
    out.push_back(s.get<std::string>());
  }
  return out;
}

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  for (const auto& [key, _] : obj.items())
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* k) { return key == k; }))
      fail(where + ": unknown field '" + key + "'");
}

}  // namespace

Scenario parse_scenario(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) fail("top level must be an object");
  check_keys(j,
             {"schema", "name", "mode", "seed", "loops", "exceptionThreshold", "failureThreshold",
              "components", "connectors", "injections"},
             "top level");

  if (int schema = get_int(field(j, "schema", "top level"), "schema"); schema != kScenarioSchema)
    fail("unsupported schema " + std::to_string(schema) + " (expected " +
         std::to_string(kScenarioSchema) + ")");

  Scenario s;
  if (j.contains("mode")) {
    auto mode = mape::parse_mode(get_as<std::string>(j["mode"], "mode"));
    if (!mode) fail("mode must be \"rv\" or \"baseline\"");
    s.mode = *mode;
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) fail("seed: expected a nonnegative integer");
    s.seed = j["seed"].get<std::uint64_t>();
  }
  s.loops = get_int(field(j, "loops", "top level"), "loops");
  if (s.loops < 1) fail("loops must be >= 1");

  const bool has_components = j.contains("components");
  if (has_components != j.contains("connectors"))
    fail("'components' and 'connectors' must be given together");
  if (has_components) {
    const auto& cs = j["components"];
    if (!cs.is_array()) fail("components: expected an array");
    for (std::size_t i = 0; i < cs.size(); ++i) {
      const std::string where = "components[" + std::to_string(i) + "]";
      const auto& c = cs[i];
      if (!c.is_object()) fail(where + ": expected an object");
      check_keys(c, {"name", "criticality", "provides", "requires"}, where);
      arch::ComponentSpec spec;
      spec.name = get_as<std::string>(field(c, "name", where), where + ".name");
      const auto& crit = field(c, "criticality", where);
      if (!crit.is_number()) fail(where + ".criticality: expected a number");
      spec.criticality = crit.get<double>();
      if (c.contains("provides")) spec.provides = get_strings(c["provides"], where + ".provides");
      if (c.contains("requires")) spec.requires_ = get_strings(c["requires"], where + ".requires");
      s.architecture.components.push_back(std::move(spec));
    }
    const auto& ks = j["connectors"];
    if (!ks.is_array()) fail("connectors: expected an array");
    for (std::size_t i = 0; i < ks.size(); ++i) {
      const std::string where = "connectors[" + std::to_string(i) + "]";
      const auto& k = ks[i];
      if (!k.is_object()) fail(where + ": expected an object");
      check_keys(k, {"id", "source", "sourceInterface", "target", "targetInterface"}, where);
      arch::ConnectorSpec spec;
      spec.id = get_as<std::string>(field(k, "id", where), where + ".id");
      spec.source = get_as<std::string>(field(k, "source", where), where + ".source");
      spec.source_interface =
          get_as<std::string>(field(k, "sourceInterface", where), where + ".sourceInterface");
      spec.target = get_as<std::string>(field(k, "target", where), where + ".target");
      spec.target_interface =
          get_as<std::string>(field(k, "targetInterface", where), where + ".targetInterface");
      s.architecture.connectors.push_back(std::move(spec));
    }
  } else {
    s.architecture = arch::default_architecture();
  }
  if (j.contains("exceptionThreshold"))
    s.architecture.exception_threshold = get_int(j["exceptionThreshold"], "exceptionThreshold");
  if (j.contains("failureThreshold"))
    s.architecture.failure_threshold = get_int(j["failureThreshold"], "failureThreshold");

  if (j.contains("injections")) {
    const auto& inj = j["injections"];
    if (inj.is_object()) {
      check_keys(inj, {"random"}, "injections");
      const auto& r = field(inj, "random", "injections");
      if (!r.is_object()) fail("injections.random: expected an object");
      check_keys(r, {"count", "maxLoop"}, "injections.random");
      RandomInjections ri;
      const int count = get_int(field(r, "count", "injections.random"), "injections.random.count");
      if (count < 0) fail("injections.random.count must be >= 0");
      ri.count = static_cast<std::size_t>(count);
      if (r.contains("maxLoop")) {
        ri.max_loop = get_int(r["maxLoop"], "injections.random.maxLoop");
        if (*ri.max_loop < 1 || *ri.max_loop >= s.loops)
          fail("injections.random.maxLoop must lie in [1, loops)");
      } else if (s.loops < 2) {
        fail("random injections need loops >= 2");
      }
      s.random = ri;
    } else if (inj.is_array()) {
      for (std::size_t i = 0; i < inj.size(); ++i) {
        const std::string where = "injections[" + std::to_string(i) + "]";
        const auto& e = inj[i];
        if (!e.is_object()) fail(where + ": expected an object");
        check_keys(e, {"loop", "kind", "target"}, where);
        fault::InjectionSpec spec;
        spec.loop = get_int(field(e, "loop", where), where + ".loop");
        if (spec.loop < 0 || spec.loop >= s.loops)
          fail(where + ".loop must lie in [0, loops)");
        const auto kind_text = get_as<std::string>(field(e, "kind", where), where + ".kind");
        auto kind = fault::parse_failure_kind(kind_text);
        if (!kind) fail(where + ".kind: unknown failure kind '" + kind_text + "'");
        spec.kind = *kind;
        spec.target = get_as<std::string>(field(e, "target", where), where + ".target");
        s.injections.push_back(std::move(spec));
      }
    } else {
      fail("injections: expected an array or an object");
    }
  }

  try {
    (void)arch::Architecture::load(s.architecture);
  } catch (const arch::ModelError& e) {
    fail(std::string("architecture: ") + e.what());
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError("cannot open scenario file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::vector<fault::InjectionSpec> resolve_schedule(const Scenario& s, const arch::Architecture& a,
                                                   std::uint64_t seed) {
  std::vector<fault::InjectionSpec> out;
  for (auto spec : s.injections) {
    auto id = a.resolve(spec.target);
    if (!id) fail("injection target '" + spec.target + "' does not exist");
    const bool is_connector = a.find_connector(*id) != nullptr;
    if (is_connector != (spec.kind == fault::FailureKind::CF4))
      fail("injection " + std::string(fault::to_string(spec.kind)) + " cannot target '" +
           spec.target + "'");
    spec.target = *id;
    out.push_back(std::move(spec));
  }
  if (s.random) {
    auto drawn = fault::random_schedule(seed, a, s.random->count, s.random->max_loop.value_or(s.loops - 1));
    out.insert(out.end(), drawn.begin(), drawn.end());
  }
  std::stable_sort(out.begin(), out.end(), [](const fault::InjectionSpec& x, const fault::InjectionSpec& y) {
    return x.loop < y.loop;
  });
  return out;
}

RunResult run_scenario(const Scenario& s, const RunOptions& opts) {
  RunResult r;
  r.seed = opts.seed.value_or(s.seed);
  r.mode = opts.mode.value_or(s.mode);
  auto a = arch::Architecture::load(s.architecture);
  r.initial_utility = a.utility();
  r.schedule = resolve_schedule(s, a, r.seed);
  mape::HealingLoop loop(std::move(a), r.schedule, r.mode);
  for (int i = 0; i < s.loops; ++i) r.records.push_back(loop.run_iteration(i));
  r.final_architecture = loop.architecture();
  return r;
}

std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

}  // namespace

std::string render_csv(const RunResult& r, const arch::ArchitectureDescription& desc) {
  std::ostringstream out;
  out << "# seed=" << r.seed << ",mode=" << mape::to_string(r.mode) << ",prng=" << fault::kPrngName
      << ",exceptionThreshold=" << desc.exception_threshold
      << ",failureThreshold=" << desc.failure_threshold << '\n';
  out << kCsvColumns << '\n';

  for (const auto& rec : r.records) {
    auto actions_for = [&](std::size_t d) {
      std::string joined;
      for (const auto& a : rec.plan.actions) {
        if (a.diagnosis != d) continue;
        if (!joined.empty()) joined += ';';
        joined += a.to_string();
      }
      return joined;
    };
    auto row = [&](const fault::InjectionSpec* inj, std::optional<std::size_t> d) {
      out << rec.loop << ',';
      if (inj)
        out << fault::to_string(inj->kind) << ',' << csv_field(inj->target) << ',';
      else
        out << ",,";
      if (d) {
        const auto& diag = rec.diagnoses[*d];
        out << fault::to_string(diag.kind) << ',' << csv_field(diag.target) << ','
            << csv_field(diag.root_target) << ',' << csv_field(actions_for(*d)) << ',';
      } else {
        out << ",,,,";
      }
      out << rec.detect_us << ',' << rec.heal_us << ',' << format_double(rec.utility) << '\n';
    };

    std::vector<bool> used(rec.diagnoses.size(), false);
    for (const auto& inj : rec.injections) {
      std::optional<std::size_t> match;
      for (std::size_t i = 0; i < rec.diagnoses.size(); ++i) {
        if (!used[i] && rec.diagnoses[i].kind == inj.spec.kind && rec.diagnoses[i].target == inj.spec.target) {
          match = i;
          used[i] = true;
          break;
        }
      }
      row(&inj.spec, match);
    }
    for (std::size_t i = 0; i < rec.diagnoses.size(); ++i)
      if (!used[i]) row(nullptr, i);
    if (rec.injections.empty() && rec.diagnoses.empty()) row(nullptr, std::nullopt);
  }
  return out.str();
}

std::string render_event_log(const arch::Architecture& a) {
  std::string out;
  for (const auto& e : a.event_log()) {
    out += arch::to_json_line(e);
    out += '\n';
  }
  return out;
}

std::vector<ltl::Formula> read_corpus(std::istream& in) {
  std::vector<ltl::Formula> out;
  std::string line;
  for (std::size_t n = 1; std::getline(in, line); ++n) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    try {
      out.push_back(ltl::parse(line));
    } catch (const ltl::ParseError& e) {
      throw CorpusError(e.what(), n);
    }
  }
  return out;
}

OracleCheckResult check_formula(const ltl::Formula& f, int max_trace_len, const MonitorFactory& factory,
                                ltl::OracleBounds bounds) {
  if (max_trace_len < 0) throw std::invalid_argument("max trace length must be >= 0");
  const auto props = ltl::atoms(f);
  if (props.size() > kMaxOracleAtoms)
    throw ltl::BudgetExceeded("formula " + ltl::unparse(f) + " has " + std::to_string(props.size()) +
                              " atoms; the oracle check allows at most " +
                              std::to_string(kMaxOracleAtoms));
  std::vector<std::string> names;
  for (const auto& p : props) names.push_back(p.grounded());
  std::vector<ltl::Letter> letters;
  for (std::uint32_t mask = 0; mask < (1u << names.size()); ++mask) {
    ltl::Letter l;
    for (std::size_t i = 0; i < names.size(); ++i)
      if (mask >> i & 1u) l.insert(names[i]);
    letters.push_back(std::move(l));
  }

  const monitor::MooreMonitor m = factory ? factory(f) : monitor::build_monitor(f);
  ltl::VerdictOracle oracle(f, bounds);
  OracleCheckResult result{f, m.state_count(), 0, 0, std::nullopt};

  // Depth-first over the trace tree so each prefix is progressed once.
  std::vector<ltl::Letter> trace;
  auto visit = [&](auto& self, const ltl::Formula& residual, monitor::StateId q) -> void {
    ++result.traces;
    const ltl::Verdict expected = oracle.of_residual(residual);
    const ltl::Verdict got = m.output(q);
    if (expected != got) {
      if (!result.first_mismatch) result.first_mismatch = OracleMismatch{trace, got, expected};
      ++result.mismatches;
    }
    if (static_cast<int>(trace.size()) == max_trace_len) return;
    for (const auto& l : letters) {
      trace.push_back(l);
      self(self, ltl::progress(residual, l), m.step(q, l).first);
      trace.pop_back();
    }
  };
  visit(visit, f, m.initial());
  return result;
}

}  // namespace rvheal::harness
