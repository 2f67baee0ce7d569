#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rvheal/arch.hpp"

namespace rvheal::fault {

/// CF1 unknown state, CF2 exceptions above threshold, CF3 component removed,
/// CF4 connector broken.
enum class FailureKind { CF1, CF2, CF3, CF4 };

std::string_view to_string(FailureKind k);
std::optional<FailureKind> parse_failure_kind(std::string_view s);

struct InjectionSpec {
  int loop = 0;
  FailureKind kind = FailureKind::CF1;
  /// Component id (CF1-CF3) or connector id (CF4).
  std::string target;

  friend bool operator==(const InjectionSpec&, const InjectionSpec&) = default;
};

struct InjectionReport {
  InjectionSpec spec;
  std::vector<std::uint64_t> emitted_events;
  std::chrono::steady_clock::time_point wall;
};

class InjectionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Breaks `spec.target` through Architecture::apply_event. The target must
/// currently be healthy in the dimension being broken.
InjectionReport inject(arch::Architecture& a, const InjectionSpec& spec);

/// Specs scheduled for `loop`, in schedule order.
std::vector<InjectionSpec> due_injections(const std::vector<InjectionSpec>& schedule, int loop);

inline constexpr std::string_view kPrngName = "mt19937_64";

/// `count` injections at loops in [1, max_loop], drawn from std::mt19937_64
/// seeded with `seed` (bounded draws by rejection sampling, so the stream is
/// identical on every platform). Injections sharing a loop never touch a
/// common component (a connector touches both endpoints). Sorted by loop,
/// stable.
std::vector<InjectionSpec> random_schedule(std::uint64_t seed, const arch::Architecture& a,
                                           std::size_t count, int max_loop);

}  // namespace rvheal::fault
