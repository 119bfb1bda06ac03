#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "srt/model.hpp"
#include "srt/policy.hpp"
#include "srt/workload.hpp"

namespace srt {

/// Users declared together on one `group` line.
struct UserGroup {
  std::size_t count = 1;
  UserSpec user;
  /// qos declared on the line; otherwise the scenario's q grid drives it.
  bool fixedQos = false;
};

struct Scenario {
  std::string name = "scenario";
  std::vector<UserGroup> groups;
  std::vector<CoreSpec> cores{CoreSpec{}};
  std::vector<SchedulerKind> schedulers{SchedulerKind::ldfGreedy};
  std::vector<double> qGrid{0.5};
  std::size_t horizon = 3000;
  std::vector<std::uint64_t> seeds{1};
  std::size_t mMax = 0;  ///< 0: twice the users plus the reservation bound
  std::optional<std::size_t> deskScaleUsers;

  std::size_t user_count() const;
  /// System with the given q applied to every user without a fixed qos.
  SystemSpec system(double q) const;
  /// Copy with group sizes scaled so the user count is deskScaleUsers.
  Scenario desk_scaled() const;
};

/// Distribution literals: det(v), exp(mean), gamma(shape,scale),
/// twopoint(low,high,pLow), empirical(x1,x2,...), chain(d1,d2,...).
Workload parse_workload(std::string_view literal);

/// Line-oriented `key = value` text; `#` starts a comment. Errors carry the
/// offending line number (ConfigError).
Scenario parse_scenario(std::istream& in);
Scenario load_scenario(const std::string& path);

/// Named scenarios: fig2, fig3-top, fig3-bottom, appendix-a2, nonnbue.
std::optional<Scenario> builtin_scenario(std::string_view name);
std::vector<std::string> builtin_scenario_names();

/// Writes a scenario back in the text format.
std::string format_scenario(const Scenario& s);

}  // namespace srt
