#include "srt/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "srt/errors.hpp"

namespace srt {

namespace {

std::string trim(std::string_view s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string_view::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return std::string(s.substr(a, b - a + 1));
}

std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream is{std::string(s)};
  for (std::string tok; is >> tok;) out.push_back(tok);
  return out;
}

double to_double(std::string_view s) {
  const std::string t = trim(s);
  double v = 0.0;
  const auto* end = t.data() + t.size();
  const auto [p, ec] = std::from_chars(t.data(), end, v);
  if (t.empty() || ec != std::errc() || p != end) throw ConfigError("not a number: '" + t + "'");
  return v;
}

std::size_t to_count(std::string_view s) {
  const std::string t = trim(s);
  std::size_t v = 0;
  const auto* end = t.data() + t.size();
  const auto [p, ec] = std::from_chars(t.data(), end, v);
  if (t.empty() || ec != std::errc() || p != end) throw ConfigError("not a count: '" + t + "'");
  return v;
}

class LiteralParser {
 public:
  explicit LiteralParser(std::string_view s) : s_(s) {}

  Workload parse() {
    Workload w = distribution();
    skip();
    if (i_ != s_.size()) fail("trailing characters");
    return w;
  }

 private:
  struct Arg {
    std::optional<double> number;
    std::optional<Workload> dist;
  };

  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("bad distribution '" + std::string(s_) + "': " + what);
  }
  void skip() {
    while (i_ < s_.size() && (s_[i_] == ' ' || s_[i_] == '\t')) ++i_;
  }
  void expect(char c) {
    skip();
    if (i_ >= s_.size() || s_[i_] != c) fail(std::string("expected '") + c + "'");
    ++i_;
  }

  Workload distribution() {
    skip();
    const std::size_t a = i_;
    while (i_ < s_.size() && (std::isalpha(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_')) ++i_;
    const std::string name(s_.substr(a, i_ - a));
    if (name.empty()) fail("expected a distribution name");
    expect('(');
    std::vector<Arg> args;
    skip();
    if (i_ < s_.size() && s_[i_] == ')') {
      ++i_;
    } else {
      for (;;) {
        args.push_back(arg());
        skip();
        if (i_ < s_.size() && s_[i_] == ',') {
          ++i_;
          continue;
        }
        expect(')');
        break;
      }
    }
    std::vector<double> nums;
    std::vector<Workload> dists;
    for (const auto& a2 : args) {
      if (a2.number) nums.push_back(*a2.number);
      if (a2.dist) dists.push_back(*a2.dist);
    }
    auto need = [&](std::size_t k) {
      if (nums.size() != k || !dists.empty()) fail(name + " takes " + std::to_string(k) + " number(s)");
    };
    try {
      if (name == "det" || name == "deterministic") {
        need(1);
        return Workload::deterministic(nums[0]);
      }
      if (name == "exp" || name == "exponential") {
        need(1);
        return Workload::exponential(nums[0]);
      }
      if (name == "gamma") {
        need(2);
        return Workload::gamma(nums[0], nums[1]);
      }
      if (name == "twopoint") {
        need(3);
        return Workload::two_point(nums[0], nums[1], nums[2]);
      }
      if (name == "empirical") {
        if (nums.empty() || !dists.empty()) fail("empirical takes a list of numbers");
        return Workload::empirical(nums);
      }
      if (name == "chain") {
        if (dists.empty() || !nums.empty()) fail("chain takes a list of distributions");
        return Workload::chain(dists);
      }
    } catch (const DomainError& e) {
      fail(e.what());
    }
    fail("unknown distribution '" + name + "'");
  }

  Arg arg() {
    skip();
    if (i_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[i_]))) return {std::nullopt, distribution()};
    const std::size_t a = i_;
    while (i_ < s_.size() && s_[i_] != ',' && s_[i_] != ')') ++i_;
    try {
      return {to_double(s_.substr(a, i_ - a)), std::nullopt};
    } catch (const ConfigError&) {
      fail("bad number '" + trim(s_.substr(a, i_ - a)) + "'");
    }
  }

  std::string_view s_;
  std::size_t i_ = 0;
};

std::vector<double> parse_grid(const std::string& v) {
  std::vector<double> out;
  if (v.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(v);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 3) throw ConfigError("range must be start:stop:step");
    const double lo = to_double(parts[0]);
    const double hi = to_double(parts[1]);
    const double step = to_double(parts[2]);
    if (!(step > 0.0) || hi < lo) throw ConfigError("bad range '" + v + "'");
    // build points as lo + k*step, rounded to 12 digits so 0.1:0.9:0.1 gives 0.3, not 0.30000000000000004
    const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9));
    for (std::size_t k = 0; k <= count; ++k) {
      const double x = lo + step * static_cast<double>(k);
      out.push_back(std::round(x * 1e12) / 1e12);
    }
  } else {
    for (const auto& tok : split_ws(v)) out.push_back(to_double(tok));
  }
  if (out.empty()) throw ConfigError("q grid is empty");
  for (double q : out) {
    if (!(q > 0.0 && q <= 1.0)) throw ConfigError("q grid values must lie in (0, 1]");
  }
  return out;
}

UserGroup parse_group(const std::string& v, double defaultPeriod) {
  const auto toks = split_ws(v);
  if (toks.size() < 2) throw ConfigError("group needs '<count> <distribution> [key=value ...]'");
  UserGroup g;
  g.count = to_count(toks[0]);
  if (g.count == 0) throw ConfigError("group count must be >= 1");
  g.user.workload = parse_workload(toks[1]);
  g.user.period = defaultPeriod;
  std::optional<double> factor;
  for (std::size_t i = 2; i < toks.size(); ++i) {
    const auto eq = toks[i].find('=');
    if (eq == std::string::npos) throw ConfigError("expected key=value, got '" + toks[i] + "'");
    const std::string key = toks[i].substr(0, eq);
    const double val = to_double(toks[i].substr(eq + 1));
    if (key == "qos") {
      g.user.qos = val;
      g.fixedQos = true;
    } else if (key == "period") {
      g.user.period = val;
    } else if (key == "est") {
      g.user.estimate = val;
    } else if (key == "est_factor") {
      factor = val;
    } else {
      throw ConfigError("unknown group key '" + key + "'");
    }
  }
  if (factor) g.user.estimate = *factor * g.user.workload.mean();
  return g;
}

}  // namespace

Workload parse_workload(std::string_view literal) { return LiteralParser(literal).parse(); }

std::size_t Scenario::user_count() const {
  std::size_t n = 0;
  for (const auto& g : groups) n += g.count;
  return n;
}

SystemSpec Scenario::system(double q) const {
  std::vector<UserSpec> users;
  for (const auto& g : groups) {
    UserSpec u = g.user;
    if (!g.fixedQos) u.qos = q;
    users.insert(users.end(), g.count, u);
  }
  return SystemSpec(std::move(users), cores);
}

Scenario Scenario::desk_scaled() const {
  if (!deskScaleUsers || *deskScaleUsers >= user_count()) return *this;
  Scenario s = *this;
  const double ratio = static_cast<double>(*deskScaleUsers) / static_cast<double>(user_count());
  for (auto& g : s.groups) {
    g.count = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(static_cast<double>(g.count) * ratio)));
  }
  s.name += "-desk";
  return s;
}

Scenario parse_scenario(std::istream& in) {
  Scenario s;
  s.groups.clear();
  double period = 1.0;
  bool sawPeriod = false;
  std::vector<std::pair<std::size_t, std::string>> groupLines;
  std::string line;
  for (std::size_t no = 1; std::getline(in, line); ++no) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", no);
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string val = trim(std::string_view(line).substr(eq + 1));
    try {
      if (key == "name") {
        if (val.empty()) throw ConfigError("name is empty");
        s.name = val;
      } else if (key == "period") {
        period = to_double(val);
        if (!(period > 0.0)) throw ConfigError("period must be > 0");
        sawPeriod = true;
      } else if (key == "group") {
        groupLines.emplace_back(no, val);
      } else if (key == "cores") {
        const std::size_t m = to_count(val);
        if (m == 0) throw ConfigError("cores must be >= 1");
        s.cores = SystemSpec::identical_cores(m);
      } else if (key == "speeds") {
        s.cores.clear();
        for (const auto& tok : split_ws(val)) {
          const double sp = to_double(tok);
          if (!(sp > 0.0)) throw ConfigError("speeds must be > 0");
          s.cores.push_back({sp});
        }
        if (s.cores.empty()) throw ConfigError("speeds is empty");
      } else if (key == "schedulers") {
        s.schedulers.clear();
        for (const auto& tok : split_ws(val)) s.schedulers.push_back(parse_scheduler(tok));
        if (s.schedulers.empty()) throw ConfigError("at least one scheduler required");
      } else if (key == "q_grid") {
        s.qGrid = parse_grid(val);
      } else if (key == "horizon") {
        s.horizon = to_count(val);
        if (s.horizon == 0) throw ConfigError("horizon must be >= 1");
      } else if (key == "seeds") {
        s.seeds.clear();
        for (const auto& tok : split_ws(val)) s.seeds.push_back(to_count(tok));
        if (s.seeds.empty()) throw ConfigError("seeds is empty");
      } else if (key == "m_max") {
        s.mMax = to_count(val);
      } else if (key == "desk_scale_users") {
        s.deskScaleUsers = to_count(val);
      } else {
        throw ConfigError("unknown key '" + key + "'");
      }
    } catch (const ConfigError& e) {
      if (e.line() != 0) throw;
      throw ConfigError(e.what(), no);
    }
  }
  if (!sawPeriod && groupLines.empty()) throw ConfigError("scenario declares no users");
  for (const auto& [no, val] : groupLines) {
    try {
      s.groups.push_back(parse_group(val, period));
    } catch (const ConfigError& e) {
      throw ConfigError(e.what(), no);
    }
  }
  if (s.groups.empty()) throw ConfigError("scenario declares no users");
  // surface period-structure problems (super period too long, ...) now
  (void)s.system(s.qGrid.front());
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file '" + path + "'");
  return parse_scenario(in);
}

std::optional<Scenario> builtin_scenario(std::string_view name) {
  const std::string_view text = [&]() -> std::string_view {
    if (name == "fig2") {
      return "name = fig2\n"
             "period = 50\n"
             "group = 200 gamma(5,1)\n"
             "schedulers = reservation ldf-greedy\n"
             "q_grid = 0.05:0.95:0.05\n"
             "desk_scale_users = 50\n";
    }
    if (name == "fig3-top") {
      return "name = fig3-top\n"
             "period = 9\n"
             "group = 30 det(5)\n"
             "schedulers = reservation ldf-greedy ldf-ts-llref\n"
             "q_grid = 0.1:0.9:0.1\n";
    }
    if (name == "fig3-bottom") {
      return "name = fig3-bottom\n"
             "period = 9\n"
             "group = 30 gamma(100,0.05) est_factor=1.1\n"
             "schedulers = reservation ldf-greedy ldf-ts-llref-est\n"
             "q_grid = 0.1 0.2 0.3 0.4 0.5 0.6 0.7 0.8 0.9 0.95\n";
    }
    if (name == "appendix-a2") {
      return "name = appendix-a2\n"
             "period = 1.5\n"
             "group = 4 det(1)\n"
             "cores = 2\n"
             "schedulers = ldf-greedy ldf-ts-llref\n"
             "q_grid = 0.75\n";
    }
    if (name == "nonnbue") {
      return "name = nonnbue\n"
             "period = 20\n"
             "group = 20 twopoint(1,9,0.5)\n"
             "cores = 1\n"
             "schedulers = ldf-greedy\n"
             "q_grid = 0.5\n";
    }
    return {};
  }();
  if (text.empty()) return std::nullopt;
  std::istringstream in{std::string(text)};
  return parse_scenario(in);
}

std::vector<std::string> builtin_scenario_names() {
  return {"fig2", "fig3-top", "fig3-bottom", "appendix-a2", "nonnbue"};
}

std::string format_scenario(const Scenario& s) {
  std::ostringstream os;
  os.precision(12);
  os << "name = " << s.name << "\n";
  for (const auto& g : s.groups) {
    os << "group = " << g.count << " " << g.user.workload.to_string() << " period=" << g.user.period;
    if (g.fixedQos) os << " qos=" << g.user.qos;
    if (g.user.estimate) os << " est=" << *g.user.estimate;
    os << "\n";
  }
  os << "speeds =";
  for (const auto& c : s.cores) os << " " << c.speed;
  os << "\nschedulers =";
  for (auto k : s.schedulers) os << " " << scheduler_name(k);
  os << "\nq_grid =";
  for (double q : s.qGrid) os << " " << q;
  os << "\nhorizon = " << s.horizon << "\nseeds =";
  for (auto seed : s.seeds) os << " " << seed;
  os << "\n";
  if (s.mMax) os << "m_max = " << s.mMax << "\n";
  if (s.deskScaleUsers) os << "desk_scale_users = " << *s.deskScaleUsers << "\n";
  return os.str();
}

}  // namespace srt
