#include "srt/experiments.hpp"

#include <atomic>
#include <cstdio>
#include <functional>
#include <limits>
#include <sstream>
#include <thread>

#include "srt/errors.hpp"

namespace srt {

namespace {

constexpr std::size_t kUnbounded = std::numeric_limits<std::size_t>::max();

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

std::string count(std::size_t m) { return m == kUnbounded ? "inf" : std::to_string(m); }

Scenario effective(const Scenario& s, const ExperimentOptions& opts) {
  Scenario e = opts.deskScale ? s.desk_scaled() : s;
  if (opts.seed) e.seeds = {*opts.seed};
  if (opts.horizon) e.horizon = *opts.horizon;
  return e;
}

std::size_t default_m_max(const Scenario& s, const BoundsReport& b) {
  if (s.mMax) return s.mMax;
  std::size_t m = 2 * s.user_count();
  if (b.mRB != kUnbounded) m = std::max(m, b.mRB + 1);
  return m;
}

}  // namespace

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn) {
  if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(count);
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::vector<SavingsRow> run_scan(const Scenario& scenario, const ExperimentOptions& opts) {
  const Scenario s = effective(scenario, opts);
  std::vector<SavingsRow> rows;
  for (double q : s.qGrid) {
    for (auto k : s.schedulers) {
      SavingsRow r;
      r.scenario = s.name;
      r.q = q;
      r.scheduler = scheduler_name(k);
      rows.push_back(r);
    }
  }
  parallel_for(rows.size(), opts.threads, [&](std::size_t idx) {
    SavingsRow& r = rows[idx];
    const SchedulerKind kind = s.schedulers[idx % s.schedulers.size()];
    try {
      const SystemSpec sys = s.system(r.q);
      const double speed = sys.cores().front().speed;
      const auto b = resource_calculators(sys.qos(), sys.with_cores(SystemSpec::identical_cores(1, speed)));
      r.mRB = b.mRB;
      r.mLB = b.mLB;
      r.mEst = b.mEstGreedy;
      r.mMax = default_m_max(s, b);
      std::size_t worst = 0;
      bool exceeded = false;
      for (auto seed : s.seeds) {
        const auto need = required_cores(sys, kind, s.horizon, seed, r.mMax);
        exceeded |= need.exceeded;
        worst = std::max(worst, need.cores);
      }
      if (!exceeded) r.mRequired = worst;
      r.feasible = !exceeded;
      if (r.mRB != kUnbounded && r.mRB > 0) {
        r.upperBound = 1.0 - static_cast<double>(r.mLB) / static_cast<double>(r.mRB);
        if (r.mRequired) r.savings = 1.0 - static_cast<double>(*r.mRequired) / static_cast<double>(r.mRB);
      }
      if (r.mRequired && *r.mRequired < r.mLB) {
        r.error = "required cores below the capacity lower bound";
      }
    } catch (const std::exception& e) {
      r.error = e.what();
    }
  });
  return rows;
}

std::vector<BoundsRow> run_bounds(const Scenario& scenario, const ExperimentOptions& opts) {
  const Scenario s = effective(scenario, opts);
  std::vector<BoundsRow> rows;
  for (double q : s.qGrid) {
    const SystemSpec sys = s.system(q);
    rows.push_back({s.name, q, resource_calculators(sys.qos(), sys)});
  }
  return rows;
}

std::vector<SimulateRow> run_simulate(const Scenario& scenario, const ExperimentOptions& opts) {
  const Scenario s = effective(scenario, opts);
  struct Cell {
    double q;
    SchedulerKind kind;
    std::uint64_t seed;
    std::vector<SimulateRow> rows;
  };
  std::vector<Cell> cells;
  for (double q : s.qGrid) {
    for (auto k : s.schedulers) {
      for (auto seed : s.seeds) cells.push_back({q, k, seed, {}});
    }
  }
  parallel_for(cells.size(), opts.threads, [&](std::size_t idx) {
    Cell& c = cells[idx];
    const SystemSpec sys = s.system(c.q);
    SimulateRow base;
    base.scenario = s.name;
    base.q = c.q;
    base.scheduler = scheduler_name(c.kind);
    base.seed = c.seed;
    try {
      const auto res = run(SimulationConfig{sys, c.kind, s.horizon, c.seed, true});
      for (std::size_t i = 0; i < sys.n(); ++i) {
        SimulateRow r = base;
        r.user = i;
        r.qos = sys.users()[i].qos;
        r.fraction = res.fractions[i];
        r.feasible = res.feasible;
        r.meanDeficit = res.meanDeficit[i];
        r.maxDeficit = res.maxDeficit[i];
        r.unfinished = res.observables.unfinished[i];
        r.residual = res.observables.residual[i];
        r.busy = res.observables.busy[i];
        c.rows.push_back(r);
      }
    } catch (const std::exception& e) {
      base.error = e.what();
      c.rows.push_back(base);
    }
  });
  std::vector<SimulateRow> rows;
  for (auto& c : cells) rows.insert(rows.end(), c.rows.begin(), c.rows.end());
  return rows;
}

std::string savings_csv(const std::vector<SavingsRow>& rows) {
  std::ostringstream os;
  os << "scenario,q,scheduler,m_required,m_rb,m_lb,m_est,savings,upper_bound,feasible\n";
  for (const auto& r : rows) {
    os << r.scenario << ',' << num(r.q) << ',' << r.scheduler << ',';
    if (r.mRequired) os << *r.mRequired;
    os << ',' << count(r.mRB) << ',' << count(r.mLB) << ',';
    if (r.mEst) os << count(*r.mEst);
    os << ',';
    if (r.savings) os << num(*r.savings);
    os << ',';
    if (r.upperBound) os << num(*r.upperBound);
    os << ',' << (r.feasible ? "true" : "false") << '\n';
  }
  return os.str();
}

std::string bounds_csv(const std::vector<BoundsRow>& rows) {
  std::ostringstream os;
  os << "scenario,q,m_rb,m_lb,m_est,gamma1,gamma1_np,gamma2,in_rob,in_frb\n";
  for (const auto& r : rows) {
    const auto& b = r.report;
    os << r.scenario << ',' << num(r.q) << ',' << count(b.mRB) << ',' << count(b.mLB) << ',';
    if (b.mEstGreedy) os << count(*b.mEstGreedy);
    os << ',' << num(b.gamma1) << ',' << num(b.gamma1NonPreemptive) << ',' << num(b.gamma2) << ','
       << (b.inROB ? "true" : "false") << ',' << (b.inFRB ? "true" : "false") << '\n';
  }
  return os.str();
}

std::string simulate_csv(const std::vector<SimulateRow>& rows) {
  std::ostringstream os;
  os << "scenario,q,scheduler,seed,user,qos,fraction,feasible,mean_deficit,max_deficit,"
        "mean_unfinished,mean_residual,mean_busy,error\n";
  for (const auto& r : rows) {
    os << r.scenario << ',' << num(r.q) << ',' << r.scheduler << ',' << r.seed << ',';
    if (!r.error.empty()) {
      os << ",,,,,,,,," << '"' << r.error << '"' << '\n';
      continue;
    }
    os << r.user << ',' << num(r.qos) << ',' << num(r.fraction) << ',' << (r.feasible ? "true" : "false") << ','
       << num(r.meanDeficit) << ',' << num(r.maxDeficit) << ',' << num(r.unfinished.mean) << ','
       << num(r.residual.mean) << ',' << num(r.busy.mean) << ",\n";
  }
  return os.str();
}

}  // namespace srt
