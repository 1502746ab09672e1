#include "hazard/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"

namespace hazard {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

RunArtifacts run_experiment(const BuiltExperiment& built) {
  RunArtifacts art;
  art.summary = estimate_optimality(built.system, built.plan);
  const ReplicationSummary& s = art.summary;

  const std::filesystem::path dir(built.out_dir);
  std::filesystem::create_directories(dir);
  art.replications_csv = dir / "replications.csv";
  art.curve_csv = dir / "curve.csv";
  art.summary_json = dir / "summary.json";

  {
    std::ofstream out(art.replications_csv, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + art.replications_csv.string());
    out << "replication,seed,terminal_P,classification\n";
    for (long long r = 0; r < s.replications; ++r) {
      const double p = s.terminal_p[static_cast<std::size_t>(r)];
      out << r << ',' << s.rep_seeds[static_cast<std::size_t>(r)] << ',' << format_double(p)
          << ',' << to_string(classify_terminal(p, built.plan.class_hi, built.plan.class_lo))
          << '\n';
    }
  }
  {
    std::ofstream out(art.curve_csv, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + art.curve_csv.string());
    out << "t,mean_P,se_P,mean_hazard\n";
    for (const CurvePoint& cp : s.curve) {
      out << cp.t << ',' << format_double(cp.mean_p) << ',' << format_double(cp.se_p) << ','
          << format_double(cp.mean_hazard) << '\n';
    }
  }
  {
    nlohmann::ordered_json j;
    j["model"] = built.system.model->name();
    j["horizon"] = s.horizon;
    j["replications"] = s.replications;
    j["master_seed"] = s.master_seed;
    j["count_optimal"] = s.count_optimal;
    j["count_null"] = s.count_null;
    j["count_indeterminate"] = s.count_indeterminate;
    j["optimality_frequency"] =
        static_cast<double>(s.count_optimal) / static_cast<double>(s.replications);
    j["optimality_wilson95"] = {{"lo", s.optimal_interval.lo}, {"hi", s.optimal_interval.hi}};
    j["mean_terminal_P"] = s.mean_terminal;
    j["se_terminal_P"] = s.se_terminal;
    j["floor_checked"] = s.floor_checked;
    j["floor_violations"] = s.floor_violations;
    std::ofstream out(art.summary_json, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + art.summary_json.string());
    out << j.dump(2) << "\n";
  }
  return art;
}

namespace {

std::string num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

const char* status_str(CheckRow::Status s) {
  switch (s) {
    case CheckRow::Status::kPass: return "pass";
    case CheckRow::Status::kFail: return "FAIL";
    case CheckRow::Status::kInfeasible: return "infeasible";
  }
  return "?";
}

}  // namespace

CheckReport check_experiment(const BuiltExperiment& built) {
  CheckReport rep;
  rep.tightest_ratio = std::numeric_limits<double>::quiet_NaN();
  rep.tightest_delta = std::numeric_limits<double>::infinity();
  const Model& model = *built.system.model;
  const int W = model.num_individuals();
  const int A = model.num_actions();
  const std::vector<long long> times = {0, 1, 2, 5, 10};

  const auto* re = dynamic_cast<const RothErevModel*>(&model);
  auto fill_states = [&](const std::vector<Configuration>& cfgs, long long t) {
    std::vector<SystemState> states = states_at(cfgs, t);
    // The attraction-state model carries its weights in the info payload.
    if (re != nullptr) {
      for (auto& st : states) {
        const auto row = st.config.row(0);
        st.info.resize(row.size());
        for (std::size_t a = 0; a < row.size(); ++a) st.info[a] = row[a] * re->initial_total();
      }
    }
    return states;
  };

  // Probe the per-state enumeration cost at the uniform interior state, then
  // pick the finest grid whose total outcome count fits the budget.
  constexpr double kOutcomeBudget = 4e6;
  double per_state = 0.0;
  std::string grid_reason;
  try {
    std::vector<Configuration> probe_cfg;
    probe_cfg.emplace_back(W, A,
                           std::vector<double>(static_cast<std::size_t>(W) * A, 1.0 / A));
    const auto probe_states = fill_states(probe_cfg, 0);
    per_state = static_cast<double>(model.enumerate_outcomes(probe_states.front()).size());
  } catch (const UnsupportedError& e) {
    grid_reason = e.what();
  }

  std::vector<Configuration> configs;
  int used_ppa = 0;
  if (grid_reason.empty()) {
    for (int ppa : {11, 7, 5, 3}) {
      try {
        auto g = config_grid(W, A, ppa);
        if (static_cast<double>(g.size()) * per_state <= kOutcomeBudget) {
          configs = std::move(g);
          used_ppa = ppa;
          break;
        }
      } catch (const UnsupportedError&) {
        continue;
      }
    }
    if (configs.empty()) {
      std::ostringstream os;
      os << "about " << num(per_state) << " outcomes per state puts every grid over the "
         << num(kOutcomeBudget) << "-outcome budget";
      grid_reason = os.str();
    }
  }
  if (configs.empty()) {
    for (long long t : times) {
      rep.tightest_delta = std::min(rep.tightest_delta, delta_lower_bound(built.env, built.delta, t));
    }
    rep.rows.push_back({"state grid", CheckRow::Status::kInfeasible, grid_reason});
    ++rep.infeasible;
    return rep;
  }

  // Grid vertices with zero mass are unreachable for the attraction model.
  if (re != nullptr) {
    std::vector<Configuration> interior;
    for (auto& c : configs) {
      bool positive = true;
      for (double v : c.row(0)) {
        if (!(v > 0.0)) positive = false;
      }
      if (positive) interior.push_back(std::move(c));
    }
    configs = std::move(interior);
  }

  auto make_states = [&](long long t) { return fill_states(configs, t); };

  for (long long t : times) {
    const double delta_t = delta_lower_bound(built.env, built.delta, t);
    rep.tightest_delta = std::min(rep.tightest_delta, delta_t);
    CheckRow row;
    {
      std::ostringstream os;
      os << "expected-improvement t=" << t;
      row.name = os.str();
    }
    try {
      const auto states = make_states(t);
      const WberhrReport r = wberhr_check_exact(model, built.system.optimal, built.env,
                                                built.delta, states);
      if (!std::isnan(r.tightest_ratio) &&
          (std::isnan(rep.tightest_ratio) || r.tightest_ratio < rep.tightest_ratio)) {
        rep.tightest_ratio = r.tightest_ratio;
      }
      std::ostringstream os;
      os << "states=" << r.points.size() << " grid=" << used_ppa << "pt"
         << " floor=" << num(delta_t) << " min_slack=" << num(r.min_slack)
         << " observed_ratio=" << num(r.tightest_ratio);
      row.detail = os.str();
      row.status = r.all_hold ? CheckRow::Status::kPass : CheckRow::Status::kFail;
      if (!r.all_hold) {
        row.detail += " failures=" + std::to_string(r.failures);
        ++rep.failures;
      }
    } catch (const UnsupportedError& e) {
      row.status = CheckRow::Status::kInfeasible;
      row.detail = e.what();
      ++rep.infeasible;
    }
    rep.rows.push_back(std::move(row));
  }

  // Supermartingale of exp(-(gamma/theta) P) at the same states, using the
  // smallest valid gamma the closed-form floors allow.
  const double gamma = std::min(1.0, rep.tightest_delta);
  if (!(gamma > 0.0)) {
    rep.rows.push_back({"supermartingale", CheckRow::Status::kInfeasible,
                        "closed-form floor is not positive at the checked times"});
    ++rep.infeasible;
  } else {
    for (long long t : times) {
      const double theta = built.system.theta_at(t);
      CheckRow row;
      {
        std::ostringstream os;
        os << "supermartingale t=" << t << " gamma=" << num(gamma) << " theta=" << num(theta);
        row.name = os.str();
      }
      try {
        const auto states = make_states(t);
        const SupermartingaleReport r =
            supermartingale_check_exact(model, built.system.optimal, gamma, theta, states);
        std::ostringstream os;
        os << "states=" << r.points << " violations=" << r.violations
           << " max_excess=" << num(r.max_excess);
        row.detail = os.str();
        row.status = r.violations == 0 ? CheckRow::Status::kPass : CheckRow::Status::kFail;
        if (r.violations != 0) ++rep.failures;
      } catch (const UnsupportedError& e) {
        row.status = CheckRow::Status::kInfeasible;
        row.detail = e.what();
        ++rep.infeasible;
      }
      rep.rows.push_back(std::move(row));
    }
  }
  return rep;
}

std::string render_check_report(const CheckReport& rep) {
  std::size_t name_w = 4;
  for (const auto& row : rep.rows) name_w = std::max(name_w, row.name.size());
  std::ostringstream os;
  for (const auto& row : rep.rows) {
    os << row.name << std::string(name_w - row.name.size() + 2, ' ')
       << status_str(row.status) << "  " << row.detail << "\n";
  }
  os << "tightest observed hazard ratio: " << num(rep.tightest_ratio) << "\n";
  os << "tightest closed-form floor:     " << num(rep.tightest_delta) << "\n";
  if (rep.failures > 0) {
    os << "RESULT: FAIL (" << rep.failures << " failing checks)\n";
  } else if (rep.infeasible > 0) {
    os << "RESULT: pass with " << rep.infeasible << " infeasible checks\n";
  } else {
    os << "RESULT: pass\n";
  }
  return os.str();
}

}  // namespace hazard
