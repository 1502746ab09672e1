#include "hazard/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <vector>

namespace hazard {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    if (j > i) out.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

[[noreturn]] void bad_value(const std::string& key, std::string_view value, const char* what) {
  throw ConfigError("key '" + key + "' has " + what + " '" + std::string(value) + "'");
}

double to_double(const std::string& key, std::string_view value) {
  double v = 0.0;
  const auto* begin = value.data();
  const auto* end = value.data() + value.size();
  const auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc{} || res.ptr != end) bad_value(key, value, "a malformed number");
  return v;
}

long long to_ll(const std::string& key, std::string_view value) {
  long long v = 0;
  const auto* end = value.data() + value.size();
  const auto res = std::from_chars(value.data(), end, v);
  if (res.ec != std::errc{} || res.ptr != end) bad_value(key, value, "a malformed integer");
  return v;
}

std::uint64_t to_u64(const std::string& key, std::string_view value) {
  std::uint64_t v = 0;
  const auto* end = value.data() + value.size();
  const auto res = std::from_chars(value.data(), end, v);
  if (res.ec != std::errc{} || res.ptr != end) bad_value(key, value, "a malformed seed");
  return v;
}

bool to_bool(const std::string& key, std::string_view value) {
  if (value == "true") return true;
  if (value == "false") return false;
  bad_value(key, value, "a malformed boolean (use true/false)");
}

struct RawSection {
  std::string name;
  std::vector<std::pair<std::string, std::string>> entries;
};

std::vector<RawSection> split_sections(std::string_view text) {
  std::vector<RawSection> sections;
  std::set<std::string> seen;
  std::size_t pos = 0;
  int line_no = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;

    const std::size_t comment = line.find_first_of("#;");
    if (comment != std::string_view::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) {
        throw ConfigError("malformed section header on line " + std::to_string(line_no));
      }
      std::string name(trim(line.substr(1, line.size() - 2)));
      if (!seen.insert(name).second) throw ConfigError("duplicate section [" + name + "]");
      sections.push_back({std::move(name), {}});
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("expected 'key = value' on line " + std::to_string(line_no));
    }
    if (sections.empty()) {
      throw ConfigError("key outside any section on line " + std::to_string(line_no));
    }
    std::string key(trim(line.substr(0, eq)));
    std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) throw ConfigError("empty key on line " + std::to_string(line_no));
    for (const auto& [k, v] : sections.back().entries) {
      if (k == key) {
        throw ConfigError("duplicate key '" + key + "' in section [" + sections.back().name + "]");
      }
    }
    sections.back().entries.push_back({std::move(key), std::move(value)});
  }
  return sections;
}

// Tracks key consumption so leftovers can be rejected by name.
class SectionReader {
 public:
  SectionReader(const RawSection& raw) : raw_(raw), used_(raw.entries.size(), false) {}

  const std::string* find(const std::string& key) {
    for (std::size_t i = 0; i < raw_.entries.size(); ++i) {
      if (raw_.entries[i].first == key) {
        used_[i] = true;
        return &raw_.entries[i].second;
      }
    }
    return nullptr;
  }

  const std::string& require(const std::string& key) {
    const std::string* v = find(key);
    if (v == nullptr) {
      throw ConfigError("section [" + raw_.name + "] is missing key '" + key + "'");
    }
    return *v;
  }

  void finish() const {
    for (std::size_t i = 0; i < raw_.entries.size(); ++i) {
      if (!used_[i]) {
        throw ConfigError("unknown key '" + raw_.entries[i].first + "' in section [" +
                          raw_.name + "]");
      }
    }
  }

  const std::string& name() const { return raw_.name; }
  const std::vector<std::pair<std::string, std::string>>& entries() const { return raw_.entries; }

 private:
  const RawSection& raw_;
  std::vector<bool> used_;
};

std::vector<double> to_doubles(const std::string& key, const std::string& value) {
  std::vector<double> out;
  for (const auto& tok : split_ws(value)) out.push_back(to_double(key, tok));
  if (out.empty()) bad_value(key, value, "an empty list");
  return out;
}

std::vector<std::pair<double, double>> to_atoms(const std::string& key, const std::string& value) {
  std::vector<std::pair<double, double>> out;
  for (const auto& tok : split_ws(value)) {
    const std::size_t colon = tok.find(':');
    if (colon == std::string::npos) bad_value(key, tok, "an atom without ':' (use value:prob)");
    out.push_back({to_double(key, std::string_view(tok).substr(0, colon)),
                   to_double(key, std::string_view(tok).substr(colon + 1))});
  }
  if (out.empty()) bad_value(key, value, "an empty atom list");
  return out;
}

const std::set<std::string> kModels = {"absorbing", "automaton", "monotone",
                                       "full_info", "roth_erev", "social"};

bool needs_environment(const std::string& model) {
  return model == "monotone" || model == "full_info" || model == "roth_erev" ||
         model == "social";
}

}  // namespace

ExperimentConfig parse_config(std::string_view text) {
  const auto sections = split_sections(text);

  const RawSection* raw_experiment = nullptr;
  for (const auto& s : sections) {
    if (s.name == "experiment") raw_experiment = &s;
  }
  if (raw_experiment == nullptr) throw ConfigError("missing section [experiment]");

  ExperimentConfig cfg;
  {
    SectionReader r(*raw_experiment);
    cfg.model = r.require("model");
    if (cfg.model == "vn") cfg.model = "automaton";  // accepted alias
    if (!kModels.count(cfg.model)) {
      throw ConfigError("key 'model' has an unknown model '" + cfg.model + "'");
    }
    cfg.horizon = to_ll("horizon", r.require("horizon"));
    cfg.replications = to_ll("replications", r.require("replications"));
    if (const auto* v = r.find("seed")) cfg.seed = to_u64("seed", *v);
    if (const auto* v = r.find("stride")) cfg.stride = to_ll("stride", *v);
    if (const auto* v = r.find("workers")) cfg.workers = static_cast<int>(to_ll("workers", *v));
    if (const auto* v = r.find("out")) cfg.out_dir = *v;
    if (const auto* v = r.find("hi")) cfg.class_hi = to_double("hi", *v);
    if (const auto* v = r.find("lo")) cfg.class_lo = to_double("lo", *v);
    if (const auto* v = r.find("floor_check")) cfg.floor_check = to_bool("floor_check", *v);
    r.finish();
    if (cfg.horizon < 1) throw ConfigError("key 'horizon' must be at least 1");
    if (cfg.replications < 1) throw ConfigError("key 'replications' must be at least 1");
    if (cfg.stride < 0) throw ConfigError("key 'stride' must be nonnegative");
    if (cfg.workers < 1) throw ConfigError("key 'workers' must be at least 1");
    if (!(cfg.class_lo < cfg.class_hi)) throw ConfigError("keys 'lo'/'hi' need lo < hi");
  }

  std::set<std::string> allowed = {"experiment", cfg.model, "slowing"};
  if (needs_environment(cfg.model)) allowed.insert("environment");
  for (const auto& s : sections) {
    if (!allowed.count(s.name)) {
      if (s.name == "environment" || kModels.count(s.name) || s.name == "slowing") {
        throw ConfigError("section [" + s.name + "] does not apply to model " + cfg.model);
      }
      throw ConfigError("unknown section [" + s.name + "]");
    }
  }
  auto find_section = [&](const std::string& name) -> const RawSection* {
    for (const auto& s : sections) {
      if (s.name == name) return &s;
    }
    return nullptr;
  };
  auto require_section = [&](const std::string& name) -> const RawSection& {
    const RawSection* s = find_section(name);
    if (s == nullptr) throw ConfigError("model " + cfg.model + " needs section [" + name + "]");
    return *s;
  };

  if (needs_environment(cfg.model)) {
    SectionReader r(require_section("environment"));
    const auto support = to_doubles("support", r.require("support"));
    if (support.size() != 2) {
      throw ConfigError("key 'support' needs exactly two numbers (x_min x_max)");
    }
    cfg.x_min = support[0];
    cfg.x_max = support[1];
    if (cfg.model == "social") {
      cfg.individuals = static_cast<int>(to_ll("individuals", r.require("individuals")));
    }
    for (int a = 0;; ++a) {
      const auto* v = r.find("dist" + std::to_string(a));
      if (v == nullptr) break;
      cfg.dists.push_back(to_atoms("dist" + std::to_string(a), *v));
    }
    if (cfg.dists.size() < 2) {
      throw ConfigError("section [environment] needs dist0 and dist1 (one per action, "
                        "numbered from 0)");
    }
    r.finish();
    cfg.has_environment = true;
  }

  if (cfg.model == "absorbing") {
    SectionReader r(require_section("absorbing"));
    cfg.absorbing_sigma0 = to_double("sigma0", r.require("sigma0"));
    r.finish();
  } else if (cfg.model == "automaton") {
    SectionReader r(require_section("automaton"));
    cfg.automaton.beta = to_double("beta", r.require("beta"));
    cfg.automaton.mu1 = to_double("mu1", r.require("mu1"));
    cfg.automaton.mu2 = to_double("mu2", r.require("mu2"));
    cfg.automaton.sigma0 = to_double("sigma0", r.require("sigma0"));
    r.finish();
  } else if (cfg.model == "monotone") {
    SectionReader r(require_section("monotone"));
    cfg.monotone_c = to_double("c", r.require("c"));
    cfg.sigma0 = to_doubles("sigma0", r.require("sigma0"));
    r.finish();
  } else if (cfg.model == "full_info") {
    SectionReader r(require_section("full_info"));
    cfg.switch_spec = r.require("switch");
    cfg.sigma0 = to_doubles("sigma0", r.require("sigma0"));
    r.finish();
  } else if (cfg.model == "roth_erev") {
    SectionReader r(require_section("roth_erev"));
    cfg.attractions = to_doubles("attractions", r.require("attractions"));
    r.finish();
  } else {  // social
    SectionReader r(require_section("social"));
    cfg.component_spec = r.require("component");
    cfg.sampling_spec = r.require("sampling");
    cfg.lambda_spec = r.require("lambda");
    cfg.sigma0 = to_doubles("sigma0", r.require("sigma0"));
    r.finish();
  }

  if (const RawSection* s = find_section("slowing")) {
    SectionReader r(*s);
    cfg.slow_kind = r.require("kind");
    if (cfg.slow_kind == "constant") {
      cfg.slow_theta = to_double("theta", r.require("theta"));
    } else if (cfg.slow_kind == "harmonic") {
      // no further keys
    } else if (cfg.slow_kind == "epsilon_guarantee") {
      cfg.slow_p0 = to_double("p0", r.require("p0"));
      cfg.slow_epsilon = to_double("epsilon", r.require("epsilon"));
      cfg.slow_delta = to_double("delta", r.require("delta"));
    } else {
      throw ConfigError("key 'kind' has an unknown slowing kind '" + cfg.slow_kind + "'");
    }
    r.finish();
    cfg.has_slowing = true;
  }

  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

namespace {

std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string serialize_config(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << "[experiment]\n";
  os << "model = " << cfg.model << "\n";
  os << "horizon = " << cfg.horizon << "\n";
  os << "replications = " << cfg.replications << "\n";
  os << "seed = " << cfg.seed << "\n";
  os << "stride = " << cfg.stride << "\n";
  os << "workers = " << cfg.workers << "\n";
  os << "out = " << cfg.out_dir << "\n";
  os << "hi = " << fmt(cfg.class_hi) << "\n";
  os << "lo = " << fmt(cfg.class_lo) << "\n";
  os << "floor_check = " << (cfg.floor_check ? "true" : "false") << "\n";

  if (cfg.has_environment) {
    os << "\n[environment]\n";
    os << "support = " << fmt(cfg.x_min) << " " << fmt(cfg.x_max) << "\n";
    if (cfg.model == "social") os << "individuals = " << cfg.individuals << "\n";
    for (std::size_t a = 0; a < cfg.dists.size(); ++a) {
      os << "dist" << a << " =";
      for (const auto& [value, prob] : cfg.dists[a]) {
        os << " " << fmt(value) << ":" << fmt(prob);
      }
      os << "\n";
    }
  }

  os << "\n[" << cfg.model << "]\n";
  if (cfg.model == "absorbing") {
    os << "sigma0 = " << fmt(cfg.absorbing_sigma0) << "\n";
  } else if (cfg.model == "automaton") {
    os << "beta = " << fmt(cfg.automaton.beta) << "\n";
    os << "mu1 = " << fmt(cfg.automaton.mu1) << "\n";
    os << "mu2 = " << fmt(cfg.automaton.mu2) << "\n";
    os << "sigma0 = " << fmt(cfg.automaton.sigma0) << "\n";
  } else if (cfg.model == "monotone") {
    os << "c = " << fmt(cfg.monotone_c) << "\n";
    os << "sigma0 =";
    for (double v : cfg.sigma0) os << " " << fmt(v);
    os << "\n";
  } else if (cfg.model == "full_info") {
    os << "switch = " << cfg.switch_spec << "\n";
    os << "sigma0 =";
    for (double v : cfg.sigma0) os << " " << fmt(v);
    os << "\n";
  } else if (cfg.model == "roth_erev") {
    os << "attractions =";
    for (double v : cfg.attractions) os << " " << fmt(v);
    os << "\n";
  } else {
    os << "component = " << cfg.component_spec << "\n";
    os << "sampling = " << cfg.sampling_spec << "\n";
    os << "lambda = " << cfg.lambda_spec << "\n";
    os << "sigma0 =";
    for (double v : cfg.sigma0) os << " " << fmt(v);
    os << "\n";
  }

  if (cfg.has_slowing) {
    os << "\n[slowing]\n";
    os << "kind = " << cfg.slow_kind << "\n";
    if (cfg.slow_kind == "constant") {
      os << "theta = " << fmt(cfg.slow_theta) << "\n";
    } else if (cfg.slow_kind == "epsilon_guarantee") {
      os << "p0 = " << fmt(cfg.slow_p0) << "\n";
      os << "epsilon = " << fmt(cfg.slow_epsilon) << "\n";
      os << "delta = " << fmt(cfg.slow_delta) << "\n";
    }
  }
  return os.str();
}

namespace {

SwitchFunction parse_switch(const std::string& spec) {
  const auto toks = split_ws(spec);
  if (toks.size() == 2 && toks[0] == "linear") {
    return SwitchFunction::linear(to_double("switch", toks[1]));
  }
  if (toks.size() == 3 && toks[0] == "power") {
    return SwitchFunction::power(to_double("switch", toks[1]), to_double("switch", toks[2]));
  }
  throw ConfigError("key 'switch' must be 'linear <b>' or 'power <beta> <p>', got '" + spec + "'");
}

ImitationComponent parse_component(const std::string& spec) {
  const auto toks = split_ws(spec);
  if (toks.size() == 1 && toks[0] == "proportional") return ImitationComponent::proportional();
  if (toks.size() == 2 && toks[0] == "normalized_score") {
    return ImitationComponent::normalized_score(to_double("component", toks[1]));
  }
  if (toks.size() == 2 && toks[0] == "linear_pairwise") {
    return ImitationComponent::linear_pairwise(to_double("component", toks[1]));
  }
  throw ConfigError("key 'component' must be 'proportional', 'normalized_score <q>', or "
                    "'linear_pairwise <b>', got '" + spec + "'");
}

SamplingProcess parse_sampling(const std::string& spec, int individuals) {
  const auto toks = split_ws(spec);
  if (toks.size() == 1 && toks[0] == "uniform_pairs") {
    return SamplingProcess::uniform_pairs(individuals);
  }
  if (toks.size() == 2 && toks[0] == "uniform_k") {
    return SamplingProcess::uniform_k(individuals, static_cast<int>(to_ll("sampling", toks[1])));
  }
  throw ConfigError("key 'sampling' must be 'uniform_pairs' or 'uniform_k <k>', got '" + spec +
                    "'");
}

ImitationRate parse_lambda(const std::string& spec) {
  const auto toks = split_ws(spec);
  if (toks.size() == 1 && toks[0] == "harmonic") return ImitationRate::harmonic();
  if (toks.size() == 2 && toks[0] == "constant") {
    return ImitationRate::constant(to_double("lambda", toks[1]));
  }
  throw ConfigError("key 'lambda' must be 'harmonic' or 'constant <v>', got '" + spec + "'");
}

}  // namespace

BuiltExperiment build_experiment(const ExperimentConfig& cfg) {
  BuiltExperiment out;
  out.out_dir = cfg.out_dir;

  std::optional<SlowingSchedule> slowing;
  if (cfg.has_slowing) {
    if (cfg.slow_kind == "constant") {
      slowing = SlowingSchedule::constant(cfg.slow_theta);
    } else if (cfg.slow_kind == "harmonic") {
      slowing = SlowingSchedule::harmonic();
    } else {
      slowing = SlowingSchedule::epsilon_guarantee(cfg.slow_p0, cfg.slow_epsilon,
                                                   HazardBoundSequence::constant(cfg.slow_delta));
    }
  }

  if (cfg.has_environment) {
    const PayoffSupport support(cfg.x_min, cfg.x_max);
    std::vector<PayoffDist> per_action;
    per_action.reserve(cfg.dists.size());
    for (const auto& atoms : cfg.dists) per_action.emplace_back(atoms, support);
    const int individuals = cfg.model == "social" ? cfg.individuals : 1;
    out.env = Environment::iid(support, std::move(per_action), individuals);
  }

  if (cfg.model == "absorbing") {
    auto model = std::make_shared<AbsorbingModel>(cfg.absorbing_sigma0);
    out.system = System{model, AbsorbingModel::optimal_set(), slowing};
    out.delta = DeltaModel::constant(0.5);
    // Nominal two-action environment consistent with the optimal set.
    const PayoffSupport support(0.0, 1.0);
    out.env = Environment::iid(
        support, {PayoffDist({{1.0, 1.0}}, support), PayoffDist({{0.0, 1.0}}, support)});
  } else if (cfg.model == "automaton") {
    cfg.automaton.validate();
    auto model = std::make_shared<TwoArmedAutomaton>(cfg.automaton);
    out.system = System{model, TwoArmedAutomaton::optimal_set(), slowing};
    out.delta = DeltaModel::constant(cfg.automaton.gain_floor());
    const PayoffSupport support(0.0, 1.0);
    out.env = Environment::iid(
        support,
        {PayoffDist({{0.0, 1.0 - cfg.automaton.mu1}, {1.0, cfg.automaton.mu1}}, support),
         PayoffDist({{0.0, 1.0 - cfg.automaton.mu2}, {1.0, cfg.automaton.mu2}}, support)});
  } else if (cfg.model == "monotone") {
    auto model = std::make_shared<MonotoneModel>(
        MonotoneParams::canonical_family(cfg.monotone_c), out.env, cfg.sigma0);
    out.system = System{model, optimal_set_expected(out.env), slowing};
    out.delta = DeltaModel::monotone(cfg.monotone_c);
  } else if (cfg.model == "full_info") {
    out.switch_fn = std::make_shared<SwitchFunction>(parse_switch(cfg.switch_spec));
    auto model = std::make_shared<FullInfoModel>(*out.switch_fn, out.env, cfg.sigma0);
    out.system = System{model, optimal_set_expected(out.env), slowing};
    out.delta = DeltaModel::full_info(*out.switch_fn);
  } else if (cfg.model == "roth_erev") {
    auto model = std::make_shared<RothErevModel>(out.env, cfg.attractions);
    out.system = System{model, optimal_set_expected(out.env), slowing};
    out.delta = DeltaModel::roth_erev(model->mean_gap(), model->initial_total());
  } else {
    out.component = std::make_shared<ImitationComponent>(parse_component(cfg.component_spec));
    out.sampling =
        std::make_shared<SamplingProcess>(parse_sampling(cfg.sampling_spec, cfg.individuals));
    out.lambda = std::make_shared<ImitationRate>(parse_lambda(cfg.lambda_spec));
    const int A = out.env.num_actions();
    if (static_cast<int>(cfg.sigma0.size()) != A) {
      throw ConfigError("key 'sigma0' needs one entry per action");
    }
    std::vector<double> flat;
    flat.reserve(static_cast<std::size_t>(cfg.individuals) * A);
    for (int i = 0; i < cfg.individuals; ++i) {
      flat.insert(flat.end(), cfg.sigma0.begin(), cfg.sigma0.end());
    }
    auto model = std::make_shared<SocialModel>(out.env, *out.component, *out.sampling,
                                               *out.lambda,
                                               Configuration(cfg.individuals, A, std::move(flat)));
    out.system = System{model, optimal_set_expected(out.env), slowing};
    out.delta = DeltaModel::social(*out.component, *out.sampling, *out.lambda);
  }

  out.plan.horizon = cfg.horizon;
  out.plan.replications = cfg.replications;
  out.plan.master_seed = cfg.seed;
  out.plan.workers = cfg.workers;
  out.plan.curve_stride = cfg.stride;
  out.plan.class_hi = cfg.class_hi;
  out.plan.class_lo = cfg.class_lo;
  if (cfg.floor_check) {
    if (!slowing || !slowing->is_harmonic()) {
      throw ConfigError("key 'floor_check' requires the harmonic slowing schedule");
    }
    out.plan.floor_p0 =
        aggregate(out.system.model->initial_config(), out.system.optimal);
  }
  return out;
}

}  // namespace hazard
