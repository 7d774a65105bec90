#include "cli.hpp"

#include "circpc/circpc.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace circpc::cli {
namespace {

using json = nlohmann::json;

class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

template <class F>
auto interpret(F&& f) {
  try {
    return f();
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
}

json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

std::string format_double(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

// ---------------------------------------------------------------------------
// --config

std::string option_name(const std::string& key) {
  std::string name = key;
  std::replace(name.begin(), name.end(), '_', '-');
  return "--" + name;
}

std::string scalar_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) return format_double(v.get<double>());
  throw UsageError("config: unsupported value " + v.dump());
}

bool mentioned(const std::vector<std::string>& args, const std::string& option) {
  return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
    return a == option || a.rfind(option + "=", 0) == 0;
  });
}

void flatten(const json& object, const std::vector<std::string>& given,
             std::vector<std::string>& injected) {
  for (const auto& [key, value] : object.items()) {
    if (key == "priors") continue;
    if (value.is_object()) {
      flatten(value, given, injected);
      continue;
    }
    const std::string option = option_name(key);
    if (mentioned(given, option) || mentioned(injected, option)) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) injected.push_back(option);
    } else if (value.is_array()) {
      std::string joined;
      for (const json& item : value) {
        if (!joined.empty()) joined += ',';
        joined += scalar_text(item);
      }
      injected.push_back(option);
      injected.push_back(joined);
    } else if (!value.is_null()) {
      injected.push_back(option);
      injected.push_back(scalar_text(value));
    }
  }
}

struct Expanded {
  std::vector<std::string> args;
  json config = json::object();
};

Expanded expand_config(std::vector<std::string> args) {
  Expanded result;
  std::optional<std::string> path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw UsageError("--config requires a file path");
      path = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
                 args.begin() + static_cast<std::ptrdiff_t>(i + 2));
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  }
  if (!path) {
    result.args = std::move(args);
    return result;
  }
  std::ifstream in(*path);
  if (!in) throw std::runtime_error("cannot open config file '" + *path + "'");
  try {
    result.config = json::parse(in);
  } catch (const json::parse_error& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
  if (!result.config.is_object()) throw UsageError("config: top level must be a JSON object");

  const auto sub = std::find_if(args.begin(), args.end(),
                                [](const std::string& a) { return !a.starts_with("-"); });
  if (sub == args.end()) throw UsageError("a subcommand is required");
  std::vector<std::string> injected;
  flatten(result.config, args, injected);
  args.insert(sub + 1, injected.begin(), injected.end());
  result.args = std::move(args);
  return result;
}

// ---------------------------------------------------------------------------
// Shared option groups

struct PriorOptions {
  std::string kind;
  std::string family;
  std::optional<double> a;
  std::optional<double> b;
  std::optional<double> lambda;
  std::optional<double> U;
  std::optional<double> alpha;
  std::string normalization = "truncated";

  void add(CLI::App& app, bool with_kind) {
    if (with_kind) {
      app.add_option("--prior", kind,
                     "pc-uniform, pc-point-mass, pc-curve, gamma, h2, h3, beta, 2xbeta, uniform")
          ->required();
    }
    app.add_option("--a", a, "First shape parameter (beta, 2xbeta)");
    app.add_option("--b", b, "Rate (gamma) or second shape parameter (beta, 2xbeta)");
    app.add_option("--lambda", lambda, "PC scaling parameter");
    app.add_option("--U", U, "Tail threshold on the interpretable scale");
    app.add_option("--alpha", alpha, "Tail probability P(Q > U)");
    app.add_option("--normalization", normalization, "truncated or paper-exact");
  }
};

std::optional<BaseModel> pc_base_of(const std::string& kind) {
  if (kind == "pc-uniform") return BaseModel::Uniform;
  if (kind == "pc-point-mass") return BaseModel::PointMass;
  if (kind == "pc-curve") return BaseModel::CardioidCurve;
  return std::nullopt;
}

double require(const std::optional<double>& v, const char* name, const std::string& kind) {
  if (!v) throw UsageError(std::string("--") + name + " is required for prior '" + kind + "'");
  return *v;
}

PcPrior build_pc(Family family, BaseModel base, const PriorOptions& o) {
  const Normalization mode = interpret([&] { return parse_normalization(o.normalization); });
  double lambda = 0.0;
  if (o.lambda) {
    if (o.U || o.alpha) throw UsageError("give either --lambda or --U/--alpha, not both");
    lambda = *o.lambda;
  } else {
    if (!o.U || !o.alpha) throw UsageError("a PC prior needs --lambda or both --U and --alpha");
    const TailSpec tail{*o.U, *o.alpha};
    interpret([&] { tail.validate(family); return 0; });
    lambda = calibrate_lambda(family, base, tail);
  }
  return interpret([&] { return PcPrior::make(family, base, lambda, mode); });
}

ReferencePrior build_reference(const PriorOptions& o) {
  const std::string& k = o.kind;
  ReferencePrior prior;
  if (k == "gamma") {
    prior = GammaOneB{require(o.b, "b", k)};
  } else if (k == "h2") {
    prior = H2{};
  } else if (k == "h3") {
    prior = H3{};
  } else if (k == "beta") {
    prior = Beta{require(o.a, "a", k), require(o.b, "b", k)};
  } else if (k == "2xbeta") {
    prior = ScaledBetaHalf{require(o.a, "a", k), require(o.b, "b", k)};
  } else if (k == "uniform") {
    prior = UniformHalf{};
  } else {
    throw UsageError("unknown prior '" + k + "'");
  }
  interpret([&] { validate(prior); return 0; });
  return prior;
}

Family parse_family_option(const std::string& text) {
  return interpret([&] { return parse_family(text); });
}

/// Family implied by a reference prior, or the one given with --family.
Family prior_family(const PriorOptions& o) {
  if (pc_base_of(o.kind)) {
    if (o.family.empty()) throw UsageError("--family is required for PC priors");
    return parse_family_option(o.family);
  }
  const Family implied = ref_family(build_reference(o));
  if (!o.family.empty() && parse_family_option(o.family) != implied) {
    throw UsageError("prior '" + o.kind + "' does not apply to family '" + o.family + "'");
  }
  return implied;
}

ConcentrationPrior build_prior(const PriorOptions& o) {
  if (const auto base = pc_base_of(o.kind)) return build_pc(prior_family(o), *base, o);
  return build_reference(o);
}

std::vector<double> default_grid(ConcentrationSupport s, std::size_t count = 200) {
  std::vector<double> grid;
  if (std::isinf(s.upper)) {
    for (std::size_t i = 0; i <= count; ++i) grid.push_back(10.0 * static_cast<double>(i) / count);
    return grid;
  }
  for (std::size_t i = 0; i < count; ++i) {
    grid.push_back(s.lower + (s.upper - s.lower) * static_cast<double>(i) / count);
  }
  return grid;
}

std::vector<double> grid_or_default(const std::string& text, ConcentrationSupport s) {
  if (text.empty()) return default_grid(s);
  try {
    return parse_grid(text);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

std::uint64_t seed_of(const std::optional<std::uint64_t>& seed) {
  if (!seed) throw UsageError("--seed is required");
  return *seed;
}

// ---------------------------------------------------------------------------
// Subcommands

struct PcDensity {
  std::string family;
  std::string base = "uniform";
  std::string grid;
  PriorOptions prior;

  void add(CLI::App& app) {
    app.add_option("--family", family, "vm, cardioid or wc")->required();
    app.add_option("--base", base, "uniform, point-mass or curve");
    app.add_option("--grid", grid, "start:stop:count over the parameter");
    prior.add(app, false);
  }

  int run(std::ostream& out) const {
    const Family f = parse_family_option(family);
    const BaseModel b = interpret([&] { return parse_base_model(base); });
    const PcPrior pc = build_pc(f, b, prior);
    const auto values = grid_or_default(grid, concentration_support(f));
    out << "param,pdf,cdf\n" << std::setprecision(12);
    for (const double x : values) out << x << ',' << pc_pdf(pc, x) << ',' << pc_cdf(pc, x) << '\n';
    return kExitOk;
  }
};

struct RefDensity {
  std::string scale = "param";
  std::string base = "uniform";
  std::string grid;
  PriorOptions prior;

  void add(CLI::App& app) {
    prior.add(app, true);
    app.add_option("--scale", scale, "param or distance");
    app.add_option("--base", base, "Base model of the distance scale");
    app.add_option("--grid", grid, "start:stop:count over the parameter or distance");
  }

  int run(std::ostream& out) const {
    if (pc_base_of(prior.kind)) throw UsageError("ref-density takes a reference prior");
    const ReferencePrior ref = build_reference(prior);
    const Family f = ref_family(ref);
    out << std::setprecision(12);
    if (scale == "param") {
      out << "param,pdf\n";
      for (const double x : grid_or_default(grid, ref_support(ref))) {
        out << x << ',' << ref_pdf(ref, x) << '\n';
      }
      return kExitOk;
    }
    if (scale != "distance") throw UsageError("--scale must be param or distance");
    const DistanceProfile profile =
        interpret([&] { return DistanceProfile::make(f, parse_base_model(base)); });
    const ConcentrationSupport range{profile.d_min, profile.d_max};
    const std::vector<double> ds = grid.empty() ? default_grid({range.lower, std::min(range.upper, 4.0)})
                                          : grid_or_default(grid, range);
    out << "d,pdf\n";
    for (const double d : ds) out << d << ',' << distance_scale_pdf(ref, profile, d) << '\n';
    return kExitOk;
  }
};

struct Distance {
  std::string family;
  std::string base = "uniform";
  std::string grid;
  bool inverse = false;

  void add(CLI::App& app) {
    app.add_option("--family", family, "vm, cardioid or wc")->required();
    app.add_option("--base", base, "uniform, point-mass or curve");
    app.add_option("--grid", grid, "start:stop:count over the parameter (or distance)");
    app.add_flag("--inverse", inverse, "Map distances back to parameters");
  }

  int run(std::ostream& out) const {
    const Family f = parse_family_option(family);
    const DistanceProfile profile =
        interpret([&] { return DistanceProfile::make(f, parse_base_model(base)); });
    out << std::setprecision(12);
    if (inverse) {
      const double top = std::isinf(profile.d_max) ? 4.0 : profile.d_max;
      const auto ds = grid.empty() ? default_grid({profile.d_min, top})
                                   : grid_or_default(grid, {profile.d_min, profile.d_max});
      out << "d,param\n";
      for (const double d : ds) out << d << ',' << inverse_distance(profile, d) << '\n';
      return kExitOk;
    }
    out << "param,d,dd_dparam\n";
    for (const double x : grid_or_default(grid, profile.support())) {
      out << x << ',' << distance(profile, x) << ',' << distance_derivative(profile, x) << '\n';
    }
    return kExitOk;
  }
};

struct Audit {
  std::string base;
  PriorOptions prior;

  void add(CLI::App& app) {
    prior.add(app, true);
    app.add_option("--family", prior.family, "Family (required for PC priors)");
    app.add_option("--base", base, "Base model of the distance scale (default: the PC base, else uniform)");
  }

  int run(std::ostream& out) const {
    const Family f = prior_family(prior);
    const ConcentrationPrior p = build_prior(prior);
    BaseModel b = pc_base_of(prior.kind).value_or(BaseModel::Uniform);
    if (!base.empty()) b = interpret([&] { return parse_base_model(base); });
    const DistanceProfile profile = interpret([&] { return DistanceProfile::make(f, b); });
    AuditReport report;
    if (const auto* pc = std::get_if<PcPrior>(&p)) {
      report = overfit_audit([pc](double x) { return pc_pdf(*pc, x); }, profile);
    } else {
      report = overfit_audit(std::get<ReferencePrior>(p), profile);
    }
    json j{{"prior", describe_prior(p)},
           {"base", std::string(to_string(profile.base))},
           {"density_at_zero", number(report.density_at_zero)},
           {"monotone_decreasing", report.monotone_decreasing},
           {"argmax_d", number(report.argmax_d)},
           {"classification", report.classification}};
    out << j.dump(2) << '\n';
    return kExitOk;
  }
};

struct Calibrate {
  std::string family;
  std::string base = "uniform";
  double U = 0.0;
  double alpha = 0.0;
  bool paper = false;

  void add(CLI::App& app) {
    app.add_option("--family", family, "vm, cardioid or wc")->required();
    app.add_option("--base", base, "uniform, point-mass or curve");
    app.add_option("--U", U, "Tail threshold on the interpretable scale")->required();
    app.add_option("--alpha", alpha, "Tail probability P(Q > U)")->required();
    app.add_flag("--paper", paper, "Use the legacy closed form for lambda");
  }

  int run(std::ostream& out) const {
    const Family f = parse_family_option(family);
    const BaseModel b = interpret([&] { return parse_base_model(base); });
    const TailSpec tail{U, alpha};
    interpret([&] { tail.validate(f); return DistanceProfile::make(f, b); });
    Calibration c;
    if (paper) {
      const double lambda = calibrate_lambda_paper(f, b, tail);
      c = {lambda, CalibrationMethod::ClosedForm,
           tail_probability(PcPrior::make(f, b, lambda), U)};
    } else {
      c = calibrate(f, b, tail);
    }
    json j{{"lambda", number(c.lambda)},
           {"method", std::string(to_string(c.method))},
           {"roundtrip_alpha", number(c.roundtrip_alpha)}};
    out << j.dump(2) << '\n';
    return kExitOk;
  }
};

struct Sample {
  std::string from = "distribution";
  std::string family;
  std::string base = "uniform";
  double mu = 0.0;
  std::optional<double> concentration;
  std::size_t n = 0;
  std::optional<std::uint64_t> seed;
  PriorOptions prior;

  void add(CLI::App& app) {
    app.add_option("--from", from, "distribution or pc");
    app.add_option("--family", family, "vm, cardioid, wc or uniform")->required();
    app.add_option("--base", base, "Base model (--from pc)");
    app.add_option("--mu", mu, "Location in radians");
    app.add_option("--concentration", concentration, "kappa, ell or rho");
    app.add_option("--n", n, "Number of draws")->required();
    app.add_option("--seed", seed, "Random seed");
    prior.add(app, false);
  }

  int run(std::ostream& out) const {
    const std::uint64_t s = seed_of(seed);
    const Family f = parse_family_option(family);
    if (from == "pc") {
      const BaseModel b = interpret([&] { return parse_base_model(base); });
      const PcPrior pc = build_pc(f, b, prior);
      out << "param\n" << std::setprecision(17);
      for (const double x : pc_sample(pc, n, s)) out << x << '\n';
      return kExitOk;
    }
    if (from != "distribution") throw UsageError("--from must be distribution or pc");
    DistributionSpec spec{f, interpret([&] { return Angle(mu); }), 0.0};
    if (f != Family::CircularUniform) {
      if (!concentration) throw UsageError("--concentration is required");
      spec.concentration = *concentration;
    }
    interpret([&] { spec.validate(); return 0; });
    write_dataset_csv(out, sample(spec, n, s));
    return kExitOk;
  }
};

struct Fit {
  std::string data;
  std::string chain;
  bool alpha_from_data = false;
  std::string window = "mean-width";
  std::size_t iterations = 20000;
  std::size_t burn_in = 5000;
  std::optional<std::uint64_t> seed;
  PriorOptions prior;

  void add(CLI::App& app) {
    prior.add(app, true);
    app.add_option("--family", prior.family, "vm, cardioid or wc")->required();
    app.add_option("--data", data, "CSV of angles in radians")->required();
    app.add_option("--chain", chain, "Output path of the chain CSV");
    app.add_flag("--alpha-from-data", alpha_from_data, "Set alpha from the data and --U");
    app.add_option("--window", window, "mean-width, mean-radius or zero-width");
    app.add_option("--iterations", iterations, "Total iterations including burn-in");
    app.add_option("--burn-in", burn_in, "Adaptive burn-in iterations");
    app.add_option("--seed", seed, "Random seed");
  }

  int run(std::ostream& out) const {
    const std::uint64_t s = seed_of(seed);
    const Family f = prior_family(prior);
    std::ifstream in(data);
    if (!in) throw std::runtime_error("cannot open data file '" + data + "'");
    const Dataset dataset = read_dataset_csv(in, data);

    PriorOptions options = prior;
    json tail_json;
    if (alpha_from_data) {
      if (!pc_base_of(options.kind)) throw UsageError("--alpha-from-data needs a PC prior");
      if (options.alpha || options.lambda) {
        throw UsageError("--alpha-from-data excludes --alpha and --lambda");
      }
      if (!options.U) throw UsageError("--alpha-from-data needs --U");
      const TailWindow w = interpret([&] { return parse_tail_window(window); });
      const TailFromData t = interpret([&] { return tail_from_data(dataset, *options.U, w); });
      options.alpha = t.alpha;
      tail_json = {{"U", t.U},
                   {"alpha", t.alpha},
                   {"outside", t.outside},
                   {"reference", t.reference},
                   {"window", std::string(to_string(w))}};
    }
    const ModelSpec model{f, build_prior(options)};
    interpret([&] { model.validate(); return 0; });

    McmcConfig config;
    config.iterations = iterations;
    config.burn_in = burn_in;
    config.seed = s;
    interpret([&] { config.validate(); return 0; });
    const Chain result = run_mcmc(model, dataset, config);
    const PosteriorSummary summary = summarize(result);

    std::string chain_path = chain;
    if (chain_path.empty()) {
      std::filesystem::path p(data);
      p.replace_extension(".chain.csv");
      chain_path = p.string();
    }
    std::ofstream chain_out(chain_path);
    if (!chain_out) throw std::runtime_error("cannot write chain to '" + chain_path + "'");
    write_chain_csv(chain_out, result);

    json j{{"prior", describe_prior(model.prior)},
           {"n", dataset.size()},
           {"concentration_mean", number(summary.concentration_mean)},
           {"concentration_median", number(summary.concentration_median)},
           {"concentration_ci_low", number(summary.concentration_ci_low)},
           {"concentration_ci_high", number(summary.concentration_ci_high)},
           {"mu_circular_mean", summary.mu_circular_mean.radians()},
           {"effective_sample_size", number(summary.effective_sample_size)},
           {"draws", summary.draws},
           {"mu_acceptance", result.mu_acceptance},
           {"concentration_acceptance", result.concentration_acceptance},
           {"chain_csv", chain_path}};
    if (const auto* pc = std::get_if<PcPrior>(&model.prior)) j["lambda"] = pc->lambda;
    if (!tail_json.is_null()) j["tail"] = tail_json;
    out << j.dump(2) << '\n';
    return kExitOk;
  }
};

struct Simulate {
  std::string family;
  bool full = false;
  std::size_t workers = 0;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> replicates;
  std::vector<std::size_t> sizes;
  std::vector<double> truths;
  std::optional<std::size_t> iterations;
  std::optional<std::size_t> burn_in;
  std::optional<double> tail_U;
  std::string output = "-";

  void add(CLI::App& app) {
    app.add_option("--family", family, "vm, cardioid or wc")->required();
    app.add_flag("--full", full, "Use the complete study grids");
    app.add_option("--workers", workers, "Worker threads (0 = hardware concurrency)");
    app.add_option("--seed", seed, "Base seed");
    app.add_option("--replicates", replicates, "Replicates per cell");
    app.add_option("--sample-sizes", sizes, "Comma-separated sample sizes")->delimiter(',');
    app.add_option("--truths", truths, "Comma-separated true concentrations")->delimiter(',');
    app.add_option("--iterations", iterations, "MCMC iterations per replicate, burn-in included");
    app.add_option("--burn-in", burn_in, "Burn-in iterations per replicate");
    app.add_option("--tail-U", tail_U, "Tail threshold used to calibrate PC priors");
    app.add_option("--output,-o", output, "CSV path, '-' for stdout");
  }

  int run(std::ostream& out, const json& config) const {
    SimStudyConfig study = interpret([&] { return default_study(parse_family(family), full); });
    study.base_seed = seed_of(seed);
    study.workers = workers;
    if (replicates) study.replicates = *replicates;
    if (!sizes.empty()) study.sample_sizes = sizes;
    if (!truths.empty()) study.truths = truths;
    if (iterations) study.mcmc.iterations = *iterations;
    if (burn_in) study.mcmc.burn_in = *burn_in;
    if (tail_U) study.tail_U = *tail_U;
    if (config.contains("priors")) {
      study.priors.clear();
      try {
        for (const json& g : config.at("priors")) {
          PriorGrid grid{g.at("kind").get<std::string>(), {}, {}};
          if (g.contains("values")) grid.values = g.at("values").get<std::vector<double>>();
          if (g.contains("second")) grid.second = g.at("second").get<std::vector<double>>();
          study.priors.push_back(std::move(grid));
        }
      } catch (const json::exception& e) {
        throw UsageError(std::string("config priors: ") + e.what());
      }
    }
    interpret([&] { study.validate(); return 0; });
    const SimStudyResult result = interpret([&] { return run_sim_study(study); });
    if (output == "-") {
      write_study_csv(out, result);
    } else {
      std::ofstream file(output);
      if (!file) throw std::runtime_error("cannot write '" + output + "'");
      write_study_csv(file, result);
    }
    return kExitOk;
  }
};

} // namespace

std::vector<double> parse_grid(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream in(text);
  for (std::string part; std::getline(in, part, ':');) parts.push_back(part);
  if (parts.size() != 3) throw std::invalid_argument("grid must be start:stop:count");
  double start = 0.0;
  double stop = 0.0;
  long long count = 0;
  try {
    std::size_t used = 0;
    start = std::stod(parts[0], &used);
    if (used != parts[0].size()) throw std::invalid_argument("start");
    stop = std::stod(parts[1], &used);
    if (used != parts[1].size()) throw std::invalid_argument("stop");
    count = std::stoll(parts[2], &used);
    if (used != parts[2].size()) throw std::invalid_argument("count");
  } catch (const std::exception&) {
    throw std::invalid_argument("grid '" + text + "' is not start:stop:count");
  }
  if (count < 1 || !std::isfinite(start) || !std::isfinite(stop)) {
    throw std::invalid_argument("grid '" + text + "' needs finite ends and count >= 1");
  }
  if (count == 1) return {start};
  std::vector<double> grid(static_cast<std::size_t>(count));
  const double step = (stop - start) / static_cast<double>(count - 1);
  for (long long i = 0; i < count; ++i) grid[static_cast<std::size_t>(i)] = start + step * i;
  grid.back() = stop;
  return grid;
}

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  Expanded expanded;
  try {
    expanded = expand_config(raw_args);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }

  CLI::App app{"Penalized complexity priors for circular distributions", "circpc"};
  app.set_version_flag("--version", "circpc 0.1.0");
  app.require_subcommand(1);
  app.add_option("--config", "JSON file whose keys supply option values");

  PcDensity pc_density;
  RefDensity ref_density;
  Distance dist;
  Audit audit;
  Calibrate calibrate_cmd;
  Sample sample_cmd;
  Fit fit;
  Simulate simulate;
  auto* c_pc = app.add_subcommand("pc-density", "PC prior density and CDF on a grid (CSV)");
  pc_density.add(*c_pc);
  auto* c_ref = app.add_subcommand("ref-density", "Reference prior density on a grid (CSV)");
  ref_density.add(*c_ref);
  auto* c_dist = app.add_subcommand("distance", "Distance to the base model on a grid (CSV)");
  dist.add(*c_dist);
  auto* c_audit = app.add_subcommand("audit", "Distance-scale overfitting audit (JSON)");
  audit.add(*c_audit);
  auto* c_cal = app.add_subcommand("calibrate", "Scaling parameter from a tail statement (JSON)");
  calibrate_cmd.add(*c_cal);
  auto* c_sample = app.add_subcommand("sample", "Draws from a distribution or PC prior (CSV)");
  sample_cmd.add(*c_sample);
  auto* c_fit = app.add_subcommand("fit", "Posterior inference on an angle CSV (JSON)");
  fit.add(*c_fit);
  auto* c_sim = app.add_subcommand("simulate", "Simulation study (CSV)");
  simulate.add(*c_sim);

  std::vector<std::string> reversed(expanded.args.rbegin(), expanded.args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (expanded.config.contains("priors") && !c_sim->parsed()) {
      throw UsageError("config key 'priors' only applies to simulate");
    }
    if (c_pc->parsed()) return pc_density.run(out);
    if (c_ref->parsed()) return ref_density.run(out);
    if (c_dist->parsed()) return dist.run(out);
    if (c_audit->parsed()) return audit.run(out);
    if (c_cal->parsed()) return calibrate_cmd.run(out);
    if (c_sample->parsed()) return sample_cmd.run(out);
    if (c_fit->parsed()) return fit.run(out);
    if (c_sim->parsed()) return simulate.run(out, expanded.config);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InfeasibleTailError& e) {
    err << "error: " << e.what() << " (attainable alpha in (" << e.alpha_low() << ", "
        << e.alpha_high() << "))\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

} // namespace circpc::cli
