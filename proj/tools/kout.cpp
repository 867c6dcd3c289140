// Command-line front end: reproducible sampling and the full set of
// experiments (exact TV tables, threshold sweeps, local-limit measurements,
// moments, the limiting constant), emitted as CSV or JSON for external
// plotting. Identical configuration and seed reproduce identical output
// bytes; runtime diagnostics go to stderr only.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "kout/exact.hpp"
#include "kout/limits.hpp"
#include "kout/mc_stats.hpp"
#include "kout/model.hpp"
#include "kout/samplers.hpp"
#include "kout/version.hpp"

using json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitBudget = 3;
constexpr int kExitCheckFailed = 4;

// ---------------------------------------------------------------------------
// alpha specification grammar: "inf" | literal | "beta*sqrt(n)" | "n^sigma";
// the beta / sigma knobs may be embedded ("1.5*sqrt(n)", "n^0.25") or given
// through --beta / --sigma.

struct AlphaSpec {
  enum class Kind { literal, infinite, beta_sqrt, power };
  Kind kind = Kind::literal;
  double value = 1.0;       // literal alpha, beta, or sigma
  std::string sigma_text;   // exponent as written, when embedded in the spec
  std::string raw;

  static AlphaSpec parse(std::string text, double beta, double sigma) {
    AlphaSpec s;
    s.raw = text;
    auto strip = [](std::string& t) {
      t.erase(0, t.find_first_not_of(" \t"));
      t.erase(t.find_last_not_of(" \t") + 1);
    };
    strip(text);
    if (text == "inf" || text == "infinity" || text == "Inf") {
      s.kind = Kind::infinite;
      return s;
    }
    if (auto pos = text.find("*sqrt(n)"); pos != std::string::npos) {
      s.kind = Kind::beta_sqrt;
      std::string head = text.substr(0, pos);
      s.value = (head == "beta") ? beta : std::stod(head);
      return s;
    }
    if (text == "sqrt(n)") {
      s.kind = Kind::beta_sqrt;
      s.value = 1.0;
      return s;
    }
    if (text.rfind("n^", 0) == 0) {
      s.kind = Kind::power;
      std::string tail = text.substr(2);
      if (tail == "sigma") {
        s.value = sigma;
      } else {
        s.value = std::stod(tail);
        s.sigma_text = tail;
      }
      return s;
    }
    s.kind = Kind::literal;
    if (auto slash = text.find('/'); slash != std::string::npos) {
      s.value = std::stod(text.substr(0, slash)) / std::stod(text.substr(slash + 1));
    } else {
      s.value = std::stod(text);
    }
    if (!(s.value > 0.0)) throw CLI::ValidationError("--alpha", "alpha must be positive");
    return s;
  }

  bool infinite() const { return kind == Kind::infinite; }

  double resolve_value(std::uint32_t n) const {
    switch (kind) {
      case Kind::literal: return value;
      case Kind::beta_sqrt: return value * std::sqrt(static_cast<double>(n));
      case Kind::power: return std::pow(static_cast<double>(n), value);
      default: return 0.0;
    }
  }

  kout::Alpha resolve(std::uint32_t n) const {
    if (infinite()) return kout::Alpha::infinite();
    return kout::Alpha::finite(resolve_value(n));
  }

  std::string describe(std::uint32_t n) const {
    std::ostringstream os;
    switch (kind) {
      case Kind::infinite: os << "inf"; break;
      case Kind::literal: os << value; break;
      case Kind::beta_sqrt: os << value << "*sqrt(n)=" << resolve_value(n); break;
      case Kind::power: os << "n^" << value << "=" << resolve_value(n); break;
    }
    return os.str();
  }
};

// exact rational from a decimal or fractional literal ("1.5", "3/2", "7")
std::optional<kout::exact::Rational> rational_literal(const std::string& text) {
  try {
    if (auto slash = text.find('/'); slash != std::string::npos) {
      mpz_class num(text.substr(0, slash));
      mpz_class den(text.substr(slash + 1));
      if (den == 0) return std::nullopt;
      return kout::exact::make_rational(num, den);
    }
    if (auto dot = text.find('.'); dot != std::string::npos) {
      std::string digits = text.substr(0, dot) + text.substr(dot + 1);
      std::size_t frac_len = text.size() - dot - 1;
      mpz_class num(digits);
      return kout::exact::make_rational(num, kout::exact::int_pow(10, frac_len));
    }
    return kout::exact::Rational(mpz_class(text));
  } catch (...) {
    return std::nullopt;
  }
}

// ---------------------------------------------------------------------------
// deterministic table emission

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fnv1a_hex(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

struct Table {
  std::vector<std::string> columns;
  std::vector<json> rows;

  std::string to_csv() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
    os << "\n";
    for (const auto& row : rows) {
      bool first = true;
      for (const auto& col : columns) {
        if (!first) os << ",";
        first = false;
        const auto& v = row.at(col);
        if (v.is_number_float())
          os << format_double(v.get<double>());
        else if (v.is_string())
          os << v.get<std::string>();
        else
          os << v.dump();
      }
      os << "\n";
    }
    return os.str();
  }

  std::string to_json_str() const {
    json arr = json::array();
    for (const auto& row : rows) arr.push_back(row);
    return arr.dump(2) + "\n";
  }
};

struct OutputOptions {
  std::string format = "csv";  // csv | json
  std::string out_path;        // empty = stdout
};

void emit(const Table& t, const OutputOptions& o) {
  std::string body = o.format == "json" ? t.to_json_str() : t.to_csv();
  if (o.out_path.empty()) {
    std::fwrite(body.data(), 1, body.size(), stdout);
  } else {
    std::ofstream f(o.out_path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output path: " + o.out_path);
    f.write(body.data(), static_cast<std::streamsize>(body.size()));
  }
}

// the record shape used for estimator diagnostics on stderr
json result_record(const std::string& op, const json& params, std::uint64_t seed,
                   const kout::mc::EstimateWithError& e, double runtime_ms) {
  json r;
  r["op"] = op;
  r["params"] = params;
  r["seed"] = seed;
  r["estimate"] = e.estimate;
  r["std_error"] = e.std_error;
  r["bias_bound"] = e.bias_bound;
  r["n_samples"] = e.n_samples;
  r["method"] = e.method;
  r["runtime_ms"] = runtime_ms;
  return r;
}

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

// flat key=value config file; flags on the command line take precedence
std::vector<std::string> inject_config(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
      args.erase(args.begin() + i, args.begin() + i + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + i);
      break;
    }
  }
  if (path.empty()) return args;
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read config file: " + path);
  std::vector<std::string> injected;
  std::string line;
  while (std::getline(f, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line.erase(0, line.find_first_not_of(" \t"));
    line.erase(line.find_last_not_of(" \t\r") + 1);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw std::runtime_error("config line is not key=value: " + line);
    std::string key = line.substr(0, eq);
    std::string val = line.substr(eq + 1);
    key.erase(key.find_last_not_of(" \t") + 1);
    val.erase(0, val.find_first_not_of(" \t"));
    std::string flag = "--" + key;
    bool present = false;
    for (const auto& a : args)
      if (a == flag || a.rfind(flag + "=", 0) == 0) present = true;
    if (!present) injected.push_back(flag + "=" + val);
  }
  // injected options sit right after the subcommand token
  std::vector<std::string> result;
  bool placed = injected.empty();
  for (const auto& a : args) {
    result.push_back(a);
    if (!placed && !a.empty() && a[0] != '-') {
      result.insert(result.end(), injected.begin(), injected.end());
      placed = true;
    }
  }
  if (!placed) result.insert(result.end(), injected.begin(), injected.end());
  return result;
}

// ---------------------------------------------------------------------------
// shared per-subcommand state

struct CommonOpts {
  std::uint32_t n = 2;
  std::uint32_t k = 1;
  std::string alpha = "1";
  double beta = 1.0;
  double sigma = 0.25;
  std::uint64_t samples = 100000;
  std::uint64_t seed = 42;
  unsigned threads = 0;
  std::uint64_t budget = 24;
  bool check = false;
  double tolerance = -1.0;
  OutputOptions out;
};

void add_common(CLI::App* cmd, CommonOpts& c, bool with_n = true,
                std::vector<std::string> formats = {"csv", "json"}) {
  if (with_n) cmd->add_option("--n", c.n, "vertex count");
  cmd->add_option("--k", c.k, "out-degree");
  cmd->add_option("--beta", c.beta, "beta for alpha = beta*sqrt(n)");
  cmd->add_option("--sigma", c.sigma, "sigma for alpha = n^sigma");
  cmd->add_option("--samples", c.samples, "Monte Carlo sample count");
  cmd->add_option("--seed", c.seed, "master seed");
  cmd->add_option("--threads", c.threads, "worker threads (0 = hardware)");
  cmd->add_option("--budget", c.budget, "max kn for exact enumeration");
  cmd->add_option("--format", c.out.format, "output format")->check(CLI::IsMember(formats));
  cmd->add_option("--out", c.out.out_path, "output path (default stdout)");
  cmd->add_flag("--check", c.check, "exit 4 if the statistical check fails");
  cmd->add_option("--tolerance", c.tolerance, "tolerance for --check");
}

std::string config_hash(const std::string& op, const CommonOpts& c, const std::string& extra) {
  std::ostringstream os;
  os << op << ";n=" << c.n << ";k=" << c.k << ";alpha=" << c.alpha << ";beta=" << c.beta
     << ";sigma=" << c.sigma << ";samples=" << c.samples << ";seed=" << c.seed << ";budget=" << c.budget
     << ";" << extra;
  return fnv1a_hex(os.str());
}

void stamp(json& row, const CommonOpts& c, const std::string& hash) {
  row["seed"] = c.seed;
  row["config"] = hash;
  row["version"] = kout::version;
}

// ---------------------------------------------------------------------------
// subcommand: sample

int cmd_sample(const CommonOpts& c, std::uint64_t count, const std::string& alpha_text) {
  AlphaSpec spec = AlphaSpec::parse(alpha_text, c.beta, c.sigma);
  kout::ModelParams p(c.n, c.k, spec.resolve(c.n));
  std::string hash = config_hash("sample", c, "count=" + std::to_string(count));

  std::ostringstream body;
  if (c.out.format == "json") {
    json doc;
    doc["op"] = "sample";
    doc["n"] = c.n;
    doc["k"] = c.k;
    doc["alpha"] = spec.describe(c.n);
    doc["seed"] = c.seed;
    doc["config"] = hash;
    doc["version"] = kout::version;
    json samples = json::array();
    for (std::uint64_t r = 0; r < count; ++r) {
      auto g = p.alpha.is_infinite() ? kout::sample_uniform(p, kout::RngSeed{c.seed, r})
                                     : kout::sample_fixed_order(p, kout::RngSeed{c.seed, r});
      json one = json::array();
      for (auto t : g.targets) one.push_back(t + 1);
      samples.push_back(std::move(one));
    }
    doc["samples"] = std::move(samples);
    body << doc.dump(2) << "\n";
  } else {
    body << "# kout sample n=" << c.n << " k=" << c.k << " alpha=" << spec.describe(c.n)
         << " seed=" << c.seed << " count=" << count << " config=" << hash << " version=" << kout::version
         << "\n";
    for (std::uint64_t r = 0; r < count; ++r) {
      auto g = p.alpha.is_infinite() ? kout::sample_uniform(p, kout::RngSeed{c.seed, r})
                                     : kout::sample_fixed_order(p, kout::RngSeed{c.seed, r});
      body << "# sample " << r << "\n";
      for (std::uint32_t v = 0; v < c.n; ++v)
        for (std::uint32_t i = 0; i < c.k; ++i)
          body << (v + 1) << " " << (i + 1) << " " << (g.target(v, i) + 1) << "\n";
    }
  }
  std::string s = body.str();
  if (c.out.out_path.empty()) {
    std::fwrite(s.data(), 1, s.size(), stdout);
  } else {
    std::ofstream f(c.out.out_path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output path: " + c.out.out_path);
    f.write(s.data(), static_cast<std::streamsize>(s.size()));
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// subcommand: exact-tv

int cmd_exact_tv(const CommonOpts& c, const std::vector<std::string>& alphas) {
  kout::exact::EnumBudget budget{c.budget};
  Table t;
  t.columns = {"n",       "k",        "alpha",      "tv_full", "tv_x", "tv_full_exact",
               "tv_x_exact", "error_bound", "mode",    "seed", "config",        "version"};
  std::string hash = config_hash("exact-tv", c, "alphas=" + std::to_string(alphas.size()));

  std::uint64_t kn = static_cast<std::uint64_t>(c.n) * c.k;
  std::cerr << "# exact-tv: kn=" << kn << ", degree classes to enumerate: "
            << kout::exact::partition_count(kn, c.n) << "\n";

  for (const auto& text : alphas) {
    AlphaSpec spec = AlphaSpec::parse(text, c.beta, c.sigma);
    if (spec.infinite()) throw CLI::ValidationError("--alpha", "exact-tv needs a finite alpha");
    json row;
    row["n"] = c.n;
    row["k"] = c.k;
    row["alpha"] = spec.describe(c.n);
    if (spec.kind == AlphaSpec::Kind::literal) {
      auto rat = rational_literal(text);
      if (!rat || *rat <= 0) throw CLI::ValidationError("--alpha", "bad literal: " + text);
      auto tv_full = kout::exact::exact_tv_full(c.n, c.k, *rat, budget);
      auto tv_x = kout::exact::exact_tv_x(c.n, c.k, *rat, budget);
      row["tv_full"] = tv_full.get_d();
      row["tv_x"] = tv_x.get_d();
      row["tv_full_exact"] = tv_full.get_num().get_str() + "/" + tv_full.get_den().get_str();
      row["tv_x_exact"] = tv_x.get_num().get_str() + "/" + tv_x.get_den().get_str();
      row["error_bound"] = 0.0;
      row["mode"] = "rational";
    } else {
      // irrational alpha: rational interval brackets with rigorous outward
      // rounding; the reported error bound is the interval width
      kout::exact::RatInterval alpha_iv = [&] {
        kout::exact::Rational n_rat(static_cast<long>(c.n));
        if (spec.kind == AlphaSpec::Kind::beta_sqrt) {
          auto beta_rat = rational_literal(format_double(spec.value));
          return kout::exact::sqrt_interval(n_rat, 200) * kout::exact::RatInterval(*beta_rat);
        }
        if (spec.kind == AlphaSpec::Kind::power && !spec.sigma_text.empty()) {
          // exponent written as a decimal: bracket n^(p/q) by exact q-th roots
          auto sig = rational_literal(spec.sigma_text);
          if (sig && *sig > 0 && sig->get_den().fits_ulong_p() && sig->get_den() <= 4096 &&
              sig->get_num().fits_ulong_p() && sig->get_num() <= 64) {
            return kout::exact::rational_power_interval(n_rat, *sig, 200);
          }
        }
        // opaque double alpha: the bracket honestly reflects double precision
        double a = spec.resolve_value(c.n);
        auto lo = rational_literal(format_double(std::nextafter(a, 0.0)));
        auto hi = rational_literal(format_double(std::nextafter(a, 1e300)));
        return kout::exact::RatInterval(*lo, *hi);
      }();
      auto tv_full = kout::exact::exact_tv_full_interval(c.n, c.k, alpha_iv, budget);
      auto tv_x = kout::exact::exact_tv_x_interval(c.n, c.k, alpha_iv, budget);
      row["tv_full"] = tv_full.mid().get_d();
      row["tv_x"] = tv_x.mid().get_d();
      row["tv_full_exact"] = "";
      row["tv_x_exact"] = "";
      row["error_bound"] = tv_full.width().get_d() + tv_x.width().get_d();
      row["mode"] = "interval";
    }
    stamp(row, c, hash);
    t.rows.push_back(std::move(row));
  }
  emit(t, c.out);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// subcommand: threshold

int cmd_threshold(const CommonOpts& c, const std::string& alpha_text, const std::string& n_grid,
                  std::uint64_t plugin_samples, std::uint64_t event_samples) {
  std::vector<std::uint32_t> ns;
  std::stringstream ss(n_grid);
  for (std::string tok; std::getline(ss, tok, ',');)
    if (!tok.empty()) ns.push_back(static_cast<std::uint32_t>(std::stoul(tok)));
  if (ns.empty()) throw CLI::ValidationError("--n-grid", "empty grid");

  AlphaSpec spec = AlphaSpec::parse(alpha_text, c.beta, c.sigma);
  if (spec.infinite()) throw CLI::ValidationError("--alpha", "threshold needs a finite alpha family");

  Table t;
  t.columns = {"n",        "k",         "alpha",     "via_f",      "via_f_se",  "plugin",
               "plugin_se", "plugin_bias", "limit_ref", "gap_p_alpha", "gap_p_unif", "seed",
               "config",   "version"};
  std::string hash = config_hash("threshold", c, "grid=" + n_grid + ";plugin=" + std::to_string(plugin_samples));

  for (auto n : ns) {
    double alpha = spec.resolve_value(n);
    double beta_eff = alpha / std::sqrt(static_cast<double>(n));
    json row;
    row["n"] = n;
    row["k"] = c.k;
    row["alpha"] = spec.describe(n);

    auto t0 = std::chrono::steady_clock::now();
    auto via_f = kout::mc::estimate_tv_via_f(n, c.k, beta_eff, c.samples, kout::RngSeed{c.seed, 0}, c.threads);
    std::cerr << result_record("estimate_tv_via_f", {{"n", n}, {"k", c.k}, {"beta", beta_eff}}, c.seed,
                               via_f, ms_since(t0))
                     .dump()
              << "\n";
    row["via_f"] = via_f.estimate;
    row["via_f_se"] = via_f.std_error;

    kout::ModelParams p(n, c.k, kout::Alpha::finite(alpha));
    t0 = std::chrono::steady_clock::now();
    auto plugin = kout::mc::estimate_tv_x_plugin(p, plugin_samples, kout::RngSeed{c.seed, 0}, c.threads);
    std::cerr << result_record("estimate_tv_x_plugin", {{"n", n}, {"k", c.k}, {"alpha", alpha}}, c.seed,
                               plugin, ms_since(t0))
                     .dump()
              << "\n";
    row["plugin"] = plugin.estimate;
    row["plugin_se"] = plugin.std_error;
    row["plugin_bias"] = plugin.bias_bound;

    if (spec.kind == AlphaSpec::Kind::beta_sqrt) {
      row["limit_ref"] = kout::limit_tv(c.k, spec.value);
    } else {
      row["limit_ref"] = "";
    }
    if (spec.kind == AlphaSpec::Kind::power && spec.value < 0.5) {
      auto d = kout::mc::distinguishing_event_check(n, c.k, spec.value, event_samples,
                                                    kout::RngSeed{c.seed, 0}, c.threads);
      row["gap_p_alpha"] = d.p_alpha;
      row["gap_p_unif"] = d.p_unif;
    } else {
      row["gap_p_alpha"] = "";
      row["gap_p_unif"] = "";
    }
    stamp(row, c, hash);
    t.rows.push_back(std::move(row));
  }
  emit(t, c.out);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// subcommand: lclt

int cmd_lclt(const CommonOpts& c, const std::string& mode, const std::string& alpha_text, double window,
             const std::string& zmethod) {
  AlphaSpec spec = AlphaSpec::parse(alpha_text, c.beta, c.sigma);
  kout::ModelParams p(c.n, c.k, spec.resolve(c.n));
  Table t;
  t.columns = {"mode", "n",   "k",    "alpha",  "samples",   "window", "sup_error", "at",
               "parity_violations", "marginal_sup_error", "insufficient", "tolerance", "pass",
               "seed", "config", "version"};
  std::string hash = config_hash("lclt", c, "mode=" + mode + ";window=" + format_double(window));

  json row;
  row["mode"] = mode;
  row["n"] = c.n;
  row["k"] = c.k;
  row["alpha"] = spec.describe(c.n);
  row["samples"] = c.samples;
  row["window"] = window;

  bool pass = true;
  double tolerance = c.tolerance;
  auto t0 = std::chrono::steady_clock::now();
  if (mode == "scalar") {
    if (tolerance < 0) tolerance = 0.03;
    auto r = kout::mc::lclt_scalar_sup_error(p, c.samples, window, kout::RngSeed{c.seed, 0}, c.threads);
    row["sup_error"] = r.sup_error;
    row["at"] = r.at_x;
    row["parity_violations"] = 0;
    row["marginal_sup_error"] = "";
    row["insufficient"] = r.insufficient_samples;
    pass = !r.insufficient_samples && r.sup_error <= tolerance;
  } else if (mode == "2d") {
    if (tolerance < 0) tolerance = 0.02;
    auto method = zmethod == "gamma-poisson" ? kout::ZSampler::Method::gamma_poisson
                                             : kout::ZSampler::Method::table;
    auto r = kout::mc::lclt_2d_sup_error(p, c.samples, window, kout::RngSeed{c.seed, 0}, c.threads, method);
    row["sup_error"] = r.sup_error;
    row["at"] = r.at_x2;
    row["parity_violations"] = r.parity_violations;
    row["marginal_sup_error"] = r.marginal_sup_error;
    row["insufficient"] = r.insufficient_samples;
    pass = !r.insufficient_samples && r.sup_error <= tolerance && r.parity_violations == 0;
  } else {
    throw CLI::ValidationError("--mode", "mode must be scalar or 2d");
  }
  std::cerr << "# lclt " << mode << " finished in " << format_double(ms_since(t0)) << " ms\n";
  row["tolerance"] = tolerance;
  row["pass"] = pass;
  stamp(row, c, hash);
  t.rows.push_back(std::move(row));
  emit(t, c.out);
  return (c.check && !pass) ? kExitCheckFailed : kExitOk;
}

// ---------------------------------------------------------------------------
// subcommand: moments

int cmd_moments(const CommonOpts& c, const std::string& alpha_text, unsigned ell, unsigned em,
                unsigned s_order) {
  AlphaSpec spec = AlphaSpec::parse(alpha_text, c.beta, c.sigma);
  Table t;
  t.columns = {"n",     "k",      "alpha",        "ell",          "factorial_moment",
               "s",     "moment", "em",           "mixed_factorial", "exact_factorial",
               "seed",  "config", "version"};
  std::string hash = config_hash("moments", c, "ell=" + std::to_string(ell));

  json row;
  row["n"] = c.n;
  row["k"] = c.k;
  row["alpha"] = spec.describe(c.n);
  row["ell"] = ell;
  kout::Alpha alpha = spec.resolve(c.n);
  row["factorial_moment"] = kout::exact::moment_factorial_fp(c.n, c.k, alpha, ell);
  row["s"] = s_order;
  row["moment"] = kout::exact::moment_fp(c.n, c.k, alpha, s_order);
  row["em"] = em;
  row["mixed_factorial"] = kout::exact::mixed_factorial_fp(c.n, c.k, alpha, ell, em);
  if (spec.kind == AlphaSpec::Kind::literal) {
    auto rat = rational_literal(alpha_text);
    if (rat) {
      auto fm = kout::exact::moment_factorial(c.n, c.k, *rat, ell);
      row["exact_factorial"] = fm.get_num().get_str() + "/" + fm.get_den().get_str();
    } else {
      row["exact_factorial"] = "";
    }
  } else if (spec.infinite()) {
    auto fm = kout::exact::moment_factorial(c.n, c.k, std::nullopt, ell);
    row["exact_factorial"] = fm.get_num().get_str() + "/" + fm.get_den().get_str();
  } else {
    row["exact_factorial"] = "";
  }
  stamp(row, c, hash);
  t.rows.push_back(std::move(row));
  emit(t, c.out);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// subcommand: limit

int cmd_limit(const CommonOpts& c) {
  Table t;
  t.columns = {"k", "beta", "limit_tv", "limit_tv_quadrature", "difference", "seed", "config", "version"};
  std::string hash = config_hash("limit", c, "");
  double closed = kout::limit_tv(c.k, c.beta);
  double quad = kout::limit_tv_quadrature(c.k, c.beta);
  json row;
  row["k"] = c.k;
  row["beta"] = c.beta;
  row["limit_tv"] = closed;
  row["limit_tv_quadrature"] = quad;
  row["difference"] = closed - quad;
  stamp(row, c, hash);
  t.rows.push_back(std::move(row));
  emit(t, c.out);
  if (c.check) {
    double tol = c.tolerance < 0 ? 1e-8 : c.tolerance;
    if (std::abs(closed - quad) > tol) return kExitCheckFailed;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"random k-out digraphs with preferential attachment: samplers, exact distributions, "
               "and total-variation experiments"};
  app.require_subcommand(1);

  CommonOpts c_sample, c_exact, c_threshold, c_lclt, c_moments, c_limit;
  std::uint64_t sample_count = 1;
  std::string sample_alpha = "1";
  std::vector<std::string> exact_alphas = {"1"};
  std::string threshold_alpha = "beta*sqrt(n)";
  std::string threshold_grid = "1000";
  std::uint64_t plugin_samples = 0;
  std::uint64_t event_samples = 10000;
  std::string lclt_mode = "scalar";
  std::string lclt_alpha = "sqrt(n)";
  double lclt_window = 8.0;
  std::string lclt_zmethod = "table";
  std::string moments_alpha = "1";
  unsigned moments_ell = 1, moments_em = 1, moments_s = 2;

  auto* sample = app.add_subcommand("sample", "write sampled digraphs");
  add_common(sample, c_sample, true, {"lines", "json"});
  sample->add_option("--alpha", sample_alpha, "alpha spec");
  sample->add_option("--count", sample_count, "number of digraphs");
  c_sample.out.format = "lines";

  auto* exact_tv = app.add_subcommand("exact-tv", "exact TV distances by full degree-class enumeration");
  add_common(exact_tv, c_exact);
  exact_tv->add_option("--alpha", exact_alphas, "alpha specs (repeatable or comma-separated)")
      ->delimiter(',');

  auto* threshold = app.add_subcommand("threshold", "TV estimates across an n-grid for an alpha family");
  add_common(threshold, c_threshold, false);
  threshold->add_option("--alpha", threshold_alpha, "alpha family spec");
  threshold->add_option("--n-grid", threshold_grid, "comma-separated n values");
  threshold->add_option("--plugin-samples", plugin_samples, "plug-in estimator samples (default --samples)");
  threshold->add_option("--event-samples", event_samples, "distinguishing-event samples");

  auto* lclt = app.add_subcommand("lclt", "local-limit sup-error measurement");
  add_common(lclt, c_lclt);
  lclt->add_option("--mode", lclt_mode, "scalar or 2d")->check(CLI::IsMember({"scalar", "2d"}));
  lclt->add_option("--alpha", lclt_alpha, "alpha spec");
  lclt->add_option("--window", lclt_window, "window (x units for scalar, sds for 2d)");
  lclt->add_option("--zmethod", lclt_zmethod, "unconditioned degree sampler")
      ->check(CLI::IsMember({"table", "gamma-poisson"}));

  auto* moments = app.add_subcommand("moments", "closed-form degree moments");
  add_common(moments, c_moments);
  moments->add_option("--alpha", moments_alpha, "alpha spec");
  moments->add_option("--ell", moments_ell, "factorial moment order");
  moments->add_option("--em", moments_em, "second order of the mixed factorial moment");
  moments->add_option("--s-order", moments_s, "raw moment order");

  auto* limit = app.add_subcommand("limit", "limiting TV constant at alpha = beta*sqrt(n)");
  add_common(limit, c_limit, false);

  std::vector<std::string> args;
  try {
    args = inject_config(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  std::vector<const char*> cargs;
  cargs.push_back(argv[0]);
  for (auto& a : args) cargs.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (sample->parsed()) {
      c_sample.alpha = sample_alpha;
      return cmd_sample(c_sample, sample_count, sample_alpha);
    }
    if (exact_tv->parsed()) {
      c_exact.alpha = exact_alphas.empty() ? "" : exact_alphas.front();
      return cmd_exact_tv(c_exact, exact_alphas);
    }
    if (threshold->parsed()) {
      c_threshold.alpha = threshold_alpha;
      return cmd_threshold(c_threshold, threshold_alpha, threshold_grid,
                           plugin_samples == 0 ? c_threshold.samples : plugin_samples, event_samples);
    }
    if (lclt->parsed()) {
      c_lclt.alpha = lclt_alpha;
      return cmd_lclt(c_lclt, lclt_mode, lclt_alpha, lclt_window, lclt_zmethod);
    }
    if (moments->parsed()) {
      c_moments.alpha = moments_alpha;
      return cmd_moments(c_moments, moments_alpha, moments_ell, moments_em, moments_s);
    }
    if (limit->parsed()) return cmd_limit(c_limit);
  } catch (const kout::exact::BudgetExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBudget;
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.get_name() << ": " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitValidation;
}
