#include "perc/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>

#include "perc/pathing.hpp"
#include "perc/renorm.hpp"
#include "perc/resources.hpp"

namespace perc {
namespace {

using nlohmann::ordered_json;

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

std::string num(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

struct Common {
  std::string kind;
  std::vector<int> L;
  std::vector<int> k;
  std::vector<double> p;
  std::optional<double> p_site;
  std::optional<double> p_bond;
  double p_loss = 0.1;
  std::uint64_t trials = 1000;
  double threshold = 0.5;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  std::string out;
};

Common with_kind(std::string kind) {
  Common c;
  c.kind = std::move(kind);
  return c;
}

void add_common(CLI::App& cmd, Common& c) {
  cmd.add_option("--kind", c.kind, "cubic, diamond, covering_cubic or pyrochlore")->capture_default_str();
  cmd.add_option("--L", c.L, "superlattice sizes (comma list)")->delimiter(',');
  cmd.add_option("--k", c.k, "block sizes (comma list)")->delimiter(',');
  cmd.add_option("--p-site", c.p_site, "site probability");
  cmd.add_option("--p-bond", c.p_bond, "bond probability");
  cmd.add_option("--trials", c.trials, "Monte Carlo trials per row")->capture_default_str();
  cmd.add_option("--seed", c.seed, "master seed")->capture_default_str();
  cmd.add_option("--workers", c.workers, "worker threads (0: hardware)")->capture_default_str();
  cmd.add_option("--out", c.out, "output file; a manifest is written next to it");
}

LatticeKind kind_of(const Common& c) {
  const auto kind = parse_lattice_kind(c.kind);
  if (!kind) throw ConfigError("unknown lattice kind '" + c.kind + "'");
  return *kind;
}

PercolationParams params_for(LatticeKind kind, double p_site, double p_bond) {
  if (is_covering(kind)) {
    if (p_bond != 1.0) throw ConfigError("covering lattices take site probabilities only");
    return PercolationParams::site(p_site);
  }
  if (p_site == 1.0) return PercolationParams::bond(p_bond);
  if (p_bond == 1.0) return PercolationParams::site(p_site);
  return PercolationParams::mixed(p_site, p_bond);
}

// --p sweeps the bond probability (the site probability on covering lattices).
std::vector<PercolationParams> param_sets(LatticeKind kind, const Common& c, double site_default,
                                          double bond_default) {
  std::vector<PercolationParams> out;
  if (c.p.empty()) {
    out.push_back(params_for(kind, c.p_site.value_or(site_default), c.p_bond.value_or(bond_default)));
  } else {
    for (double p : c.p) {
      out.push_back(is_covering(kind) ? params_for(kind, p, 1.0)
                                      : params_for(kind, c.p_site.value_or(1.0), p));
    }
  }
  for (const auto& params : out) params.validate();
  return out;
}

unsigned workers_of(const Common& c) { return c.workers == 0 ? default_workers() : c.workers; }

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

void require_positive(const std::vector<int>& values, const char* name) {
  require(!values.empty(), std::string("--") + name + " is required");
  for (int v : values) require(v >= 1, std::string("--") + name + " values must be at least 1");
}

// Writes to --out when given, otherwise to the command's stream.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : path_(path), fallback_(fallback) {}
  std::ostream& stream() { return path_.empty() ? fallback_ : buffer_; }
  void flush() {
    if (path_.empty()) return;
    std::ofstream file(path_, std::ios::binary);
    if (!file) throw std::runtime_error("cannot write " + path_);
    file << buffer_.str();
  }

 private:
  std::string path_;
  std::ostream& fallback_;
  std::ostringstream buffer_;
};

void write_manifest(const Common& c, const std::string& command, const std::vector<std::string>& args,
                    ordered_json extra) {
  if (c.out.empty()) return;
  ordered_json m;
  m["program"] = "perc";
  m["version"] = PERC_VERSION;
  m["command"] = command;
  m["argv"] = args;
  m["seed"] = c.seed;
  m["workers"] = c.workers;
  m["trials"] = c.trials;
  m["output"] = c.out;
  for (auto& [key, value] : extra.items()) m[key] = value;
  std::ofstream file(c.out + ".manifest.json", std::ios::binary);
  if (!file) throw std::runtime_error("cannot write manifest for " + c.out);
  file << m.dump(2) << '\n';
}

std::string axes_name(std::span<const Axis> axes) {
  std::string s;
  for (Axis a : axes) s += "xyz"[index_of(a)];
  return s;
}

int cmd_crossing(const Common& c, const std::vector<std::string>& args, std::ostream& out) {
  const LatticeKind kind = kind_of(c);
  require_positive(c.k, "k");
  const auto sets = param_sets(kind, c, 1.0, 1.0);
  const RngSpec rng{c.seed, 0};
  Sink sink(c.out, out);
  auto& os = sink.stream();
  os << "kind,k,p_site,p_bond,axes,trials,P,stderr,seed\n";
  for (int k : c.k) {
    for (const auto& params : sets) {
      const auto est = estimate_crossing_prob(kind, k, params, c.trials, rng, kDefaultCrossingAxes,
                                              workers_of(c));
      os << to_string(kind) << ',' << k << ',' << num(params.p_site) << ',' << num(params.p_bond) << ','
         << axes_name(kDefaultCrossingAxes) << ',' << c.trials << ',' << num(est.value) << ','
         << num(est.standard_error) << ',' << c.seed << '\n';
    }
  }
  sink.flush();
  write_manifest(c, "crossing", args, {});
  return kExitOk;
}

int cmd_scaling(const Common& c, int k_max, const std::vector<std::string>& args, std::ostream& out) {
  const LatticeKind kind = kind_of(c);
  std::vector<int> Ls = c.L.empty() ? std::vector<int>{4, 8, 16, 32} : c.L;
  require_positive(Ls, "L");
  require(k_max >= 1, "--k-max must be at least 1");
  require(c.threshold >= 0.0 && c.threshold <= 1.0, "--threshold must lie in [0, 1]");
  const auto params = param_sets(kind, c, 0.75, 0.5).front();
  for (int L : Ls) RenormScheme::standard(kind, L, 1, params).validate();
  const RngSpec rng{c.seed, 0};

  Sink summary(c.out, out);
  Sink scan(c.out.empty() ? std::string() : c.out + ".scan.csv", out);
  summary.stream() << "kind,L,k_min,found,p_site,p_bond,threshold,trials,seed\n";
  std::ostringstream scan_rows;
  scan_rows << "kind,L,k,P,stderr\n";
  for (int L : Ls) {
    const auto search = min_block_size(kind, params, L, c.threshold, c.trials, k_max, rng, workers_of(c));
    summary.stream() << to_string(kind) << ',' << L << ','
                     << (search.k_min ? std::to_string(*search.k_min) : std::string("NA")) << ','
                     << (search.k_min ? "true" : "false") << ',' << num(params.p_site) << ','
                     << num(params.p_bond) << ',' << num(c.threshold) << ',' << c.trials << ',' << c.seed
                     << '\n';
    for (const auto& row : search.rows) {
      scan_rows << to_string(kind) << ',' << row.L << ',' << row.k << ',' << num(row.estimate.value) << ','
                << num(row.estimate.standard_error) << '\n';
    }
  }
  summary.flush();
  if (!c.out.empty()) {
    scan.stream() << scan_rows.str();
    scan.flush();
  }
  write_manifest(c, "scaling", args,
                 {{"k_max", k_max}, {"threshold", c.threshold}, {"scan", c.out.empty() ? "" : c.out + ".scan.csv"}});
  return kExitOk;
}

int cmd_renorm(const Common& c, const std::vector<std::string>& args, std::ostream& out) {
  const LatticeKind kind = kind_of(c);
  require_positive(c.L, "L");
  require_positive(c.k, "k");
  const auto sets = param_sets(kind, c, 1.0, 1.0);
  for (int L : c.L) {
    for (int k : c.k) {
      for (const auto& params : sets) RenormScheme::standard(kind, L, k, params).validate();
    }
  }
  const RngSpec rng{c.seed, 0};
  Sink sink(c.out, out);
  auto& os = sink.stream();
  os << "kind,L,k,p_site,p_bond,trials,P,stderr,seed\n";
  for (int L : c.L) {
    for (int k : c.k) {
      for (const auto& params : sets) {
        const auto est = estimate_P(RenormScheme::standard(kind, L, k, params), c.trials, rng, workers_of(c));
        os << to_string(kind) << ',' << L << ',' << k << ',' << num(params.p_site) << ','
           << num(params.p_bond) << ',' << c.trials << ',' << num(est.value) << ','
           << num(est.standard_error) << ',' << c.seed << '\n';
      }
    }
  }
  sink.flush();
  write_manifest(c, "renorm", args, {});
  return kExitOk;
}

int cmd_plan(const Common& c, std::uint64_t stream, bool allow_fail, const std::vector<std::string>& args,
             std::ostream& out, std::ostream& err) {
  const LatticeKind kind = kind_of(c);
  require(c.L.size() == 1 && c.k.size() == 1, "plan takes a single --L and a single --k");
  require_positive(c.L, "L");
  require_positive(c.k, "k");
  const auto params = param_sets(kind, c, 1.0, 1.0).front();
  const auto scheme = RenormScheme::standard(kind, c.L.front(), c.k.front(), params);
  scheme.validate();

  const auto inst = build_instance(scheme, RngSpec{c.seed, stream});
  ordered_json info{{"L", scheme.L}, {"k", scheme.k}, {"stream", stream}};
  std::ostream& report = c.out.empty() ? err : out;
  if (!is_full(inst.lattice)) {
    err << "instance is not full\n";
    for (const auto& s : inst.lattice.missing_sites()) err << "missing site " << s.i << ' ' << s.j << '\n';
    for (const auto& [s, d] : inst.lattice.missing_bonds()) {
      err << "missing bond " << s.i << ' ' << s.j << ' '
          << (d == Direction::horizontal ? "horizontal" : "vertical") << '\n';
    }
    report << "verified: false\n";
    info["full"] = false;
    info["verified"] = false;
    write_manifest(c, "plan", args, info);
    return allow_fail ? kExitOk : kExitNotFull;
  }

  const auto outcome = plan_instance(inst);
  for (const auto& [s, d] : outcome.routing.unrouted) {
    err << "no route for bond " << s.i << ' ' << s.j << ' '
        << (d == Direction::horizontal ? "horizontal" : "vertical") << '\n';
  }
  Sink sink(c.out, out);
  write_plan(sink.stream(), outcome.plan);
  sink.flush();
  report << "verified: " << (outcome.verified ? "true" : "false") << '\n';
  info["full"] = true;
  info["verified"] = outcome.verified;
  info["keep"] = outcome.plan.count(Basis::keep);
  info["x"] = outcome.plan.count(Basis::x);
  info["y"] = outcome.plan.count(Basis::y);
  info["z"] = outcome.plan.count(Basis::z);
  write_manifest(c, "plan", args, info);
  return outcome.verified || allow_fail ? kExitOk : kExitFailure;
}

int cmd_bound(const Common& c, const std::vector<double>& Ls, const std::vector<double>& ks,
              const BoundConstants& cst, const std::vector<std::string>& args, std::ostream& out) {
  cst.validate();
  const std::vector<double> L_values = Ls.empty() ? std::vector<double>{1e2, 1e3, 1e4, 1e5, 1e6} : Ls;
  require(ks.empty() || ks.size() == L_values.size(), "--k must be empty or match --L in length");
  for (double L : L_values) require(L >= 1.0, "--L values must be at least 1");
  std::vector<LowerBound> rows;
  std::vector<double> k_values;
  for (std::size_t i = 0; i < L_values.size(); ++i) {
    const double k = ks.empty() ? std::pow(L_values[i], cst.epsilon) : ks[i];
    k_values.push_back(k);
    rows.push_back(evaluate_lower_bound(L_values[i], k, cst));
  }
  Sink sink(c.out, out);
  sink.stream() << "L,k,full_bound,simplified_bound\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    sink.stream() << num(L_values[i]) << ',' << num(k_values[i]) << ',' << num(rows[i].full) << ','
                  << num(rows[i].simplified) << '\n';
  }
  sink.flush();
  write_manifest(c, "bound", args,
                 {{"a", cst.a}, {"c", cst.c}, {"d", cst.d}, {"epsilon", cst.epsilon}, {"k0", cst.k0}});
  return kExitOk;
}

int cmd_loss(const Common& c, double p_effective, int radius, const std::vector<std::string>& args,
             std::ostream& out) {
  const LatticeKind kind = kind_of(c);
  const std::vector<int> Ls = c.L.empty() ? std::vector<int>{1} : c.L;
  require_positive(Ls, "L");
  require_positive(c.k, "k");
  require(c.p_loss >= 0.0 && c.p_loss <= 1.0, "--p-loss must lie in [0, 1]");
  require(p_effective >= 0.0 && p_effective <= 1.0, "--p-effective must lie in [0, 1]");
  require(radius >= 0, "--radius must be non-negative");
  const auto params = param_sets(kind, c, 0.75, 0.5).front();
  const RngSpec rng{c.seed, 0};

  Sink sink(c.out, out);
  auto& os = sink.stream();
  os << "kind,L,k,n_states,n_qubits,p_site,p_bond,p_loss,P_cross,stderr,p_effective,site_failure\n";
  ordered_json report = ordered_json::array();
  for (int k : c.k) {
    const auto est = estimate_crossing_with_loss(kind, k, params, c.p_loss, c.trials, rng,
                                                 kDefaultCrossingAxes, workers_of(c), radius);
    for (int L : Ls) {
      const auto count = resource_count(kind, L, k);
      const auto per_site = count.n_qubits / (static_cast<std::uint64_t>(L) * L);
      const double failure = loss_budget(p_effective, 1.0 - est.value, per_site);
      os << to_string(kind) << ',' << L << ',' << k << ',' << count.n_states << ',' << count.n_qubits << ','
         << num(params.p_site) << ',' << num(params.p_bond) << ',' << num(c.p_loss) << ','
         << num(est.value) << ',' << num(est.standard_error) << ',' << num(p_effective) << ','
         << num(failure) << '\n';
      report.push_back({{"L", L}, {"k", k}, {"n_states", count.n_states}, {"n_qubits", count.n_qubits},
                        {"P_cross", est.value}, {"site_failure", failure}});
    }
  }
  sink.flush();
  write_manifest(c, "loss", args,
                 {{"p_loss", c.p_loss}, {"p_effective", p_effective}, {"radius", radius}, {"resources", report}});
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Percolation-based construction of cluster states"};
  app.name("perc");
  app.require_subcommand(1);
  app.set_version_flag("--version", PERC_VERSION);

  Common crossing = with_kind("cubic");
  auto* c_crossing = app.add_subcommand("crossing", "crossing probability of k^3 blocks");
  add_common(*c_crossing, crossing);
  c_crossing->add_option("--p", crossing.p, "bond probabilities to sweep (comma list)")->delimiter(',');

  Common scaling = with_kind("diamond");
  int k_max = 16;
  auto* c_scaling = app.add_subcommand("scaling", "smallest block size reaching the threshold, per L");
  add_common(*c_scaling, scaling);
  c_scaling->add_option("--threshold", scaling.threshold, "target probability of a full lattice")
      ->capture_default_str();
  c_scaling->add_option("--k-max", k_max, "largest block size tried")->capture_default_str();

  Common renorm = with_kind("cubic");
  auto* c_renorm = app.add_subcommand("renorm", "probability that the renormalised lattice is full");
  add_common(*c_renorm, renorm);
  c_renorm->add_option("--p", renorm.p, "bond probabilities to sweep (comma list)")->delimiter(',');

  Common plan = with_kind("cubic");
  std::uint64_t stream = 0;
  bool allow_fail = false;
  auto* c_plan = app.add_subcommand("plan", "measurement plan for one sampled instance");
  add_common(*c_plan, plan);
  c_plan->add_option("--p", plan.p, "bond probability")->expected(1);
  c_plan->add_option("--stream", stream, "stream id of the instance")->capture_default_str();
  c_plan->add_flag("--allow-fail", allow_fail, "exit 0 even when the instance is not full or fails");

  Common bound{};
  std::vector<double> bound_L, bound_k;
  BoundConstants cst;
  auto* c_bound = app.add_subcommand("bound", "analytic lower bound on the probability of a full lattice");
  c_bound->add_option("--L", bound_L, "superlattice sizes (comma list)")->delimiter(',');
  c_bound->add_option("--k", bound_k, "block sizes, one per L (default L^epsilon)")->delimiter(',');
  c_bound->add_option("--a", cst.a)->capture_default_str();
  c_bound->add_option("--c", cst.c)->capture_default_str();
  c_bound->add_option("--d", cst.d)->capture_default_str();
  c_bound->add_option("--epsilon", cst.epsilon)->capture_default_str();
  c_bound->add_option("--k0", cst.k0)->capture_default_str();
  c_bound->add_option("--out", bound.out, "output file; a manifest is written next to it");

  Common loss = with_kind("diamond");
  double p_effective = 1e-5;
  int radius = 1;
  auto* c_loss = app.add_subcommand("loss", "resource counts and crossing under heralded loss");
  add_common(*c_loss, loss);
  c_loss->add_option("--p-loss", loss.p_loss, "heralded loss probability")->capture_default_str();
  c_loss->add_option("--p-effective", p_effective, "loss rate after encoding")->capture_default_str();
  c_loss->add_option("--radius", radius, "graph steps closed around a lost site")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << PERC_VERSION << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    if (c_crossing->parsed()) return cmd_crossing(crossing, args, out);
    if (c_scaling->parsed()) return cmd_scaling(scaling, k_max, args, out);
    if (c_renorm->parsed()) return cmd_renorm(renorm, args, out);
    if (c_plan->parsed()) return cmd_plan(plan, stream, allow_fail, args, out, err);
    if (c_bound->parsed()) return cmd_bound(bound, bound_L, bound_k, cst, args, out);
    if (c_loss->parsed()) return cmd_loss(loss, p_effective, radius, args, out);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitConfig;
}

}  // namespace perc
