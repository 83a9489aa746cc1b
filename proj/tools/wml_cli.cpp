#include "grid.hpp"

#include "wml/wml.h"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

namespace {

using Context = std::unique_ptr<wml_context, decltype(&wml_context_destroy)>;

struct Options {
  long K = 12, L = 2;
  int digits = 50;
  double sigma = 0.5, tau_max = 0;
  int order = 0;
  double quad_tol = 0, tail = 0;
  int jobs = 0;
  std::string out, format = "csv", spectral_data;
  bool check = false;

  std::string emit = "support", tau_grid = "lin:0:K/L:16";
  std::string variant = "plus", t_grid = "log:K^0.7:K/L:16";
  double t1 = 0, t2 = 0;
  long T = 64;
  double radius = 0.01;
  int nodes = 64;
  long k_min = 12, k_max = 40;
  double t_cap = 0, tail_mass = 1;
  long k_cap = 0;
  std::string v_grid = "log:0.5:8:5";
};

// Exit status of a failed call: 2 for rejected input, 1 for numerical failures.
int exit_code(wml_status s) {
  switch (s) {
    case WML_OK: return 0;
    case WML_E_INVALID:
    case WML_E_DOMAIN:
    case WML_E_SCHEMA:
    case WML_E_IO: return 2;
    default: return 1;
  }
}

class Failure {
public:
  Failure(std::string cmd, wml_status s, std::string msg) : cmd_(std::move(cmd)), status_(s), msg_(std::move(msg)) {}
  int report() const {
    std::cerr << "wml " << cmd_ << ": " << wml_status_name(status_) << (msg_.empty() ? "" : ": " + msg_) << "\n";
    return exit_code(status_);
  }

private:
  std::string cmd_;
  wml_status status_;
  std::string msg_;
};

class Runner {
public:
  Runner(const Options& o, std::string cmd) : o_(o), cmd_(std::move(cmd)), ctx_(nullptr, wml_context_destroy) {
    wml_context* c = nullptr;
    if (wml_context_create(&c) != WML_OK) throw Failure(cmd_, WML_E_INTERNAL, "cannot create context");
    ctx_.reset(c);
    call(wml_set_params(ctx(), o.K, o.L));
    call(wml_set_digits(ctx(), o.digits));
    call(wml_set_tolerances(ctx(), o.quad_tol, o.tail));
    call(wml_set_transform(ctx(), o.sigma, o.tau_max, o.order));
    if (o.jobs > 0) call(wml_set_jobs(ctx(), o.jobs));
  }

  wml_context* ctx() { return ctx_.get(); }

  void call(wml_status s) {
    if (s != WML_OK) throw Failure(cmd_, s, wml_last_error(ctx()));
  }

  wml_format format() const { return o_.format == "json" ? WML_FORMAT_JSON : WML_FORMAT_CSV; }

  std::vector<double> grid(const std::string& spec) {
    try {
      return wml::cli::parse_grid(spec, double(o_.K), double(o_.L));
    } catch (const std::invalid_argument& e) {
      throw Failure(cmd_, WML_E_INVALID, e.what());
    }
  }

  // Takes ownership of a string returned by the library and writes it to --out or stdout.
  void write(char* text) {
    std::unique_ptr<char, decltype(&wml_string_free)> owned(text, wml_string_free);
    std::string s = text ? text : "";
    if (o_.out.empty()) {
      std::cout << s << std::flush;
      return;
    }
    std::ofstream f(o_.out, std::ios::binary);
    if (!(f << s) || !f.flush()) throw Failure(cmd_, WML_E_IO, "cannot write " + o_.out);
  }

  int check(const std::string& module) {
    char* text = nullptr;
    wml_status s = wml_check(ctx(), module.c_str(), &text);
    if (s != WML_OK && s != WML_E_CHECK) {
      wml_string_free(text);
      throw Failure(cmd_, s, wml_last_error(ctx()));
    }
    write(text);
    return s == WML_OK ? 0 : 1;
  }

private:
  const Options& o_;
  std::string cmd_;
  Context ctx_;
};

using Handler = int (*)(Runner&, const Options&);

int run_testfn(Runner& r, const Options& o) {
  char* out = nullptr;
  if (o.emit == "regime") {
    std::vector<double> tau = r.grid(o.tau_grid);
    r.call(wml_regime_emit(r.ctx(), tau.data(), tau.size(), r.format(), &out));
  } else {
    r.call(wml_testfn_emit(r.ctx(), o.emit.c_str(), r.format(), &out));
  }
  r.write(out);
  return 0;
}

int run_transform(Runner& r, const Options& o) {
  std::vector<double> args = r.grid(o.t_grid);
  char* out = nullptr;
  r.call(wml_transform_grid(r.ctx(), o.variant.c_str(), args.data(), args.size(), r.format(), &out));
  r.write(out);
  return 0;
}

int run_stationary(Runner& r, const Options& o) {
  std::vector<double> ts = r.grid(o.t_grid);
  char* out = nullptr;
  r.call(wml_stationary(r.ctx(), ts.data(), ts.size(), r.format(), &out));
  r.write(out);
  return 0;
}

int run_oscillation(Runner& r, const Options& o) {
  char* out = nullptr;
  r.call(wml_oscillation(r.ctx(), o.t1, o.t2, o.T, r.format(), &out));
  r.write(out);
  return 0;
}

int run_mainterm(Runner& r, const Options& o) {
  char* out = nullptr;
  r.call(wml_mainterm(r.ctx(), o.radius, o.nodes, r.format(), &out));
  r.write(out);
  return 0;
}

struct TableHandle {
  wml_moment_table* p = nullptr;
  ~TableHandle() { wml_moments_destroy(p); }
};

int run_moments(Runner& r, const Options& o) {
  TableHandle t;
  r.call(wml_moments_compute(r.ctx(), o.k_min, o.k_max, &t.p));
  char* out = nullptr;
  r.call(wml_moments_emit(r.ctx(), t.p, r.format(), &out));
  r.write(out);
  return 0;
}

int run_stats(Runner& r, const Options& o) {
  std::vector<double> V = r.grid(o.v_grid);
  TableHandle t;
  r.call(wml_moments_compute(r.ctx(), o.T, 2 * o.T, &t.p));
  char* out = nullptr;
  r.call(wml_stats_emit(r.ctx(), t.p, o.T, V.data(), V.size(), r.format(), &out));
  r.write(out);
  return 0;
}

int run_reciprocity(Runner& r, const Options& o) {
  if (o.spectral_data.empty()) throw Failure("reciprocity", WML_E_INVALID, "--spectral-data is required");
  wml_spectral_data* data = nullptr;
  r.call(wml_spectral_load(r.ctx(), o.spectral_data.c_str(), &data));
  std::unique_ptr<wml_spectral_data, decltype(&wml_spectral_destroy)> owned(data, wml_spectral_destroy);
  char* out = nullptr;
  r.call(wml_reciprocity(r.ctx(), data, o.t_cap, o.k_cap, o.tail_mass, &out));
  r.write(out);
  return 0;
}

int run_check_all(Runner& r, const Options&) { return r.check("all"); }

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Numerical experiments for the weighted fourth moment reciprocity of level-one forms", "wml"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(wml_version()));

  auto common = [&](CLI::App* sc) {
    sc->option_defaults()->always_capture_default();
    sc->add_option("--K", o.K, "center weight K (even)")->envname("WML_K");
    sc->add_option("--L", o.L, "width parameter L (even)")->envname("WML_L");
    sc->add_option("--digits", o.digits, "decimal digits of working precision")->envname("WML_DIGITS");
    sc->add_option("--sigma", o.sigma, "abscissa of the Mellin contour")->envname("WML_SIGMA");
    sc->add_option("--tau-max", o.tau_max, "contour truncation (0 = automatic)")->envname("WML_TAU_MAX");
    sc->add_option("--order", o.order, "Gauss-Legendre points per panel (0 = default)")->envname("WML_ORDER");
    sc->add_option("--quad-tol", o.quad_tol, "relative quadrature tolerance (0 = from digits)")->envname("WML_QUAD_TOL");
    sc->add_option("--tail", o.tail, "absolute tail threshold (0 = from digits)")->envname("WML_TAIL");
    sc->add_option("--jobs", o.jobs, "worker threads (0 = logical cores)")->envname("WML_JOBS");
    sc->add_option("--out", o.out, "output file (default stdout)")->envname("WML_OUT");
    sc->add_option("--format", o.format, "output format")->check(CLI::IsMember({"csv", "json"}))->envname("WML_FORMAT");
    sc->add_option("--spectral-data", o.spectral_data, "Maass spectral data CSV")->envname("WML_SPECTRAL_DATA");
    sc->add_flag("--check", o.check, "run the invariant suite of this module instead");
  };

  struct Command {
    CLI::App* app;
    std::string module;
    Handler run;
  };
  std::vector<Command> commands;
  auto command = [&](const char* name, const char* help, const char* module, Handler h) {
    CLI::App* sc = app.add_subcommand(name, help);
    common(sc);
    commands.push_back({sc, module, h});
    return sc;
  };

  auto* testfn = command("testfn", "holomorphic weights of the test function", "testfn", run_testfn);
  testfn->add_option("--emit", o.emit, "support, compare or regime")->check(CLI::IsMember({"support", "compare", "regime"}));
  testfn->add_option("--tau-grid", o.tau_grid, "tau grid for --emit regime");

  auto* transform = command("transform", "integral transforms h+, h- or h_hol on a grid", "transform", run_transform);
  transform->add_option("--variant", o.variant, "plus, minus or hol")->check(CLI::IsMember({"plus", "minus", "hol"}));
  transform->add_option("--t-grid", o.t_grid, "argument grid (t, or k for hol)");

  auto* stationary = command("stationary", "stationary point of the plus transform integrand", "stationary", run_stationary);
  stationary->add_option("--t-grid", o.t_grid, "t grid");

  auto* oscillation = command("oscillation", "dyadic oscillation sum over K", "oscillation", run_oscillation);
  oscillation->add_option("--t1", o.t1, "first spectral argument");
  oscillation->add_option("--t2", o.t2, "second spectral argument");
  oscillation->add_option("--T", o.T, "dyadic size");

  auto* mainterm = command("mainterm", "main term as the limit z -> 0", "mainterm", run_mainterm);
  mainterm->add_option("--radius", o.radius, "circle radius");
  mainterm->add_option("--nodes", o.nodes, "nodes on the circle");

  auto* moments = command("moments", "central values, adjoint values and fourth moments by weight", "moments", run_moments);
  moments->add_option("--k-min", o.k_min, "first weight");
  moments->add_option("--k-max", o.k_max, "last weight");

  auto* reciprocity = command("reciprocity", "reciprocity report (JSON)", "reciprocity", run_reciprocity);
  reciprocity->add_option("--t-cap", o.t_cap, "Eisenstein truncation (0 = 2 K log K / L)");
  reciprocity->add_option("--k-cap", o.k_cap, "last weight of the dual sum (0 = 120)");
  reciprocity->add_option("--tail-mass", o.tail_mass, "bound on the weighted mass above the dataset");

  auto* stats = command("stats", "large-value statistics over T <= k <= 2T", "stats", run_stats);
  stats->add_option("--T", o.T, "dyadic size");
  stats->add_option("--V-grid", o.v_grid, "thresholds V");

  command("check-all", "run every invariant suite", "all", run_check_all);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  for (const Command& c : commands) {
    if (!c.app->parsed()) continue;
    try {
      Runner r(o, c.app->get_name());
      if (o.check) return r.check(c.module);
      return c.run(r, o);
    } catch (const Failure& f) {
      return f.report();
    }
  }
  return 2;
}
