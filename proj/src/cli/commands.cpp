#include "jost/cli/commands.hpp"

#include "jost/cli/selftest.hpp"
#include "jost/density.hpp"
#include "jost/oracle.hpp"
#include "jost/renorm.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <functional>
#include <iostream>
#include <json.hpp>
#include <numbers>
#include <random>
#include <thread>

namespace jost::cli {

namespace {

constexpr const char* version = "0.1.0";
using json = nlohmann::ordered_json;

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{:.12e}", v);
}

//! Rows computed in parallel, assembled in index order.
template <class Row>
std::vector<Row> parallel_map(std::size_t n, unsigned threads, const std::function<Row(std::size_t)>& fn) {
  std::vector<Row> out(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < n;) out[i] = fn(i);
  };
  const unsigned t = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  std::vector<std::jthread> pool;
  for (unsigned k = 1; k < t; ++k) pool.emplace_back(worker);
  worker();
  return out;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

struct Report {
  std::string command;
  const RunConfig* cfg = nullptr;
  json diagnostics = json::array();
  json summary = json::object();
  bool numerical_failure = false;

  void note(const std::string& where, const std::string& what) { diagnostics.push_back({{"item", where}, {"message", what}}); }
};

std::filesystem::path output_base(const RunConfig& cfg, const std::string& command) {
  std::filesystem::create_directories(cfg.output_dir);
  return cfg.output_dir / (cfg.output_name.empty() ? command : cfg.output_name);
}

json solver_json(const SolverConfig& s) {
  return {{"order", s.order},   {"error_order", s.error_order}, {"estimate_error", s.estimate_error},
          {"width", s.width},   {"geometric_from", s.geometric_from}, {"ratio", s.ratio},
          {"s_max", s.s_max},   {"guard", s.guard},           {"max_breaks", s.max_breaks}};
}

int write(const Table& t, Report& rep) {
  const RunConfig& cfg = *rep.cfg;
  const auto base = output_base(cfg, rep.command);
  {
    std::ofstream csv(base.string() + ".csv");
    for (std::size_t i = 0; i < t.header.size(); ++i) csv << (i ? "," : "") << t.header[i];
    csv << '\n';
    for (auto& r : t.rows) {
      for (std::size_t i = 0; i < r.size(); ++i) csv << (i ? "," : "") << r[i];
      csv << '\n';
    }
  }
  json side;
  side["command"] = rep.command;
  side["version"] = version;
  side["config_hash"] = fmt::format("{:016x}", cfg.hash);
  side["config"] = cfg.canonical;
  side["interaction"] = {{"kind", to_string(cfg.interaction.kind)},
                         {"mass", cfg.interaction.mass},
                         {"weight", cfg.weight_source},
                         {"N", cfg.N}};
  side["tolerances"] = {{"phase", cfg.tol_phase}, {"unitarity", cfg.tol_unitarity}, {"bound", cfg.tol_bound}};
  side["solver"] = solver_json(cfg.solver);
  side["ode"] = {{"r_min", cfg.ode.r_min}, {"r_max", cfg.ode.r_max}, {"r_cap", cfg.ode.r_cap},
                 {"rtol", cfg.ode.rtol},   {"atol", cfg.ode.atol},   {"wronskian_tol", cfg.ode.wronskian_tol}};
  side["columns"] = t.header;
  side["rows"] = t.rows.size();
  side["summary"] = rep.summary;
  side["diagnostics"] = rep.diagnostics;
  side["status"] = rep.numerical_failure ? "numerical-failure" : "ok";
  std::ofstream(base.string() + ".json") << side.dump(2) << '\n';
  return rep.numerical_failure ? NumericalFailure : Success;
}

bool has_oracle(const RunConfig& cfg) {
  return cfg.N == 3 && (cfg.interaction.kind == InteractionKind::SchrodingerLocal || cfg.interaction.is_dirac());
}

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw ConfigError(0, field, what);
}

double reduce_angle(double d) { return std::remainder(d, 2 * std::numbers::pi); }

}  // namespace

unsigned threads_from_env() {
  const char* v = std::getenv("JOST_THREADS");
  if (!v || !*v) return 1;
  char* end = nullptr;
  const long n = std::strtol(v, &end, 10);
  if (*end != '\0' || n < 1) return 1;
  return static_cast<unsigned>(std::min(n, 256L));
}

int cmd_phase(const RunConfig& cfg, const RunOptions& opt) {
  require(!cfg.k.empty(), "energy.k", "phase needs a real k grid");
  require(!cfg.channels.empty(), "channels", "no channels selected");
  Report rep{"phase", &cfg};
  const bool oracle = cfg.with_oracle && has_oracle(cfg);
  const double m = cfg.interaction.mass;

  struct Row {
    std::vector<std::string> cells;
    std::string problem;
    bool failed = false;
    double unitarity = 0, diff = 0;
  };
  const std::size_t nk = cfg.k.size();
  auto rows = parallel_map<Row>(cfg.channels.size() * nk, opt.threads, [&](std::size_t i) {
    const Channel& ch = cfg.channels[i / nk];
    const double k = cfg.k[i % nk];
    Row r;
    double dv = NAN, ev = NAN, s1 = NAN, dorc = NAN, eo = NAN;
    std::string status = "ok";
    try {
      const ChannelKernel K = ChannelKernel::make(cfg.interaction, ch);
      const JostResult Fm = jost_function(K, EnergyPoint::from_k(k, cfg.sheet, m), cfg.solver);
      const JostResult Fp = jost_function(K, EnergyPoint{cplx(0.0, k), cfg.sheet, m}, cfg.solver);
      dv = phase_shift(Fp.value, Fm.value);
      ev = std::max(Fm.error / std::abs(Fm.value), Fp.error / std::abs(Fp.value));
      s1 = std::abs(std::abs(Fp.value / Fm.value) - 1.0);
    } catch (const std::exception& e) {
      status = "volterra-failed";
      r.failed = true;
      r.problem = e.what();
    }
    if (oracle) {
      try {
        const JostResult Fo = oracle_jost(cfg.interaction, ch, EnergyPoint::from_k(k, cfg.sheet, m), cfg.ode);
        dorc = reduce_angle(-std::arg(Fo.value));
        eo = Fo.error / std::abs(Fo.value);
      } catch (const std::exception& e) {
        if (status == "ok") status = "oracle-failed";
        r.failed = true;
        r.problem += (r.problem.empty() ? "" : "; ") + std::string(e.what());
      }
    }
    const double diff = std::abs(reduce_angle(dv - dorc));
    if (status == "ok" && ((oracle && diff > cfg.tol_phase) || s1 > cfg.tol_unitarity)) status = "tolerance";
    r.unitarity = s1;
    r.diff = diff;
    r.cells = {num(k),  ch.id(),  num(dv),  num(dorc), num(s1), num(diff), "volterra", num(ev),
               oracle ? "oracle" : "none", num(eo), status};
    return r;
  });
  Table t{{"k", "channel", "delta_volterra", "delta_oracle", "abs_s_minus_1", "abs_diff", "method_volterra",
           "error_volterra", "method_oracle", "error_oracle", "status"}};
  double worst_u = 0, worst_d = 0;
  for (auto& r : rows) {
    if (r.failed) {
      rep.numerical_failure = true;
      rep.note(r.cells[1] + " k=" + r.cells[0], r.problem);
    }
    if (std::isfinite(r.unitarity)) worst_u = std::max(worst_u, r.unitarity);
    if (std::isfinite(r.diff)) worst_d = std::max(worst_d, r.diff);
    t.rows.push_back(std::move(r.cells));
  }
  rep.summary = {{"max_abs_s_minus_1", worst_u}, {"max_abs_diff", worst_d}, {"oracle", oracle}};
  return write(t, rep);
}

int cmd_jost_scan(const RunConfig& cfg, const RunOptions& opt) {
  require(!cfg.b.empty(), "energy.b_re", "jost-scan needs a complex b rectangle");
  require(!cfg.channels.empty(), "channels", "no channels selected");
  Report rep{"jost-scan", &cfg};
  const bool oracle = cfg.with_oracle && has_oracle(cfg);
  const auto grid = [](double lo, double hi, int n, int i) { return n == 1 ? lo : lo + (hi - lo) * i / (n - 1); };
  const std::size_t per = static_cast<std::size_t>(cfg.b.re_n) * cfg.b.im_n;

  struct Row {
    std::vector<std::vector<std::string>> lines;
    std::vector<std::string> notes;
    bool failed = false;
  };
  auto rows = parallel_map<Row>(cfg.channels.size() * per, opt.threads, [&](std::size_t i) {
    const Channel& ch = cfg.channels[i / per];
    const std::size_t j = i % per;
    const double re = grid(cfg.b.re_lo, cfg.b.re_hi, cfg.b.re_n, static_cast<int>(j / cfg.b.im_n));
    const double im = grid(cfg.b.im_lo, cfg.b.im_hi, cfg.b.im_n, static_cast<int>(j % cfg.b.im_n));
    const EnergyPoint e{cplx(re, im), cfg.sheet, cfg.interaction.mass};
    Row r;
    auto emit = [&](const char* method, cplx F, double err, const std::string& flag) {
      r.lines.push_back({ch.id(), num(re), num(im), num(F.real()), num(F.imag()), method, num(err), flag});
    };
    try {
      const JostResult F = jost_function(ChannelKernel::make(cfg.interaction, ch), e, cfg.solver);
      emit("volterra", F.value, F.error, "ok");
    } catch (const GridError& ex) {
      // the ray or its threshold set meets a cut or pole: flag, do not abort
      emit("volterra", cplx(NAN, NAN), NAN, "cut");
      r.notes.push_back(ex.what());
    } catch (const std::exception& ex) {
      emit("volterra", cplx(NAN, NAN), NAN, "failed");
      r.notes.push_back(ex.what());
      r.failed = true;
    }
    if (oracle) {
      try {
        const JostResult F = oracle_jost(cfg.interaction, ch, e, cfg.ode);
        emit("oracle", F.value, F.error, "ok");
      } catch (const std::exception& ex) {
        emit("oracle", cplx(NAN, NAN), NAN, "unavailable");
        r.notes.push_back(std::string("oracle: ") + ex.what());
      }
    }
    return r;
  });
  Table t{{"channel", "re_b", "im_b", "re_F", "im_F", "method", "error", "flag"}};
  std::size_t flagged = 0;
  for (auto& r : rows) {
    for (auto& l : r.lines) {
      if (l.back() != "ok") ++flagged;
      t.rows.push_back(l);
    }
    for (auto& n : r.notes) rep.note(r.lines.front()[0] + " b=" + r.lines.front()[1] + "," + r.lines.front()[2], n);
    rep.numerical_failure |= r.failed;
  }
  rep.summary = {{"flagged_rows", flagged}, {"oracle", oracle}};
  return write(t, rep);
}

int cmd_bound_states(const RunConfig& cfg, const RunOptions& opt) {
  require(cfg.interaction.kind == InteractionKind::SchrodingerLocal, "interaction.kind",
          "bound-states supports the local Schroedinger kind");
  require(cfg.N == 3, "interaction.N", "bound-states needs N = 3 (shooting oracle)");
  require(!cfg.channels.empty(), "channels", "no channels selected");
  Report rep{"bound-states", &cfg};
  const SpectralWeight& w = cfg.interaction.sigma;

  struct Row {
    std::vector<double> vol, orc, vol_err, orc_err;
    int nodes = -1;
    std::string problem;
  };
  // dF/db by central difference turns a value error into a root error
  auto root_error = [](const std::function<JostResult(double)>& F, double b) {
    const double h = 1e-5 * std::max(1.0, b);
    const double slope = (F(b + h).value.real() - F(b - h).value.real()) / (2 * h);
    return F(b).error / std::max(std::abs(slope), 1e-300);
  };
  auto rows = parallel_map<Row>(cfg.channels.size(), opt.threads, [&](std::size_t i) {
    const Channel& ch = cfg.channels[i];
    const int l = ch.l();
    Row r;
    try {
      const ChannelKernel K = ChannelKernel::make(cfg.interaction, ch);
      auto Fv = [&](double b) { return jost_function(K, EnergyPoint{cplx(b)}, cfg.solver); };
      auto Fo = [&](double b) { return oracle_jost_schrodinger(w, l, EnergyPoint{cplx(b)}, cfg.ode); };
      r.vol = bound_states([&](double b) { return Fv(b).value.real(); }, cfg.bound_lo, cfg.bound_hi, 1e-12,
                           cfg.bound_scan);
      r.orc = bound_states([&](double b) { return Fo(b).value.real(); }, cfg.bound_lo, cfg.bound_hi, 1e-12,
                           cfg.bound_scan);
      for (double b : r.vol) r.vol_err.push_back(root_error(Fv, b));
      for (double b : r.orc) r.orc_err.push_back(root_error(Fo, b));
      r.nodes = zero_energy_nodes(w, l, cfg.ode);
    } catch (const std::exception& e) {
      r.problem = e.what();
    }
    return r;
  });
  Table t{{"channel", "index", "b_volterra", "error_volterra", "b_oracle", "error_oracle", "rel_diff", "energy",
           "status"}};
  json counts = json::array();
  for (std::size_t c = 0; c < rows.size(); ++c) {
    auto& r = rows[c];
    const std::string id = cfg.channels[c].id();
    if (!r.problem.empty()) {
      rep.numerical_failure = true;
      rep.note(id, r.problem);
      continue;
    }
    // deepest bound state first
    std::sort(r.vol.rbegin(), r.vol.rend());
    std::sort(r.orc.rbegin(), r.orc.rend());
    const std::size_t n = std::max(r.vol.size(), r.orc.size());
    for (std::size_t k = 0; k < n; ++k) {
      const double bv = k < r.vol.size() ? r.vol[k] : NAN, bo = k < r.orc.size() ? r.orc[k] : NAN;
      const double ev = k < r.vol_err.size() ? r.vol_err[k] : NAN, eo = k < r.orc_err.size() ? r.orc_err[k] : NAN;
      const double rel = std::abs(bv - bo) / std::abs(bo);
      std::string status = "ok";
      if (std::isnan(rel))
        status = "unpaired";
      else if (rel > cfg.tol_bound)
        status = "tolerance";
      t.rows.push_back({id, std::to_string(k), num(bv), num(ev), num(bo), num(eo), num(rel), num(-bo * bo), status});
    }
    if (r.vol.size() != r.orc.size() || static_cast<int>(r.orc.size()) != r.nodes)
      rep.note(id, fmt::format("root counts differ: volterra {}, oracle {}, zero-energy nodes {}", r.vol.size(),
                               r.orc.size(), r.nodes));
    counts.push_back({{"channel", id}, {"volterra", r.vol.size()}, {"oracle", r.orc.size()}, {"nodes", r.nodes}});
  }
  rep.summary = {{"counts", counts}, {"scan", {cfg.bound_lo, cfg.bound_hi, cfg.bound_scan}}};
  return write(t, rep);
}

int cmd_amplitude(const RunConfig& cfg, const RunOptions& opt) {
  require(cfg.interaction.kind == InteractionKind::SchrodingerLocal && cfg.N == 3, "interaction.kind",
          "amplitude supports the local Schroedinger kind with N = 3");
  require(!cfg.k.empty(), "energy.k", "amplitude needs on-shell momenta");
  require(!cfg.channels.empty(), "channels", "no channels selected");
  Report rep{"amplitude", &cfg};
  const SpectralWeight& w = cfg.interaction.sigma;
  const std::vector<double> qs = cfg.q.empty() ? std::vector<double>{} : cfg.q;
  struct Item {
    Channel ch;
    double k, q;
  };
  std::vector<Item> items;
  for (auto& ch : cfg.channels)
    for (double k : cfg.k)
      if (qs.empty())
        items.push_back({ch, k, k});
      else
        for (double q : qs) items.push_back({ch, k, q});

  struct Row {
    std::vector<std::string> cells;
    std::string problem;
  };
  auto rows = parallel_map<Row>(items.size(), opt.threads, [&](std::size_t i) {
    const auto& it = items[i];
    const int l = it.ch.l();
    Row r;
    try {
      const FgAmplitude fg = fg_partial_amplitude(w, l, it.q, it.k, cplx(0, -it.k), cfg.amplitude_order);
      // next order estimated from the geometric ratio of the computed terms
      const double err_fg = cfg.amplitude_order == 2 && std::abs(fg.born) > 0
                                ? std::norm(fg.second) / std::abs(fg.born)
                                : std::abs(fg.born) * std::abs(fg.born);
      SolverConfig lo = cfg.solver;
      lo.order = cfg.solver.error_order;
      const HalfOffShell h = halfoff_consistency(w, l, it.k, it.q, cfg.solver);
      const HalfOffShell h2 = halfoff_consistency(w, l, it.k, it.q, lo);
      const double err_osjf = std::abs(h.from_osjf - h2.from_osjf);
      r.cells = {it.ch.id(),
                 std::to_string(l),
                 num(it.k),
                 num(it.q),
                 num(fg.total.real()),
                 num(fg.total.imag()),
                 fmt::format("fg{}", cfg.amplitude_order),
                 num(err_fg),
                 num(h.from_osjf.real()),
                 num(h.from_osjf.imag()),
                 "osjf",
                 num(err_osjf),
                 num(std::abs(fg.total - h.from_osjf))};
    } catch (const std::exception& e) {
      r.problem = e.what();
      r.cells = {it.ch.id(), std::to_string(l), num(it.k), num(it.q), "nan", "nan", "fg", "nan", "nan", "nan",
                 "osjf",     "nan",             "nan"};
    }
    return r;
  });
  Table t{{"channel", "l", "k", "q", "re_T_fg", "im_T_fg", "method_fg", "error_fg", "re_T_osjf", "im_T_osjf",
           "method_osjf", "error_osjf", "abs_diff"}};
  for (auto& r : rows) {
    if (!r.problem.empty()) {
      rep.numerical_failure = true;
      rep.note(r.cells[0] + " k=" + r.cells[2] + " q=" + r.cells[3], r.problem);
    }
    t.rows.push_back(std::move(r.cells));
  }
  return write(t, rep);
}

int cmd_kernel_dump(const RunConfig& cfg, const RunOptions&) {
  require(!cfg.kernel_u.empty(), "kernel.u", "kernel-dump needs a u grid");
  require(!cfg.channels.empty(), "channels", "no channels selected");
  Report rep{"kernel-dump", &cfg};
  const SpectralWeight& w = cfg.interaction.sigma;
  // independent route for the local N = 3 kernel: adaptive-order integral of
  // Sigma(nu) P_l(T(u rho | nu)) over the transfer range
  const bool reference = cfg.interaction.kind == InteractionKind::SchrodingerLocal && cfg.N == 3;
  Table t{{"channel", "u", "rho", "row", "col", "re_K", "im_K", "method", "error"}};
  for (auto& ch : cfg.channels) {
    const ChannelKernel K = ChannelKernel::make(cfg.interaction, ch);
    const KernelTable kt = kernel_table(K, cfg.kernel_rho, cfg.kernel_u);
    for (std::size_t i = 0; i < kt.u.size(); ++i)
      for (int a = 0; a < kt.dim; ++a)
        for (int b = 0; b < kt.dim; ++b) {
          const cplx v = kt.values[(i * kt.dim + a) * kt.dim + b];
          double err = NAN;
          std::string method = "kernel";
          if (reference) {
            const double u = kt.u[i], rho = kt.rho;
            auto P = [&](double nu) { return legendre_p(ch.l(), cplx(cosine(u, rho, nu))).real(); };
            double ref = 0;
            for (auto& line : w.lines())
              if (line.mu <= u - rho) ref += line.g * P(line.mu);
            if (!w.continuum().empty() || !w.ramps().empty())
              if (u - rho > w.mu0()) ref += w.integrate_smooth(w.mu0(), u - rho, P, 24);
            err = std::abs(v - ref);
            method = "kernel+reference";
          }
          t.rows.push_back({ch.id(), num(kt.u[i]), num(kt.rho), std::to_string(a), std::to_string(b), num(v.real()),
                            num(v.imag()), method, num(err)});
        }
  }
  return write(t, rep);
}

int cmd_selftest(const RunConfig& cfg, const RunOptions& opt) {
  Report rep{"selftest", &cfg};
  SelftestOptions so;
  if (opt.seed) {
    // fault size drawn from the seed, always large enough to break the symmetry
    std::mt19937_64 gen(*opt.seed);
    so.fault = std::uniform_real_distribution<double>(5e-4, 2e-3)(gen);
    rep.note("fault-injection", fmt::format("kernel perturbation {:.6e} from seed {}", so.fault, *opt.seed));
  }
  const auto results = run_selftest(so);
  Table t{{"check", "group", "method", "measured", "tolerance", "bound", "status", "detail"}};
  std::size_t failed = 0;
  for (auto& r : results) {
    if (!r.passed) ++failed;
    t.rows.push_back({r.id, r.group, r.method, num(r.measured), num(r.tolerance), r.lower_bound ? "min" : "max",
                      r.passed ? "PASS" : "FAIL", "\"" + r.detail + "\""});
  }
  rep.summary = {{"checks", results.size()}, {"failed", failed}, {"fault", so.fault}};
  rep.numerical_failure = failed > 0;
  return write(t, rep);
}

int run(const std::string& command, const std::string& config_path, const RunOptions& opt) {
  try {
    const RunConfig cfg = load_config(config_path);
    if (command == "phase") return cmd_phase(cfg, opt);
    if (command == "jost-scan") return cmd_jost_scan(cfg, opt);
    if (command == "bound-states") return cmd_bound_states(cfg, opt);
    if (command == "amplitude") return cmd_amplitude(cfg, opt);
    if (command == "kernel-dump") return cmd_kernel_dump(cfg, opt);
    if (command == "selftest") return cmd_selftest(cfg, opt);
    std::cerr << "unknown subcommand '" << command << "'\n";
    return ValidationFailure;
  } catch (const ConfigError& e) {
    std::cerr << config_path << ": " << e.what() << '\n';
    return ValidationFailure;
  } catch (const std::invalid_argument& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return ValidationFailure;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return NumericalFailure;
  }
}

}  // namespace jost::cli
