#include "subohmic/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <unistd.h>

#include "subohmic/chain.hpp"
#include "subohmic/critical.hpp"
#include "subohmic/errors.hpp"
#include "subohmic/parallel.hpp"

namespace subohmic::cli {
namespace {

using Json = nlohmann::ordered_json;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw UsageError(key + ": expected a number, got '" + text + "'");
  return v;
}

int parse_int(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  int v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw UsageError(key + ": expected an integer, got '" + text + "'");
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  throw UsageError(key + ": expected true or false, got '" + text + "'");
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) return "0";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

// Non-finite numbers become strings and are listed under "nonfinite".
void put(Json& obj, const std::string& key, double x) {
  if (std::isfinite(x)) {
    obj[key] = x;
    return;
  }
  obj[key] = format_number(x);
  obj["nonfinite"].push_back(key);
}

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& os) : os_(os) { os_ << "# subohmic " << kVersion << '\n'; }
  void header(std::initializer_list<const char*> cols) {
    bool first = true;
    for (const char* c : cols) {
      if (!first) os_ << ',';
      os_ << c;
      first = false;
    }
    os_ << '\n';
  }
  void row(std::initializer_list<double> values) {
    bool first = true;
    for (double v : values) {
      if (!first) os_ << ',';
      os_ << format_number(v);
      first = false;
    }
    os_ << '\n';
  }

 private:
  std::ostream& os_;
};

Json record_header(Command c, const RunConfig& cfg) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["version"] = kVersion;
  j["command"] = command_name(c);
  j["units"] = cfg.raw_units ? "raw" : "energy/delta, frequency/omega_c";
  return j;
}

Json params_json(const model::ModelParams& p, bool with_alpha = true) {
  Json j;
  j["s"] = p.s;
  if (with_alpha) j["alpha"] = p.alpha;
  j["delta"] = p.delta;
  j["omega_c"] = p.omega_c;
  return j;
}

struct Units {
  double energy = 1.0;
  double frequency = 1.0;
  Units(const RunConfig& cfg) {
    if (!cfg.raw_units) {
      energy = cfg.params.delta;
      frequency = cfg.params.omega_c;
    }
  }
};

void write_atomically(const std::string& path, const std::string& data) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    f << data;
    f.flush();
    if (!f) throw std::runtime_error("write to " + tmp.string() + " failed");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::runtime_error("cannot rename output into " + path + ": " + ec.message());
  }
}

const char* functional_name(variational::Functional f) {
  return f == variational::Functional::exact ? "exact" : "scaling";
}

struct Outcome {
  std::string data;
  std::string summary;
};

Format format_or(const RunConfig& cfg, Format fallback) { return cfg.format.value_or(fallback); }

int thread_count(const RunConfig& cfg) { return cfg.threads.value_or(default_threads()); }

// ---------------------------------------------------------------------------

Outcome do_solve(const RunConfig& cfg) {
  const auto& p = cfg.params;
  const Units u(cfg);
  const auto sol = variational::minimize_energy(p, cfg.functional);
  const auto lc = variational::landau_coefficients(p, cfg.functional);
  std::ostringstream os;
  if (format_or(cfg, Format::json) == Format::json) {
    Json j = record_header(Command::solve, cfg);
    j["params"] = params_json(p);
    j["functional"] = functional_name(cfg.functional);
    Json r;
    put(r, "M", sol.state.m);
    put(r, "delta_tilde", sol.state.delta_tilde / u.energy);
    put(r, "sx", sol.sx);
    put(r, "sz", sol.sz);
    put(r, "entanglement", sol.entanglement);
    put(r, "energy", sol.energy / u.energy);
    put(r, "c1", lc.c1 / u.energy);
    put(r, "c2", lc.c2 / u.energy);
    put(r, "crossover_scale", sol.crossover_scale / u.frequency);
    r["occupation_finite"] = sol.occupation_finite;
    j["result"] = r;
    os << j.dump(2) << '\n';
  } else {
    CsvWriter w(os);
    w.header({"alpha", "M", "sx", "entanglement", "energy", "c1"});
    w.row({p.alpha, sol.state.m, sol.sx, sol.entanglement, sol.energy / u.energy, lc.c1 / u.energy});
  }
  return {os.str(), "solve: M=" + format_number(sol.state.m) + " sx=" + format_number(sol.sx) +
                        " energy=" + format_number(sol.energy / u.energy)};
}

Outcome do_sweep(const RunConfig& cfg) {
  if (!cfg.alpha_grid) throw UsageError("sweep needs --alpha-grid lo:hi:n");
  const auto& p = cfg.params;
  const Units u(cfg);
  const critical::BathShape bath{p.s, p.delta, p.omega_c};
  const auto table = critical::sweep_alpha(bath, cfg.alpha_grid->values, cfg.functional, thread_count(cfg));
  std::ostringstream os;
  int failed = 0;
  for (const auto& r : table.rows) failed += r.error.has_value();
  if (format_or(cfg, Format::csv) == Format::csv) {
    CsvWriter w(os);
    w.header({"alpha", "M", "sx", "entanglement", "energy", "c1"});
    for (const auto& r : table.rows) w.row({r.alpha, r.m, r.sx, r.entanglement, r.energy / u.energy, r.c1 / u.energy});
  } else {
    Json j = record_header(Command::sweep, cfg);
    j["params"] = params_json(p, false);
    j["functional"] = functional_name(cfg.functional);
    j["rows"] = Json::array();
    for (const auto& r : table.rows) {
      Json row;
      put(row, "alpha", r.alpha);
      put(row, "M", r.m);
      put(row, "sx", r.sx);
      put(row, "entanglement", r.entanglement);
      put(row, "energy", r.energy / u.energy);
      put(row, "c1", r.c1 / u.energy);
      if (r.error) row["error"] = *r.error;
      j["rows"].push_back(row);
    }
    os << j.dump(2) << '\n';
  }
  return {os.str(), "sweep: " + std::to_string(table.rows.size()) + " rows, " + std::to_string(failed) + " failed"};
}

Outcome do_critical(const RunConfig& cfg) {
  const auto& p = cfg.params;
  const Units u(cfg);
  const auto cp = critical::locate_critical_point({p.s, p.delta, p.omega_c}, cfg.functional);
  std::ostringstream os;
  if (format_or(cfg, Format::json) == Format::json) {
    Json j = record_header(Command::critical, cfg);
    j["params"] = params_json(p, false);
    j["functional"] = functional_name(cfg.functional);
    Json r;
    put(r, "alpha_c_numeric", cp.alpha_c_numeric);
    put(r, "alpha_c_closed", cp.alpha_c_closed);
    put(r, "ratio", cp.ratio());
    put(r, "delta_tilde_c", cp.delta_tilde_c / u.energy);
    put(r, "sx_c", cp.sx_c);
    j["result"] = r;
    os << j.dump(2) << '\n';
  } else {
    CsvWriter w(os);
    w.header({"s", "alpha_c_numeric", "alpha_c_closed", "ratio", "delta_tilde_c", "sx_c"});
    w.row({p.s, cp.alpha_c_numeric, cp.alpha_c_closed, cp.ratio(), cp.delta_tilde_c / u.energy, cp.sx_c});
  }
  return {os.str(), "critical: alpha_c_numeric=" + format_number(cp.alpha_c_numeric) +
                        " alpha_c_closed=" + format_number(cp.alpha_c_closed) + " ratio=" + format_number(cp.ratio())};
}

Outcome do_phase_diagram(const RunConfig& cfg) {
  if (!cfg.s_grid) throw UsageError("phase-diagram needs --s-grid");
  if (!cfg.omega_c_list) throw UsageError("phase-diagram needs --omega-c-list");
  for (double s : cfg.s_grid->values)
    if (!(s > 0.0 && s < 0.5)) throw DomainError("phase-diagram: s values must lie in (0, 0.5)");
  const auto rows = critical::phase_diagram(cfg.s_grid->values, cfg.params.delta, cfg.omega_c_list->values,
                                            thread_count(cfg));
  int failed = 0;
  for (const auto& r : rows) failed += r.error.has_value();
  std::ostringstream os;
  if (format_or(cfg, Format::csv) == Format::csv) {
    CsvWriter w(os);
    w.header({"s", "omega_c", "alpha_c_numeric", "alpha_c_closed", "ratio"});
    for (const auto& r : rows)
      w.row({r.s, r.omega_c, r.alpha_c_numeric, r.alpha_c_closed, r.alpha_c_numeric / r.alpha_c_closed});
  } else {
    Json j = record_header(Command::phase_diagram, cfg);
    j["delta"] = cfg.params.delta;
    j["rows"] = Json::array();
    for (const auto& r : rows) {
      Json row;
      put(row, "s", r.s);
      put(row, "omega_c", r.omega_c);
      put(row, "alpha_c_numeric", r.alpha_c_numeric);
      put(row, "alpha_c_closed", r.alpha_c_closed);
      put(row, "ratio", r.alpha_c_numeric / r.alpha_c_closed);
      if (r.error) row["error"] = *r.error;
      j["rows"].push_back(row);
    }
    os << j.dump(2) << '\n';
  }
  return {os.str(), "phase-diagram: " + std::to_string(rows.size()) + " points, " + std::to_string(failed) + " failed"};
}

Outcome do_chain(const RunConfig& cfg) {
  const auto& p = cfg.params;
  const Units u(cfg);
  const auto sol = variational::minimize_energy(p, cfg.functional);
  const auto ch = chain::chain_map(p, cfg.sites);
  const auto frame = cfg.displaced_frame ? chain::displaced_frame(sol.state) : chain::DisplacedFrame{};
  const auto prof = chain::chain_occupations(sol.state, p, ch, frame);
  std::ostringstream os;
  if (format_or(cfg, Format::csv) == Format::csv) {
    CsvWriter w(os);
    w.header({"n", "eps_n", "t_n", "N_av"});
    for (int n = 0; n < ch.n_sites(); ++n)
      w.row({static_cast<double>(n), ch.site_energies[n] / u.frequency, ch.hoppings[n] / u.frequency, prof.n_av[n]});
  } else {
    Json j = record_header(Command::chain, cfg);
    j["params"] = params_json(p);
    j["frame"] = frame.active ? "displaced" : "bare";
    put(j, "M", sol.state.m);
    put(j, "system_coupling", ch.system_coupling / u.frequency);
    j["rows"] = Json::array();
    for (int n = 0; n < ch.n_sites(); ++n) {
      Json row;
      row["n"] = n;
      put(row, "eps_n", ch.site_energies[n] / u.frequency);
      put(row, "t_n", ch.hoppings[n] / u.frequency);
      put(row, "N_av", prof.n_av[n]);
      j["rows"].push_back(row);
    }
    os << j.dump(2) << '\n';
  }
  return {os.str(), "chain: " + std::to_string(ch.n_sites()) + " sites, frame=" +
                        (frame.active ? "displaced" : "bare") + " M=" + format_number(sol.state.m)};
}

Outcome do_oracle(const RunConfig& cfg) {
  const auto& p = cfg.params;
  const Units u(cfg);
  const auto r = oracle::run_oracle(p, cfg.oracle);
  std::ostringstream os;
  if (format_or(cfg, Format::json) == Format::json) {
    Json j = record_header(Command::oracle, cfg);
    j["params"] = params_json(p);
    j["L"] = cfg.oracle.n_modes;
    j["N_b"] = cfg.oracle.n_boson;
    j["basis"] = cfg.oracle.basis == oracle::Basis::star ? "star" : "chain";
    j["ado"] = cfg.oracle.ado == oracle::AdoSource::discrete ? "discrete" : "continuum";
    Json res;
    put(res, "energy_exact", r.energy_exact / u.energy);
    put(res, "energy_ado_discrete", r.energy_ado_discrete / u.energy);
    put(res, "fidelity", r.fidelity);
    put(res, "truncation_loss", r.truncation_loss);
    put(res, "sigma_z_exact", r.sigma_z_exact);
    put(res, "M_ado", r.m_ado);
    res["iterations"] = r.iterations;
    res["low_confidence"] = r.low_confidence;
    res["converged_nb"] = r.converged_nb;
    j["result"] = res;
    os << j.dump(2) << '\n';
  } else {
    CsvWriter w(os);
    w.header({"L", "N_b", "energy_exact", "energy_ado_discrete", "fidelity", "truncation_loss"});
    w.row({static_cast<double>(cfg.oracle.n_modes), static_cast<double>(cfg.oracle.n_boson), r.energy_exact / u.energy,
           r.energy_ado_discrete / u.energy, r.fidelity, r.truncation_loss});
  }
  return {os.str(), "oracle: F=" + format_number(r.fidelity) + " E_exact=" + format_number(r.energy_exact / u.energy) +
                        " E_ado=" + format_number(r.energy_ado_discrete / u.energy)};
}

Outcome do_exponents(const RunConfig& cfg) {
  const auto& p = cfg.params;
  if (!(p.s > 0.0 && p.s < 0.5))
    throw DomainError("exponents: mean-field exponents are defined for 0 < s < 0.5 only");
  const critical::BathShape bath{p.s, p.delta, p.omega_c};
  const double ac = critical::critical_coupling_numeric(bath, cfg.functional);
  const critical::FitWindow window;
  const auto table = critical::sweep_alpha(bath, critical::exponent_grid(ac, window), cfg.functional, thread_count(cfg));
  const auto ex = critical::extract_exponents(table, ac, window);
  std::ostringstream os;
  if (format_or(cfg, Format::json) == Format::json) {
    Json j = record_header(Command::exponents, cfg);
    j["params"] = params_json(p, false);
    j["functional"] = functional_name(cfg.functional);
    Json r;
    put(r, "alpha_c", ac);
    r["window"] = {window.lo, window.hi};
    put(r, "beta", ex.beta.exponent);
    put(r, "beta_prefactor", ex.beta.prefactor);
    put(r, "beta_residual", ex.beta.residual);
    put(r, "gamma", ex.gamma.exponent);
    put(r, "gamma_prefactor", ex.gamma.prefactor);
    put(r, "gamma_residual", ex.gamma.residual);
    j["result"] = r;
    os << j.dump(2) << '\n';
  } else {
    CsvWriter w(os);
    w.header({"s", "alpha_c", "beta", "gamma"});
    w.row({p.s, ac, ex.beta.exponent, ex.gamma.exponent});
  }
  return {os.str(), "exponents: beta=" + format_number(ex.beta.exponent) + " gamma=" + format_number(ex.gamma.exponent) +
                        " alpha_c=" + format_number(ac)};
}

const std::map<std::string, std::function<void(RunConfig&, const std::string&, const std::string&)>>& setters() {
  using oracle::AdoSource;
  using oracle::Basis;
  static const std::map<std::string, std::function<void(RunConfig&, const std::string&, const std::string&)>> table = {
      {"command",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.command = parse_command(trim(v));
         if (!c.command) throw UsageError(k + ": unknown command '" + v + "'");
       }},
      {"s", [](RunConfig& c, const std::string& k, const std::string& v) { c.params.s = parse_double(k, v); }},
      {"alpha", [](RunConfig& c, const std::string& k, const std::string& v) { c.params.alpha = parse_double(k, v); }},
      {"delta", [](RunConfig& c, const std::string& k, const std::string& v) { c.params.delta = parse_double(k, v); }},
      {"omega_c",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.params.omega_c = parse_double(k, v); }},
      {"functional",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         const auto t = trim(v);
         if (t == "exact") c.functional = variational::Functional::exact;
         else if (t == "scaling") c.functional = variational::Functional::scaling;
         else throw UsageError(k + ": expected exact or scaling, got '" + v + "'");
       }},
      {"alpha_grid", [](RunConfig& c, const std::string&, const std::string& v) { c.alpha_grid = Grid::parse(v); }},
      {"s_grid", [](RunConfig& c, const std::string&, const std::string& v) { c.s_grid = Grid::parse(v); }},
      {"omega_c_list", [](RunConfig& c, const std::string&, const std::string& v) { c.omega_c_list = Grid::parse(v); }},
      {"sites", [](RunConfig& c, const std::string& k, const std::string& v) { c.sites = parse_int(k, v); }},
      {"frame",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         const auto t = trim(v);
         if (t == "bare") c.displaced_frame = false;
         else if (t == "displaced") c.displaced_frame = true;
         else throw UsageError(k + ": expected bare or displaced, got '" + v + "'");
       }},
      {"modes", [](RunConfig& c, const std::string& k, const std::string& v) { c.oracle.n_modes = parse_int(k, v); }},
      {"nb", [](RunConfig& c, const std::string& k, const std::string& v) { c.oracle.n_boson = parse_int(k, v); }},
      {"basis",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         const auto t = trim(v);
         if (t == "star") c.oracle.basis = Basis::star;
         else if (t == "chain") c.oracle.basis = Basis::chain;
         else throw UsageError(k + ": expected star or chain, got '" + v + "'");
       }},
      {"ado",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         const auto t = trim(v);
         if (t == "discrete") c.oracle.ado = AdoSource::discrete;
         else if (t == "continuum") c.oracle.ado = AdoSource::continuum;
         else throw UsageError(k + ": expected discrete or continuum, got '" + v + "'");
       }},
      {"output", [](RunConfig& c, const std::string&, const std::string& v) { c.output = trim(v); }},
      {"format",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         const auto t = trim(v);
         if (t == "csv") c.format = Format::csv;
         else if (t == "json") c.format = Format::json;
         else throw UsageError(k + ": expected csv or json, got '" + v + "'");
       }},
      {"raw_units", [](RunConfig& c, const std::string& k, const std::string& v) { c.raw_units = parse_bool(k, v); }},
      {"threads",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         const int n = parse_int(k, v);
         if (n < 1) throw UsageError(k + ": must be at least 1");
         c.threads = n;
       }},
  };
  return table;
}

}  // namespace

Grid Grid::parse(const std::string& text) {
  const std::string t = trim(text);
  Grid g;
  if (t.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(t);
    for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
    if (parts.size() != 3) throw UsageError("grid '" + text + "': expected lo:hi:n");
    const double lo = parse_double("grid", parts[0]);
    const double hi = parse_double("grid", parts[1]);
    const int n = parse_int("grid", parts[2]);
    if (n < 1) throw UsageError("grid '" + text + "': need n >= 1");
    if (n == 1) {
      g.values = {lo};
    } else {
      if (!(hi > lo)) throw UsageError("grid '" + text + "': need hi > lo");
      for (int i = 0; i < n; ++i) g.values.push_back(i + 1 == n ? hi : lo + (hi - lo) * i / (n - 1));
    }
  } else {
    std::stringstream ss(t);
    for (std::string part; std::getline(ss, part, ',');) g.values.push_back(parse_double("list", part));
  }
  if (g.values.empty()) throw UsageError("grid '" + text + "' is empty");
  return g;
}

std::optional<Command> parse_command(const std::string& name) {
  static const std::map<std::string, Command> names = {
      {"solve", Command::solve},   {"sweep", Command::sweep},   {"critical", Command::critical},
      {"phase-diagram", Command::phase_diagram},                {"chain", Command::chain},
      {"oracle", Command::oracle}, {"exponents", Command::exponents}};
  const auto it = names.find(name);
  if (it == names.end()) return std::nullopt;
  return it->second;
}

std::string command_name(Command c) {
  switch (c) {
    case Command::solve: return "solve";
    case Command::sweep: return "sweep";
    case Command::critical: return "critical";
    case Command::phase_diagram: return "phase-diagram";
    case Command::chain: return "chain";
    case Command::oracle: return "oracle";
    case Command::exponents: return "exponents";
  }
  return "?";
}

void apply_setting(RunConfig& config, const std::string& key, const std::string& value) {
  const auto& table = setters();
  const auto it = table.find(key);
  if (it == table.end()) throw UsageError("unknown key '" + key + "'");
  it->second(config, key, value);
}

void load_config(const std::string& path, RunConfig& config) {
  std::ifstream f(path);
  if (!f) throw UsageError("cannot open config file " + path);
  std::string line;
  for (int number = 1; std::getline(f, line); ++number) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw UsageError(path + ":" + std::to_string(number) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    try {
      apply_setting(config, key, line.substr(eq + 1));
    } catch (const UsageError& e) {
      throw UsageError(path + ":" + std::to_string(number) + ": " + e.what());
    }
  }
}

RunConfig load_config(const std::string& path) {
  RunConfig c;
  load_config(path, c);
  return c;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    if (!config.command) throw UsageError("no command given");
    config.params.validate();
    Outcome o;
    switch (*config.command) {
      case Command::solve: o = do_solve(config); break;
      case Command::sweep: o = do_sweep(config); break;
      case Command::critical: o = do_critical(config); break;
      case Command::phase_diagram: o = do_phase_diagram(config); break;
      case Command::chain: o = do_chain(config); break;
      case Command::oracle: o = do_oracle(config); break;
      case Command::exponents: o = do_exponents(config); break;
    }
    if (config.output) {
      write_atomically(*config.output, o.data);
      out << o.summary << '\n';
    } else {
      out << o.data;
      err << o.summary << '\n';
    }
    return ExitCode::ok;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return ExitCode::usage;
  } catch (const std::domain_error& e) {
    err << "domain error: " << e.what() << '\n';
    return ExitCode::domain_error;
  } catch (const ConvergenceError& e) {
    err << "no convergence: " << e.what() << '\n';
    return ExitCode::no_convergence;
  } catch (const critical::NoTransition& e) {
    err << "no convergence: " << e.what() << '\n';
    return ExitCode::no_convergence;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Ground state and localisation transition of the sub-ohmic spin-boson model", "subohmic"};
  app.set_version_flag("--version", kVersion);
  std::string command;
  app.add_option("command", command, "solve | sweep | critical | phase-diagram | chain | oracle | exponents");
  std::string config_path;
  app.add_option("--config", config_path, "File of 'key = value' lines; flags override it");

  struct Flag {
    const char* name;
    const char* key;
    const char* help;
  };
  static const Flag flags[] = {
      {"--s", "s", "Bath exponent s"},
      {"--alpha", "alpha", "Coupling alpha"},
      {"--delta", "delta", "Bare tunnelling Delta"},
      {"--omega-c", "omega_c", "Cutoff frequency"},
      {"--functional", "functional", "exact | scaling"},
      {"--alpha-grid", "alpha_grid", "lo:hi:n or a,b,c"},
      {"--s-grid", "s_grid", "lo:hi:n or a,b,c"},
      {"--omega-c-list", "omega_c_list", "a,b,c or lo:hi:n"},
      {"--sites", "sites", "Chain length"},
      {"--frame", "frame", "bare | displaced"},
      {"--modes", "modes", "Oracle bath modes L"},
      {"--nb", "nb", "Oracle Fock states per mode"},
      {"--basis", "basis", "star | chain"},
      {"--ado", "ado", "discrete | continuum"},
      {"--output", "output", "Output file (written atomically)"},
      {"--format", "format", "csv | json"},
      {"--threads", "threads", "Worker threads (default SUBOHMIC_THREADS or all cores)"},
  };
  std::vector<std::string> values(std::size(flags));
  std::vector<CLI::Option*> options;
  for (std::size_t i = 0; i < std::size(flags); ++i)
    options.push_back(app.add_option(flags[i].name, values[i], flags[i].help));
  bool raw_units = false;
  auto* raw_opt = app.add_flag("--raw-units", raw_units, "Report energies and frequencies unscaled");

  try {
    std::vector<std::string> args;
    for (int i = argc - 1; i >= 1; --i) args.emplace_back(argv[i]);
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return ExitCode::ok;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return ExitCode::ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return ExitCode::usage;
  }

  RunConfig config;
  try {
    if (!config_path.empty()) load_config(config_path, config);
    if (!command.empty()) apply_setting(config, "command", command);
    for (std::size_t i = 0; i < std::size(flags); ++i)
      if (options[i]->count() > 0) apply_setting(config, flags[i].key, values[i]);
    if (raw_opt->count() > 0) config.raw_units = raw_units;
    if (!config.command) throw UsageError("no command given");
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return ExitCode::usage;
  }
  return run(config, out, err);
}

}  // namespace subohmic::cli
