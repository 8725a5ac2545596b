#include "conoshock/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "conoshock/errors.hpp"

namespace conoshock {

std::string fmt_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double CaseConfig::resolved_nu() const {
  if (nu) return *nu;
  if (mach_inf) return 1.0 / (*mach_inf * *mach_inf);
  throw ConfigError("neither nu nor mach_inf supplied");
}

namespace {

std::vector<std::string> tokenize(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream iss(s);
  std::string tok;
  while (iss >> tok) out.push_back(tok);
  return out;
}

double to_double(const std::string& s, int line) {
  std::size_t pos = 0;
  double v;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw ConfigError("line " + std::to_string(line) + ": bad number '" + s + "'");
  }
  if (pos != s.size())
    throw ConfigError("line " + std::to_string(line) + ": bad number '" + s + "'");
  return v;
}

int to_int(const std::string& s, int line) {
  double v = to_double(s, line);
  if (v != std::floor(v))
    throw ConfigError("line " + std::to_string(line) + ": expected integer");
  return static_cast<int>(v);
}

}  // namespace

CaseConfig parse_case(const std::string& text) {
  CaseConfig cfg;
  cfg.sweep_gamma.clear();
  cfg.sweep_b.clear();
  cfg.sweep_nu.clear();
  bool saw_sweep_gamma = false, saw_sweep_b = false, saw_sweep_nu = false;

  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw;
    if (auto p = s.find('#'); p != std::string::npos) s.erase(p);
    auto trim = [](std::string& x) {
      x.erase(0, x.find_first_not_of(" \t\r"));
      auto e = x.find_last_not_of(" \t\r");
      x.erase(e == std::string::npos ? 0 : e + 1);
    };
    trim(s);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']')
        throw ConfigError("line " + std::to_string(line) + ": malformed section");
      section = s.substr(1, s.size() - 2);
      if (section != "gas" && section != "grid" && section != "cone" &&
          section != "upstream" && section != "run" && section != "polar" &&
          section != "linsolve" && section != "sweep")
        throw ConfigError("line " + std::to_string(line) + ": unknown section [" +
                          section + "]");
      continue;
    }
    auto eq = s.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line) + ": expected key = value");
    std::string key = s.substr(0, eq), val = s.substr(eq + 1);
    trim(key);
    trim(val);
    std::vector<std::string> toks = tokenize(val);
    auto need = [&](std::size_t n) {
      if (toks.size() != n)
        throw ConfigError("line " + std::to_string(line) + ": key '" + key +
                          "' expects " + std::to_string(n) + " value(s)");
    };
    auto one = [&]() {
      need(1);
      return to_double(toks[0], line);
    };

    if (section == "gas") {
      if (key == "gamma") cfg.gamma = one();
      else if (key == "nu") cfg.nu = one();
      else if (key == "mach_inf") cfg.mach_inf = one();
      else if (key == "b") cfg.b = one();
      else if (key == "omega0_target") cfg.omega0_target = one();
      else throw ConfigError("line " + std::to_string(line) + ": unknown key '" +
                             key + "' in [gas]");
    } else if (section == "grid") {
      if (key == "t_min") cfg.t_min = one();
      else if (key == "t_max") cfg.t_max = one();
      else if (key == "n_t") { need(1); cfg.n_t = to_int(toks[0], line); }
      else if (key == "n_theta") { need(1); cfg.n_theta = to_int(toks[0], line); }
      else throw ConfigError("line " + std::to_string(line) + ": unknown key '" +
                             key + "' in [grid]");
    } else if (section == "cone") {
      if (key == "bump") {
        need(3);
        cfg.cone_bumps.push_back({to_double(toks[0], line),
                                  to_double(toks[1], line),
                                  to_double(toks[2], line)});
      } else {
        throw ConfigError("line " + std::to_string(line) + ": unknown key '" +
                          key + "' in [cone]");
      }
    } else if (section == "upstream") {
      if (key == "bump_u" || key == "bump_v") {
        need(5);
        UpstreamBumpConfig b;
        b.component = (key == "bump_v") ? 1 : 0;
        b.amp = to_double(toks[0], line);
        b.t_center = to_double(toks[1], line);
        b.t_width = to_double(toks[2], line);
        b.theta_frac = to_double(toks[3], line);
        b.theta_width = to_double(toks[4], line);
        cfg.upstream_bumps.push_back(b);
      } else {
        throw ConfigError("line " + std::to_string(line) + ": unknown key '" +
                          key + "' in [upstream]");
      }
    } else if (section == "run") {
      if (key == "epsilon") cfg.epsilon = one();
      else if (key == "q") cfg.q = one();
      else if (key == "tol_inner") cfg.tol_inner = one();
      else if (key == "tol_outer") cfg.tol_outer = one();
      else if (key == "max_inner") { need(1); cfg.max_inner = to_int(toks[0], line); }
      else if (key == "max_outer") { need(1); cfg.max_outer = to_int(toks[0], line); }
      else if (key == "nu_cap") cfg.nu_cap = one();
      else if (key == "eps_margin") cfg.eps_margin = one();
      else if (key == "delta_hat0") cfg.delta_hat0 = one();
      else if (key == "seed") { need(1); cfg.seed = static_cast<unsigned>(to_int(toks[0], line)); }
      else if (key == "emit_stride") { need(1); cfg.emit_stride = to_int(toks[0], line); }
      else throw ConfigError("line " + std::to_string(line) + ": unknown key '" +
                             key + "' in [run]");
    } else if (section == "polar") {
      if (key == "samples") { need(1); cfg.polar_samples = to_int(toks[0], line); }
      else throw ConfigError("line " + std::to_string(line) + ": unknown key '" +
                             key + "' in [polar]");
    } else if (section == "linsolve") {
      if (key == "levels") { need(1); cfg.linsolve_levels = to_int(toks[0], line); }
      else if (key == "base_n_t") { need(1); cfg.linsolve_base_n_t = to_int(toks[0], line); }
      else if (key == "base_n_theta") { need(1); cfg.linsolve_base_n_theta = to_int(toks[0], line); }
      else if (key == "t_min") cfg.linsolve_t_min = one();
      else if (key == "t_max") cfg.linsolve_t_max = one();
      else throw ConfigError("line " + std::to_string(line) + ": unknown key '" +
                             key + "' in [linsolve]");
    } else if (section == "sweep") {
      auto list = [&]() {
        std::vector<double> v;
        for (const auto& t : toks) v.push_back(to_double(t, line));
        if (v.empty())
          throw ConfigError("line " + std::to_string(line) + ": empty list");
        return v;
      };
      if (key == "gamma_list") { cfg.sweep_gamma = list(); saw_sweep_gamma = true; }
      else if (key == "b_list") { cfg.sweep_b = list(); saw_sweep_b = true; }
      else if (key == "nu_list") { cfg.sweep_nu = list(); saw_sweep_nu = true; }
      else throw ConfigError("line " + std::to_string(line) + ": unknown key '" +
                             key + "' in [sweep]");
    } else {
      throw ConfigError("line " + std::to_string(line) +
                        ": key outside any section");
    }
  }

  if (!saw_sweep_gamma) cfg.sweep_gamma = {1.5, 2.0};
  if (!saw_sweep_b) cfg.sweep_b = {0.5, 1.0, 2.0};
  if (!saw_sweep_nu) cfg.sweep_nu = {1e-4, 1e-3, 1e-2};

  // invariants
  if (cfg.nu && cfg.mach_inf) {
    double from_mach = 1.0 / (*cfg.mach_inf * *cfg.mach_inf);
    if (std::abs(from_mach - *cfg.nu) > 1e-12 * std::max(1.0, *cfg.nu))
      throw ConfigError("conflicting nu and mach_inf");
    cfg.mach_inf.reset();  // reconcile to the canonical representation
  }
  if (!cfg.nu && !cfg.mach_inf) throw ConfigError("one of nu/mach_inf required");
  if (cfg.b && cfg.omega0_target)
    throw ConfigError("conflicting b and omega0_target");
  if (!cfg.b && !cfg.omega0_target)
    throw ConfigError("one of b/omega0_target required");
  if (cfg.epsilon < 0.0) throw ConfigError("epsilon must be >= 0");
  if (cfg.n_t < 8 || (cfg.n_t & (cfg.n_t - 1)) != 0)
    throw ConfigError("n_t must be a power of two >= 8");
  if (!(cfg.t_min < cfg.t_max)) throw ConfigError("t_min must be < t_max");
  if (cfg.emit_stride < 1) throw ConfigError("emit_stride must be >= 1");
  return cfg;
}

CaseConfig parse_case_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_case(ss.str());
}

std::string emit_case(const CaseConfig& cfg) {
  std::ostringstream o;
  o << "[gas]\n";
  o << "gamma = " << fmt_g17(cfg.gamma) << "\n";
  if (cfg.nu) o << "nu = " << fmt_g17(*cfg.nu) << "\n";
  if (cfg.mach_inf) o << "mach_inf = " << fmt_g17(*cfg.mach_inf) << "\n";
  if (cfg.b) o << "b = " << fmt_g17(*cfg.b) << "\n";
  if (cfg.omega0_target) o << "omega0_target = " << fmt_g17(*cfg.omega0_target) << "\n";
  o << "\n[grid]\n";
  o << "t_min = " << fmt_g17(cfg.t_min) << "\n";
  o << "t_max = " << fmt_g17(cfg.t_max) << "\n";
  o << "n_t = " << cfg.n_t << "\n";
  o << "n_theta = " << cfg.n_theta << "\n";
  if (!cfg.cone_bumps.empty()) {
    o << "\n[cone]\n";
    for (const auto& b : cfg.cone_bumps)
      o << "bump = " << fmt_g17(b.amp) << " " << fmt_g17(b.center) << " "
        << fmt_g17(b.width) << "\n";
  }
  if (!cfg.upstream_bumps.empty()) {
    o << "\n[upstream]\n";
    for (const auto& b : cfg.upstream_bumps)
      o << (b.component == 0 ? "bump_u = " : "bump_v = ") << fmt_g17(b.amp) << " "
        << fmt_g17(b.t_center) << " " << fmt_g17(b.t_width) << " "
        << fmt_g17(b.theta_frac) << " " << fmt_g17(b.theta_width) << "\n";
  }
  o << "\n[run]\n";
  o << "epsilon = " << fmt_g17(cfg.epsilon) << "\n";
  o << "q = " << fmt_g17(cfg.q) << "\n";
  o << "tol_inner = " << fmt_g17(cfg.tol_inner) << "\n";
  o << "tol_outer = " << fmt_g17(cfg.tol_outer) << "\n";
  o << "max_inner = " << cfg.max_inner << "\n";
  o << "max_outer = " << cfg.max_outer << "\n";
  o << "nu_cap = " << fmt_g17(cfg.nu_cap) << "\n";
  o << "eps_margin = " << fmt_g17(cfg.eps_margin) << "\n";
  o << "delta_hat0 = " << fmt_g17(cfg.delta_hat0) << "\n";
  o << "seed = " << cfg.seed << "\n";
  o << "emit_stride = " << cfg.emit_stride << "\n";
  o << "\n[polar]\n";
  o << "samples = " << cfg.polar_samples << "\n";
  o << "\n[linsolve]\n";
  o << "levels = " << cfg.linsolve_levels << "\n";
  o << "base_n_t = " << cfg.linsolve_base_n_t << "\n";
  o << "base_n_theta = " << cfg.linsolve_base_n_theta << "\n";
  o << "t_min = " << fmt_g17(cfg.linsolve_t_min) << "\n";
  o << "t_max = " << fmt_g17(cfg.linsolve_t_max) << "\n";
  o << "\n[sweep]\n";
  auto emit_list = [&](const char* key, const std::vector<double>& v) {
    o << key << " =";
    for (double x : v) o << " " << fmt_g17(x);
    o << "\n";
  };
  emit_list("gamma_list", cfg.sweep_gamma);
  emit_list("b_list", cfg.sweep_b);
  emit_list("nu_list", cfg.sweep_nu);
  return o.str();
}

}  // namespace conoshock
