#pragma once

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "srcq/model.hpp"

// File formats: the SRCQ binary field dump, CSV writers (17 significant
// digits everywhere so outputs round-trip), and the line-based key = value
// run configuration.

namespace srcq {

// ---------------------------------------------------------------- binary

// magic "SRCQ", u32 version = 1, then N, M, L as f64, then M^N f64 values
// row-major, all little-endian.
inline void write_field_srcq(const std::string& path, const Field& u) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw io_error("write_field_srcq: cannot open " + path);
  const char magic[4] = {'S', 'R', 'C', 'Q'};
  os.write(magic, 4);
  const std::uint32_t version = 1;
  os.write(reinterpret_cast<const char*>(&version), 4);
  const double header[3] = {static_cast<double>(u.grid->dim()),
                            static_cast<double>(u.grid->points_per_axis()),
                            u.grid->box_length()};
  os.write(reinterpret_cast<const char*>(header), sizeof(header));
  os.write(reinterpret_cast<const char*>(u.values.data()),
           static_cast<std::streamsize>(u.values.size() * sizeof(double)));
  if (!os) throw io_error("write_field_srcq: short write to " + path);
}

inline Field read_field_srcq(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw io_error("read_field_srcq: cannot open " + path);
  char magic[4];
  std::uint32_t version = 0;
  double header[3];
  is.read(magic, 4);
  is.read(reinterpret_cast<char*>(&version), 4);
  is.read(reinterpret_cast<char*>(header), sizeof(header));
  if (!is || std::memcmp(magic, "SRCQ", 4) != 0) {
    throw io_error("read_field_srcq: " + path + " is not an SRCQ file");
  }
  if (version != 1) {
    throw io_error("read_field_srcq: unsupported version " + std::to_string(version));
  }
  const int dim = static_cast<int>(header[0]);
  const std::size_t M = static_cast<std::size_t>(header[1]);
  Field u(make_grid(dim, M, header[2]));
  is.read(reinterpret_cast<char*>(u.values.data()),
          static_cast<std::streamsize>(u.values.size() * sizeof(double)));
  if (!is) throw io_error("read_field_srcq: truncated file " + path);
  return u;
}

// ------------------------------------------------------------------- csv

inline std::string format_g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void write_csv(const std::string& path, const std::string& header,
                      const std::vector<std::vector<double>>& rows) {
  std::ofstream os(path);
  if (!os) throw io_error("write_csv: cannot open " + path);
  os << header << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) os << ",";
      os << format_g17(row[i]);
    }
    os << "\n";
  }
  if (!os) throw io_error("write_csv: short write to " + path);
}

// ---------------------------------------------------------------- config

struct RunConfig {
  int dim = 2;
  std::size_t points = 64;
  double box_length = 16.0;
  double mass = 1.0;
  double mu = 0.0;
  double alpha = 1.5;
  double p = 3.0;
  double q = 2.5;
  std::string nonlinearity = "power";
  std::string potential_periodic = "const:2.0";
  std::string potential_local = "zero";
  std::string k_weight = "zero";
  double grad_tol = 1e-8;
  int max_iters = 2000;
  int restarts = 5;
  unsigned seed = 0;
  double step_size = 1.0;
  std::vector<std::string> warnings;  // non-fatal (mu above threshold, ...)

  bool operator==(const RunConfig& o) const {
    return dim == o.dim && points == o.points && box_length == o.box_length &&
           mass == o.mass && mu == o.mu && alpha == o.alpha && p == o.p &&
           q == o.q && nonlinearity == o.nonlinearity &&
           potential_periodic == o.potential_periodic &&
           potential_local == o.potential_local && k_weight == o.k_weight &&
           grad_tol == o.grad_tol && max_iters == o.max_iters &&
           restarts == o.restarts && seed == o.seed && step_size == o.step_size;
  }
};

namespace detail {

// "name" or "name:a" or "name:a,b" -> name + numeric args
inline bool split_builtin(const std::string& text, std::string& name,
                          std::vector<double>& args) {
  const auto colon = text.find(':');
  name = text.substr(0, colon);
  args.clear();
  if (colon == std::string::npos) return true;
  std::stringstream ss(text.substr(colon + 1));
  std::string piece;
  while (std::getline(ss, piece, ',')) {
    try {
      std::size_t used = 0;
      args.push_back(std::stod(piece, &used));
      if (used != piece.size()) return false;
    } catch (const std::exception&) {
      return false;
    }
  }
  return !args.empty();
}

}  // namespace detail

// Built-in spatial profiles for potentials and weights:
//   zero | const:<c> | cosine:<base>,<amp> (unit-periodic) |
//   gaussian:<amp>,<width> (decaying, for V_l)
inline SpatialFn parse_spatial(const std::string& text) {
  std::string name;
  std::vector<double> args;
  if (!detail::split_builtin(text, name, args)) {
    throw usage_error("parse_spatial: malformed parameters in '" + text + "'");
  }
  if (name == "zero" && args.empty()) return zero_fn();
  if (name == "const" && args.size() == 1) return constant_fn(args[0]);
  if (name == "cosine" && args.size() == 2) {
    const double base = args[0], amp = args[1];
    return [base, amp](const double* x, int dim) {
      double s = base;
      for (int a = 0; a < dim; ++a) s += amp * std::cos(2.0 * kPi * x[a]);
      return s;
    };
  }
  if (name == "gaussian" && args.size() == 2) {
    const double amp = args[0], w = args[1];
    return [amp, w](const double* x, int dim) {
      double r2 = 0.0;
      for (int a = 0; a < dim; ++a) r2 += x[a] * x[a];
      return amp * std::exp(-r2 / (w * w));
    };
  }
  throw usage_error("parse_spatial: unknown builtin '" + text + "'");
}

// power | log_power | piecewise:<M_break>
inline NonlinearitySpec parse_nonlinearity(const std::string& text, double p,
                                           double q) {
  std::string name;
  std::vector<double> args;
  if (!detail::split_builtin(text, name, args)) {
    throw usage_error("parse_nonlinearity: malformed parameters in '" + text + "'");
  }
  if (name == "power" && args.empty()) return NonlinearitySpec::power(p, q);
  if (name == "log_power" && args.empty()) return NonlinearitySpec::log_power(p, q);
  if (name == "piecewise" && args.size() == 1) {
    return NonlinearitySpec::piecewise(p, q, args[0]);
  }
  throw usage_error("parse_nonlinearity: unknown family '" + text + "'");
}

inline ModelParams build_model(const RunConfig& cfg) {
  auto grid = make_grid(cfg.dim, cfg.points, cfg.box_length);
  return ModelParams{cfg.dim,
                     cfg.mass,
                     cfg.mu,
                     cfg.alpha,
                     cfg.p,
                     cfg.q,
                     parse_nonlinearity(cfg.nonlinearity, cfg.p, cfg.q),
                     build_potentials(grid, parse_spatial(cfg.potential_periodic),
                                      parse_spatial(cfg.potential_local),
                                      parse_spatial(cfg.k_weight)),
                     grid};
}

// The effective configuration, re-parseable to an identical RunConfig.
inline std::string emit_config(const RunConfig& cfg) {
  std::ostringstream os;
  os << "dim = " << cfg.dim << "\n";
  os << "points = " << cfg.points << "\n";
  os << "box_length = " << format_g17(cfg.box_length) << "\n";
  os << "mass = " << format_g17(cfg.mass) << "\n";
  os << "mu = " << format_g17(cfg.mu) << "\n";
  os << "alpha = " << format_g17(cfg.alpha) << "\n";
  os << "p = " << format_g17(cfg.p) << "\n";
  os << "q = " << format_g17(cfg.q) << "\n";
  os << "nonlinearity = " << cfg.nonlinearity << "\n";
  os << "potential_periodic = " << cfg.potential_periodic << "\n";
  os << "potential_local = " << cfg.potential_local << "\n";
  os << "k_weight = " << cfg.k_weight << "\n";
  os << "grad_tol = " << format_g17(cfg.grad_tol) << "\n";
  os << "max_iters = " << cfg.max_iters << "\n";
  os << "restarts = " << cfg.restarts << "\n";
  os << "seed = " << cfg.seed << "\n";
  os << "step_size = " << format_g17(cfg.step_size) << "\n";
  return os.str();
}

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// heuristic mapping from a failed hypothesis to the config key that sets it
inline std::string hypothesis_key(const std::string& condition) {
  if (condition.find("q") != std::string::npos) return "q";
  if (condition.find("alpha") != std::string::npos) return "alpha";
  if (condition.find("p") != std::string::npos) return "p";
  if (condition.find("m >") != std::string::npos) return "mass";
  if (condition.find("(K)") != std::string::npos) return "k_weight";
  if (condition.find("(V2)") != std::string::npos) return "potential_periodic";
  if (condition.find("N >=") != std::string::npos) return "dim";
  return "";
}

}  // namespace detail

// Line-based key = value parser.  '#' starts a comment.  All problems are
// aggregated into one usage_error so a bad file is reported in full, each
// line-numbered; model hypothesis violations are attributed to the line of
// the key that sets the offending value.
inline RunConfig parse_config_text(const std::string& text,
                                   const std::string& origin = "<config>") {
  RunConfig cfg;
  std::vector<std::string> errors;
  std::map<std::string, int> seen_line;
  std::istringstream is(text);
  std::string raw;
  int lineno = 0;
  auto fail = [&](int line, const std::string& msg) {
    errors.push_back(origin + ":" + std::to_string(line) + ": " + msg);
  };
  while (std::getline(is, raw)) {
    ++lineno;
    std::string line = raw;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      fail(lineno, "expected 'key = value'");
      continue;
    }
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (seen_line.count(key)) {
      fail(lineno, "duplicate key '" + key + "' (first set on line " +
                       std::to_string(seen_line[key]) + ")");
      continue;
    }
    seen_line[key] = lineno;
    auto number = [&](double& target) {
      try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        target = v;
      } catch (const std::exception&) {
        fail(lineno, "key '" + key + "': not a number: '" + value + "'");
      }
    };
    if (key == "dim") {
      double v = cfg.dim;
      number(v);
      cfg.dim = static_cast<int>(v);
    } else if (key == "points") {
      double v = static_cast<double>(cfg.points);
      number(v);
      cfg.points = static_cast<std::size_t>(v);
    } else if (key == "box_length") {
      number(cfg.box_length);
    } else if (key == "mass") {
      number(cfg.mass);
    } else if (key == "mu") {
      number(cfg.mu);
    } else if (key == "alpha") {
      number(cfg.alpha);
    } else if (key == "p") {
      number(cfg.p);
    } else if (key == "q") {
      number(cfg.q);
    } else if (key == "nonlinearity") {
      cfg.nonlinearity = value;
    } else if (key == "potential_periodic") {
      cfg.potential_periodic = value;
    } else if (key == "potential_local") {
      cfg.potential_local = value;
    } else if (key == "k_weight") {
      cfg.k_weight = value;
    } else if (key == "grad_tol") {
      number(cfg.grad_tol);
    } else if (key == "max_iters") {
      double v = cfg.max_iters;
      number(v);
      cfg.max_iters = static_cast<int>(v);
    } else if (key == "restarts") {
      double v = cfg.restarts;
      number(v);
      cfg.restarts = static_cast<int>(v);
    } else if (key == "seed") {
      double v = cfg.seed;
      number(v);
      cfg.seed = static_cast<unsigned>(v);
    } else if (key == "step_size") {
      number(cfg.step_size);
    } else {
      fail(lineno, "unknown key '" + key + "'");
    }
  }

  if (errors.empty()) {
    // every violated hypothesis reported at once; the numeric checks run
    // first so exponent problems are named before model construction can
    // trip over them
    auto report_failures = [&](const ValidationReport& rep) {
      for (const auto& entry : rep.entries) {
        if (entry.passed) continue;
        const std::string key = detail::hypothesis_key(entry.condition);
        const int line = seen_line.count(key) ? seen_line[key] : 0;
        fail(line, "hypothesis " + entry.condition + " violated [" +
                       entry.detail + "]");
      }
    };
    auto numeric =
        validate_numbers(cfg.dim, cfg.mass, cfg.alpha, cfg.p, cfg.q);
    if (!numeric.all_passed()) {
      report_failures(numeric);
    } else {
      try {
        ModelParams mp = build_model(cfg);
        auto rep = validate(mp);
        report_failures(rep);
        if (!rep.mu_below_threshold && cfg.mu > 0.0) {
          std::ostringstream warn;
          warn << "mu = " << cfg.mu << " is not below mu*(" << cfg.dim
               << ") = " << rep.mu_star_value << "; coercivity not guaranteed";
          cfg.warnings.push_back(warn.str());
        }
      } catch (const std::exception& ex) {
        fail(0, ex.what());
      }
    }
  }
  if (!errors.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& e : errors) msg += "\n  " + e;
    throw usage_error(msg);
  }
  return cfg;
}

inline RunConfig parse_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw io_error("parse_config: cannot open " + path);
  std::ostringstream buf;
  buf << is.rdbuf();
  return parse_config_text(buf.str(), path);
}

}  // namespace srcq
