#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "srcq/errors.hpp"
#include "srcq/grid.hpp"
#include "srcq/quadrature.hpp"

// The nonlinearity pair (f, F) with F(x,u) = \int_0^u f(x,s) ds.  Three
// built-in families:
//   power:      f = |u|^{p-2} u
//   log_power:  f = L(x) u log(1 + |u|^{p-2})
//   piecewise:  power core spliced with a sublinear u^{(q-2)/2} middle branch
//               on [1, M], as in the third example family.
// All families are odd in u; F is even and non-negative.  The x-dependence
// enters only through the positive periodic weight L(x).
//
// The literal reflection rule "f(x,u) = f(x,-u) for u < 0" of the piecewise
// family would make F odd and break F >= 0; the odd extension of f is used
// instead, consistent with the other families.

namespace srcq {

enum class NonlinearityKind { power, log_power, piecewise_sublinear };

namespace detail {

// Chebyshev interpolant of a function on [lo, hi], Clenshaw evaluation.
class ChebyshevTable {
public:
  template <typename Fn>
  ChebyshevTable(const Fn& fn, double lo, double hi, int order)
      : lo_(lo), hi_(hi), coef_(order) {
    std::vector<double> values(order);
    for (int j = 0; j < order; ++j) {
      const double theta = kPi * (j + 0.5) / order;
      const double x = 0.5 * (lo_ + hi_) + 0.5 * (hi_ - lo_) * std::cos(theta);
      values[j] = fn(x);
    }
    for (int k = 0; k < order; ++k) {
      double s = 0.0;
      for (int j = 0; j < order; ++j) {
        s += values[j] * std::cos(kPi * k * (j + 0.5) / order);
      }
      coef_[k] = 2.0 * s / order;
    }
  }

  double operator()(double x) const {
    const double t = (2.0 * x - lo_ - hi_) / (hi_ - lo_);  // [-1, 1]
    double b1 = 0.0, b2 = 0.0;
    for (int k = static_cast<int>(coef_.size()) - 1; k >= 1; --k) {
      const double b0 = 2.0 * t * b1 - b2 + coef_[k];
      b2 = b1;
      b1 = b0;
    }
    return t * b1 - b2 + 0.5 * coef_[0];
  }

  double lo() const { return lo_; }
  double hi() const { return hi_; }

private:
  double lo_, hi_;
  std::vector<double> coef_;
};

// Antiderivative of s log(1 + s^{p-2}) near zero by termwise integration of
// the log series; fractional powers of s make polynomial tables inaccurate
// there.  Valid for v < 1.
inline double log_power_antiderivative_series(double v, double p) {
  const double e = p - 2.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 400; ++k) {
    const double expo = 2.0 + k * e;
    const double term = sign * std::pow(v, expo) / (k * expo);
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum) + 1e-300) break;
    sign = -sign;
  }
  return sum;
}

}  // namespace detail

class NonlinearitySpec {
public:
  static NonlinearitySpec power(double p, double q) {
    return NonlinearitySpec(NonlinearityKind::power, p, q, 1.0, 0.0);
  }
  static NonlinearitySpec log_power(double p, double q, double weight = 1.0) {
    return NonlinearitySpec(NonlinearityKind::log_power, p, q, weight, 0.0);
  }
  static NonlinearitySpec piecewise(double p, double q, double m_break,
                                    double weight = 1.0) {
    if (!(m_break > 1.0)) throw domain_error("piecewise: M must exceed 1");
    return NonlinearitySpec(NonlinearityKind::piecewise_sublinear, p, q, weight, m_break);
  }

  NonlinearityKind kind() const { return kind_; }
  double p() const { return p_; }
  double q() const { return q_; }
  double m_break() const { return m_break_; }

  // Optional x-dependent weight replacing the constant L.
  void set_weight_field(Field weight) {
    for (double v : weight.values) {
      if (!(v > 0.0)) throw constraint_error("nonlinearity: L(x) must be positive");
    }
    weight_field_ = std::move(weight);
  }

  double weight(std::size_t x_index) const {
    return weight_field_ ? weight_field_->values[x_index] : weight_const_;
  }

  // Weightless scalar core; the hypothesis checkers run on these.
  double f_core(double u) const {
    if (!std::isfinite(u)) throw domain_error("nonlinearity: non-finite argument");
    const double a = std::abs(u);
    switch (kind_) {
      case NonlinearityKind::power:
        return a == 0.0 ? 0.0 : std::pow(a, p_ - 2.0) * u;
      case NonlinearityKind::log_power:
        return u * std::log1p(std::pow(a, p_ - 2.0));
      case NonlinearityKind::piecewise_sublinear: {
        const double s = u < 0.0 ? -1.0 : 1.0;
        if (a < 1.0) return s * std::pow(a, p_ - 1.0);
        if (a <= m_break_) return s * std::pow(a, 0.5 * (q_ - 2.0));
        return s * tail_coef_ * std::pow(a, p_ - 1.0);
      }
    }
    return 0.0;
  }

  double F_core(double u) const {
    if (!std::isfinite(u)) throw domain_error("nonlinearity: non-finite argument");
    const double a = std::abs(u);
    switch (kind_) {
      case NonlinearityKind::power:
        return std::pow(a, p_) / p_;
      case NonlinearityKind::log_power: {
        if (a < table_->lo()) return detail::log_power_antiderivative_series(a, p_);
        if (a <= table_->hi()) return (*table_)(a);
        const double pm2 = p_ - 2.0;
        auto integrand = [pm2](double s) { return s * std::log1p(std::pow(s, pm2)); };
        return table_tail_base_ +
               integrate_adaptive(integrand, table_->hi(), a, 0.0, 1e-12).value;
      }
      case NonlinearityKind::piecewise_sublinear: {
        const double half_q = 0.5 * q_;
        const double F1 = 1.0 / p_;  // value at a = 1
        if (a < 1.0) return std::pow(a, p_) / p_;
        if (a <= m_break_) return F1 + (std::pow(a, half_q) - 1.0) / half_q;
        const double FM = F1 + (std::pow(m_break_, half_q) - 1.0) / half_q;
        return FM + tail_coef_ * (std::pow(a, p_) - std::pow(m_break_, p_)) / p_;
      }
    }
    return 0.0;
  }

  double f(std::size_t x_index, double u) const { return weight(x_index) * f_core(u); }
  double F(std::size_t x_index, double u) const { return weight(x_index) * F_core(u); }

  Field apply_f(const Field& u) const {
    Field out(u.grid);
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = f(i, u[i]);
    return out;
  }
  Field apply_F(const Field& u) const {
    Field out(u.grid);
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = F(i, u[i]);
    return out;
  }

  // Breakpoints where sampling-based checkers refine.
  std::vector<double> breakpoints() const {
    if (kind_ == NonlinearityKind::piecewise_sublinear) return {1.0, m_break_};
    return {};
  }

  std::string name() const {
    switch (kind_) {
      case NonlinearityKind::power: return "power";
      case NonlinearityKind::log_power: return "log_power";
      case NonlinearityKind::piecewise_sublinear: return "piecewise";
    }
    return "?";
  }

private:
  NonlinearitySpec(NonlinearityKind kind, double p, double q, double weight,
                   double m_break)
      : kind_(kind), p_(p), q_(q), weight_const_(weight), m_break_(m_break) {
    if (!(p > 2.0)) throw domain_error("nonlinearity: requires p > 2");
    if (!(q > 2.0 && q < 2.0 * p)) throw domain_error("nonlinearity: requires 2 < q < 2p");
    if (!(weight > 0.0)) throw domain_error("nonlinearity: weight must be positive");
    if (kind_ == NonlinearityKind::piecewise_sublinear) {
      // Continuity factor of the u > M branch.
      tail_coef_ = std::pow(m_break_, 0.5 * (q_ - 2.0)) / std::pow(m_break_, p_ - 1.0);
    }
    if (kind_ == NonlinearityKind::log_power) {
      const double pm2 = p_ - 2.0;
      auto antiderivative = [pm2](double v) {
        if (v == 0.0) return 0.0;
        auto integrand = [pm2](double s) { return s * std::log1p(std::pow(s, pm2)); };
        return integrate_adaptive(integrand, 0.0, v, 1e-300, 1e-13).value;
      };
      table_ = std::make_shared<detail::ChebyshevTable>(antiderivative, 0.5, 16.0, 257);
      table_tail_base_ = antiderivative(16.0);
    }
  }

  NonlinearityKind kind_;
  double p_;
  double q_;
  double weight_const_;
  double m_break_;
  double tail_coef_ = 0.0;
  std::shared_ptr<detail::ChebyshevTable> table_;
  double table_tail_base_ = 0.0;
  std::optional<Field> weight_field_;
};

// ---------------------------------------------------------------------------
// Sampling-based hypothesis checkers.  All are report-style: they never
// throw, they name the first failing sample.

struct HypothesisReport {
  std::string name;
  bool passed = true;
  double witness = 0.0;       // failing (or extremal) sample
  double fitted_constant = 0.0;
  std::string detail;
};

// Log-spaced symmetric sample set over |u| in [lo, hi], refined near the
// family's breakpoints.
inline std::vector<double> log_samples(const NonlinearitySpec& spec, double lo,
                                       double hi, int count) {
  std::vector<double> mags;
  mags.reserve(count + 64);
  for (int i = 0; i < count; ++i) {
    const double t = static_cast<double>(i) / (count - 1);
    mags.push_back(lo * std::pow(hi / lo, t));
  }
  for (double b : spec.breakpoints()) {
    for (int k = -16; k <= 16; ++k) {
      const double v = b * (1.0 + 1e-3 * k);
      if (v > lo && v < hi) mags.push_back(v);
    }
  }
  std::sort(mags.begin(), mags.end());
  std::vector<double> out;
  out.reserve(2 * mags.size());
  for (double v : mags) out.push_back(-v);
  for (double v : mags) out.push_back(v);
  return out;
}

// (F1): |f(u)| <= C (|u|^{alpha/N} + |u|^{p-1}).  Fits the smallest C on
// even-indexed samples, asserts the bound with 10% slack on the rest.
template <typename FFn>
HypothesisReport check_f1(const FFn& f, double alpha_over_dim, double p,
                          const std::vector<double>& samples) {
  HypothesisReport rep{"F1"};
  double c_fit = 0.0;
  for (std::size_t i = 0; i < samples.size(); i += 2) {
    const double u = samples[i];
    const double bound = std::pow(std::abs(u), alpha_over_dim) + std::pow(std::abs(u), p - 1.0);
    c_fit = std::max(c_fit, std::abs(f(u)) / bound);
  }
  rep.fitted_constant = c_fit;
  for (std::size_t i = 1; i < samples.size(); i += 2) {
    const double u = samples[i];
    const double bound = std::pow(std::abs(u), alpha_over_dim) + std::pow(std::abs(u), p - 1.0);
    if (std::abs(f(u)) > 1.1 * c_fit * bound + 1e-300) {
      rep.passed = false;
      rep.witness = u;
      rep.detail = "holdout sample exceeds fitted growth bound";
      return rep;
    }
  }
  return rep;
}

// (F2): f(u) = o(u) near zero.  For each tolerance in a declining sequence
// a positive threshold delta(eps) must be found by a geometric scan toward 0.
template <typename FFn>
HypothesisReport check_f2(const FFn& f, const std::vector<double>&) {
  HypothesisReport rep{"F2"};
  for (double eps : {1e-1, 1e-2, 1e-3, 1e-4}) {
    double u = 1.0;
    while (std::max(std::abs(f(u)), std::abs(f(-u))) > eps * u) {
      u *= 0.5;
      if (u < 1e-14) {
        rep.passed = false;
        rep.witness = u;
        rep.detail = "f(u)/u does not fall below " + std::to_string(eps) + " near 0";
        return rep;
      }
    }
  }
  return rep;
}

// (F3): F(u)/|u|^{q/2} -> +infinity, and F >= 0 everywhere.
template <typename FFn>
HypothesisReport check_f3(const FFn& F, double q, const std::vector<double>& samples) {
  HypothesisReport rep{"F3"};
  for (double u : samples) {
    if (F(u) < -1e-12 * (1.0 + std::abs(F(u)))) {
      rep.passed = false;
      rep.witness = u;
      rep.detail = "F < 0";
      return rep;
    }
  }
  std::vector<double> mags;
  for (double u : samples) {
    if (u > 0.0) mags.push_back(u);
  }
  std::sort(mags.begin(), mags.end());
  const std::size_t tail_begin = (3 * mags.size()) / 4;
  double prev = -1.0;
  for (std::size_t i = tail_begin; i < mags.size(); ++i) {
    const double r = F(mags[i]) / std::pow(mags[i], 0.5 * q);
    if (r < prev * (1.0 - 1e-10)) {
      rep.passed = false;
      rep.witness = mags[i];
      rep.detail = "F/|u|^{q/2} not increasing on the tail";
      return rep;
    }
    prev = r;
  }
  const double r_lo = F(mags[tail_begin]) / std::pow(mags[tail_begin], 0.5 * q);
  const double r_hi = F(mags.back()) / std::pow(mags.back(), 0.5 * q);
  if (!(r_hi >= 100.0 * std::max(r_lo, 1e-300))) {
    rep.passed = false;
    rep.witness = mags.back();
    rep.detail = "F/|u|^{q/2} fails the growth target";
  }
  return rep;
}

// (F4): u -> f(u)/|u|^{(q-2)/2} non-decreasing on each half-line.
template <typename FFn>
HypothesisReport check_f4(const FFn& f, double q, const std::vector<double>& samples) {
  HypothesisReport rep{"F4"};
  auto ratio = [&](double u) { return f(u) / std::pow(std::abs(u), 0.5 * (q - 2.0)); };
  std::vector<double> pos, neg;
  for (double u : samples) (u > 0.0 ? pos : neg).push_back(u);
  std::sort(pos.begin(), pos.end());
  std::sort(neg.begin(), neg.end());
  auto run = [&](const std::vector<double>& line) -> std::optional<double> {
    double prev = ratio(line.front());
    for (std::size_t i = 1; i < line.size(); ++i) {
      const double r = ratio(line[i]);
      if (r < prev - 1e-10 * (std::abs(prev) + 1.0)) return line[i];
      prev = std::max(prev, r);
    }
    return std::nullopt;
  };
  for (const auto* line : {&pos, &neg}) {
    if (auto bad = run(*line)) {
      rep.passed = false;
      rep.witness = *bad;
      rep.detail = "f/|u|^{(q-2)/2} decreases";
      return rep;
    }
  }
  return rep;
}

// (AR-q): 0 <= (q/2) F(u) <= f(u) u at every sample.
template <typename FFn, typename GFn>
HypothesisReport check_arq(const FFn& f, const GFn& F, double q,
                           const std::vector<double>& samples, double slack) {
  HypothesisReport rep{"AR-q"};
  for (double u : samples) {
    const double lhs = 0.5 * q * F(u);
    const double rhs = f(u) * u;
    const double tol = slack * (std::abs(lhs) + std::abs(rhs) + 1.0);
    if (lhs < -tol || lhs > rhs + tol) {
      rep.passed = false;
      rep.witness = u;
      rep.detail = "Ambrosetti-Rabinowitz variant violated";
      return rep;
    }
  }
  return rep;
}

// (F-eps): smallest sampled C_eps with F(u) <= eps u^2 + C_eps |u|^p.
template <typename FFn>
double feps_constants(const FFn& F, double p, double eps,
                      const std::vector<double>& samples) {
  if (!(eps > 0.0)) throw domain_error("feps_constants: eps must be positive");
  double c = 0.0;
  for (double u : samples) {
    if (u == 0.0) continue;
    c = std::max(c, (F(u) - eps * u * u) / std::pow(std::abs(u), p));
  }
  return c;
}

struct HypothesisSuite {
  HypothesisReport f1, f2, f3, f4, arq;
  bool all_passed() const {
    return f1.passed && f2.passed && f3.passed && f4.passed && arq.passed;
  }
};

inline HypothesisSuite run_hypothesis_suite(const NonlinearitySpec& spec,
                                            double alpha_over_dim, double lo = 1e-4,
                                            double hi = 1e4, int count = 4096) {
  const auto samples = log_samples(spec, lo, hi, count);
  auto f = [&spec](double u) { return spec.f_core(u); };
  auto F = [&spec](double u) { return spec.F_core(u); };
  const double slack = spec.kind() == NonlinearityKind::log_power ? 1e-9 : 1e-12;
  HypothesisSuite suite;
  suite.f1 = check_f1(f, alpha_over_dim, spec.p(), samples);
  suite.f2 = check_f2(f, samples);
  suite.f3 = check_f3(F, spec.q(), samples);
  suite.f4 = check_f4(f, spec.q(), samples);
  suite.arq = check_arq(f, F, spec.q(), samples, slack);
  return suite;
}

}  // namespace srcq
