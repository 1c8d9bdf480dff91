#include "optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace ptycho {

const char* algorithm_name(Algorithm a) {
  return a == Algorithm::max_likelihood ? "ml" : "amp";
}

Algorithm algorithm_from_name(const std::string& name) {
  if (name == "ml") return Algorithm::max_likelihood;
  if (name == "amp") return Algorithm::amplitude;
  throw_config("unknown algorithm '" + name + "' (expected ml or amp)");
}

CgConfig CgConfig::defaults(Algorithm algorithm) {
  CgConfig c;
  c.gamma_initial = algorithm == Algorithm::max_likelihood ? 1e-5 : 1e-3;
  return c;
}

void CgConfig::validate() const {
  if (max_iterations < 1) throw_invalid("max_iterations must be >= 1");
  if (objective_change_stop < 0.0) throw_invalid("stop threshold must be >= 0");
  if (gamma_initial < 0.0 || gamma_after < 0.0) throw_invalid("gamma must be >= 0");
  if (alpha_probes.size() < 3) throw_invalid("need at least 3 alpha probes");
  for (size_t i = 0; i < alpha_probes.size(); ++i)
    for (size_t j = i + 1; j < alpha_probes.size(); ++j)
      if (alpha_probes[i] == alpha_probes[j])
        throw_invalid("alpha probes must be distinct");
}

void RunTrace::write_csv(std::ostream& out) const {
  out << "iteration,objective,alpha_A,alpha_phi,beta_A,beta_phi,"
         "grad_norm_A,grad_norm_phi\n";
  out.precision(17);
  out << 0 << ',' << initial_objective << ",0,0,0,0,0,0\n";
  for (const IterationRecord& r : iterations) {
    out << r.k << ',' << r.objective << ',' << r.alpha_transmission << ','
        << r.alpha_phase << ',' << r.beta_transmission << ',' << r.beta_phase
        << ',' << r.grad_norm_transmission << ',' << r.grad_norm_phase << '\n';
  }
}

double polak_ribiere_beta(const RealField& g_now, const RealField& g_prev) {
  const double denom = l2_norm_sq(g_prev);
  if (denom == 0.0) return 0.0;
  const double numer = dot(g_now, g_now) - dot(g_prev, g_now);
  return std::max(numer / denom, 0.0);
}

double quadratic_line_search(const std::function<double(double)>& objective,
                             const std::vector<double>& alpha_probes) {
  if (alpha_probes.size() < 3) throw_invalid("need at least 3 alpha probes");

  std::vector<double> alphas;
  std::vector<double> values;
  double best_alpha = 0.0;
  double best_value = std::numeric_limits<double>::infinity();
  double max_probe = 0.0;
  for (double a : alpha_probes) {
    max_probe = std::max(max_probe, a);
    const double v = objective(a);
    if (!std::isfinite(v)) continue;  // dropped probe
    alphas.push_back(a);
    values.push_back(v);
    if (v < best_value) {
      best_value = v;
      best_alpha = a;
    }
  }
  if (alphas.empty()) return 0.0;
  if (alphas.size() < 3) return best_alpha;

  // Normal equations for v ~ c0 + c1 a + c2 a^2.
  double s0 = 0, s1 = 0, s2 = 0, s3 = 0, s4 = 0, t0 = 0, t1 = 0, t2 = 0;
  for (size_t i = 0; i < alphas.size(); ++i) {
    const double a = alphas[i];
    const double a2 = a * a;
    s0 += 1.0;
    s1 += a;
    s2 += a2;
    s3 += a2 * a;
    s4 += a2 * a2;
    t0 += values[i];
    t1 += values[i] * a;
    t2 += values[i] * a2;
  }
  // Solve the 3x3 system by Cramer's rule.
  const double det = s0 * (s2 * s4 - s3 * s3) - s1 * (s1 * s4 - s2 * s3) +
                     s2 * (s1 * s3 - s2 * s2);
  if (det == 0.0) return best_alpha;
  const double c1 = (s0 * (t1 * s4 - t2 * s3) - t0 * (s1 * s4 - s2 * s3) +
                     s2 * (s1 * t2 - s2 * t1)) / det;
  const double c2 = (s0 * (s2 * t2 - s3 * t1) - s1 * (s1 * t2 - s3 * t0) +
                     s2 * (s1 * t1 - s2 * t0)) / det;

  if (!(c2 > 0.0)) return best_alpha;  // flat or concave fit
  const double vertex = -c1 / (2.0 * c2);
  if (!(vertex > 0.0)) return best_alpha;
  return std::min(vertex, 10.0 * max_probe);
}

namespace {

double grad_norm(const RealField& g) { return std::sqrt(l2_norm_sq(g)); }

RealField axpy(const RealField& x, double alpha, const RealField& d) {
  RealField out = x;
  for (size_t i = 0; i < out.values.size(); ++i)
    out.values[i] += alpha * d.values[i];
  return out;
}

}  // namespace

CgResult run_cg(const Probe& probe, const ScanPattern& scan,
                const DiffractionStack& counts, Algorithm algorithm,
                const CgConfig& config, const ObjectEstimate& init) {
  config.validate();
  init.validate();
  if (!counts.has_observed()) throw_invalid("run_cg requires observed counts");
  if (counts.observed.size() != scan.offsets.size())
    throw_invalid("counts do not match the scan pattern");

  ObjectEstimate current = init;

  const auto objective = [&](const ObjectEstimate& obj, double gamma) {
    return algorithm == Algorithm::max_likelihood
               ? neg_log_likelihood(obj, probe, scan, counts, gamma).value
               : amplitude_cost(obj, probe, scan, counts).value;
  };
  const auto gradient = [&](const ObjectEstimate& obj, double gamma) {
    return algorithm == Algorithm::max_likelihood
               ? grad_neg_log_likelihood(obj, probe, scan, counts, gamma)
               : grad_amplitude_cost(obj, probe, scan, counts, gamma);
  };

  CgResult result;
  RealField g_prev_a, g_prev_p, dir_a, dir_p;
  double previous_objective =
      objective(current, config.gamma_initial);
  result.trace.initial_objective = previous_objective;

  for (int k = 1; k <= config.max_iterations; ++k) {
    const double gamma =
        k < config.gamma_switch_iteration ? config.gamma_initial : config.gamma_after;
    // The stopping rule compares like with like across the gamma switch.
    if (k == config.gamma_switch_iteration &&
        algorithm == Algorithm::max_likelihood)
      previous_objective = objective(current, gamma);

    Gradient g = gradient(current, gamma);

    IterationRecord rec;
    rec.k = k;
    rec.grad_norm_transmission = grad_norm(g.wrt_transmission);
    rec.grad_norm_phase = grad_norm(g.wrt_phase);

    if (k == 1) {
      dir_a = g.wrt_transmission;
      for (double& v : dir_a.values) v = -v;
      dir_p = g.wrt_phase;
      for (double& v : dir_p.values) v = -v;
    } else {
      rec.beta_transmission = polak_ribiere_beta(g.wrt_transmission, g_prev_a);
      rec.beta_phase = polak_ribiere_beta(g.wrt_phase, g_prev_p);
      for (size_t i = 0; i < dir_a.values.size(); ++i)
        dir_a.values[i] = -g.wrt_transmission.values[i] +
                          rec.beta_transmission * dir_a.values[i];
      for (size_t i = 0; i < dir_p.values.size(); ++i)
        dir_p.values[i] = -g.wrt_phase.values[i] + rec.beta_phase * dir_p.values[i];
    }

    // Per-channel line searches around the current iterate; the channels are
    // updated simultaneously afterwards.
    const auto along_a = [&](double alpha) {
      ObjectEstimate trial = current;
      trial.transmission = axpy(current.transmission, alpha, dir_a);
      return objective(trial, gamma);
    };
    const auto along_p = [&](double alpha) {
      ObjectEstimate trial = current;
      trial.phase = axpy(current.phase, alpha, dir_p);
      return objective(trial, gamma);
    };

    const double increase_tol =
        1e-9 * std::max(1.0, std::fabs(previous_objective));

    double alpha_a = quadratic_line_search(along_a, config.alpha_probes);
    if (along_a(alpha_a) > previous_objective + increase_tol) {
      // Vertex (or best probe) made things worse: retreat to the best probe,
      // then to a zero step.
      rec.fallback_transmission = true;
      double best = 0.0, best_value = previous_objective;
      for (double a : config.alpha_probes) {
        const double v = along_a(a);
        if (std::isfinite(v) && v < best_value) {
          best_value = v;
          best = a;
        }
      }
      alpha_a = best;
    }
    double alpha_p = quadratic_line_search(along_p, config.alpha_probes);
    if (along_p(alpha_p) > previous_objective + increase_tol) {
      rec.fallback_phase = true;
      double best = 0.0, best_value = previous_objective;
      for (double a : config.alpha_probes) {
        const double v = along_p(a);
        if (std::isfinite(v) && v < best_value) {
          best_value = v;
          best = a;
        }
      }
      alpha_p = best;
    }

    current.transmission = axpy(current.transmission, alpha_a, dir_a);
    current.phase = axpy(current.phase, alpha_p, dir_p);

    const double now = objective(current, gamma);
    rec.alpha_transmission = alpha_a;
    rec.alpha_phase = alpha_p;
    rec.objective = now;
    if (now > previous_objective + increase_tol)
      ++result.trace.monotonicity_violations;
    result.trace.iterations.push_back(rec);

    g_prev_a = std::move(g.wrt_transmission);
    g_prev_p = std::move(g.wrt_phase);

    const bool converged =
        std::fabs(now - previous_objective) <= config.objective_change_stop;
    previous_objective = now;
    if (converged) break;
    if (k == config.max_iterations) result.trace.reached_max_iterations = true;
  }

  result.estimate = std::move(current);
  return result;
}

}  // namespace ptycho
