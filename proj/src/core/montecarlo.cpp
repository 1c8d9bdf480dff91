#include "montecarlo.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

#include "noise.hpp"

namespace ptycho {

void CampaignConfig::validate() const {
  if (trials < 1) throw_invalid("campaign needs at least one trial");
  if (repeats < 1) throw_invalid("repeats must be >= 1");
  if (threads < 0) throw_invalid("threads must be >= 0");
}

std::vector<ObjectEstimate> run_campaign(const Probe& probe,
                                         const ObjectEstimate& truth,
                                         const ScanPattern& scan,
                                         Algorithm algorithm,
                                         const CgConfig& cg,
                                         const CampaignConfig& campaign) {
  campaign.validate();
  cg.validate();
  truth.validate();

  const DiffractionStack expected = expected_counts(probe, truth, scan);

  std::vector<ObjectEstimate> estimates(static_cast<size_t>(campaign.trials));
  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::string failure_message;
  std::mutex failure_mutex;

  const auto worker = [&]() {
    for (;;) {
      const int t = next.fetch_add(1);
      if (t >= campaign.trials || failed.load()) break;
      try {
        DiffractionStack data;
        if (campaign.noise_free) {
          data = expected;
          data.observed = expected.expected;
        } else if (campaign.repeats == 1) {
          data = sample_poisson_stack(
              expected, RngSeed{campaign.master_seed,
                                static_cast<std::uint64_t>(t)});
        } else {
          std::vector<DiffractionStack> repeats;
          repeats.reserve(static_cast<size_t>(campaign.repeats));
          for (int rho = 0; rho < campaign.repeats; ++rho) {
            const std::uint64_t stream =
                static_cast<std::uint64_t>(t) * campaign.repeats + rho;
            repeats.push_back(
                sample_poisson_stack(expected, RngSeed{campaign.master_seed, stream}));
          }
          data = average_measurements(repeats);
        }
        estimates[static_cast<size_t>(t)] =
            run_cg(probe, scan, data, algorithm, cg, truth).estimate;
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        failed.store(true);
        if (failure_message.empty()) failure_message = e.what();
      }
    }
  };

  int n_threads = campaign.threads;
  if (n_threads == 0)
    n_threads = static_cast<int>(std::thread::hardware_concurrency());
  n_threads = std::max(1, std::min(n_threads, campaign.trials));

  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(n_threads));
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }
  if (failed.load()) throw_numeric("campaign trial failed: " + failure_message);
  return estimates;
}

namespace {

constexpr double kPi = 3.14159265358979323846;

// Maps a phase difference to (-pi, pi].
double wrap_phase(double d) {
  d = std::remainder(d, 2.0 * kPi);
  if (d <= -kPi) d += 2.0 * kPi;
  return d;
}

}  // namespace

McStatistics statistics(const std::vector<ObjectEstimate>& estimates,
                        const ObjectEstimate& truth) {
  if (estimates.size() < 2) throw_invalid("statistics need at least 2 estimates");
  const Grid2D& g = truth.grid();
  for (const ObjectEstimate& e : estimates)
    if (!e.grid().same_shape(g)) throw_invalid("estimates must share the truth grid");

  const size_t k = truth.transmission.values.size();
  const size_t trials = estimates.size();
  const double inv_t = 1.0 / static_cast<double>(trials);

  McStatistics st;
  st.trials = static_cast<int>(trials);
  st.mean_transmission = RealField(g);
  st.mean_phase = RealField(g);
  st.var_transmission = RealField(g);
  st.var_phase = RealField(g);
  st.bias2_transmission = RealField(g);
  st.bias2_phase = RealField(g);

  // Two-pass moments on data shifted by the first estimate, so a set of
  // identical estimates yields exact zero variance (the degenerate
  // noise-free case relies on it). Phase enters as the wrapped difference
  // to the truth.
  std::vector<double> da(trials), dp(trials);
  double bias_sum_a = 0.0, var_sum_a = 0.0, bias_sum_p = 0.0, var_sum_p = 0.0;
  for (size_t i = 0; i < k; ++i) {
    const double base_a = estimates[0].transmission.values[i];
    const double base_p =
        wrap_phase(estimates[0].phase.values[i] - truth.phase.values[i]);
    double sum_a = 0.0, sum_p = 0.0;
    for (size_t t = 0; t < trials; ++t) {
      da[t] = estimates[t].transmission.values[i] - base_a;
      dp[t] = wrap_phase(estimates[t].phase.values[i] - truth.phase.values[i]) -
              base_p;
      sum_a += da[t];
      sum_p += dp[t];
    }
    const double mean_da = sum_a * inv_t;
    const double mean_dp = sum_p * inv_t;
    double var_a = 0.0, var_p = 0.0;
    for (size_t t = 0; t < trials; ++t) {
      var_a += (da[t] - mean_da) * (da[t] - mean_da);
      var_p += (dp[t] - mean_dp) * (dp[t] - mean_dp);
    }
    st.mean_transmission.values[i] = base_a + mean_da;
    st.mean_phase.values[i] = truth.phase.values[i] + base_p + mean_dp;
    st.var_transmission.values[i] = var_a * inv_t;  // population convention
    st.var_phase.values[i] = var_p * inv_t;
    const double bias_a =
        st.mean_transmission.values[i] - truth.transmission.values[i];
    const double bias_p = base_p + mean_dp;
    st.bias2_transmission.values[i] = bias_a * bias_a;
    st.bias2_phase.values[i] = bias_p * bias_p;
    bias_sum_a += st.bias2_transmission.values[i];
    bias_sum_p += st.bias2_phase.values[i];
    var_sum_a += st.var_transmission.values[i];
    var_sum_p += st.var_phase.values[i];
  }
  st.bvr_transmission = var_sum_a == 0.0 ? 0.0 : bias_sum_a / var_sum_a;
  st.bvr_phase = var_sum_p == 0.0 ? 0.0 : bias_sum_p / var_sum_p;
  return st;
}

CrlbComparison compare_to_crlb(const McStatistics& stats, const CrlbMap& crlb) {
  const Grid2D& g = crlb.transmission_bound.grid;
  if (!stats.var_transmission.grid.same_shape(g))
    throw_invalid("statistics and bound maps must share one grid");

  CrlbComparison cmp;
  cmp.bvr_transmission = stats.bvr_transmission;
  cmp.bvr_phase = stats.bvr_phase;
  for (size_t i = 0; i < crlb.transmission_bound.values.size(); ++i) {
    if (crlb.transmission_bound.values[i] > 0.0) {
      ++cmp.informed_transmission;
      cmp.crlb_sum_transmission += crlb.transmission_bound.values[i];
      cmp.var_sum_transmission += stats.var_transmission.values[i];
    }
    if (crlb.phase_bound.values[i] > 0.0) {
      ++cmp.informed_phase;
      cmp.crlb_sum_phase += crlb.phase_bound.values[i];
      cmp.var_sum_phase += stats.var_phase.values[i];
    }
  }
  cmp.ratio_transmission = cmp.crlb_sum_transmission == 0.0
                               ? 0.0
                               : cmp.var_sum_transmission / cmp.crlb_sum_transmission;
  cmp.ratio_phase =
      cmp.crlb_sum_phase == 0.0 ? 0.0 : cmp.var_sum_phase / cmp.crlb_sum_phase;
  return cmp;
}

}  // namespace ptycho
