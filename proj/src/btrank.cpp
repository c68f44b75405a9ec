#include "stanceval/btrank.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>

#include "stanceval/errors.hpp"

namespace stanceval {

namespace {

std::vector<std::string> ranking_of(const std::vector<std::string>& ids,
                                    const std::vector<double>& theta) {
  std::vector<std::size_t> order(ids.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (theta[a] != theta[b]) return theta[a] > theta[b];
    return ids[a] < ids[b];
  });
  std::vector<std::string> ranking;
  ranking.reserve(ids.size());
  for (std::size_t i : order) ranking.push_back(ids[i]);
  return ranking;
}

void zero_mean(std::vector<double>& theta) {
  if (theta.empty()) return;
  const double mean = std::accumulate(theta.begin(), theta.end(), 0.0) /
                      static_cast<double>(theta.size());
  for (double& t : theta) t -= mean;
}

bool graph_connected(const WinMatrix& wm) {
  const std::size_t n = wm.size();
  if (n <= 1) return true;
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (wm.pair_mass(i, j) > 0.0) parent[find(i)] = find(j);
  const std::size_t root = find(0);
  for (std::size_t i = 1; i < n; ++i)
    if (find(i) != root) return false;
  return true;
}

double log_sum_exp2(double a, double b) {
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

// Stationary distribution of a CTMC by GTH state reduction. Only adds,
// multiplies, and divides nonnegative numbers, so every component keeps
// relative accuracy even when the masses span hundreds of orders of
// magnitude (perfectly separated win data produces exactly that). `rates`
// is row-major with rates[i*n+j] = rate i -> j; it is destroyed in place.
std::vector<double> stationary_gth(std::vector<double>& rates, std::size_t n) {
  for (std::size_t k = n - 1; k >= 1; --k) {
    double s = 0.0;
    for (std::size_t j = 0; j < k; ++j) s += rates[k * n + j];
    if (!(s > 0.0))
      throw ComputationError("stationary distribution undefined: chain not irreducible");
    for (std::size_t i = 0; i < k; ++i) rates[i * n + k] /= s;
    for (std::size_t i = 0; i < k; ++i) {
      const double w = rates[i * n + k];
      if (w == 0.0) continue;
      for (std::size_t j = 0; j < k; ++j)
        if (j != i) rates[i * n + j] += w * rates[k * n + j];
    }
  }
  std::vector<double> pi(n, 0.0);
  pi[0] = 1.0;
  double total = 1.0;
  for (std::size_t k = 1; k < n; ++k) {
    double mass = 0.0;
    for (std::size_t i = 0; i < k; ++i) mass += pi[i] * rates[i * n + k];
    pi[k] = mass;
    total += mass;
  }
  for (double& p : pi) p /= total;
  return pi;
}

// Regularized Bradley-Terry log-likelihood at theta.
double log_likelihood(const WinMatrix& wm, double reg, const std::vector<double>& theta) {
  const std::size_t n = wm.size();
  double ll = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double wins = wm.win_mass(i, j) + reg;
      if (wins == 0.0) continue;
      ll += wins * (theta[i] - log_sum_exp2(theta[i], theta[j]));
    }
  }
  return ll;
}

}  // namespace

LatentScale fit_bt_ilsr(const WinMatrix& wm, const BtSettings& settings) {
  const std::size_t n = wm.size();
  if (n == 0) throw ValidationError("fit_bt_ilsr: empty win matrix");
  if (settings.reg < 0.0) throw ValidationError("fit_bt_ilsr: reg must be >= 0");
  if (settings.reg == 0.0 && !graph_connected(wm))
    throw ComputationError("fit_bt_ilsr: comparison graph disconnected and reg == 0");

  LatentScale scale;
  scale.ids = wm.ids();
  scale.theta.assign(n, 0.0);
  if (n == 1) {
    scale.converged = true;
    scale.ranking = wm.ids();
    return scale;
  }

  std::vector<double> strength(n, 1.0 / static_cast<double>(n));  // e^theta, normalized
  std::vector<double> chain(n * n);

  for (int iter = 1; iter <= settings.max_iter; ++iter) {
    // Transition rates j -> i carry the win mass of i over j, reweighted by
    // the current strengths.
    std::fill(chain.begin(), chain.end(), 0.0);
    double max_rate = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        const double wins = wm.win_mass(i, j) + settings.reg;
        if (wins == 0.0) continue;
        const double rate = wins / (strength[i] + strength[j]);
        chain[j * n + i] = rate;
        max_rate = std::max(max_rate, rate);
      }
    }
    if (!(max_rate > 0.0))
      throw ComputationError("fit_bt_ilsr: no comparisons to fit");
    for (double& r : chain) r /= max_rate;  // stationary distribution is scale-free

    const std::vector<double> pi = stationary_gth(chain, n);

    std::vector<double> theta_new(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double p = pi[i];
      if (!std::isfinite(p) || p <= 0.0)
        throw ComputationError("fit_bt_ilsr: stationary mass underflow (item '" + wm.ids()[i] +
                               "'); the win data separate items beyond numeric range");
      theta_new[i] = std::log(p);
    }
    zero_mean(theta_new);
    for (double t : theta_new)
      if (!std::isfinite(t)) throw ComputationError("fit_bt_ilsr: non-finite strength estimate");

    double step = 0.0;
    for (std::size_t i = 0; i < n; ++i) step = std::max(step, std::abs(theta_new[i] - scale.theta[i]));

    scale.theta = theta_new;
    scale.iterations = iter;
    scale.loglik_history.push_back(log_likelihood(wm, settings.reg, scale.theta));
#ifndef NDEBUG
    // Spectral steps ascend the regularized likelihood on every instance we
    // have seen; a real drop indicates a broken rate matrix.
    if (scale.loglik_history.size() >= 2) {
      const double prev = scale.loglik_history[scale.loglik_history.size() - 2];
      const double cur = scale.loglik_history.back();
      assert(cur >= prev - 1e-9 * (1.0 + std::abs(prev)));
    }
#endif
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      strength[i] = std::exp(scale.theta[i]);
      total += strength[i];
    }
    for (double& s : strength) s /= total;

    if (step < settings.tol) {
      scale.converged = true;
      break;
    }
  }

  scale.ranking = ranking_of(scale.ids, scale.theta);
  return scale;
}

std::vector<double> probability_matrix(const LatentScale& scale) {
  const std::size_t n = scale.ids.size();
  std::vector<double> p(n * n, 0.5);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      p[i * n + j] = 1.0 / (1.0 + std::exp(scale.theta[j] - scale.theta[i]));
    }
  }
  return p;
}

LatentScale random_baseline(std::vector<std::string> ids) {
  LatentScale scale;
  scale.theta.assign(ids.size(), 0.0);
  scale.ids = std::move(ids);
  scale.ranking = ranking_of(scale.ids, scale.theta);
  scale.converged = true;
  return scale;
}

LatentScale worst_case_baseline(const LatentScale& human_scale) {
  LatentScale scale;
  scale.ids = human_scale.ids;
  scale.theta.reserve(human_scale.theta.size());
  for (double t : human_scale.theta) scale.theta.push_back(-t);
  zero_mean(scale.theta);
  scale.ranking = ranking_of(scale.ids, scale.theta);
  scale.converged = true;
  return scale;
}

}  // namespace stanceval
