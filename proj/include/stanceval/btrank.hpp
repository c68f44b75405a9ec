#pragma once

#include <string>
#include <vector>

#include "stanceval/comparisons.hpp"

namespace stanceval {

struct BtSettings {
  double reg = 0.01;    // pseudo-wins added in both directions for every pair
  double tol = 1e-8;    // max |theta step| convergence threshold
  int max_iter = 100;
};

// Fitted Bradley-Terry strengths on a latent scale, zero-mean normalized.
// The ranking orders ids by descending theta with ties broken by ascending
// id, so it is total and deterministic.
struct LatentScale {
  std::vector<std::string> ids;
  std::vector<double> theta;
  std::vector<std::string> ranking;
  bool converged = false;
  int iterations = 0;
  std::vector<double> loglik_history;  // regularized log-likelihood per step
};

// Maximum-likelihood Bradley-Terry fit via iterative Luce spectral ranking:
// each step builds a Markov chain whose j->i transition rate aggregates the
// win mass of i over j weighted by 1/(e^theta_i + e^theta_j) under the
// current estimate, solves for its stationary distribution, and takes its
// log as the next theta. With reg == 0 the comparison graph must be
// connected; reg > 0 makes it complete.
LatentScale fit_bt_ilsr(const WinMatrix& wm, const BtSettings& settings = {});

// Row-major n x n matrix of p(i beats j) = e^theta_i / (e^theta_i + e^theta_j),
// defined for all pairs (missing comparisons are imputed); diagonal is 0.5.
std::vector<double> probability_matrix(const LatentScale& scale);

// Equal strengths: uniform 0.5 probabilities, ranking in ascending id order.
LatentScale random_baseline(std::vector<std::string> ids);

// Negated human strengths: reversed ranking (absent ties) and complemented
// probabilities.
LatentScale worst_case_baseline(const LatentScale& human_scale);

}  // namespace stanceval
