#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bregaccel/model.hpp"

namespace bregaccel {

/// Per-period simple returns, one row per period and one column per asset.
struct ReturnPanel {
  std::vector<std::string> asset_names;
  std::vector<std::string> periods;
  Matrix returns;

  Index num_periods() const { return returns.rows(); }
  Index num_assets() const { return returns.cols(); }
  void validate() const;
};

/// Removes the k columns with the largest full-sample standard deviation.
ReturnPanel drop_most_volatile(const ReturnPanel& panel, int k);

enum class CovarianceDivisor { unbiased, window };

struct MomentOptions {
  Index window = 60;
  Index stride = 12;
  /// Row index of the first rebalancing date; defaults to `window`.
  std::optional<Index> first_rebalance;
  CovarianceDivisor divisor = CovarianceDivisor::unbiased;
  /// Added to the diagonal of every covariance block when positive.
  double ridge = 0.0;
};

struct Moments {
  std::vector<Matrix> C_blocks;
  std::vector<Vector> r;
  /// Row index of each rebalancing date.
  std::vector<Index> rebalance_rows;
  double ridge = 0.0;
};

/// Sample mean and covariance over the `window` rows just before each rebalancing date.
/// Throws InvalidProblemError naming the period whose covariance is not positive definite.
Moments estimate_moments(const ReturnPanel& panel, Index m, const MomentOptions& opts);

struct PortfolioModel {
  std::vector<Matrix> C_blocks;
  std::vector<Vector> r;
  double xi_ini = 1.0;
  double xi_fin = 1.0;
  double tau1 = 0.0;
  double tau2 = 0.0;
  ConstrainedL1Problem assembled;

  Index num_assets() const { return C_blocks.empty() ? 0 : C_blocks.front().rows(); }
  Index num_periods() const { return static_cast<Index>(C_blocks.size()); }
};

/// Forward differences u_{j+1} - u_j stacked over periods, (n - n_a) x n.
Matrix difference_matrix(Index n_assets, Index m);

/// Budget, self-financing and target-wealth rows, (m + 1) x n.
Matrix constraint_matrix(const std::vector<Vector>& r);

PortfolioModel build_model(std::vector<Matrix> C_blocks, std::vector<Vector> r, double xi_ini,
                           double xi_fin, double tau1, double tau2);

struct NaivePortfolio {
  double xi_naive = 0.0;
  /// Equal split of current wealth at each rebalancing date.
  Vector u;
};

NaivePortfolio naive_wealth(const std::vector<Vector>& r, double xi_ini);

struct PositionStats {
  double ratio = 0.0;
  double density_pct = 0.0;
  int shorts = 0;
  int T_cost = 0;
  int V_norm1 = 0;
  int V_normInf = 0;
};

struct PortfolioMetrics {
  PositionStats thresholded;
  PositionStats raw;
};

/// Change-indicator matrix, n_a x (m - 1); entry (i, j) is 1 when asset i moves by at
/// least eps between periods j and j+1.
Eigen::MatrixXi variation_matrix(const Vector& u, Index n_assets, double eps);

/// Risk ratio against the naive portfolio plus holding and transaction cost proxies.
/// Thresholded statistics zero every |u_i| < eps1 first and use eps2 for changes;
/// raw statistics use exact zero tests. A zero-risk u_opt yields an infinite ratio.
PortfolioMetrics compute_metrics(const Vector& u_opt, const Vector& u_naive, const Matrix& C,
                                 Index n_assets, double eps1 = 1e-4, double eps2 = 1e-4);

}  // namespace bregaccel
