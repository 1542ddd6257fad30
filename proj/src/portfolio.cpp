#include "bregaccel/portfolio.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "bregaccel/error.hpp"

namespace bregaccel {

void ReturnPanel::validate() const {
  if (static_cast<Index>(asset_names.size()) != returns.cols())
    throw DimensionError("asset names", "return columns",
                         std::to_string(asset_names.size()) + " vs " + std::to_string(returns.cols()));
  if (static_cast<Index>(periods.size()) != returns.rows())
    throw DimensionError("periods", "return rows",
                         std::to_string(periods.size()) + " vs " + std::to_string(returns.rows()));
  for (Index t = 0; t < returns.rows(); ++t)
    for (Index a = 0; a < returns.cols(); ++a)
      if (!std::isfinite(returns(t, a)) || returns(t, a) <= -1.0)
        throw InvalidProblemError("return of " + asset_names[static_cast<std::size_t>(a)] + " at " +
                                  periods[static_cast<std::size_t>(t)] +
                                  " is missing or not above -1");
}

ReturnPanel drop_most_volatile(const ReturnPanel& panel, int k) {
  if (k <= 0) return panel;
  if (k >= panel.num_assets()) throw InvalidProblemError("cannot drop every asset");
  const Index T = panel.num_periods();
  std::vector<std::pair<double, Index>> vol;
  for (Index a = 0; a < panel.num_assets(); ++a) {
    const auto col = panel.returns.col(a);
    const double mean = col.mean();
    const double var = (col.array() - mean).square().sum() / static_cast<double>(std::max<Index>(1, T - 1));
    vol.emplace_back(std::sqrt(var), a);
  }
  // highest volatility first, ties resolved by column order
  std::stable_sort(vol.begin(), vol.end(), [](const auto& l, const auto& r) { return l.first > r.first; });
  std::vector<bool> keep(static_cast<std::size_t>(panel.num_assets()), true);
  for (int i = 0; i < k; ++i) keep[static_cast<std::size_t>(vol[static_cast<std::size_t>(i)].second)] = false;

  ReturnPanel out;
  out.periods = panel.periods;
  out.returns.resize(T, panel.num_assets() - k);
  Index col = 0;
  for (Index a = 0; a < panel.num_assets(); ++a) {
    if (!keep[static_cast<std::size_t>(a)]) continue;
    out.asset_names.push_back(panel.asset_names[static_cast<std::size_t>(a)]);
    out.returns.col(col++) = panel.returns.col(a);
  }
  return out;
}

Moments estimate_moments(const ReturnPanel& panel, Index m, const MomentOptions& opts) {
  if (m < 1) throw InvalidProblemError("at least one rebalancing period is required");
  if (opts.window < 2) throw InvalidProblemError("estimation window must hold at least two periods");
  if (opts.stride < 1) throw InvalidProblemError("rebalancing stride must be positive");
  const Index first = opts.first_rebalance.value_or(opts.window);
  if (first < opts.window)
    throw InvalidProblemError("first rebalancing date leaves fewer than `window` periods of history");
  const Index last = first + (m - 1) * opts.stride;
  if (last > panel.num_periods())
    throw InvalidProblemError("panel has " + std::to_string(panel.num_periods()) +
                              " periods, the rebalancing schedule needs " + std::to_string(last));

  const Index n_a = panel.num_assets();
  const double divisor = opts.divisor == CovarianceDivisor::unbiased
                             ? static_cast<double>(opts.window - 1)
                             : static_cast<double>(opts.window);
  Moments out;
  out.ridge = opts.ridge;
  for (Index j = 0; j < m; ++j) {
    const Index t = first + j * opts.stride;
    const auto window = panel.returns.middleRows(t - opts.window, opts.window);
    Vector mean = window.colwise().mean().transpose();
    const Matrix centered = window.rowwise() - mean.transpose();
    Matrix cov = (centered.transpose() * centered) / divisor;
    cov = 0.5 * (cov + cov.transpose());
    if (opts.ridge > 0.0) cov.diagonal().array() += opts.ridge;
    Eigen::LLT<Matrix> llt(cov);
    bool pd = llt.info() == Eigen::Success;
    if (pd) {
      // LLT accepts semidefinite matrices with exactly zero pivots in some builds
      pd = llt.matrixLLT().diagonal().minCoeff() > 0.0;
    }
    if (!pd || n_a == 0)
      throw InvalidProblemError("covariance of rebalancing period " + std::to_string(j + 1) +
                                " is not positive definite");
    out.C_blocks.push_back(std::move(cov));
    out.r.push_back(std::move(mean));
    out.rebalance_rows.push_back(t);
  }
  return out;
}

Matrix difference_matrix(Index n_assets, Index m) {
  const Index n = n_assets * m;
  Matrix D = Matrix::Zero(n - n_assets, n);
  for (Index i = 0; i < n - n_assets; ++i) {
    D(i, i) = -1.0;
    D(i, i + n_assets) = 1.0;
  }
  return D;
}

Matrix constraint_matrix(const std::vector<Vector>& r) {
  const Index m = static_cast<Index>(r.size());
  if (m == 0) throw InvalidProblemError("at least one period is required");
  const Index n_a = r.front().size();
  Matrix A = Matrix::Zero(m + 1, n_a * m);
  A.block(0, 0, 1, n_a).setOnes();
  for (Index j = 1; j < m; ++j) {
    A.block(j, j * n_a, 1, n_a).setOnes();
    A.block(j, (j - 1) * n_a, 1, n_a) = -(Vector::Ones(n_a) + r[static_cast<std::size_t>(j - 1)]).transpose();
  }
  A.block(m, (m - 1) * n_a, 1, n_a) = (Vector::Ones(n_a) + r.back()).transpose();
  return A;
}

PortfolioModel build_model(std::vector<Matrix> C_blocks, std::vector<Vector> r, double xi_ini,
                           double xi_fin, double tau1, double tau2) {
  const Index m = static_cast<Index>(C_blocks.size());
  if (m < 1) throw InvalidProblemError("at least one period is required");
  if (static_cast<Index>(r.size()) != m)
    throw DimensionError("covariance blocks", "return vectors",
                         std::to_string(m) + " vs " + std::to_string(r.size()));
  const Index n_a = C_blocks.front().rows();
  for (Index j = 0; j < m; ++j) {
    const auto& Cj = C_blocks[static_cast<std::size_t>(j)];
    if (Cj.rows() != n_a || Cj.cols() != n_a)
      throw DimensionError("covariance block " + std::to_string(j + 1), "covariance block 1",
                           "blocks must all be " + std::to_string(n_a) + "x" + std::to_string(n_a));
    if (r[static_cast<std::size_t>(j)].size() != n_a)
      throw DimensionError("return vector " + std::to_string(j + 1), "covariance block 1",
                           "expected " + std::to_string(n_a) + " entries");
  }

  PortfolioModel model;
  model.xi_ini = xi_ini;
  model.xi_fin = xi_fin;
  model.tau1 = tau1;
  model.tau2 = tau2;

  const Index n = n_a * m;
  ConstrainedL1Problem& p = model.assembled;
  p.C = Matrix::Zero(n, n);
  for (Index j = 0; j < m; ++j) p.C.block(j * n_a, j * n_a, n_a, n_a) = C_blocks[static_cast<std::size_t>(j)];
  p.tau1 = tau1;
  p.tau2 = tau2;
  p.D = difference_matrix(n_a, m);
  p.A = constraint_matrix(r);
  p.b = Vector::Zero(m + 1);
  p.b[0] = xi_ini;
  p.b[m] = xi_fin;
  p.validate();

  model.C_blocks = std::move(C_blocks);
  model.r = std::move(r);
  return model;
}

NaivePortfolio naive_wealth(const std::vector<Vector>& r, double xi_ini) {
  const Index m = static_cast<Index>(r.size());
  if (m < 1) throw InvalidProblemError("at least one period is required");
  const Index n_a = r.front().size();
  NaivePortfolio out;
  out.u.resize(n_a * m);
  double wealth = xi_ini;
  for (Index j = 0; j < m; ++j) {
    const double share = wealth / static_cast<double>(n_a);
    out.u.segment(j * n_a, n_a).setConstant(share);
    wealth = share * (Vector::Ones(n_a) + r[static_cast<std::size_t>(j)]).sum();
  }
  out.xi_naive = wealth;
  return out;
}

Eigen::MatrixXi variation_matrix(const Vector& u, Index n_assets, double eps) {
  const Index m = u.size() / n_assets;
  Eigen::MatrixXi V = Eigen::MatrixXi::Zero(n_assets, std::max<Index>(0, m - 1));
  for (Index j = 0; j + 1 < m; ++j)
    for (Index i = 0; i < n_assets; ++i) {
      const double change = std::abs(u[j * n_assets + i] - u[(j + 1) * n_assets + i]);
      V(i, j) = eps > 0.0 ? (change >= eps ? 1 : 0) : (change != 0.0 ? 1 : 0);
    }
  return V;
}

namespace {

PositionStats stats_of(const Vector& u, double risk_naive, const Matrix& C, Index n_assets, double eps2) {
  PositionStats st;
  const double risk = u.dot(C * u);
  st.ratio = risk > 0.0 ? risk_naive / risk : std::numeric_limits<double>::infinity();
  const Index active = (u.array() != 0.0).count();
  st.density_pct = u.size() > 0 ? 100.0 * static_cast<double>(active) / static_cast<double>(u.size()) : 0.0;
  st.shorts = static_cast<int>((u.array() < 0.0).count());
  const Eigen::MatrixXi V = variation_matrix(u, n_assets, eps2);
  st.T_cost = V.sum();
  st.V_norm1 = V.cols() > 0 ? V.colwise().sum().maxCoeff() : 0;
  st.V_normInf = V.cols() > 0 ? V.rowwise().sum().maxCoeff() : 0;
  return st;
}

}  // namespace

PortfolioMetrics compute_metrics(const Vector& u_opt, const Vector& u_naive, const Matrix& C,
                                 Index n_assets, double eps1, double eps2) {
  if (!(eps1 > 0.0) || !(eps2 > 0.0)) throw InvalidProblemError("thresholds must be positive");
  if (u_opt.size() != u_naive.size() || u_opt.size() != C.rows())
    throw DimensionError("u_opt", "C", std::to_string(u_opt.size()) + " vs " + std::to_string(C.rows()));
  if (n_assets < 1 || u_opt.size() % n_assets != 0)
    throw DimensionError("u_opt", "asset count",
                         std::to_string(u_opt.size()) + " not a multiple of " + std::to_string(n_assets));
  const double risk_naive = u_naive.dot(C * u_naive);

  Vector trimmed = u_opt;
  for (Index i = 0; i < trimmed.size(); ++i)
    if (std::abs(trimmed[i]) < eps1) trimmed[i] = 0.0;

  PortfolioMetrics out;
  out.raw = stats_of(u_opt, risk_naive, C, n_assets, 0.0);
  out.thresholded = stats_of(trimmed, risk_naive, C, n_assets, eps2);
  return out;
}

}  // namespace bregaccel
