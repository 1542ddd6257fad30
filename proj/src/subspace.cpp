#include "bregaccel/subspace.hpp"

#include <algorithm>
#include <string>

namespace bregaccel {

namespace {

void require_same_size(const Vector& a, const char* a_name, const Vector& b, const char* b_name) {
  if (a.size() != b.size())
    throw DimensionError(a_name, b_name, std::to_string(a.size()) + " vs " + std::to_string(b.size()));
}

double sign_of(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace

ActiveSetPartition partition(const Vector& x) {
  ActiveSetPartition part;
  part.size = x.size();
  for (Index i = 0; i < x.size(); ++i) {
    if (x[i] > 0.0) {
      part.plus.push_back(i);
      part.nonzero.push_back(i);
    } else if (x[i] < 0.0) {
      part.minus.push_back(i);
      part.nonzero.push_back(i);
    } else {
      part.zero.push_back(i);
    }
  }
  return part;
}

Vector min_norm_subgradient(const Vector& grad, const Vector& delta, const ActiveSetPartition& part) {
  require_same_size(grad, "grad", delta, "delta");
  if (part.size != grad.size())
    throw DimensionError("partition", "grad",
                         std::to_string(part.size) + " vs " + std::to_string(grad.size()));
  Vector g = Vector::Zero(grad.size());
  for (Index i : part.plus) g[i] = grad[i] + delta[i];
  for (Index i : part.minus) g[i] = grad[i] - delta[i];
  for (Index i : part.zero) {
    if (grad[i] + delta[i] < 0.0)
      g[i] = grad[i] + delta[i];
    else if (grad[i] - delta[i] > 0.0)
      g[i] = grad[i] - delta[i];
  }
  return g;
}

OptimalityMeasures compute_beta_phi(const Vector& grad, const Vector& delta, const Vector& x) {
  require_same_size(grad, "grad", x, "x");
  require_same_size(delta, "delta", x, "x");
  OptimalityMeasures meas;
  meas.g = min_norm_subgradient(grad, delta, partition(x));
  meas.beta = Vector::Zero(x.size());
  meas.phi = Vector::Zero(x.size());
  for (Index i = 0; i < x.size(); ++i) {
    const double up = grad[i] + delta[i];
    const double down = grad[i] - delta[i];
    if (x[i] == 0.0) {
      if (up < 0.0)
        meas.beta[i] = up;
      else if (down > 0.0)
        meas.beta[i] = down;
    } else if (x[i] > 0.0) {
      meas.phi[i] = std::min(up, std::max(x[i], down));
    } else {
      meas.phi[i] = std::max(down, std::min(x[i], up));
    }
  }
  return meas;
}

StepKind switching_test(const OptimalityMeasures& meas, GammaState& gs) {
  if (meas.beta.norm() <= gs.gamma * meas.phi.norm()) {
    gs.gamma *= gs.decrease;
    return StepKind::accelerate;
  }
  gs.gamma *= gs.increase;
  return StepKind::standard;
}

ReducedQuadratic::ReducedQuadratic(const StackedProblem& sp, SubproblemState state,
                                   std::vector<Index> free, Vector nu)
    : sp_(&sp), state_(std::move(state)), free_(std::move(free)), nu_(std::move(nu)) {
  if (static_cast<Index>(free_.size()) != nu_.size())
    throw DimensionError("free set", "nu",
                         std::to_string(free_.size()) + " vs " + std::to_string(nu_.size()));
  rhs_ = state_.lambda * gather(sp_->apply_Mt(state_.s_k)) - nu_;
}

Vector ReducedQuadratic::scatter(const Vector& w) const {
  Vector x = Vector::Zero(sp_->n_x);
  for (std::size_t j = 0; j < free_.size(); ++j) x[free_[j]] = w[static_cast<Index>(j)];
  return x;
}

Vector ReducedQuadratic::gather(const Vector& x) const {
  Vector w(size());
  for (std::size_t j = 0; j < free_.size(); ++j) w[static_cast<Index>(j)] = x[free_[j]];
  return w;
}

double ReducedQuadratic::value(const Vector& w) const {
  return smooth_value(*sp_, state_, scatter(w)) + nu_.dot(w);
}

Vector ReducedQuadratic::gradient(const Vector& w) const {
  return gather(smooth_value_grad(*sp_, state_, scatter(w)).second) + nu_;
}

Vector ReducedQuadratic::hess_mul(const Vector& w) const {
  const Vector x = scatter(w);
  Vector hx = state_.lambda * sp_->apply_Mt(sp_->apply_M(x));
  hx.head(sp_->n) += 2.0 * (sp_->C_sparse * x.head(sp_->n));
  return gather(hx);
}

ReducedQuadratic restricted_problem(const StackedProblem& sp, const SubproblemState& state,
                                    const ActiveSetPartition& part, const Vector& x) {
  if (x.size() != sp.n_x)
    throw DimensionError("x", "stacked problem",
                         std::to_string(x.size()) + " vs n_x=" + std::to_string(sp.n_x));
  if (part.nonzero.empty())
    throw InvalidProblemError("restricted problem requested on an empty free set");
  Vector nu(static_cast<Index>(part.nonzero.size()));
  for (std::size_t j = 0; j < part.nonzero.size(); ++j) {
    const Index i = part.nonzero[j];
    nu[static_cast<Index>(j)] = sign_of(x[i]) * sp.delta[i];
  }
  return ReducedQuadratic(sp, state, part.nonzero, std::move(nu));
}

CgResult cg_solve(const ReducedQuadratic& reduced, const Vector& w0, double tol_cg, int max_iters) {
  require_same_size(w0, "w0", reduced.rhs(), "reduced rhs");
  return conjugate_gradient([&](const Vector& w) { return reduced.hess_mul(w); }, reduced.rhs(), w0,
                            tol_cg, max_iters);
}

Vector project_onto_face(const Vector& z, const Vector& x_ref) {
  require_same_size(z, "z", x_ref, "x_ref");
  Vector out = Vector::Zero(z.size());
  for (Index i = 0; i < z.size(); ++i) {
    if (x_ref[i] > 0.0)
      out[i] = std::max(0.0, z[i]);
    else if (x_ref[i] < 0.0)
      out[i] = std::min(0.0, z[i]);
  }
  return out;
}

LineSearchResult line_search(const StackedProblem& sp, const SubproblemState& state, const Vector& x_k,
                             const Vector& z_next, double eta) {
  require_same_size(x_k, "x_k", z_next, "z_next");
  const Vector direction = z_next - x_k;

  Vector face_grad = smooth_value_grad(sp, state, x_k).second;
  for (Index i = 0; i < x_k.size(); ++i) {
    if (x_k[i] == 0.0)
      face_grad[i] = 0.0;
    else
      face_grad[i] += sign_of(x_k[i]) * sp.delta[i];
  }

  LineSearchResult out;
  out.h_before = subproblem_objective(sp, state, x_k);
  double alpha = 1.0;
  for (int trial = 0; trial <= kMaxBacktracks; ++trial) {
    Vector candidate = project_onto_face(x_k + alpha * direction, x_k);
    const double h = subproblem_objective(sp, state, candidate);
    if (!std::isfinite(h)) throw NumericalError("line search: non-finite objective");
    const double decrease_bound = eta * face_grad.dot(candidate - x_k);
    if (h - out.h_before <= decrease_bound && h <= out.h_before) {
      out.x = std::move(candidate);
      out.step = alpha;
      out.trials = trial + 1;
      out.h_after = h;
      return out;
    }
    alpha *= 0.5;
  }
  throw LineSearchError("line search: no sufficient decrease after " +
                        std::to_string(kMaxBacktracks) + " halvings");
}

}  // namespace bregaccel
