#include "dfl/deflation.hpp"

#include <array>
#include <chrono>
#include <sstream>

namespace dfl {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

CMatrix gaussian_matrix(std::mt19937_64& rng, Index rows, Index cols) {
  std::normal_distribution<double> normal(0.0, 1.0);
  CMatrix out(rows, cols);
  // Column-major fill, real part then imaginary part, so a seed pins every entry.
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      out(i, j) = Complex{re, im};
    }
  }
  return out;
}

double max_abs(const CVector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

}  // namespace

void DeflationConfig::validate() const {
  if (!(rank_rel_tol > 0.0)) throw InputError("rank_rel_tol must be positive");
  if (!(bordered_residual_tol > 0.0)) throw InputError("bordered_residual_tol must be positive");
  if (!(solution_tol > 0.0)) throw InputError("solution_tol must be positive");
  if (max_border_retries < 0) throw InputError("max_border_retries must be nonnegative");
}

DeflatedSystem::DeflatedSystem(SystemPtr child, CMatrix border, CVector rhs, int level)
    : child_(std::move(child)), border_(std::move(border)), rhs_(std::move(rhs)), level_(level) {
  if (!child_) throw InputError("DeflatedSystem: null child");
  if (border_.cols() != child_->n_vars()) {
    throw InputError("DeflatedSystem: border has " + std::to_string(border_.cols()) +
                     " columns, child has " + std::to_string(child_->n_vars()) + " variables");
  }
  if (rhs_.size() != border_.rows()) throw InputError("DeflatedSystem: border/rhs length mismatch");
}

CVector DeflatedSystem::directional(const CVector& x, std::span<const CVector> dirs) const {
  check_point(x, dirs);
  const Index Nc = child_->n_vars(), Mc = child_->n_eqs();
  const std::size_t k = dirs.size();
  CVector out = CVector::Zero(n_eqs());
  if (k > degree_bound()) return out;

  const CVector X = x.head(Nc), Y = x.tail(Nc);
  std::vector<CVector> U, V;
  for (const auto& d : dirs) {
    U.push_back(d.head(Nc));
    V.push_back(d.tail(Nc));
  }

  out.head(Mc) = child_->directional(X, U);

  // Rows of J_c(X)·Y: ∇_U(∇_Y F_c) plus one term per direction's Y-part.
  if (k + 1 <= child_->degree_bound()) {
    std::vector<CVector> with_y{Y};
    with_y.insert(with_y.end(), U.begin(), U.end());
    out.segment(Mc, Mc) += child_->directional(X, with_y);
  }
  for (std::size_t j = 0; j < k; ++j) {
    std::vector<CVector> swapped = U;
    swapped[j] = V[j];
    out.segment(Mc, Mc) += child_->directional(X, swapped);
  }

  if (k == 0) {
    out.tail(border_.rows()) = border_ * Y - rhs_;
  } else if (k == 1) {
    out.tail(border_.rows()) = border_ * V[0];
  }
  return out;
}

CMatrix DeflatedSystem::directional_jacobian(const CVector& x,
                                             std::span<const CVector> dirs) const {
  check_point(x, dirs);
  const Index Nc = child_->n_vars(), Mc = child_->n_eqs();
  const std::size_t k = dirs.size();
  CMatrix out = CMatrix::Zero(n_eqs(), n_vars());
  if (k + 1 > degree_bound()) return out;

  const CVector X = x.head(Nc), Y = x.tail(Nc);
  std::vector<CVector> U, V;
  for (const auto& d : dirs) {
    U.push_back(d.head(Nc));
    V.push_back(d.tail(Nc));
  }

  {
    const CMatrix diag = child_->directional_jacobian(X, U);
    out.block(0, 0, Mc, Nc) = diag;
    out.block(Mc, Nc, Mc, Nc) = diag;
  }

  auto lower_left = out.block(Mc, 0, Mc, Nc);
  if (k + 2 <= child_->degree_bound()) {
    std::vector<CVector> with_y{Y};
    with_y.insert(with_y.end(), U.begin(), U.end());
    lower_left += child_->directional_jacobian(X, with_y);
  }
  for (std::size_t j = 0; j < k; ++j) {
    std::vector<CVector> swapped = U;
    swapped[j] = V[j];
    lower_left += child_->directional_jacobian(X, swapped);
  }

  if (k == 0) out.block(2 * Mc, Nc, border_.rows(), Nc) = border_;
  return out;
}

RankResult level_rank(const CMatrix& A, const DeflationConfig& cfg) {
  return numerical_rank(A, cfg.rank_rel_tol, cfg.gap_fallback ? cfg.borderline_gap : 0.0);
}

Border draw_border(std::mt19937_64& rng, Index rows, const CMatrix& J, const DeflationConfig& cfg) {
  const Index cols = J.cols();
  if (rows < 0) throw InputError("draw_border: negative row count");
  for (int attempt = 1; attempt <= cfg.max_border_retries + 1; ++attempt) {
    Border b;
    b.R = gaussian_matrix(rng, rows, cols);
    b.d = gaussian_matrix(rng, rows, 1).col(0);
    b.attempts = attempt;
    const CMatrix stacked = vstack(J, b.R);
    if (cols == 0) return b;
    if (stacked.rows() >= cols && level_rank(stacked, cfg).rank == cols) return b;
  }
  std::ostringstream os;
  os << "bordered matrix [J; R] stayed rank deficient after " << cfg.max_border_retries + 1
     << " draws (J is " << J.rows() << "x" << J.cols() << ", " << rows
     << " border rows); the nullity estimate is probably wrong";
  throw DegenerateInputError(os.str());
}

DeflationStep deflate_once(const SystemPtr& sys, const CVector& x, const CMatrix& J,
                           const RankResult& rank, std::mt19937_64& rng,
                           const DeflationConfig& cfg) {
  const Index nullity = rank.nullity();
  const auto* parent = dynamic_cast<const DeflatedSystem*>(sys.get());
  const int level = parent ? parent->level() + 1 : 1;

  DeflationStep step;
  Border border;
  BorderedSolution sol;
  int total_attempts = 0;
  for (int round = 0;; ++round) {
    border = draw_border(rng, nullity, J, cfg);
    total_attempts += border.attempts;
    try {
      sol = solve_bordered(J, border.R, border.d, cfg.bordered_residual_tol);
      break;
    } catch (const NumericalError&) {
      if (round >= cfg.max_border_retries) throw;
    }
  }

  step.system = std::make_shared<DeflatedSystem>(sys, std::move(border.R), std::move(border.d),
                                                 level);
  step.point.resize(2 * x.size());
  step.point << x, sol.x;
  step.bordered_residual = sol.residual;
  step.border_attempts = total_attempts;
  step.jacobian = step.system->jac(step.point);
  step.rank = level_rank(step.jacobian, cfg);
  return step;
}

DeflationStep deflate_once(const SystemPtr& sys, const CVector& x, const DeflationConfig& cfg) {
  cfg.validate();
  const double res = max_abs(sys->eval(x));
  if (!(res <= cfg.solution_tol)) {
    std::ostringstream os;
    os << "point is not a solution: residual " << res << " > " << cfg.solution_tol;
    throw NotASolutionError(os.str(), res);
  }
  std::mt19937_64 rng(cfg.rng_seed);
  const CMatrix J = sys->jac(x);
  return deflate_once(sys, x, J, level_rank(J, cfg), rng, cfg);
}

CMatrix jac_of_deflated(const DeflatedSystem& ds, const CVector& point) { return ds.jac(point); }

CMatrix djvp_of_deflated(const DeflatedSystem& ds, const CVector& point, const CVector& dir) {
  return ds.djvp(point, dir);
}

CMatrix t3_of_deflated(const DeflatedSystem& ds, const CVector& point, const CVector& dir1,
                       const CVector& dir2) {
  return ds.t3(point, dir1, dir2);
}

Index first_columns_nullity(const CMatrix& level_jacobian, Index base_vars, double rank_rel_tol,
                            double decisive_gap) {
  if (base_vars > level_jacobian.cols()) {
    throw InputError("first_columns_nullity: base dimension exceeds Jacobian width");
  }
  const CMatrix first = level_jacobian.leftCols(base_vars);
  return base_vars - numerical_rank(first, rank_rel_tol, decisive_gap).rank;
}

bool first_columns_nullity_check(const CMatrix& level_jacobian, Index base_vars, Index nullity,
                                 double rank_rel_tol, double decisive_gap) {
  return first_columns_nullity(level_jacobian, base_vars, rank_rel_tol, decisive_gap) == nullity;
}

bool first_columns_nullity_check(const DeflatableSystem& sys, const CVector& point,
                                 Index base_vars, double rank_rel_tol, double decisive_gap) {
  const CMatrix J = sys.jac(point);
  const Index nullity = numerical_rank(J, rank_rel_tol, decisive_gap).nullity();
  return first_columns_nullity_check(J, base_vars, nullity, rank_rel_tol, decisive_gap);
}

bool DeflationReport::any_borderline() const {
  for (const auto& l : levels)
    if (l.borderline) return true;
  return false;
}

DeflationReport deflation_sequence(const SystemPtr& sys, const CVector& x,
                                   const DeflationConfig& cfg, const LevelCallback& on_level) {
  cfg.validate();
  const auto start = Clock::now();
  DeflationReport report;
  report.seed = cfg.rng_seed;

  if (x.size() != sys->n_vars()) {
    throw InputError("deflation_sequence: point has length " + std::to_string(x.size()) +
                     ", system has " + std::to_string(sys->n_vars()) + " variables");
  }
  report.input_residual = max_abs(sys->eval(x));
  if (!(report.input_residual <= cfg.solution_tol)) {
    std::ostringstream os;
    os << "point is not a solution: residual " << report.input_residual << " > "
       << cfg.solution_tol;
    throw NotASolutionError(os.str(), report.input_residual);
  }

  const Index base_vars = sys->n_vars();
  auto record = [&](int level, const CMatrix& J, RankResult rank, double bordered_residual,
                    int attempts, Clock::time_point level_start) {
    LevelRecord rec;
    rec.level = level;
    rec.rows = J.rows();
    rec.cols = J.cols();
    rec.borderline = rank.threshold_gap_ratio < cfg.borderline_gap;
    rec.bordered_residual = bordered_residual;
    rec.border_attempts = attempts;
    if (cfg.check_first_columns) {
      rec.first_columns_nullity = first_columns_nullity(
          J, base_vars, cfg.rank_rel_tol, cfg.gap_fallback ? cfg.borderline_gap : 0.0);
      rec.first_columns_ok = rec.first_columns_nullity == rank.nullity();
    }
    rec.rank = std::move(rank);
    rec.seconds = seconds_since(level_start);
    report.sequence.push_back(rec.nullity());
    report.levels.push_back(std::move(rec));
    if (on_level) on_level(report.levels.back());
  };

  std::mt19937_64 rng(cfg.rng_seed);
  SystemPtr current = sys;
  CVector point = x;
  CMatrix J;
  RankResult rank;

  try {
    const auto level_start = Clock::now();
    J = sys->jac(x);
    rank = level_rank(J, cfg);
    record(0, J, rank, 0.0, 0, level_start);

    for (std::size_t i = 1; i <= cfg.max_steps; ++i) {
      const auto t = Clock::now();
      DeflationStep step = deflate_once(current, point, J, rank, rng, cfg);
      const LevelRecord& prev = report.levels.back();

      if (step.jacobian.cols() != (Index{1} << i) * base_vars ||
          step.jacobian.rows() != 2 * prev.rows + prev.nullity()) {
        report.bookkeeping_ok = false;
      }

      current = step.system;
      point = std::move(step.point);
      J = std::move(step.jacobian);
      rank = step.rank;
      record(static_cast<int>(i), J, step.rank, step.bordered_residual, step.border_attempts, t);

      const auto& seq = report.sequence;
      const std::size_t s = seq.size();
      if (seq[s - 1] > seq[s - 2]) report.monotonicity_violation = true;
      if (cfg.early_stop && s >= 3 && seq[s - 1] == seq[s - 2] && seq[s - 2] == seq[s - 3]) break;
    }
  } catch (const NotASolutionError&) {
    throw;
  } catch (const Error& e) {
    report.complete = false;
    report.error = e.what();
  }

  report.total_seconds = seconds_since(start);
  return report;
}

}  // namespace dfl
