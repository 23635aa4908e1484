#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "dfl/linalg.hpp"
#include "dfl/system.hpp"

namespace dfl {

struct DeflationConfig {
  std::size_t max_steps = 3;
  std::uint64_t rng_seed = 0;
  double rank_rel_tol = 1e-8;
  double bordered_residual_tol = 1e-8;
  int max_border_retries = 3;
  /// ‖F(x)‖_∞ at or below this counts as a solution.
  double solution_tol = 1e-6;
  /// Rank cuts whose gap ratio falls below this are flagged borderline.
  double borderline_gap = 1e3;
  /// Stop once n_{i+1} = n_i has been seen twice in a row.
  bool early_stop = false;
  /// Run the first-columns nullity diagnostic at every level.
  bool check_first_columns = true;
  /// Move an indecisive threshold cut to a decisive singular-value gap
  /// (see numerical_rank); borderline_gap is the decisiveness threshold.
  bool gap_fallback = true;

  void validate() const;
};

/// numerical_rank with the tolerance and gap policy of cfg.
RankResult level_rank(const CMatrix& A, const DeflationConfig& cfg);

struct LevelRecord;
using LevelCallback = std::function<void(const LevelRecord&)>;

/// F_{i+1}(X, Y) = [F_i(X); J_i(X)·Y; R·Y - d] on top of a child system F_i.
class DeflatedSystem final : public DeflatableSystem {
 public:
  DeflatedSystem(SystemPtr child, CMatrix border, CVector rhs, int level);

  const DeflatableSystem& child() const { return *child_; }
  const SystemPtr& child_ptr() const { return child_; }
  const CMatrix& border() const { return border_; }
  const CVector& rhs() const { return rhs_; }
  int level() const { return level_; }

  Index n_vars() const override { return 2 * child_->n_vars(); }
  Index n_eqs() const override { return 2 * child_->n_eqs() + border_.rows(); }
  /// J_i(X)·Y has the same degree as F_i, so deflation never raises the degree.
  unsigned degree_bound() const override { return std::max(child_->degree_bound(), 1u); }

  CVector directional(const CVector& x, std::span<const CVector> dirs) const override;
  /// Block form, with child actions D_k and directions (U_j, V_j):
  ///   [ D_k(X;U)                                   0        ]
  ///   [ D_{k+1}(X;Y,U) + Σ_j D_k(X;V_j,U\U_j)      D_k(X;U) ]
  ///   [ 0                                          R if k=0 ]
  CMatrix directional_jacobian(const CVector& x, std::span<const CVector> dirs) const override;

 private:
  SystemPtr child_;
  CMatrix border_;
  CVector rhs_;
  int level_;
};

struct Border {
  CMatrix R;
  CVector d;
  int attempts = 0;
};

/// Draws R (rows x J.cols()) and d (rows) with independent standard complex
/// Gaussian entries, redrawing until [J; R] has full column rank. Throws
/// DegenerateInputError after cfg.max_border_retries failed redraws.
Border draw_border(std::mt19937_64& rng, Index rows, const CMatrix& J,
                   const DeflationConfig& cfg);

struct DeflationStep {
  std::shared_ptr<const DeflatedSystem> system;
  /// (x, x_new), doubled length.
  CVector point;
  /// Jacobian of the new system at the new point, and its rank.
  CMatrix jacobian;
  RankResult rank;
  double bordered_residual = 0.0;
  int border_attempts = 0;
};

/// One deflation step from a point whose Jacobian and rank are already known.
DeflationStep deflate_once(const SystemPtr& sys, const CVector& x, const CMatrix& J,
                           const RankResult& rank, std::mt19937_64& rng,
                           const DeflationConfig& cfg);

/// One deflation step; computes J and n_i itself and seeds its own RNG from
/// cfg.rng_seed. Throws NotASolutionError if ‖F(x)‖_∞ > cfg.solution_tol.
DeflationStep deflate_once(const SystemPtr& sys, const CVector& x, const DeflationConfig& cfg);

/// Block Jacobian of a deflated system:
///   [[J_c(X), 0], [∂_X(J_c(X)·Y), J_c(X)], [0, R]].
CMatrix jac_of_deflated(const DeflatedSystem& ds, const CVector& point);
/// ∂_{(X,Y)}(J(X,Y)·(U,V)).
CMatrix djvp_of_deflated(const DeflatedSystem& ds, const CVector& point, const CVector& dir);
/// J(∇_{(U,V)} ∇_{(P,Q)} F, (X,Y)).
CMatrix t3_of_deflated(const DeflatedSystem& ds, const CVector& point, const CVector& dir1,
                       const CVector& dir2);

/// n - rank(first n columns of J_i), with n the base dimension. Since the
/// other 2^i n - n columns add at most that much rank, this never exceeds n_i.
Index first_columns_nullity(const CMatrix& level_jacobian, Index base_vars, double rank_rel_tol,
                            double decisive_gap = 0.0);

/// first_columns_nullity == n_i. Holds at level 0 and in many examples, but
/// not in general: the column spaces of the first n and the remaining
/// columns can intersect.
bool first_columns_nullity_check(const CMatrix& level_jacobian, Index base_vars, Index nullity,
                                 double rank_rel_tol, double decisive_gap = 0.0);
bool first_columns_nullity_check(const DeflatableSystem& sys, const CVector& point,
                                 Index base_vars, double rank_rel_tol, double decisive_gap = 0.0);

struct LevelRecord {
  int level = 0;
  Index rows = 0;  // M_i
  Index cols = 0;  // N_i
  RankResult rank;
  /// The threshold cut had gap ratio below cfg.borderline_gap.
  bool borderline = false;
  /// Residual of the bordered solve that produced this level (0 at level 0).
  double bordered_residual = 0.0;
  int border_attempts = 0;
  /// First-columns diagnostic; true and -1 when it was not run.
  bool first_columns_ok = true;
  Index first_columns_nullity = -1;
  double seconds = 0.0;

  Index nullity() const { return rank.nullity(); }
};

struct DeflationReport {
  std::vector<Index> sequence;
  std::vector<LevelRecord> levels;
  std::uint64_t seed = 0;
  /// ‖F(x)‖_∞ at the input point.
  double input_residual = 0.0;
  bool complete = true;
  /// Set when complete is false.
  std::string error;
  /// Some level had n_{i+1} > n_i.
  bool monotonicity_violation = false;
  /// N_i = 2^i n and M_{i+1} = 2 M_i + n_i held at every level.
  bool bookkeeping_ok = true;
  double total_seconds = 0.0;

  bool any_borderline() const;
};

/// Runs up to cfg.max_steps deflation steps and records (n_0, ..., n_s).
/// Throws NotASolutionError if the input is not a zero; a failure at a later
/// level returns the levels computed so far with complete = false.
DeflationReport deflation_sequence(const SystemPtr& sys, const CVector& x,
                                   const DeflationConfig& cfg,
                                   const LevelCallback& on_level = {});

}  // namespace dfl
