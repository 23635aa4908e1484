#pragma once

#include <vector>

#include "dfl/types.hpp"

namespace dfl {

/// Numerical rank with enough context to audit the cut.
struct RankResult {
  Index rank = 0;
  Index rows = 0;
  Index cols = 0;
  /// Descending.
  std::vector<double> singular_values;
  /// σ_rank / σ_{rank+1}; +inf when nothing lies below the cut (or it is exactly zero).
  double gap_ratio = 0.0;
  double tolerance_used = 0.0;
  /// Rank and gap ratio of the plain threshold cut σ_j > τ. They differ from
  /// rank/gap_ratio only when the gap fallback moved the cut.
  Index threshold_rank = 0;
  double threshold_gap_ratio = 0.0;
  bool gap_adjusted = false;

  Index nullity() const { return cols - rank; }
};

/// Singular values of A, descending. Throws NumericalError on LAPACK failure.
std::vector<double> singular_values(const CMatrix& A);

/// rank = #{σ_j > τ}, τ = rel_tol · σ_1 · max(rows, cols). A zero matrix has
/// rank 0.
RankResult numerical_rank(const CMatrix& A, double rel_tol);

/// Like numerical_rank, but when the threshold cut is indecisive (gap ratio
/// below decisive_gap) the cut moves to the largest gap ratio among singular
/// values above the roundoff floor ε·σ_1·max(rows, cols), provided that gap
/// is itself at least decisive_gap. A cut below the smallest singular value
/// counts as a gap against that floor. decisive_gap <= 0 disables the fallback.
RankResult numerical_rank(const CMatrix& A, double rel_tol, double decisive_gap);

struct BorderedSolution {
  CVector x;
  /// ‖[J; R]x - [0; d]‖_2.
  double residual = 0.0;
};

/// Least-squares solution of [J; R]·x = [0; d] by Householder QR. Throws
/// NumericalError when the residual exceeds tol·(1 + ‖d‖_2).
BorderedSolution solve_bordered(const CMatrix& J, const CMatrix& R, const CVector& d, double tol);

/// [top; bottom].
CMatrix vstack(const CMatrix& top, const CMatrix& bottom);

}  // namespace dfl
