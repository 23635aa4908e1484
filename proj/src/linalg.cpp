#include "dfl/linalg.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

namespace dfl {

namespace {

std::string shape_string(const CMatrix& A) {
  std::ostringstream os;
  os << A.rows() << "x" << A.cols();
  return os.str();
}

}  // namespace

std::vector<double> singular_values(const CMatrix& A) {
  const Index k = std::min(A.rows(), A.cols());
  std::vector<double> s(static_cast<std::size_t>(k));
  if (k == 0) return s;

  CMatrix work = A;  // destroyed by zgesdd
  const lapack_int info = LAPACKE_zgesdd(
      LAPACK_COL_MAJOR, 'N', static_cast<lapack_int>(work.rows()),
      static_cast<lapack_int>(work.cols()), work.data(), static_cast<lapack_int>(work.rows()),
      s.data(), nullptr, 1, nullptr, 1);
  if (info != 0) {
    std::ostringstream os;
    os << "SVD of " << shape_string(A) << " matrix failed (zgesdd info " << info << ")";
    throw NumericalError(os.str());
  }
  return s;
}

namespace {

double gap_at(const std::vector<double>& s, std::size_t r) {
  if (r == 0 || r >= s.size() || s[r] == 0.0) return std::numeric_limits<double>::infinity();
  return s[r - 1] / s[r];
}

}  // namespace

RankResult numerical_rank(const CMatrix& A, double rel_tol) { return numerical_rank(A, rel_tol, 0.0); }

RankResult numerical_rank(const CMatrix& A, double rel_tol, double decisive_gap) {
  if (A.size() == 0) throw InputError("numerical_rank: empty matrix");
  RankResult out;
  out.rows = A.rows();
  out.cols = A.cols();
  out.singular_values = singular_values(A);

  const auto& s = out.singular_values;
  const double sigma1 = s.front();
  const double dim = static_cast<double>(std::max(A.rows(), A.cols()));
  out.tolerance_used = rel_tol * sigma1 * dim;
  if (sigma1 == 0.0) {
    out.rank = 0;
  } else {
    out.rank = static_cast<Index>(
        std::count_if(s.begin(), s.end(), [&](double v) { return v > out.tolerance_used; }));
  }
  out.gap_ratio = gap_at(s, static_cast<std::size_t>(out.rank));
  out.threshold_rank = out.rank;
  out.threshold_gap_ratio = out.gap_ratio;

  if (decisive_gap <= 0.0 || sigma1 == 0.0 || out.gap_ratio >= decisive_gap) return out;

  const double floor = std::numeric_limits<double>::epsilon() * sigma1 * dim;
  std::size_t best = 0;
  double best_gap = 0.0;
  for (std::size_t j = 1; j <= s.size() && s[j - 1] > floor; ++j) {
    const double below = j < s.size() ? std::max(s[j], floor) : floor;
    const double g = s[j - 1] / below;
    if (g > best_gap) {
      best_gap = g;
      best = j;
    }
  }
  if (best > 0 && best_gap >= decisive_gap) {
    out.rank = static_cast<Index>(best);
    out.gap_ratio = gap_at(s, best);
    out.gap_adjusted = out.rank != out.threshold_rank;
  }
  return out;
}

CMatrix vstack(const CMatrix& top, const CMatrix& bottom) {
  if (top.cols() != bottom.cols()) {
    throw InputError("vstack: column mismatch " + shape_string(top) + " over " +
                     shape_string(bottom));
  }
  CMatrix out(top.rows() + bottom.rows(), top.cols());
  out.topRows(top.rows()) = top;
  out.bottomRows(bottom.rows()) = bottom;
  return out;
}

BorderedSolution solve_bordered(const CMatrix& J, const CMatrix& R, const CVector& d, double tol) {
  if (R.rows() != d.size()) throw InputError("solve_bordered: R and d disagree in length");
  const Index n = R.cols();
  CMatrix A = vstack(J, R);
  CVector rhs = CVector::Zero(A.rows());
  rhs.tail(d.size()) = d;

  BorderedSolution out;
  if (n == 0) {
    out.x = CVector(0);
    return out;
  }
  if (A.rows() < n) throw InputError("solve_bordered: bordered matrix has fewer rows than columns");

  CMatrix qr = A;
  CVector b = rhs;
  const lapack_int info = LAPACKE_zgels(
      LAPACK_COL_MAJOR, 'N', static_cast<lapack_int>(qr.rows()), static_cast<lapack_int>(n), 1,
      qr.data(), static_cast<lapack_int>(qr.rows()), b.data(), static_cast<lapack_int>(b.size()));
  if (info != 0) {
    std::ostringstream os;
    os << "bordered least squares on " << shape_string(A) << " failed (zgels info " << info << ")";
    throw NumericalError(os.str());
  }
  out.x = b.head(n);
  out.residual = (A * out.x - rhs).norm();
  if (!(out.residual <= tol * (1.0 + d.norm()))) {
    std::ostringstream os;
    os << "bordered solve residual " << out.residual << " exceeds tolerance "
       << tol * (1.0 + d.norm());
    throw NumericalError(os.str());
  }
  return out;
}

}  // namespace dfl
