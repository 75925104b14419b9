#include "doobkit/lp.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "doobkit/error.hpp"

namespace doobkit::lp {

void LinearProgram::add_eq(std::vector<double> row, double rhs) {
  eq_rows.push_back(std::move(row));
  eq_rhs.push_back(rhs);
}

void LinearProgram::add_ge(std::vector<double> row, double rhs) {
  ge_rows.push_back(std::move(row));
  ge_rhs.push_back(rhs);
}

void LinearProgram::add_le(std::vector<double> row, double rhs) {
  for (double& a : row) a = -a;
  add_ge(std::move(row), -rhs);
}

void LinearProgram::set_free(std::size_t j) {
  if (lower.empty()) lower.assign(n_vars(), 0.0);
  lower.at(j) = -kInfinity;
}

void LinearProgram::validate() const {
  const std::size_t n = n_vars();
  auto finite = [](double v) { return std::isfinite(v); };
  if (!std::all_of(objective.begin(), objective.end(), finite))
    throw Error(ErrorCode::ShapeMismatch, "lp: non-finite objective");
  if (eq_rows.size() != eq_rhs.size() || ge_rows.size() != ge_rhs.size())
    throw Error(ErrorCode::ShapeMismatch, "lp: row / rhs count mismatch");
  for (const auto* rows : {&eq_rows, &ge_rows})
    for (const auto& r : *rows) {
      if (r.size() != n) throw Error(ErrorCode::ShapeMismatch, "lp: row width differs from variable count");
      if (!std::all_of(r.begin(), r.end(), finite)) throw Error(ErrorCode::ShapeMismatch, "lp: non-finite row");
    }
  if (!std::all_of(eq_rhs.begin(), eq_rhs.end(), finite) || !std::all_of(ge_rhs.begin(), ge_rhs.end(), finite))
    throw Error(ErrorCode::ShapeMismatch, "lp: non-finite rhs");
  if (!lower.empty()) {
    if (lower.size() != n) throw Error(ErrorCode::ShapeMismatch, "lp: bound count differs from variable count");
    for (double l : lower)
      if (std::isnan(l) || l == kInfinity) throw Error(ErrorCode::ShapeMismatch, "lp: bad lower bound");
  }
}

double primal_residual(const LinearProgram& lp, std::span<const double> x) {
  double worst = 0.0;
  auto dot = [&](const std::vector<double>& row) {
    double s = 0.0;
    for (std::size_t j = 0; j < row.size(); ++j) s += row[j] * x[j];
    return s;
  };
  for (std::size_t i = 0; i < lp.eq_rows.size(); ++i) worst = std::max(worst, std::abs(dot(lp.eq_rows[i]) - lp.eq_rhs[i]));
  for (std::size_t i = 0; i < lp.ge_rows.size(); ++i) worst = std::max(worst, lp.ge_rhs[i] - dot(lp.ge_rows[i]));
  for (std::size_t j = 0; j < lp.n_vars(); ++j) worst = std::max(worst, lp.lower_bound(j) - x[j]);
  return worst;
}

namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kCostTol = 1e-11;
constexpr double kFeasibilityTol = 1e-9;

// Standard form: min c.y, T y = b, y >= 0, b >= 0, with one artificial per row.
// Column layout: [structural | slacks | artificials], rhs stored separately.
class Tableau {
 public:
  Tableau(const LinearProgram& lp, const SolveOptions& options) : lp_(lp), options_(options) { build(); }

  LpOutcome run() {
    LpOutcome out;
    // Phase one.
    std::vector<double> phase_one(n_cols_, 0.0);
    for (std::size_t j = first_art_; j < n_cols_; ++j) phase_one[j] = 1.0;
    price(phase_one);
    if (iterate(/*allow_artificial=*/true, out) != Status::optimal)
      throw Error(ErrorCode::NumericalBreakdown, "phase one reported unbounded");
    out.infeasibility = -obj_value_;
    if (out.infeasibility > kFeasibilityTol * std::max(1.0, rhs_scale_)) {
      out.status = Status::infeasible;
      return out;
    }
    drive_out_artificials();

    // Phase two.
    price(cost_);
    out.status = iterate(/*allow_artificial=*/false, out);
    if (out.status != Status::optimal) return out;
    extract(out);
    return out;
  }

 private:
  void build() {
    lp_.validate();
    const std::size_t n = lp_.n_vars();
    // Structural columns: shifted bounded variables, or a +/- pair for free ones.
    for (std::size_t j = 0; j < n; ++j) {
      col_of_[j] = n_struct_;
      if (std::isinf(lp_.lower_bound(j))) {
        free_.push_back(true);
        n_struct_ += 2;
      } else {
        free_.push_back(false);
        n_struct_ += 1;
      }
    }
    const std::size_t n_eq = lp_.eq_rows.size();
    const std::size_t n_ge = lp_.ge_rows.size();
    rows_ = n_eq + n_ge;
    first_slack_ = n_struct_;
    first_art_ = n_struct_ + n_ge;
    n_cols_ = first_art_ + rows_;

    a_.assign(rows_, std::vector<double>(n_cols_, 0.0));
    b_.assign(rows_, 0.0);
    flip_.assign(rows_, 1.0);
    basis_.assign(rows_, 0);

    auto fill = [&](std::size_t r, const std::vector<double>& row, double rhs) {
      double shifted = rhs;
      for (std::size_t j = 0; j < n; ++j) {
        const std::size_t c = col_of_[j];
        a_[r][c] = row[j];
        if (free_[j]) a_[r][c + 1] = -row[j];
        else shifted -= row[j] * lp_.lower_bound(j);
      }
      b_[r] = shifted;
    };
    for (std::size_t i = 0; i < n_eq; ++i) fill(i, lp_.eq_rows[i], lp_.eq_rhs[i]);
    for (std::size_t i = 0; i < n_ge; ++i) {
      fill(n_eq + i, lp_.ge_rows[i], lp_.ge_rhs[i]);
      a_[n_eq + i][first_slack_ + i] = -1.0;
    }
    for (std::size_t r = 0; r < rows_; ++r) {
      if (b_[r] < 0.0) {
        flip_[r] = -1.0;
        b_[r] = -b_[r];
        for (double& v : a_[r]) v = -v;
      }
      a_[r][first_art_ + r] = 1.0;
      basis_[r] = first_art_ + r;
      rhs_scale_ = std::max(rhs_scale_, b_[r]);
    }
    a_orig_ = a_;
    b_orig_ = b_;

    cost_.assign(n_cols_, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      cost_[col_of_[j]] = lp_.objective[j];
      if (free_[j]) cost_[col_of_[j] + 1] = -lp_.objective[j];
    }
  }

  // Reduced costs r_j = c_j - c_B B^{-1} A_j for the current basis.
  void price(const std::vector<double>& c) {
    active_cost_ = c;
    reduced_ = c;
    obj_value_ = 0.0;
    for (std::size_t r = 0; r < rows_; ++r) {
      const double cb = c[basis_[r]];
      if (cb == 0.0) continue;
      for (std::size_t j = 0; j < n_cols_; ++j) reduced_[j] -= cb * a_[r][j];
      obj_value_ -= cb * b_[r];
    }
  }

  void pivot(std::size_t row, std::size_t col) {
    const double p = a_[row][col];
    for (double& v : a_[row]) v /= p;
    b_[row] /= p;
    a_[row][col] = 1.0;
    for (std::size_t r = 0; r < rows_; ++r) {
      if (r == row) continue;
      const double f = a_[r][col];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < n_cols_; ++j) a_[r][j] -= f * a_[row][j];
      a_[r][col] = 0.0;
      b_[r] -= f * b_[row];
      if (b_[r] < 0.0 && b_[r] > -1e-13) b_[r] = 0.0;
    }
    const double f = reduced_[col];
    if (f != 0.0) {
      for (std::size_t j = 0; j < n_cols_; ++j) reduced_[j] -= f * a_[row][j];
      reduced_[col] = 0.0;
      obj_value_ -= f * b_[row];
    }
    basis_[row] = col;
    if (!std::isfinite(b_[row]) || !std::isfinite(obj_value_))
      throw Error(ErrorCode::NumericalBreakdown, "tableau became non-finite");
  }

  Status iterate(bool allow_artificial, LpOutcome& out) {
    const std::size_t limit = allow_artificial ? first_art_ + rows_ : first_art_;
    PivotRule rule = options_.rule;
    std::size_t stall = 0;
    double last_value = obj_value_;
    while (true) {
      if (out.iterations++ >= options_.max_iterations)
        throw Error(ErrorCode::NumericalBreakdown, "iteration budget exhausted");
      dump(out.iterations);

      std::size_t enter = n_cols_;
      double best = -kCostTol;
      for (std::size_t j = 0; j < limit; ++j) {
        if (reduced_[j] < best) {
          enter = j;
          if (rule == PivotRule::bland) break;
          best = reduced_[j];
        }
      }
      if (enter == n_cols_) return Status::optimal;

      std::size_t leave = rows_;
      double ratio = kInfinity;
      for (std::size_t r = 0; r < rows_; ++r) {
        const double v = a_[r][enter];
        if (v <= kPivotTol) continue;
        const double q = b_[r] / v;
        if (q < ratio - 1e-14 || (q <= ratio + 1e-14 && leave < rows_ && basis_[r] < basis_[leave])) {
          ratio = q;
          leave = r;
        }
      }
      if (leave == rows_) return Status::unbounded;
      pivot(leave, enter);

      if (rule == PivotRule::dantzig) {
        if (obj_value_ > last_value + 1e-14) {
          stall = 0;
          last_value = obj_value_;
        } else if (++stall > 50) {
          rule = PivotRule::bland;
        }
      }
    }
  }

  // Artificials left basic at level zero are pivoted onto any structural or
  // slack column with a usable entry; rows with none are redundant and keep
  // their artificial, which can never re-enter.
  void drive_out_artificials() {
    for (std::size_t r = 0; r < rows_; ++r) {
      if (basis_[r] < first_art_) continue;
      std::size_t best = n_cols_;
      double mag = 1e-9;
      for (std::size_t j = 0; j < first_art_; ++j) {
        if (std::abs(a_[r][j]) > mag) {
          mag = std::abs(a_[r][j]);
          best = j;
        }
      }
      if (best != n_cols_) pivot(r, best);
    }
  }

  void extract(LpOutcome& out) {
    const std::size_t n = lp_.n_vars();
    std::vector<double> y(n_cols_, 0.0);
    const std::vector<double> levels = refined_levels();
    for (std::size_t r = 0; r < rows_; ++r) y[basis_[r]] = levels[r];

    out.x.assign(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t c = col_of_[j];
      out.x[j] = free_[j] ? y[c] - y[c + 1] : lp_.lower_bound(j) + y[c];
    }
    out.value = 0.0;
    for (std::size_t j = 0; j < n; ++j) out.value += lp_.objective[j] * out.x[j];

    // Artificial columns start as the identity, so their reduced costs under the
    // phase-two prices are -(c_B B^{-1}).
    const std::size_t n_eq = lp_.eq_rows.size();
    out.eq_duals.assign(n_eq, 0.0);
    out.ge_duals.assign(lp_.ge_rows.size(), 0.0);
    for (std::size_t r = 0; r < rows_; ++r) {
      const double dual = -reduced_[first_art_ + r] * flip_[r];
      if (r < n_eq) out.eq_duals[r] = dual;
      else out.ge_duals[r - n_eq] = dual;
    }
    certify(out);
  }

  // Basic levels from the final basis factored against the original data, which
  // removes the rounding accumulated over the pivots. Falls back to the tableau.
  std::vector<double> refined_levels() const {
    if (rows_ == 0) return {};
    const auto n = static_cast<Eigen::Index>(rows_);
    Eigen::MatrixXd basis(n, n);
    Eigen::VectorXd rhs(n);
    for (std::size_t r = 0; r < rows_; ++r) {
      rhs(static_cast<Eigen::Index>(r)) = b_orig_[r];
      for (std::size_t k = 0; k < rows_; ++k)
        basis(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) = a_orig_[r][basis_[k]];
    }
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(basis);
    Eigen::VectorXd y = lu.solve(rhs);
    y += lu.solve(rhs - basis * y);
    const Eigen::VectorXd tableau = Eigen::Map<const Eigen::VectorXd>(b_.data(), n);
    const double tableau_err = (basis * tableau - rhs).lpNorm<Eigen::Infinity>();
    const double refined_err = (basis * y - rhs).lpNorm<Eigen::Infinity>();
    const double slack = kFeasibilityTol * std::max(1.0, rhs_scale_);
    if (!y.allFinite() || refined_err > tableau_err || y.minCoeff() < -slack ||
        (y - tableau).lpNorm<Eigen::Infinity>() > 1e-6 * std::max(1.0, rhs_scale_))
      return b_;
    std::vector<double> out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out[r] = std::max(0.0, y(static_cast<Eigen::Index>(r)));
    return out;
  }

  void certify(LpOutcome& out) const {
    const std::size_t n = lp_.n_vars();
    out.reduced_costs = lp_.objective;
    for (std::size_t i = 0; i < lp_.eq_rows.size(); ++i)
      for (std::size_t j = 0; j < n; ++j) out.reduced_costs[j] -= out.eq_duals[i] * lp_.eq_rows[i][j];
    for (std::size_t i = 0; i < lp_.ge_rows.size(); ++i)
      for (std::size_t j = 0; j < n; ++j) out.reduced_costs[j] -= out.ge_duals[i] * lp_.ge_rows[i][j];

    out.dual_value = 0.0;
    out.dual_residual = 0.0;
    out.complementary_slackness = 0.0;
    for (std::size_t i = 0; i < lp_.eq_rows.size(); ++i) out.dual_value += out.eq_duals[i] * lp_.eq_rhs[i];
    for (std::size_t i = 0; i < lp_.ge_rows.size(); ++i) {
      const double z = out.ge_duals[i];
      out.dual_value += z * lp_.ge_rhs[i];
      out.dual_residual = std::max(out.dual_residual, -z);
      double lhs = 0.0;
      for (std::size_t j = 0; j < n; ++j) lhs += lp_.ge_rows[i][j] * out.x[j];
      out.complementary_slackness = std::max(out.complementary_slackness, std::abs(z * (lhs - lp_.ge_rhs[i])));
    }
    for (std::size_t j = 0; j < n; ++j) {
      const double w = out.reduced_costs[j];
      if (free_[j]) {
        out.dual_residual = std::max(out.dual_residual, std::abs(w));
      } else {
        out.dual_residual = std::max(out.dual_residual, -w);
        out.dual_value += w * lp_.lower_bound(j);
        out.complementary_slackness =
            std::max(out.complementary_slackness, std::abs(w * (out.x[j] - lp_.lower_bound(j))));
      }
    }
    out.primal_residual = primal_residual(lp_, out.x);
  }

  void dump(std::size_t iteration) const {
    if (options_.verbosity < 2 || options_.log == nullptr) return;
    std::ostream& os = *options_.log;
    os << "iteration " << iteration << " objective " << -obj_value_ << "\n";
    for (std::size_t r = 0; r < rows_; ++r) {
      os << "  x" << basis_[r] << " =";
      for (double v : a_[r]) os << ' ' << v;
      os << " | " << b_[r] << "\n";
    }
    os << "  r =";
    for (double v : reduced_) os << ' ' << v;
    os << "\n";
  }

  const LinearProgram& lp_;
  const SolveOptions& options_;
  std::vector<std::size_t> col_of_ = std::vector<std::size_t>(lp_.n_vars());
  std::vector<bool> free_;
  std::size_t n_struct_ = 0;
  std::size_t rows_ = 0;
  std::size_t first_slack_ = 0;
  std::size_t first_art_ = 0;
  std::size_t n_cols_ = 0;
  std::vector<std::vector<double>> a_;
  std::vector<double> b_;
  std::vector<std::vector<double>> a_orig_;
  std::vector<double> b_orig_;
  std::vector<double> flip_;
  std::vector<std::size_t> basis_;
  std::vector<double> cost_;
  std::vector<double> active_cost_;
  std::vector<double> reduced_;
  double obj_value_ = 0.0;  // holds -(c_B B^{-1} b)
  double rhs_scale_ = 1.0;
};

}  // namespace

LpOutcome solve(const LinearProgram& lp, const SolveOptions& options) {
  Tableau tableau(lp, options);
  LpOutcome out = tableau.run();
  if (options.verbosity >= 1 && options.log != nullptr) {
    *options.log << "lp: status " << static_cast<int>(out.status) << " value " << out.value << " after "
                 << out.iterations << " iterations\n";
  }
  return out;
}

std::optional<std::vector<double>> feasible_point(const LinearProgram& system, const SolveOptions& options) {
  LinearProgram phase_one = system;
  std::fill(phase_one.objective.begin(), phase_one.objective.end(), 0.0);
  LpOutcome out = solve(phase_one, options);
  if (out.status != Status::optimal) return std::nullopt;
  return out.x;
}

}  // namespace doobkit::lp
