#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace gfldpc {

enum class Relation { le, ge, eq };
enum class Sense { maximize, minimize };

struct Constraint {
    std::vector<double> a;
    Relation rel = Relation::le;
    double b = 0.0;
};

struct SimplexResult {
    enum class Status { optimal, infeasible, unbounded } status = Status::optimal;
    std::vector<double> x;
    double value = 0.0;
    int most_violated_row = -1;  // set on infeasibility: largest phase-1 residual
};

// Dense two-phase tableau simplex over x >= 0. Dantzig pricing with a switch
// to Bland's rule after a degeneracy budget, so it terminates on the long
// near-parallel constraint stacks the curve-fitting design produces.
class SimplexSolver {
  public:
    SimplexResult solve(const std::vector<double>& objective, const std::vector<Constraint>& rows, Sense sense) {
        const int n = static_cast<int>(objective.size());
        const int m = static_cast<int>(rows.size());
        for (const Constraint& r : rows)
            if (static_cast<int>(r.a.size()) != n) throw std::domain_error("simplex: constraint width mismatch");

        // columns: n structural, then one slack/surplus per inequality, then
        // artificials; number the layout first
        int n_slack = 0;
        for (const Constraint& r : rows)
            if (r.rel != Relation::eq) ++n_slack;
        std::vector<int> slack_col(static_cast<std::size_t>(m), -1);
        std::vector<int> art_col(static_cast<std::size_t>(m), -1);
        int col = n;
        for (int i = 0; i < m; ++i)
            if (rows[static_cast<std::size_t>(i)].rel != Relation::eq) slack_col[static_cast<std::size_t>(i)] = col++;
        // normalize rhs signs first to know which rows need artificials
        std::vector<double> rhs(static_cast<std::size_t>(m));
        std::vector<double> slack_sign(static_cast<std::size_t>(m), 1.0);
        std::vector<int> sign(static_cast<std::size_t>(m), 1);
        for (int i = 0; i < m; ++i) {
            const Constraint& r = rows[static_cast<std::size_t>(i)];
            double b = r.b;
            int s = 1;
            Relation rel = r.rel;
            if (b < 0.0) {
                b = -b;
                s = -1;
                rel = rel == Relation::le ? Relation::ge : (rel == Relation::ge ? Relation::le : Relation::eq);
            }
            rhs[static_cast<std::size_t>(i)] = b;
            sign[static_cast<std::size_t>(i)] = s;
            if (rel == Relation::le)
                slack_sign[static_cast<std::size_t>(i)] = 1.0;  // basic slack feasible
            else if (rel == Relation::ge)
                slack_sign[static_cast<std::size_t>(i)] = -1.0;
            if (rel != Relation::le) art_col[static_cast<std::size_t>(i)] = col++;
        }
        const int ncols = col;

        tab_.assign(static_cast<std::size_t>(m), std::vector<double>(static_cast<std::size_t>(ncols) + 1, 0.0));
        basis_.assign(static_cast<std::size_t>(m), -1);
        for (int i = 0; i < m; ++i) {
            const Constraint& r = rows[static_cast<std::size_t>(i)];
            auto& row = tab_[static_cast<std::size_t>(i)];
            for (int j = 0; j < n; ++j) row[static_cast<std::size_t>(j)] = sign[static_cast<std::size_t>(i)] * r.a[static_cast<std::size_t>(j)];
            if (slack_col[static_cast<std::size_t>(i)] >= 0)
                row[static_cast<std::size_t>(slack_col[static_cast<std::size_t>(i)])] = slack_sign[static_cast<std::size_t>(i)];
            if (art_col[static_cast<std::size_t>(i)] >= 0) row[static_cast<std::size_t>(art_col[static_cast<std::size_t>(i)])] = 1.0;
            row[static_cast<std::size_t>(ncols)] = rhs[static_cast<std::size_t>(i)];
            basis_[static_cast<std::size_t>(i)] =
                art_col[static_cast<std::size_t>(i)] >= 0 ? art_col[static_cast<std::size_t>(i)] : slack_col[static_cast<std::size_t>(i)];
        }

        SimplexResult res;
        const int first_art = ncols - std::count_if(art_col.begin(), art_col.end(), [](int c) { return c >= 0; });

        // phase 1: minimize the artificial sum
        if (first_art < ncols) {
            std::vector<double> obj1(static_cast<std::size_t>(ncols), 0.0);
            for (int j = first_art; j < ncols; ++j) obj1[static_cast<std::size_t>(j)] = -1.0;  // maximize -sum
            const auto st = optimize(obj1, ncols);
            if (st == SimplexResult::Status::unbounded) throw std::runtime_error("simplex: phase 1 unbounded");
            double art_sum = 0.0;
            int worst = -1;
            double worst_val = 0.0;
            for (int i = 0; i < m; ++i)
                if (basis_[static_cast<std::size_t>(i)] >= first_art) {
                    const double v = tab_[static_cast<std::size_t>(i)][static_cast<std::size_t>(ncols)];
                    art_sum += v;
                    if (v > worst_val) {
                        worst_val = v;
                        worst = i;
                    }
                }
            if (art_sum > 1e-7) {
                res.status = SimplexResult::Status::infeasible;
                res.most_violated_row = worst;
                return res;
            }
            // pivot residual artificials out; rows that cannot release theirs
            // are redundant (all-zero in structural columns, zero rhs) and
            // would poison phase-2 pricing, so they are dropped outright
            for (int i = 0; i < m; ++i) {
                if (basis_[static_cast<std::size_t>(i)] < first_art) continue;
                int enter = -1;
                for (int j = 0; j < first_art; ++j)
                    if (std::fabs(tab_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) > 1e-9) {
                        enter = j;
                        break;
                    }
                if (enter >= 0) pivot(i, enter, ncols);
            }
            for (std::size_t i = tab_.size(); i-- > 0;) {
                if (basis_[i] >= first_art) {
                    tab_.erase(tab_.begin() + static_cast<std::ptrdiff_t>(i));
                    basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(i));
                }
            }
        }

        // phase 2
        std::vector<double> obj(static_cast<std::size_t>(ncols), 0.0);
        const double flip = sense == Sense::maximize ? 1.0 : -1.0;
        for (int j = 0; j < n; ++j) obj[static_cast<std::size_t>(j)] = flip * objective[static_cast<std::size_t>(j)];
        for (int j = first_art; j < ncols; ++j) obj[static_cast<std::size_t>(j)] = -1e30;  // keep artificials out
        const auto st = optimize(obj, ncols);
        if (st == SimplexResult::Status::unbounded) {
            res.status = st;
            return res;
        }
        res.status = SimplexResult::Status::optimal;
        res.x.assign(static_cast<std::size_t>(n), 0.0);
        for (std::size_t i = 0; i < tab_.size(); ++i)
            if (basis_[i] < n)
                res.x[static_cast<std::size_t>(basis_[i])] = tab_[i][static_cast<std::size_t>(ncols)];
        res.value = 0.0;
        for (int j = 0; j < n; ++j) res.value += objective[static_cast<std::size_t>(j)] * res.x[static_cast<std::size_t>(j)];
        return res;
    }

  private:
    void pivot(int prow, int pcol, int ncols) {
        auto& row = tab_[static_cast<std::size_t>(prow)];
        const double pv = row[static_cast<std::size_t>(pcol)];
        for (double& v : row) v /= pv;
        for (std::size_t i = 0; i < tab_.size(); ++i) {
            if (static_cast<int>(i) == prow) continue;
            auto& other = tab_[i];
            const double f = other[static_cast<std::size_t>(pcol)];
            if (f == 0.0) continue;
            for (int j = 0; j <= ncols; ++j) other[static_cast<std::size_t>(j)] -= f * row[static_cast<std::size_t>(j)];
        }
        basis_[static_cast<std::size_t>(prow)] = pcol;
    }

    SimplexResult::Status optimize(const std::vector<double>& obj, int ncols) {
        const int m = static_cast<int>(tab_.size());
        std::vector<double> red(static_cast<std::size_t>(ncols));
        const long bland_after = 20L * (m + ncols);
        long iterations = 0;
        for (;;) {
            // reduced costs: obj_j - c_B B^-1 A_j via the current tableau
            for (int j = 0; j < ncols; ++j) red[static_cast<std::size_t>(j)] = obj[static_cast<std::size_t>(j)];
            for (int i = 0; i < m; ++i) {
                const double cb = obj[static_cast<std::size_t>(basis_[static_cast<std::size_t>(i)])];
                if (cb == 0.0) continue;
                const auto& row = tab_[static_cast<std::size_t>(i)];
                for (int j = 0; j < ncols; ++j) red[static_cast<std::size_t>(j)] -= cb * row[static_cast<std::size_t>(j)];
            }
            int enter = -1;
            if (iterations < bland_after) {
                double best = 1e-9;
                for (int j = 0; j < ncols; ++j)
                    if (red[static_cast<std::size_t>(j)] > best) {
                        best = red[static_cast<std::size_t>(j)];
                        enter = j;
                    }
            } else {
                for (int j = 0; j < ncols; ++j)
                    if (red[static_cast<std::size_t>(j)] > 1e-9) {
                        enter = j;
                        break;
                    }
            }
            if (enter < 0) return SimplexResult::Status::optimal;
            int leave = -1;
            double best_ratio = 0.0;
            for (int i = 0; i < m; ++i) {
                const double a = tab_[static_cast<std::size_t>(i)][static_cast<std::size_t>(enter)];
                if (a <= 1e-11) continue;
                const double ratio = tab_[static_cast<std::size_t>(i)][static_cast<std::size_t>(ncols)] / a;
                if (leave < 0 || ratio < best_ratio - 1e-12 ||
                    (ratio < best_ratio + 1e-12 && basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leave)]))
                    if (leave < 0 || ratio < best_ratio + 1e-12) {
                        best_ratio = ratio;
                        leave = i;
                    }
            }
            if (leave < 0) return SimplexResult::Status::unbounded;
            pivot(leave, enter, ncols);
            if (++iterations > 200L * (m + ncols) + 10000) throw std::runtime_error("simplex: iteration limit");
        }
    }

    std::vector<std::vector<double>> tab_;
    std::vector<int> basis_;
};

inline SimplexResult simplex_solve(const std::vector<double>& objective, const std::vector<Constraint>& rows,
                                   Sense sense) {
    SimplexSolver s;
    return s.solve(objective, rows, sense);
}

}  // namespace gfldpc
