// Copyright 2026 The steerlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "steerlab/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "steerlab/errors.hpp"

namespace steerlab::sdp {

const char* to_string(Status s) {
  switch (s) {
    case Status::optimal:
      return "optimal";
    case Status::infeasible:
      return "infeasible";
    case Status::unbounded:
      return "unbounded";
    case Status::inaccurate:
      return "inaccurate";
  }
  return "unknown";
}

namespace {

template <typename Scalar>
constexpr bool is_complex = !std::is_same_v<Scalar, double>;

template <typename Scalar>
struct Entry {
  int row;
  int col;
  Scalar value;
};

// Sparse orthonormal basis of the Hermitian (or symmetric) matrices of size dim.
template <typename Scalar>
std::vector<std::vector<Entry<Scalar>>> sparse_basis(int dim) {
  std::vector<std::vector<Entry<Scalar>>> basis;
  const double s = 1.0 / std::sqrt(2.0);
  for (int j = 0; j < dim; ++j) basis.push_back({{j, j, Scalar(1.0)}});
  for (int j = 0; j < dim; ++j) {
    for (int k = j + 1; k < dim; ++k) {
      basis.push_back({{j, k, Scalar(s)}, {k, j, Scalar(s)}});
      if constexpr (is_complex<Scalar>) {
        basis.push_back({{j, k, Scalar(0, s)}, {k, j, Scalar(0, -s)}});
      }
    }
  }
  return basis;
}

template <typename Scalar>
Matrix<Scalar> dense(const std::vector<Entry<Scalar>>& entries, int dim) {
  Matrix<Scalar> m = Matrix<Scalar>::Zero(dim, dim);
  for (const auto& e : entries) m(e.row, e.col) += e.value;
  return m;
}

// Re Tr(E M) for sparse E.
template <typename Scalar>
double sparse_inner(const std::vector<Entry<Scalar>>& entries, const Matrix<Scalar>& m) {
  double acc = 0.0;
  for (const auto& e : entries) acc += std::real(e.value * m(e.col, e.row));
  return acc;
}

template <typename Scalar>
double inner(const Matrix<Scalar>& a, const Matrix<Scalar>& b) {
  // Re Tr(A B) for Hermitian B.
  return std::real((a.array() * b.conjugate().array()).sum());
}

template <typename Scalar>
Matrix<Scalar> herm(const Matrix<Scalar>& m) {
  return 0.5 * (m + m.adjoint());
}

// Conic standard form.
template <typename Scalar>
struct StandardForm {
  struct Coef {
    int row;
    std::vector<Entry<Scalar>> entries;
  };
  int m = 0;
  std::vector<int> dims;
  std::vector<std::vector<Coef>> coefs;  // per cone block
  std::vector<Matrix<Scalar>> c;         // per cone block
  std::vector<std::vector<std::pair<int, double>>> lp_cols;
  std::vector<std::vector<std::pair<int, double>>> free_cols;
  Eigen::VectorXd c_lp;
  Eigen::VectorXd c_free;
  Eigen::VectorXd b;
  double objective_constant = 0.0;
  bool negate = false;

  // Bookkeeping back to the modelling layer.
  std::vector<int> block_of_variable;   // problem block -> cone block
  std::vector<int> block_of_lmi;        // problem lmi -> cone block
  std::vector<int> lp_of_scalar;        // -1 if free
  std::vector<int> free_of_scalar;      // -1 if nonnegative
  std::vector<std::vector<int>> rows_of_equality;  // basis-ordered rows, -1 if dropped
  std::vector<int> dims_of_equality;               // 0 for scalar equalities
  bool inconsistent = false;
};

template <typename Scalar>
class Lowering {
 public:
  explicit Lowering(const Problem<Scalar>& p) : p_(p) {}

  StandardForm<Scalar> run() {
    StandardForm<Scalar> sf;
    for (const auto& blk : p_.blocks()) {
      sf.block_of_variable.push_back(static_cast<int>(sf.dims.size()));
      sf.dims.push_back(blk.dim);
    }
    for (const auto& lmi : p_.lmis()) {
      sf.block_of_lmi.push_back(static_cast<int>(sf.dims.size()));
      sf.dims.push_back(lmi.expr.dim());
    }
    int nl = 0, nf = 0;
    for (const auto& v : p_.scalars()) {
      if (v.domain == ScalarDomain::nonnegative) {
        sf.lp_of_scalar.push_back(nl++);
        sf.free_of_scalar.push_back(-1);
      } else {
        sf.lp_of_scalar.push_back(-1);
        sf.free_of_scalar.push_back(nf++);
      }
    }
    sf.coefs.resize(sf.dims.size());
    sf.lp_cols.resize(nl);
    sf.free_cols.resize(nf);
    std::vector<double> rhs;

    auto emit_matrix_rows = [&](const MatrixExpr<Scalar>& e, int slack_block, std::vector<int>& rows) {
      const auto basis = sparse_basis<Scalar>(e.dim());
      for (const auto& bk : basis) {
        RowBuilder row;
        for (const auto& [blk, coef] : e.blocks()) {
          if (coef == 0.0) continue;
          std::vector<Entry<Scalar>> ent = bk;
          for (auto& x : ent) x.value *= coef;
          row.blocks.emplace_back(sf.block_of_variable[blk], std::move(ent));
        }
        if (slack_block >= 0) {
          std::vector<Entry<Scalar>> ent = bk;
          for (auto& x : ent) x.value = -x.value;
          row.blocks.emplace_back(slack_block, std::move(ent));
        }
        for (const auto& [s, h] : e.scalars()) {
          const double v = sparse_inner(bk, h);
          if (v != 0.0) row.scalars.emplace_back(s, v);
        }
        row.rhs = -sparse_inner(bk, e.constant());
        rows.push_back(commit(sf, row, rhs));
      }
    };

    for (const auto& eq : p_.equalities()) {
      std::vector<int> rows;
      if (eq.matrix_valued) {
        emit_matrix_rows(eq.matrix, -1, rows);
        sf.dims_of_equality.push_back(eq.matrix.dim());
      } else {
        RowBuilder row;
        for (const auto& [blk, g] : eq.scalar.blocks()) {
          std::vector<Entry<Scalar>> ent;
          const Matrix<Scalar> h = herm(g);
          for (int r = 0; r < h.rows(); ++r)
            for (int c = 0; c < h.cols(); ++c)
              if (h(r, c) != Scalar(0)) ent.push_back({r, c, h(r, c)});
          row.blocks.emplace_back(sf.block_of_variable[blk], std::move(ent));
        }
        for (const auto& [s, v] : eq.scalar.scalars()) row.scalars.emplace_back(s, v);
        row.rhs = -eq.scalar.constant();
        rows.push_back(commit(sf, row, rhs));
        sf.dims_of_equality.push_back(0);
      }
      sf.rows_of_equality.push_back(std::move(rows));
    }
    for (size_t l = 0; l < p_.lmis().size(); ++l) {
      const auto& lmi = p_.lmis()[l];
      std::vector<int> rows;
      if (lmi.sense == LmiSense::psd) {
        emit_matrix_rows(lmi.expr, sf.block_of_lmi[l], rows);
      } else {
        MatrixExpr<Scalar> neg(lmi.expr.dim());
        neg.add_constant(-lmi.expr.constant());
        for (const auto& [blk, coef] : lmi.expr.blocks()) neg.add(BlockRef{blk}, -coef);
        for (const auto& [s, h] : lmi.expr.scalars()) neg.add(ScalarRef{s}, -h);
        emit_matrix_rows(neg, sf.block_of_lmi[l], rows);
      }
    }

    sf.m = static_cast<int>(rhs.size());
    sf.b = Eigen::Map<Eigen::VectorXd>(rhs.data(), sf.m);

    // Objective.
    sf.negate = p_.sense() == Sense::maximize;
    const double sign = sf.negate ? -1.0 : 1.0;
    sf.c.resize(sf.dims.size());
    for (size_t k = 0; k < sf.dims.size(); ++k) sf.c[k] = Matrix<Scalar>::Zero(sf.dims[k], sf.dims[k]);
    sf.c_lp = Eigen::VectorXd::Zero(nl);
    sf.c_free = Eigen::VectorXd::Zero(nf);
    for (const auto& [blk, g] : p_.objective().blocks()) sf.c[sf.block_of_variable[blk]] += sign * herm(g);
    for (const auto& [s, v] : p_.objective().scalars()) {
      if (sf.lp_of_scalar[s] >= 0)
        sf.c_lp[sf.lp_of_scalar[s]] += sign * v;
      else
        sf.c_free[sf.free_of_scalar[s]] += sign * v;
    }
    sf.objective_constant = p_.objective().constant();
    return sf;
  }

 private:
  struct RowBuilder {
    std::vector<std::pair<int, std::vector<Entry<Scalar>>>> blocks;
    std::vector<std::pair<int, double>> scalars;
    double rhs = 0.0;
  };

  // Appends a row unless it has no coefficients at all; an empty row with a
  // nonzero right-hand side marks the problem inconsistent.
  int commit(StandardForm<Scalar>& sf, const RowBuilder& row, std::vector<double>& rhs) {
    bool empty = row.scalars.empty();
    for (const auto& [blk, ent] : row.blocks)
      if (!ent.empty()) empty = false;
    if (empty) {
      if (std::abs(row.rhs) > 1e-12) sf.inconsistent = true;
      return -1;
    }
    const int r = static_cast<int>(rhs.size());
    rhs.push_back(row.rhs);
    for (const auto& [blk, ent] : row.blocks)
      if (!ent.empty()) sf.coefs[blk].push_back({r, ent});
    for (const auto& [s, v] : row.scalars) {
      if (sf.lp_of_scalar[s] >= 0)
        sf.lp_cols[sf.lp_of_scalar[s]].emplace_back(r, v);
      else
        sf.free_cols[sf.free_of_scalar[s]].emplace_back(r, v);
    }
    return r;
  }

  const Problem<Scalar>& p_;
};

// Infeasible primal-dual path-following method on a StandardForm.
template <typename Scalar>
class InteriorPoint {
 public:
  using Mat = Matrix<Scalar>;
  using Vec = Eigen::VectorXd;

  InteriorPoint(const StandardForm<Scalar>& sf, const Options& opt) : sf_(sf), opt_(opt) {
    nb_ = static_cast<int>(sf.dims.size());
    nl_ = static_cast<int>(sf.c_lp.size());
    nf_ = static_cast<int>(sf.c_free.size());
    nu_ = nl_;
    for (int d : sf.dims) nu_ += d;
    al_ = Eigen::MatrixXd::Zero(sf.m, nl_);
    for (int j = 0; j < nl_; ++j)
      for (const auto& [r, v] : sf.lp_cols[j]) al_(r, j) += v;
    af_ = Eigen::MatrixXd::Zero(sf.m, nf_);
    for (int j = 0; j < nf_; ++j)
      for (const auto& [r, v] : sf.free_cols[j]) af_(r, j) += v;
    size_t maxc = 0;
    for (const auto& cl : sf.coefs) maxc = std::max(maxc, cl.size());
    g_.resize(maxc);
  }

  struct Iterate {
    std::vector<Mat> x, z;
    Vec xl, zl, xf, y;
  };

  struct Result {
    Iterate it;
    Status status = Status::inaccurate;
    double pobj = 0, dobj = 0, gap = 0, pinf = 0, dinf = 0;
    int iterations = 0;
  };

  Result run() {
    Result res;
    Iterate cur = initial_point();
    Result best;
    double best_merit = std::numeric_limits<double>::infinity();
    const double bnorm = sf_.b.norm();
    double cnorm2 = sf_.c_lp.squaredNorm() + sf_.c_free.squaredNorm();
    for (const auto& cb : sf_.c) cnorm2 += cb.squaredNorm();
    const double cnorm = std::sqrt(cnorm2);
    int stall = 0;

    for (int iter = 0; iter <= opt_.max_iter; ++iter) {
      // Residuals.
      rp_ = sf_.b - apply_a(cur.x, cur.xl, cur.xf);
      apply_at(cur.y, atb_, atl_, atf_);
      rd_.resize(nb_);
      double dinf2 = 0.0;
      for (int k = 0; k < nb_; ++k) {
        rd_[k] = sf_.c[k] - cur.z[k] - atb_[k];
        dinf2 += rd_[k].squaredNorm();
      }
      rdl_ = sf_.c_lp - cur.zl - atl_;
      rdf_ = sf_.c_free - atf_;
      dinf2 += rdl_.squaredNorm() + rdf_.squaredNorm();

      double pobj = sf_.c_lp.dot(cur.xl) + sf_.c_free.dot(cur.xf);
      double compl_gap = cur.xl.dot(cur.zl);
      for (int k = 0; k < nb_; ++k) {
        pobj += inner(sf_.c[k], cur.x[k]);
        compl_gap += inner(cur.x[k], cur.z[k]);
      }
      const double dobj = sf_.b.dot(cur.y);
      const double pinf = rp_.norm() / (1.0 + bnorm);
      const double dinf = std::sqrt(dinf2) / (1.0 + cnorm);
      const double relgap =
          std::max(std::abs(compl_gap), std::abs(pobj - dobj)) / (1.0 + std::abs(pobj) + std::abs(dobj));
      const double mu = nu_ > 0 ? compl_gap / nu_ : 0.0;

      const double merit = std::max({pinf, dinf, relgap});
      if (merit < best_merit) {
        best_merit = merit;
        best.it = cur;
        best.pobj = pobj;
        best.dobj = dobj;
        best.gap = relgap;
        best.pinf = pinf;
        best.dinf = dinf;
        best.iterations = iter;
      }
      if (pinf < opt_.feas_tol && dinf < opt_.feas_tol && relgap < opt_.gap_tol) {
        best.status = Status::optimal;
        best.it = cur;
        best.pobj = pobj;
        best.dobj = dobj;
        best.gap = relgap;
        best.pinf = pinf;
        best.dinf = dinf;
        best.iterations = iter;
        return best;
      }
      if (auto ray = detect_ray(cur, dobj, pobj); ray != Status::optimal) {
        best.status = ray;
        best.it = cur;
        best.iterations = iter;
        best.pobj = pobj;
        best.dobj = dobj;
        return best;
      }
      if (iter == opt_.max_iter) break;

      if (!prepare(cur)) break;

      // Predictor.
      Direction aff;
      compute_direction(cur, 0.0, nullptr, aff);
      const double ap_aff = std::min(1.0, max_step(cur.x, cur.xl, aff.dx, aff.dxl));
      const double ad_aff = std::min(1.0, max_step(cur.z, cur.zl, aff.dz, aff.dzl));
      double mu_aff = 0.0;
      if (nu_ > 0) {
        double acc = (cur.xl + ap_aff * aff.dxl).dot(cur.zl + ad_aff * aff.dzl);
        for (int k = 0; k < nb_; ++k)
          acc += inner<Scalar>(cur.x[k] + ap_aff * aff.dx[k], cur.z[k] + ad_aff * aff.dz[k]);
        mu_aff = acc / nu_;
      }
      double sigma = mu > 0 ? std::pow(std::max(0.0, mu_aff) / mu, 3) : 0.0;
      sigma = std::clamp(sigma, 0.0, 1.0);
      // Keep some centring while the iterate is far from feasible.
      if (std::max(pinf, dinf) > 1e-2) sigma = std::max(sigma, 0.1 * std::min(1.0, std::max(pinf, dinf)));

      Direction dir;
      compute_direction(cur, sigma * mu, &aff, dir);
      const double ap = max_step(cur.x, cur.xl, dir.dx, dir.dxl);
      const double ad = max_step(cur.z, cur.zl, dir.dz, dir.dzl);
      const double tau = std::max(0.9, 1.0 - 10.0 * std::max(mu, 1e-12) / (1.0 + std::abs(pobj)));
      const double tp = std::min(1.0, std::min(0.995, tau) * ap);
      const double td = std::min(1.0, std::min(0.995, tau) * ad);

      for (int k = 0; k < nb_; ++k) {
        cur.x[k] += tp * dir.dx[k];
        cur.z[k] += td * dir.dz[k];
        cur.x[k] = herm(cur.x[k]);
        cur.z[k] = herm(cur.z[k]);
      }
      cur.xl += tp * dir.dxl;
      cur.zl += td * dir.dzl;
      cur.xf += tp * dir.dxf;
      cur.y += td * dir.dy;

      if (tp < 1e-10 && td < 1e-10) {
        if (++stall >= 3) break;
      } else {
        stall = 0;
      }
    }
    best.status = Status::inaccurate;
    return best;
  }

 private:
  struct Direction {
    std::vector<Mat> dx, dz;
    Vec dxl, dzl, dxf, dy;
  };

  Iterate initial_point() const {
    Iterate it;
    it.x.resize(nb_);
    it.z.resize(nb_);
    for (int k = 0; k < nb_; ++k) {
      const int n = sf_.dims[k];
      double xi = std::max(10.0, std::sqrt(static_cast<double>(n)));
      double zeta = std::max({10.0, std::sqrt(static_cast<double>(n)), sf_.c[k].norm()});
      for (const auto& cf : sf_.coefs[k]) {
        double an = 0.0;
        for (const auto& e : cf.entries) an += std::norm(e.value);
        an = std::sqrt(an);
        xi = std::max(xi, std::sqrt(static_cast<double>(n)) * (1.0 + std::abs(sf_.b[cf.row])) / (1.0 + an));
        zeta = std::max(zeta, an);
      }
      it.x[k] = xi * Mat::Identity(n, n);
      it.z[k] = zeta * Mat::Identity(n, n);
    }
    double xil = 10.0, zetal = std::max(10.0, sf_.c_lp.size() ? sf_.c_lp.cwiseAbs().maxCoeff() : 0.0);
    for (int j = 0; j < nl_; ++j) {
      const double an = al_.col(j).norm();
      zetal = std::max(zetal, an);
      for (const auto& [r, v] : sf_.lp_cols[j]) xil = std::max(xil, (1.0 + std::abs(sf_.b[r])) / (1.0 + an));
    }
    it.xl = Vec::Constant(nl_, xil);
    it.zl = Vec::Constant(nl_, zetal);
    it.xf = Vec::Zero(nf_);
    it.y = Vec::Zero(sf_.m);
    return it;
  }

  Vec apply_a(const std::vector<Mat>& x, const Vec& xl, const Vec& xf) const {
    Vec r = al_ * xl + af_ * xf;
    for (int k = 0; k < nb_; ++k)
      for (const auto& cf : sf_.coefs[k]) r[cf.row] += sparse_inner(cf.entries, x[k]);
    return r;
  }

  void apply_at(const Vec& y, std::vector<Mat>& blocks, Vec& lp, Vec& fr) const {
    blocks.resize(nb_);
    for (int k = 0; k < nb_; ++k) {
      blocks[k].setZero(sf_.dims[k], sf_.dims[k]);
      for (const auto& cf : sf_.coefs[k]) {
        const double yk = y[cf.row];
        if (yk == 0.0) continue;
        for (const auto& e : cf.entries) blocks[k](e.row, e.col) += yk * e.value;
      }
    }
    lp = al_.transpose() * y;
    fr = af_.transpose() * y;
  }

  // Inverts Z, assembles and factors the Schur complement.
  bool prepare(const Iterate& cur) {
    zinv_.resize(nb_);
    for (int k = 0; k < nb_; ++k) {
      Eigen::LLT<Mat> llt(cur.z[k]);
      if (llt.info() != Eigen::Success) return false;
      zinv_[k] = llt.solve(Mat::Identity(sf_.dims[k], sf_.dims[k]));
    }
    schur_.setZero(sf_.m, sf_.m);
    for (int k = 0; k < nb_; ++k) {
      const auto& coefs = sf_.coefs[k];
      const Mat& x = cur.x[k];
      const Mat& zi = zinv_[k];
      const int n = sf_.dims[k];
      for (size_t j = 0; j < coefs.size(); ++j) {
        Mat& g = g_[j];
        g.setZero(n, n);
        for (const auto& e : coefs[j].entries) g.noalias() += e.value * x.col(e.row) * zi.row(e.col);
      }
      for (size_t i = 0; i < coefs.size(); ++i) {
        const int ri = coefs[i].row;
        for (size_t j = i; j < coefs.size(); ++j) {
          const double v = sparse_inner(coefs[i].entries, g_[j]);
          schur_(ri, coefs[j].row) += v;
          if (j != i) schur_(coefs[j].row, ri) += v;
        }
      }
    }
    if (nl_ > 0) {
      const Vec d = cur.xl.cwiseQuotient(cur.zl);
      schur_.noalias() += al_ * d.asDiagonal() * al_.transpose();
    }
    schur_ = 0.5 * (schur_ + schur_.transpose()).eval();
    llt_.compute(schur_);
    if (llt_.info() != Eigen::Success) {
      const double reg = 1e-13 * std::max(1.0, schur_.diagonal().cwiseAbs().maxCoeff());
      schur_.diagonal().array() += reg;
      llt_.compute(schur_);
      if (llt_.info() != Eigen::Success) return false;
    }
    if (nf_ > 0) {
      minv_af_ = llt_.solve(af_);
      Eigen::MatrixXd k = af_.transpose() * minv_af_;
      ldlt_free_.compute(k);
    }
    return true;
  }

  void compute_direction(const Iterate& cur, double sigma_mu, const Direction* corr, Direction& out) {
    std::vector<Mat> p(nb_);
    for (int k = 0; k < nb_; ++k) {
      Mat t = cur.x[k] * rd_[k];
      if (corr) t += corr->dx[k] * corr->dz[k];
      p[k] = sigma_mu * zinv_[k] - cur.x[k] - t * zinv_[k];
    }
    Vec pl(nl_);
    for (int j = 0; j < nl_; ++j) {
      double c = corr ? corr->dxl[j] * corr->dzl[j] : 0.0;
      pl[j] = (sigma_mu - c) / cur.zl[j] - cur.xl[j] - cur.xl[j] / cur.zl[j] * rdl_[j];
    }
    Vec h = rp_ - apply_a_herm(p, pl);
    if (nf_ > 0) {
      const Vec minv_h = llt_.solve(h);
      out.dxf = ldlt_free_.solve(af_.transpose() * minv_h - rdf_);
      out.dy = minv_h - minv_af_ * out.dxf;
    } else {
      out.dxf = Vec::Zero(0);
      out.dy = llt_.solve(h);
    }
    Vec atl, atf;
    apply_at(out.dy, out.dz, atl, atf);
    out.dx.resize(nb_);
    for (int k = 0; k < nb_; ++k) {
      out.dz[k] = rd_[k] - out.dz[k];
      Mat t = cur.x[k] * out.dz[k];
      if (corr) t += corr->dx[k] * corr->dz[k];
      out.dx[k] = herm<Scalar>(sigma_mu * zinv_[k] - cur.x[k] - t * zinv_[k]);
    }
    out.dzl = rdl_ - atl;
    out.dxl.resize(nl_);
    for (int j = 0; j < nl_; ++j) {
      double c = corr ? corr->dxl[j] * corr->dzl[j] : 0.0;
      out.dxl[j] = (sigma_mu - c) / cur.zl[j] - cur.xl[j] - cur.xl[j] / cur.zl[j] * out.dzl[j];
    }
  }

  Vec apply_a_herm(const std::vector<Mat>& p, const Vec& pl) const {
    Vec r = al_ * pl;
    for (int k = 0; k < nb_; ++k) {
      const Mat h = herm(p[k]);
      for (const auto& cf : sf_.coefs[k]) r[cf.row] += sparse_inner(cf.entries, h);
    }
    return r;
  }

  // Largest alpha with x + alpha dx in the cone.
  double max_step(const std::vector<Mat>& x, const Vec& xl, const std::vector<Mat>& dx, const Vec& dxl) const {
    double alpha = std::numeric_limits<double>::infinity();
    for (int k = 0; k < nb_; ++k) {
      const int n = sf_.dims[k];
      double lmin;
      if (n == 1) {
        lmin = std::real(dx[k](0, 0)) / std::real(x[k](0, 0));
      } else {
        Eigen::LLT<Mat> llt(x[k]);
        if (llt.info() != Eigen::Success) return 0.0;
        Mat w = llt.matrixL().solve(dx[k]);
        w = llt.matrixL().solve(w.adjoint().eval());
        Eigen::SelfAdjointEigenSolver<Mat> es(herm<Scalar>(w), Eigen::EigenvaluesOnly);
        lmin = es.eigenvalues().minCoeff();
      }
      if (lmin < 0) alpha = std::min(alpha, -1.0 / lmin);
    }
    for (int j = 0; j < nl_; ++j)
      if (dxl[j] < 0) alpha = std::min(alpha, -xl[j] / dxl[j]);
    return alpha;
  }

  Status detect_ray(const Iterate& cur, double dobj, double pobj) const {
    // Primal infeasibility: b.y > 0 while A^T y + Z is relatively negligible.
    double xnorm2 = cur.xl.squaredNorm() + cur.xf.squaredNorm(), ynorm = cur.y.norm();
    for (const auto& m : cur.x) xnorm2 += m.squaredNorm();
    if (dobj > 0 && ynorm > 1e8) {
      double r2 = 0.0;
      for (int k = 0; k < nb_; ++k) r2 += (atb_[k] + cur.z[k]).squaredNorm();
      r2 += (atl_ + cur.zl).squaredNorm() + atf_.squaredNorm();
      if (std::sqrt(r2) / dobj < 1e-8) return Status::infeasible;
    }
    if (pobj < 0 && std::sqrt(xnorm2) > 1e8) {
      const Vec ax = apply_a(cur.x, cur.xl, cur.xf);
      if (ax.norm() / -pobj < 1e-8) return Status::unbounded;
    }
    return Status::optimal;
  }

  const StandardForm<Scalar>& sf_;
  Options opt_;
  int nb_ = 0, nl_ = 0, nf_ = 0, nu_ = 0;
  Eigen::MatrixXd al_, af_;

  Vec rp_, rdl_, rdf_, atl_, atf_;
  std::vector<Mat> rd_, atb_, zinv_, g_;
  Eigen::MatrixXd schur_, minv_af_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::LDLT<Eigen::MatrixXd> ldlt_free_;
};

}  // namespace

template <typename Scalar>
BlockRef Problem<Scalar>::add_psd_block(std::string name, int dim) {
  if (dim < 1) throw InvalidDimension("add_psd_block: dimension must be positive");
  blocks_.push_back({std::move(name), dim});
  return BlockRef{static_cast<int>(blocks_.size()) - 1};
}

template <typename Scalar>
ScalarRef Problem<Scalar>::add_scalar(std::string name, ScalarDomain domain) {
  scalars_.push_back({std::move(name), domain});
  return ScalarRef{static_cast<int>(scalars_.size()) - 1};
}

template <typename Scalar>
MatrixVar<Scalar> Problem<Scalar>::add_matrix_variable(const std::string& name, int dim) {
  MatrixVar<Scalar> v;
  v.dim = dim;
  const auto basis = sparse_basis<Scalar>(dim);
  for (size_t j = 0; j < basis.size(); ++j) {
    v.coords.push_back(add_scalar(name + "[" + std::to_string(j) + "]"));
    v.basis.push_back(dense(basis[j], dim));
  }
  return v;
}

template <typename Scalar>
void Problem<Scalar>::check_expr(const MatrixExpr<Scalar>& e) const {
  for (const auto& [b, c] : e.blocks()) {
    if (b < 0 || b >= static_cast<int>(blocks_.size())) throw InvalidParameter("expression references unknown block");
    if (blocks_[b].dim != e.dim()) throw InvalidDimension("block '" + blocks_[b].name + "' has mismatched dimension");
  }
  for (const auto& [s, h] : e.scalars()) {
    if (s < 0 || s >= static_cast<int>(scalars_.size())) throw InvalidParameter("expression references unknown scalar");
    if (h.rows() != e.dim() || h.cols() != e.dim()) throw InvalidDimension("scalar coefficient has wrong dimension");
  }
}

template <typename Scalar>
void Problem<Scalar>::check_expr(const ScalarExpr<Scalar>& e) const {
  for (const auto& [b, g] : e.blocks()) {
    if (b < 0 || b >= static_cast<int>(blocks_.size())) throw InvalidParameter("expression references unknown block");
    if (g.rows() != blocks_[b].dim || g.cols() != blocks_[b].dim)
      throw InvalidDimension("coefficient of block '" + blocks_[b].name + "' has wrong dimension");
  }
  for (const auto& [s, v] : e.scalars())
    if (s < 0 || s >= static_cast<int>(scalars_.size())) throw InvalidParameter("expression references unknown scalar");
}

template <typename Scalar>
int Problem<Scalar>::add_equality(MatrixExpr<Scalar> expr) {
  check_expr(expr);
  equalities_.push_back({true, std::move(expr), ScalarExpr<Scalar>{}});
  return static_cast<int>(equalities_.size()) - 1;
}

template <typename Scalar>
int Problem<Scalar>::add_equality(ScalarExpr<Scalar> expr) {
  check_expr(expr);
  equalities_.push_back({false, MatrixExpr<Scalar>(0), std::move(expr)});
  return static_cast<int>(equalities_.size()) - 1;
}

template <typename Scalar>
int Problem<Scalar>::add_lmi(MatrixExpr<Scalar> expr, LmiSense sense) {
  check_expr(expr);
  lmis_.push_back({std::move(expr), sense});
  return static_cast<int>(lmis_.size()) - 1;
}

template <typename Scalar>
void Problem<Scalar>::set_objective(ScalarExpr<Scalar> expr, Sense sense) {
  check_expr(expr);
  objective_ = std::move(expr);
  sense_ = sense;
}

template <typename Scalar>
Matrix<Scalar> Problem<Scalar>::evaluate(const MatrixExpr<Scalar>& e, const Solution<Scalar>& s) const {
  Matrix<Scalar> out = e.constant();
  for (const auto& [b, c] : e.blocks()) out += c * s.blocks[b];
  for (const auto& [k, h] : e.scalars()) out += s.scalars[k] * h;
  return out;
}

template <typename Scalar>
double Problem<Scalar>::evaluate(const ScalarExpr<Scalar>& e, const Solution<Scalar>& s) const {
  double out = e.constant();
  for (const auto& [b, g] : e.blocks()) out += std::real((g * s.blocks[b]).trace());
  for (const auto& [k, v] : e.scalars()) out += v * s.scalars[k];
  return out;
}

template <typename Scalar>
Solution<Scalar> solve(const Problem<Scalar>& problem, const Options& options) {
  Lowering<Scalar> lowering(problem);
  const StandardForm<Scalar> sf = lowering.run();
  Solution<Scalar> sol;
  if (sf.inconsistent) {
    sol.status = Status::infeasible;
    return sol;
  }
  InteriorPoint<Scalar> ipm(sf, options);
  auto res = ipm.run();
  const double sign = sf.negate ? -1.0 : 1.0;

  sol.status = res.status;
  sol.iterations = res.iterations;
  sol.objective_value = sign * res.pobj + sf.objective_constant;
  sol.dual_value = sign * res.dobj + sf.objective_constant;
  sol.gap = res.gap;
  sol.primal_residual = res.pinf;
  sol.dual_residual = res.dinf;

  const auto& it = res.it;
  for (size_t b = 0; b < problem.blocks().size(); ++b) {
    sol.blocks.push_back(it.x[sf.block_of_variable[b]]);
    sol.block_duals.push_back(it.z[sf.block_of_variable[b]]);
  }
  for (size_t s = 0; s < problem.scalars().size(); ++s)
    sol.scalars.push_back(sf.lp_of_scalar[s] >= 0 ? it.xl[sf.lp_of_scalar[s]] : it.xf[sf.free_of_scalar[s]]);
  for (size_t e = 0; e < problem.equalities().size(); ++e) {
    const int dim = sf.dims_of_equality[e];
    const auto& rows = sf.rows_of_equality[e];
    if (dim == 0) {
      Matrix<Scalar> y(1, 1);
      y(0, 0) = rows[0] >= 0 ? sign * it.y[rows[0]] : 0.0;
      sol.equality_duals.push_back(y);
      continue;
    }
    const auto basis = sparse_basis<Scalar>(dim);
    Matrix<Scalar> y = Matrix<Scalar>::Zero(dim, dim);
    for (size_t k = 0; k < basis.size(); ++k)
      if (rows[k] >= 0) y += (sign * it.y[rows[k]]) * dense(basis[k], dim);
    sol.equality_duals.push_back(y);
  }
  for (size_t l = 0; l < problem.lmis().size(); ++l) sol.lmi_duals.push_back(it.z[sf.block_of_lmi[l]]);
  return sol;
}

template <typename Scalar>
double primal_violation(const Problem<Scalar>& problem, const Solution<Scalar>& s) {
  double worst = 0.0;
  for (const auto& eq : problem.equalities()) {
    if (eq.matrix_valued)
      worst = std::max(worst, problem.evaluate(eq.matrix, s).norm());
    else
      worst = std::max(worst, std::abs(problem.evaluate(eq.scalar, s)));
  }
  for (const auto& lmi : problem.lmis()) {
    Matrix<Scalar> v = problem.evaluate(lmi.expr, s);
    if (lmi.sense == LmiSense::nsd) v = -v;
    Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es(herm<Scalar>(v), Eigen::EigenvaluesOnly);
    worst = std::max(worst, -es.eigenvalues().minCoeff());
  }
  for (const auto& b : s.blocks) {
    Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es(herm<Scalar>(b), Eigen::EigenvaluesOnly);
    worst = std::max(worst, -es.eigenvalues().minCoeff());
  }
  for (size_t k = 0; k < problem.scalars().size(); ++k)
    if (problem.scalars()[k].domain == ScalarDomain::nonnegative) worst = std::max(worst, -s.scalars[k]);
  return worst;
}

template class Problem<double>;
template class Problem<std::complex<double>>;
template Solution<double> solve(const Problem<double>&, const Options&);
template Solution<std::complex<double>> solve(const Problem<std::complex<double>>&, const Options&);
template double primal_violation(const Problem<double>&, const Solution<double>&);
template double primal_violation(const Problem<std::complex<double>>&, const Solution<std::complex<double>>&);

}  // namespace steerlab::sdp
