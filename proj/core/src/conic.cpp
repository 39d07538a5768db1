#include "beamselect/conic.hpp"

#include "beamselect/barrier_solver.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>

namespace beamselect {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<int> normalize_excluded(int n, const std::vector<int>& excluded) {
  std::set<int> set(excluded.begin(), excluded.end());
  for (int i : set)
    if (i < 0 || i >= n) throw ConfigError("excluded antenna index out of range");
  return {set.begin(), set.end()};
}

std::vector<int> complement(int n, const std::vector<int>& excluded) {
  std::vector<bool> out(n, false);
  for (int i : excluded) out[i] = true;
  std::vector<int> active;
  for (int i = 0; i < n; ++i)
    if (!out[i]) active.push_back(i);
  return active;
}

// Incremental assembly of (c, G, h, cones).
class ProgramBuilder {
 public:
  explicit ProgramBuilder(int nvar) : nvar_(nvar), c_(Eigen::VectorXd::Zero(nvar)) {}

  void set_cost(int var, double v) { c_(var) = v; }

  // Opens a cone block and returns its first row index.
  int begin_cone(ConeKind kind, int dim) {
    ConeSpec spec{kind, dim};
    int row = rows_;
    rows_ += spec.vec_dim();
    cones_.push_back(spec);
    h_.resize(rows_, 0.0);
    return row;
  }

  void g(int row, int col, double v) {
    if (v != 0.0) trips_.push_back({row, col, v});
  }
  void h(int row, double v) { h_[row] = v; }

  ConeProgramData finalize() const {
    ConeProgramData d;
    d.c = c_;
    d.g = Eigen::MatrixXd::Zero(rows_, nvar_);
    for (const auto& t : trips_) d.g(t.row, t.col) += t.val;
    d.h = Eigen::Map<const Eigen::VectorXd>(h_.data(), rows_);
    d.cones = cones_;
    return d;
  }

 private:
  int nvar_;
  int rows_ = 0;
  Eigen::VectorXd c_;
  struct Entry {
    int row, col;
    double val;
  };
  std::vector<Entry> trips_;
  std::vector<double> h_;
  std::vector<ConeSpec> cones_;
};

// One SINR second-order cone per user:
//   (1/sqrt(gamma_m sigma_m^2)) Re(w_m^H h_m)
//     >= sqrt( sum_{l != m} |w_l^H h_m|^2 + 1 ).
// a_idx/b_idx map (user, active-row position) to the real/imaginary
// beamformer variable.
template <typename AIdx, typename BIdx>
void add_sinr_cones(ProgramBuilder& pb, const CMatrix& h_active,
                    const RVector& gamma, const RVector& sigma2, AIdx a_idx,
                    BIdx b_idx) {
  const int np = static_cast<int>(h_active.rows());
  const int m = static_cast<int>(h_active.cols());
  for (int u = 0; u < m; ++u) {
    const double alpha = 1.0 / std::sqrt(gamma(u) * sigma2(u));
    int row = pb.begin_cone(ConeKind::soc, 1 + 2 * (m - 1) + 1);
    for (int i = 0; i < np; ++i) {
      pb.g(row, a_idx(u, i), -alpha * h_active(i, u).real());
      pb.g(row, b_idx(u, i), -alpha * h_active(i, u).imag());
    }
    int r = row + 1;
    for (int l = 0; l < m; ++l) {
      if (l == u) continue;
      for (int i = 0; i < np; ++i) {
        // Re(w_l^H h_u), Im(w_l^H h_u)
        pb.g(r, a_idx(l, i), -h_active(i, u).real());
        pb.g(r, b_idx(l, i), -h_active(i, u).imag());
        pb.g(r + 1, a_idx(l, i), -h_active(i, u).imag());
        pb.g(r + 1, b_idx(l, i), h_active(i, u).real());
      }
      r += 2;
    }
    pb.h(r, 1.0);  // the additive noise-normalized constant
  }
}

// Rotates each column so that w_m^H h_m is real nonnegative.
void canonicalize_phase(CMatrix& w, const CMatrix& h) {
  for (int m = 0; m < w.cols(); ++m) {
    std::complex<double> u = (w.col(m).adjoint() * h.col(m))(0);
    double mag = std::abs(u);
    if (mag > 0) w.col(m) *= u / mag;
  }
}

// Hermitian basis matrix for lifted-variable index k within an n x n
// Hermitian block: first n are diagonal entries, then the strict upper
// triangle real parts (column-major), then imaginary parts.
CMatrix hermitian_basis(int n, int k) {
  CMatrix b = CMatrix::Zero(n, n);
  if (k < n) {
    b(k, k) = 1.0;
    return b;
  }
  k -= n;
  const int pairs = n * (n - 1) / 2;
  bool imag = k >= pairs;
  if (imag) k -= pairs;
  int idx = 0;
  for (int j = 1; j < n; ++j)
    for (int i = 0; i < j; ++i, ++idx)
      if (idx == k) {
        if (imag) {
          b(i, j) = std::complex<double>(0, 1);
          b(j, i) = std::complex<double>(0, -1);
        } else {
          b(i, j) = 1.0;
          b(j, i) = 1.0;
        }
        return b;
      }
  throw UsageError("hermitian_basis: index out of range");
}

CMatrix lifted_from_vars(const Eigen::VectorXd& x, int offset, int n) {
  CMatrix w = CMatrix::Zero(n, n);
  const int per = n * n;
  for (int k = 0; k < per; ++k) w += x(offset + k) * hermitian_basis(n, k);
  return w;
}

ConicProgram build_sdr_impl(const ProblemInstance& inst,
                            const std::vector<int>& excluded, double lambda,
                            const RVector* weights) {
  if (inst.config.csi_mode != CsiMode::robust)
    throw UsageError("build_rbf_sdr requires robust csi_mode");
  ConicProgram prog;
  prog.kind = ConicKind::rbf_sdr;
  prog.n = inst.n();
  prog.m = inst.m();
  prog.excluded_rows = normalize_excluded(prog.n, excluded);
  prog.active_rows = complement(prog.n, prog.excluded_rows);

  const int np = static_cast<int>(prog.active_rows.size());
  const int m = prog.m;
  const int per = np * np;  // lifted parameters per user
  const int nvar = m * per + m;
  prog.slack_offset = m * per;

  CMatrix h_active(np, m);
  for (int i = 0; i < np; ++i)
    h_active.row(i) = inst.channel.row(prog.active_rows[i]);

  ProgramBuilder pb(nvar);
  // Objective: sum of traces (+ optional reweighted diagonal penalty).
  for (int u = 0; u < m; ++u)
    for (int i = 0; i < np; ++i) {
      double cost = 1.0;
      if (weights) cost += lambda * (*weights)(prog.active_rows[i]);
      pb.set_cost(u * per + i, cost);
    }

  // W_u >= 0 blocks.
  for (int u = 0; u < m; ++u) {
    int row = pb.begin_cone(ConeKind::psd, 2 * np);
    for (int k = 0; k < per; ++k) {
      Eigen::VectorXd col = svec(real_embed(hermitian_basis(np, k)));
      for (int r = 0; r < col.size(); ++r) pb.g(row + r, u * per + k, -col(r));
    }
  }
  // Slack nonnegativity.
  {
    int row = pb.begin_cone(ConeKind::nonneg, m);
    for (int u = 0; u < m; ++u) pb.g(row + u, prog.slack_offset + u, -1.0);
  }
  // S-lemma LMIs: with Q_u = (1/gamma_u) W_u - sum_{j!=u} W_j,
  //   [[Q_u + t_u I, Q_u h_u], [h_u^H Q_u, h_u^H Q_u h_u - sigma_u^2 -
  //   t_u eps_u^2]] >= 0.
  for (int u = 0; u < m; ++u) {
    const CVector hu = h_active.col(u);
    const double gamma = inst.config.sinr_targets(u);
    const double sigma2 = inst.config.noise_vars(u);
    const double eps = inst.config.uncertainty_radii(u);
    int row = pb.begin_cone(ConeKind::psd, 2 * (np + 1));
    for (int j = 0; j < m; ++j) {
      const double kappa = (j == u) ? 1.0 / gamma : -1.0;
      for (int k = 0; k < per; ++k) {
        CMatrix b = kappa * hermitian_basis(np, k);
        CMatrix l = CMatrix::Zero(np + 1, np + 1);
        l.topLeftCorner(np, np) = b;
        l.topRightCorner(np, 1) = b * hu;
        l.bottomLeftCorner(1, np) = (b * hu).adjoint();
        l(np, np) = (hu.adjoint() * b * hu)(0).real();
        Eigen::VectorXd col = svec(real_embed(l));
        for (int r = 0; r < col.size(); ++r)
          pb.g(row + r, j * per + k, -col(r));
      }
    }
    {
      CMatrix l = CMatrix::Zero(np + 1, np + 1);
      l.topLeftCorner(np, np) = CMatrix::Identity(np, np);
      l(np, np) = -eps * eps;
      Eigen::VectorXd col = svec(real_embed(l));
      for (int r = 0; r < col.size(); ++r)
        pb.g(row + r, prog.slack_offset + u, -col(r));
    }
    {
      CMatrix cmat = CMatrix::Zero(np + 1, np + 1);
      cmat(np, np) = -sigma2;
      Eigen::VectorXd hc = svec(real_embed(cmat));
      for (int r = 0; r < hc.size(); ++r)
        if (hc(r) != 0.0) pb.h(row + r, hc(r));
    }
  }

  prog.data = pb.finalize();
  return prog;
}

}  // namespace

ConicProgram build_bf_socp(const ProblemInstance& inst,
                           const std::vector<int>& excluded) {
  if (inst.config.csi_mode == CsiMode::robust &&
      (inst.config.uncertainty_radii.array() != 0).any())
    throw UsageError("build_bf_socp requires perfect CSI");
  ConicProgram prog;
  prog.kind = ConicKind::bf_socp;
  prog.n = inst.n();
  prog.m = inst.m();
  prog.excluded_rows = normalize_excluded(prog.n, excluded);
  prog.active_rows = complement(prog.n, prog.excluded_rows);

  const int np = static_cast<int>(prog.active_rows.size());
  const int m = prog.m;
  const int nvar = 1 + 2 * np * m;
  prog.epi_offset = 0;
  prog.w_offset = 1;
  auto a_idx = [&](int u, int i) { return 1 + u * 2 * np + i; };
  auto b_idx = [&](int u, int i) { return 1 + u * 2 * np + np + i; };

  CMatrix h_active(np, m);
  for (int i = 0; i < np; ++i)
    h_active.row(i) = inst.channel.row(prog.active_rows[i]);

  ProgramBuilder pb(nvar);
  pb.set_cost(0, 1.0);  // minimize t >= ||W||_F
  {
    int row = pb.begin_cone(ConeKind::soc, 1 + 2 * np * m);
    pb.g(row, 0, -1.0);
    for (int v = 0; v < 2 * np * m; ++v) pb.g(row + 1 + v, 1 + v, -1.0);
  }
  add_sinr_cones(pb, h_active, inst.config.sinr_targets,
                 inst.config.noise_vars, a_idx, b_idx);
  prog.channel = inst.channel;
  prog.data = pb.finalize();
  return prog;
}

ConicProgram build_rbf_sdr(const ProblemInstance& inst,
                           const std::vector<int>& excluded) {
  return build_sdr_impl(inst, excluded, 0.0, nullptr);
}

ConicProgram build_rbf_sdr_rowreg(const ProblemInstance& inst, double lambda,
                                  const RVector& weights) {
  if (weights.size() != inst.n())
    throw UsageError("rowreg weights must have one entry per antenna");
  ConicProgram prog = build_sdr_impl(inst, {}, lambda, &weights);
  prog.rowreg_offset = 0;  // marker: diagonal penalty active
  return prog;
}

ConicProgram build_z_relaxation(const ProblemInstance& inst,
                                const std::vector<int>& included,
                                const std::vector<int>& excluded,
                                double big_c) {
  if (inst.config.csi_mode == CsiMode::robust)
    throw UsageError("z relaxation supports perfect CSI only");
  if (big_c <= 0) throw UsageError("big_c must be positive");
  ConicProgram prog;
  prog.kind = ConicKind::z_relaxation;
  prog.n = inst.n();
  prog.m = inst.m();
  prog.big_c = big_c;
  prog.excluded_rows = normalize_excluded(prog.n, excluded);
  prog.active_rows = complement(prog.n, prog.excluded_rows);
  std::set<int> inc(included.begin(), included.end());
  for (int i : inc) {
    if (i < 0 || i >= prog.n) throw ConfigError("included index out of range");
    if (std::find(prog.excluded_rows.begin(), prog.excluded_rows.end(), i) !=
        prog.excluded_rows.end())
      throw ConfigError("antenna both included and excluded");
  }

  const int np = static_cast<int>(prog.active_rows.size());
  const int m = prog.m;
  // Variables: epigraph t, beamformer reals, free z entries.
  prog.z_index.assign(prog.n, -1);
  int n_free = 0;
  for (int i : prog.active_rows)
    prog.z_index[i] = inc.count(i) ? -2 : n_free++;
  const int z0 = 1 + 2 * np * m;
  for (int i = 0; i < prog.n; ++i)
    if (prog.z_index[i] >= 0) prog.z_index[i] += z0;
  const int nvar = z0 + n_free;
  prog.epi_offset = 0;
  prog.w_offset = 1;
  auto a_idx = [&](int u, int i) { return 1 + u * 2 * np + i; };
  auto b_idx = [&](int u, int i) { return 1 + u * 2 * np + np + i; };

  CMatrix h_active(np, m);
  for (int i = 0; i < np; ++i)
    h_active.row(i) = inst.channel.row(prog.active_rows[i]);

  ProgramBuilder pb(nvar);
  pb.set_cost(0, 1.0);
  {
    int row = pb.begin_cone(ConeKind::soc, 1 + 2 * np * m);
    pb.g(row, 0, -1.0);
    for (int v = 0; v < 2 * np * m; ++v) pb.g(row + 1 + v, 1 + v, -1.0);
  }
  add_sinr_cones(pb, h_active, inst.config.sinr_targets,
                 inst.config.noise_vars, a_idx, b_idx);
  // Row-norm gates ||W(n,:)|| <= big_c * z_n.
  for (int i = 0; i < np; ++i) {
    const int ant = prog.active_rows[i];
    int row = pb.begin_cone(ConeKind::soc, 1 + 2 * m);
    if (prog.z_index[ant] == -2)
      pb.h(row, big_c);  // z fixed to 1
    else
      pb.g(row, prog.z_index[ant], -big_c);
    for (int u = 0; u < m; ++u) {
      pb.g(row + 1 + 2 * u, a_idx(u, i), -1.0);
      pb.g(row + 2 + 2 * u, b_idx(u, i), -1.0);
    }
  }
  // Box 0 <= z <= 1 and the budget z'1 <= L.
  if (n_free > 0) {
    int row = pb.begin_cone(ConeKind::nonneg, 2 * n_free);
    int k = 0;
    for (int i = 0; i < prog.n; ++i)
      if (prog.z_index[i] >= 0) {
        pb.g(row + 2 * k, prog.z_index[i], -1.0);      // z >= 0
        pb.g(row + 2 * k + 1, prog.z_index[i], 1.0);   // 1 - z >= 0
        pb.h(row + 2 * k + 1, 1.0);
        ++k;
      }
  }
  {
    int row = pb.begin_cone(ConeKind::nonneg, 1);
    pb.h(row, static_cast<double>(inst.l() - static_cast<int>(inc.size())));
    for (int i = 0; i < prog.n; ++i)
      if (prog.z_index[i] >= 0) pb.g(row, prog.z_index[i], 1.0);
  }
  prog.channel = inst.channel;
  prog.data = pb.finalize();
  return prog;
}

ConicProgram build_bf_socp_rowreg(const ProblemInstance& inst, double lambda,
                                  const RVector& weights) {
  if (inst.config.csi_mode == CsiMode::robust &&
      (inst.config.uncertainty_radii.array() != 0).any())
    throw UsageError("build_bf_socp_rowreg requires perfect CSI");
  if (weights.size() != inst.n())
    throw UsageError("rowreg weights must have one entry per antenna");
  ConicProgram prog;
  prog.kind = ConicKind::bf_socp;
  prog.n = inst.n();
  prog.m = inst.m();
  prog.active_rows = complement(prog.n, {});

  const int np = prog.n;
  const int m = prog.m;
  // Variables: quadratic epigraph v, beamformer reals, per-row bounds t_n.
  const int nvar = 1 + 2 * np * m + np;
  prog.epi_offset = 0;
  prog.w_offset = 1;
  prog.rowreg_offset = 1 + 2 * np * m;
  auto a_idx = [&](int u, int i) { return 1 + u * 2 * np + i; };
  auto b_idx = [&](int u, int i) { return 1 + u * 2 * np + np + i; };

  ProgramBuilder pb(nvar);
  pb.set_cost(0, 1.0);  // v >= ||W||_F^2
  for (int i = 0; i < np; ++i)
    pb.set_cost(prog.rowreg_offset + i, lambda * weights(i));
  {
    // Rotated-cone encoding: ((v+1)/2, (v-1)/2, vec(W)) in an SOC.
    int row = pb.begin_cone(ConeKind::soc, 2 + 2 * np * m);
    pb.g(row, 0, -0.5);
    pb.h(row, 0.5);
    pb.g(row + 1, 0, -0.5);
    pb.h(row + 1, -0.5);
    for (int v = 0; v < 2 * np * m; ++v) pb.g(row + 2 + v, 1 + v, -1.0);
  }
  add_sinr_cones(pb, inst.channel, inst.config.sinr_targets,
                 inst.config.noise_vars, a_idx, b_idx);
  // t_n >= |W(n, u)| entrywise (epigraph of the row infinity norm).
  for (int i = 0; i < np; ++i)
    for (int u = 0; u < m; ++u) {
      int row = pb.begin_cone(ConeKind::soc, 3);
      pb.g(row, prog.rowreg_offset + i, -1.0);
      pb.g(row + 1, a_idx(u, i), -1.0);
      pb.g(row + 2, b_idx(u, i), -1.0);
    }
  prog.channel = inst.channel;
  prog.data = pb.finalize();
  return prog;
}

std::pair<BeamformerMatrix, double> extract_rank_one(
    const std::vector<CMatrix>& lifted, const std::vector<int>& active_rows,
    int n_total) {
  const int np = static_cast<int>(active_rows.size());
  const int m = static_cast<int>(lifted.size());
  CMatrix w = CMatrix::Zero(n_total, m);
  double min_ratio = kInf;
  for (int u = 0; u < m; ++u) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(lifted[u]);
    const auto& ev = es.eigenvalues();  // ascending
    double l1 = ev(np - 1);
    double l2 = np >= 2 ? ev(np - 2) : 0.0;
    double ratio = (l2 <= 1e-7 * std::max(l1, 0.0) || l2 <= 0.0)
                       ? kInf
                       : l1 / l2;
    min_ratio = std::min(min_ratio, ratio);
    CVector col = std::sqrt(std::max(l1, 0.0)) * es.eigenvectors().col(np - 1);
    for (int i = 0; i < np; ++i) w(active_rows[i], u) = col(i);
  }
  return {BeamformerMatrix::from_dense(w, 0.0), min_ratio};
}

ConicSolution solve(const ConicProgram& prog, ConicBackend backend) {
  IpmSolution raw = backend == ConicBackend::ipm
                        ? solve_cone_program(prog.data)
                        : solve_cone_program_barrier(prog.data);
  ConicSolution sol;
  sol.row_powers = RVector::Zero(prog.n);
  if (raw.status == IpmStatus::primal_infeasible) {
    sol.status = ConicSolution::Status::infeasible;
    sol.objective = kInf;
    sol.w.w = CMatrix::Zero(prog.n, prog.m);
    return sol;
  }
  if (raw.status != IpmStatus::optimal) {
    sol.status = ConicSolution::Status::numerical_error;
    return sol;
  }
  sol.status = ConicSolution::Status::optimal;
  const int np = static_cast<int>(prog.active_rows.size());

  if (prog.kind == ConicKind::rbf_sdr) {
    const int per = np * np;
    sol.lifted.reserve(prog.m);
    for (int u = 0; u < prog.m; ++u)
      sol.lifted.push_back(lifted_from_vars(raw.x, u * per, np));
    sol.objective = 0.0;
    for (int u = 0; u < prog.m; ++u)
      sol.objective += sol.lifted[u].trace().real();
    auto [w, ratio] = extract_rank_one(sol.lifted, prog.active_rows, prog.n);
    sol.w = std::move(w);
    sol.rank_ratio = ratio;
    sol.rank_warning = ratio < 1e4;
    for (int i = 0; i < np; ++i) {
      double p = 0.0;
      for (int u = 0; u < prog.m; ++u)
        p += sol.lifted[u](i, i).real();
      sol.row_powers(prog.active_rows[i]) = std::max(p, 0.0);
    }
    return sol;
  }

  // SOCP-shaped programs: recover W from the real parametrization.
  CMatrix w = CMatrix::Zero(prog.n, prog.m);
  for (int u = 0; u < prog.m; ++u)
    for (int i = 0; i < np; ++i) {
      double re = raw.x(prog.w_offset + u * 2 * np + i);
      double im = raw.x(prog.w_offset + u * 2 * np + np + i);
      w(prog.active_rows[i], u) = std::complex<double>(re, im);
    }
  if (prog.channel.size() > 0) canonicalize_phase(w, prog.channel);
  sol.objective = w.squaredNorm();
  for (int i = 0; i < prog.n; ++i) sol.row_powers(i) = w.row(i).squaredNorm();
  if (prog.kind == ConicKind::z_relaxation) {
    sol.z_values = RVector::Zero(prog.n);
    for (int i = 0; i < prog.n; ++i) {
      if (prog.z_index[i] == -2)
        sol.z_values(i) = 1.0;
      else if (prog.z_index[i] >= 0)
        sol.z_values(i) = raw.x(prog.z_index[i]);
    }
  }
  if (prog.rowreg_offset >= 0 && prog.kind == ConicKind::bf_socp) {
    sol.row_magnitudes = raw.x.segment(prog.rowreg_offset, prog.n);
  }
  sol.w = BeamformerMatrix::from_dense(w, 0.0);
  return sol;
}

bool check_sdr_tightness(const ProblemInstance& inst,
                         const std::vector<int>& subset, std::string* reason) {
  const int m = inst.m();
  std::vector<int> s = normalize_excluded(inst.n(), subset);  // validates/sorts
  const int ns = static_cast<int>(s.size());
  if (ns < m) {
    if (reason) *reason = "subset smaller than user count";
    return false;
  }
  CMatrix ht(ns, m);
  for (int i = 0; i < ns; ++i) ht.row(i) = inst.channel.row(s[i]);
  for (int u = 0; u < m; ++u) {
    CMatrix rest(ns, m - 1);
    int k = 0;
    for (int j = 0; j < m; ++j)
      if (j != u) rest.col(k++) = ht.col(j);
    double eps = inst.config.uncertainty_radii(u);
    double lhs;
    if (m == 1) {
      lhs = ht.col(u).squaredNorm();
    } else {
      CMatrix gram = rest.adjoint() * rest;
      Eigen::FullPivLU<CMatrix> lu(gram);
      if (!lu.isInvertible()) {
        if (reason) *reason = "rank-deficient co-channel matrix";
        return false;
      }
      CVector proj = ht.col(u) - rest * lu.solve(rest.adjoint() * ht.col(u));
      lhs = proj.squaredNorm();
    }
    double rhs =
        1.0 + m + (m - 1.0 / m) * inst.config.sinr_targets(u);
    if (eps == 0.0) {
      if (lhs <= 0.0) {
        if (reason) *reason = "zero residual channel";
        return false;
      }
      continue;
    }
    if (!(lhs / (eps * eps) > rhs)) {
      if (reason) *reason = "separation condition violated";
      return false;
    }
  }
  return true;
}

void dump_program(const ConicProgram& prog, std::ostream& os) {
  const auto& d = prog.data;
  os << "conic-program v1\n";
  os << "vars " << d.c.size() << " rows " << d.h.size() << "\n";
  os << "objective";
  for (int i = 0; i < d.c.size(); ++i) os << ' ' << d.c(i);
  os << "\ncones";
  for (const auto& c : d.cones) {
    switch (c.kind) {
      case ConeKind::nonneg: os << " nonneg:" << c.dim; break;
      case ConeKind::soc: os << " soc:" << c.dim; break;
      case ConeKind::psd: os << " psd:" << c.dim; break;
    }
  }
  os << "\nh";
  for (int i = 0; i < d.h.size(); ++i) os << ' ' << d.h(i);
  os << "\ntriplets\n";
  for (int r = 0; r < d.g.rows(); ++r)
    for (int c = 0; c < d.g.cols(); ++c)
      if (d.g(r, c) != 0.0) os << r << ' ' << c << ' ' << d.g(r, c) << '\n';
}

}  // namespace beamselect
