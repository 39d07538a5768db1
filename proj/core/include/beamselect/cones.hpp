#ifndef BEAMSELECT_CONES_HPP
#define BEAMSELECT_CONES_HPP

#include <vector>

#include <Eigen/Dense>

#include "beamselect/instance.hpp"

namespace beamselect {

// Symmetric-cone machinery shared by the interior-point and barrier
// backends. All cones live in svec coordinates: a symmetric n x n matrix
// maps to a vector of length n(n+1)/2 with off-diagonal entries scaled by
// sqrt(2) so that <X,Y> = svec(X)'svec(Y).

enum class ConeKind { nonneg, soc, psd };

struct ConeSpec {
  ConeKind kind;
  // nonneg: number of scalar inequalities; soc: total vector length (1+k);
  // psd: matrix side n (vector length n(n+1)/2).
  int dim;

  int vec_dim() const {
    return kind == ConeKind::psd ? dim * (dim + 1) / 2 : dim;
  }
  // Barrier degree contribution.
  int degree() const {
    switch (kind) {
      case ConeKind::nonneg: return dim;
      case ConeKind::soc: return 2;
      case ConeKind::psd: return dim;
    }
    return 0;
  }
};

int total_vec_dim(const std::vector<ConeSpec>& cones);
int total_degree(const std::vector<ConeSpec>& cones);

Eigen::VectorXd svec(const Eigen::MatrixXd& x);
Eigen::MatrixXd smat(const Eigen::VectorXd& v);

// [[X, -Y], [Y, X]] embedding; Hermitian PSD iff the embedding is PSD.
Eigen::MatrixXd real_embed(const CMatrix& x);

// Identity element e of the cone product (ones / (1,0,..) / svec(I)).
Eigen::VectorXd cone_identity(const std::vector<ConeSpec>& cones);

// True if x lies in the interior of the cone product with margin `tol`.
bool in_cone_interior(const std::vector<ConeSpec>& cones,
                      const Eigen::VectorXd& x, double tol = 0.0);

// sup { a >= 0 : x + a*dx in cone }, capped at `cap`; x must be interior.
double step_to_boundary(const std::vector<ConeSpec>& cones,
                        const Eigen::VectorXd& x, const Eigen::VectorXd& dx,
                        double cap = 1e30);

// Nesterov-Todd scaling W for a strictly feasible pair (s, z), acting
// blockwise. Satisfies lambda = W*z = W^{-T}*s. For the nonnegative and
// second-order blocks W is symmetric; the semidefinite block (congruence
// by R) is not, so the transpose variants are distinct there.
class NTScaling {
 public:
  NTScaling(const std::vector<ConeSpec>& cones, const Eigen::VectorXd& s,
            const Eigen::VectorXd& z);

  Eigen::VectorXd apply(const Eigen::VectorXd& v) const;            // W v
  Eigen::VectorXd apply_transpose(const Eigen::VectorXd& v) const;  // W' v
  Eigen::VectorXd apply_inv(const Eigen::VectorXd& v) const;        // W^{-1} v
  Eigen::VectorXd apply_inv_transpose(const Eigen::VectorXd& v) const;
  const Eigen::VectorXd& lambda() const { return lambda_; }

  // Dense W^{-T} G computed column by column (sizes here are small).
  Eigen::MatrixXd apply_inv_transpose_matrix(const Eigen::MatrixXd& g) const;

 private:
  Eigen::VectorXd apply_impl(const Eigen::VectorXd& v, bool inv,
                             bool transpose) const;

  struct NonnegBlock {
    Eigen::VectorXd d;  // W = diag(d)
  };
  struct SocBlock {
    double eta;
    Eigen::VectorXd wbar;  // J(wbar) = 1
  };
  struct PsdBlock {
    Eigen::MatrixXd r;      // W v = svec(R' smat(v) R)
    Eigen::MatrixXd r_inv;
  };

  const std::vector<ConeSpec>& cones_;
  std::vector<NonnegBlock> nonneg_;
  std::vector<SocBlock> soc_;
  std::vector<PsdBlock> psd_;
  Eigen::VectorXd lambda_;
};

// Jordan-algebra operations used by the predictor-corrector.
// circ: x o y per block; inv_circ: solve lambda o u = v for u.
Eigen::VectorXd jordan_product(const std::vector<ConeSpec>& cones,
                               const Eigen::VectorXd& x,
                               const Eigen::VectorXd& y);
Eigen::VectorXd jordan_solve(const std::vector<ConeSpec>& cones,
                             const Eigen::VectorXd& lambda,
                             const Eigen::VectorXd& v);

}  // namespace beamselect

#endif
