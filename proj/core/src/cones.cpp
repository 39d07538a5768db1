#include "beamselect/cones.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace beamselect {

namespace {
constexpr double kSqrt2 = 1.4142135623730951;

// Smallest positive root of a*t^2 + b*t + c = 0, or +inf.
double smallest_positive_root(double a, double b, double c) {
  const double inf = std::numeric_limits<double>::infinity();
  if (std::abs(a) < 1e-300) {
    if (std::abs(b) < 1e-300) return inf;
    double t = -c / b;
    return t > 0 ? t : inf;
  }
  double disc = b * b - 4 * a * c;
  if (disc < 0) return inf;
  double sq = std::sqrt(disc);
  // Numerically stable pair of roots.
  double q = -0.5 * (b + (b >= 0 ? sq : -sq));
  double r1 = q / a;
  double r2 = (std::abs(q) > 1e-300) ? c / q : inf;
  double best = inf;
  if (r1 > 0) best = std::min(best, r1);
  if (r2 > 0) best = std::min(best, r2);
  return best;
}
}  // namespace

int total_vec_dim(const std::vector<ConeSpec>& cones) {
  int n = 0;
  for (const auto& c : cones) n += c.vec_dim();
  return n;
}

int total_degree(const std::vector<ConeSpec>& cones) {
  int n = 0;
  for (const auto& c : cones) n += c.degree();
  return n;
}

Eigen::VectorXd svec(const Eigen::MatrixXd& x) {
  const int n = static_cast<int>(x.rows());
  Eigen::VectorXd v(n * (n + 1) / 2);
  int k = 0;
  for (int j = 0; j < n; ++j)
    for (int i = j; i < n; ++i)
      v(k++) = (i == j) ? x(i, j) : kSqrt2 * 0.5 * (x(i, j) + x(j, i));
  return v;
}

Eigen::MatrixXd smat(const Eigen::VectorXd& v) {
  const int len = static_cast<int>(v.size());
  const int n = static_cast<int>((std::sqrt(8.0 * len + 1.0) - 1.0) / 2.0 + 0.5);
  if (n * (n + 1) / 2 != len) throw std::invalid_argument("smat: bad length");
  Eigen::MatrixXd x(n, n);
  int k = 0;
  for (int j = 0; j < n; ++j)
    for (int i = j; i < n; ++i) {
      double val = (i == j) ? v(k) : v(k) / kSqrt2;
      x(i, j) = val;
      x(j, i) = val;
      ++k;
    }
  return x;
}

Eigen::MatrixXd real_embed(const CMatrix& x) {
  const int n = static_cast<int>(x.rows());
  const int m = static_cast<int>(x.cols());
  Eigen::MatrixXd e(2 * n, 2 * m);
  e.topLeftCorner(n, m) = x.real();
  e.topRightCorner(n, m) = -x.imag();
  e.bottomLeftCorner(n, m) = x.imag();
  e.bottomRightCorner(n, m) = x.real();
  return e;
}

Eigen::VectorXd cone_identity(const std::vector<ConeSpec>& cones) {
  Eigen::VectorXd e(total_vec_dim(cones));
  int off = 0;
  for (const auto& c : cones) {
    switch (c.kind) {
      case ConeKind::nonneg:
        e.segment(off, c.dim).setOnes();
        break;
      case ConeKind::soc:
        e.segment(off, c.dim).setZero();
        e(off) = 1.0;
        break;
      case ConeKind::psd:
        e.segment(off, c.vec_dim()) =
            svec(Eigen::MatrixXd::Identity(c.dim, c.dim));
        break;
    }
    off += c.vec_dim();
  }
  return e;
}

bool in_cone_interior(const std::vector<ConeSpec>& cones,
                      const Eigen::VectorXd& x, double tol) {
  int off = 0;
  for (const auto& c : cones) {
    switch (c.kind) {
      case ConeKind::nonneg:
        if (x.segment(off, c.dim).minCoeff() <= tol) return false;
        break;
      case ConeKind::soc: {
        double x0 = x(off);
        double n1 = x.segment(off + 1, c.dim - 1).norm();
        if (x0 - n1 <= tol) return false;
        break;
      }
      case ConeKind::psd: {
        Eigen::MatrixXd m = smat(x.segment(off, c.vec_dim()));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m,
                                                          Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() <= tol) return false;
        break;
      }
    }
    off += c.vec_dim();
  }
  return true;
}

double step_to_boundary(const std::vector<ConeSpec>& cones,
                        const Eigen::VectorXd& x, const Eigen::VectorXd& dx,
                        double cap) {
  double alpha = cap;
  int off = 0;
  for (const auto& c : cones) {
    switch (c.kind) {
      case ConeKind::nonneg:
        for (int i = 0; i < c.dim; ++i)
          if (dx(off + i) < 0)
            alpha = std::min(alpha, -x(off + i) / dx(off + i));
        break;
      case ConeKind::soc: {
        // Exit when (x0+a d0)^2 - ||x1+a d1||^2 hits 0 (or x0+a d0 < 0).
        const int k = c.dim - 1;
        double x0 = x(off), d0 = dx(off);
        auto x1 = x.segment(off + 1, k);
        auto d1 = dx.segment(off + 1, k);
        double a = d0 * d0 - d1.squaredNorm();
        double b = 2.0 * (x0 * d0 - x1.dot(d1));
        double cc = x0 * x0 - x1.squaredNorm();
        double root = smallest_positive_root(a, b, cc);
        if (d0 < 0) root = std::min(root, -x0 / d0);
        alpha = std::min(alpha, root);
        break;
      }
      case ConeKind::psd: {
        Eigen::MatrixXd xm = smat(x.segment(off, c.vec_dim()));
        Eigen::MatrixXd dm = smat(dx.segment(off, c.vec_dim()));
        Eigen::LLT<Eigen::MatrixXd> llt(xm);
        if (llt.info() != Eigen::Success)
          throw std::runtime_error("step_to_boundary: psd block not interior");
        Eigen::MatrixXd l = llt.matrixL();
        Eigen::MatrixXd t = l.triangularView<Eigen::Lower>().solve(dm);
        Eigen::MatrixXd w =
            l.triangularView<Eigen::Lower>().solve(t.transpose());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
            0.5 * (w + w.transpose()), Eigen::EigenvaluesOnly);
        double lmin = es.eigenvalues().minCoeff();
        if (lmin < 0) alpha = std::min(alpha, -1.0 / lmin);
        break;
      }
    }
    off += c.vec_dim();
  }
  return alpha;
}

NTScaling::NTScaling(const std::vector<ConeSpec>& cones,
                     const Eigen::VectorXd& s, const Eigen::VectorXd& z)
    : cones_(cones) {
  lambda_.resize(total_vec_dim(cones));
  int off = 0;
  for (const auto& c : cones_) {
    switch (c.kind) {
      case ConeKind::nonneg: {
        NonnegBlock b;
        b.d = (s.segment(off, c.dim).array() / z.segment(off, c.dim).array())
                  .sqrt()
                  .matrix();
        lambda_.segment(off, c.dim) =
            (s.segment(off, c.dim).array() * z.segment(off, c.dim).array())
                .sqrt()
                .matrix();
        nonneg_.push_back(std::move(b));
        break;
      }
      case ConeKind::soc: {
        const int k = c.dim - 1;
        auto sb = s.segment(off, c.dim);
        auto zb = z.segment(off, c.dim);
        double js = sb(0) * sb(0) - sb.tail(k).squaredNorm();
        double jz = zb(0) * zb(0) - zb.tail(k).squaredNorm();
        if (js <= 0 || jz <= 0)
          throw std::runtime_error("NTScaling: soc block not interior");
        Eigen::VectorXd sbar = sb / std::sqrt(js);
        Eigen::VectorXd zbar = zb / std::sqrt(jz);
        double gamma = std::sqrt((1.0 + sbar.dot(zbar)) / 2.0);
        SocBlock b;
        b.wbar.resize(c.dim);
        b.wbar(0) = (sbar(0) + zbar(0)) / (2.0 * gamma);
        b.wbar.tail(k) = (sbar.tail(k) - zbar.tail(k)) / (2.0 * gamma);
        b.eta = std::sqrt(std::sqrt(js) / std::sqrt(jz));
        soc_.push_back(b);
        const SocBlock& bb = soc_.back();
        // lambda = W z (the scaled point), with
        // W = eta * [[w0, w1'], [w1, I + w1 w1'/(1+w0)]].
        double w0 = bb.wbar(0);
        auto w1 = bb.wbar.tail(k);
        double w1z = w1.dot(zb.tail(k));
        Eigen::VectorXd lam(c.dim);
        lam(0) = w0 * zb(0) + w1z;
        lam.tail(k) = zb(0) * w1 + zb.tail(k) + (w1z / (1.0 + w0)) * w1;
        lambda_.segment(off, c.dim) = bb.eta * lam;
        break;
      }
      case ConeKind::psd: {
        Eigen::MatrixXd sm = smat(s.segment(off, c.vec_dim()));
        Eigen::MatrixXd zm = smat(z.segment(off, c.vec_dim()));
        Eigen::LLT<Eigen::MatrixXd> ls(sm), lz(zm);
        if (ls.info() != Eigen::Success || lz.info() != Eigen::Success)
          throw std::runtime_error("NTScaling: psd block not interior");
        Eigen::MatrixXd lsm = ls.matrixL();
        Eigen::MatrixXd lzm = lz.matrixL();
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(
            lzm.transpose() * lsm, Eigen::ComputeFullU | Eigen::ComputeFullV);
        Eigen::VectorXd sig = svd.singularValues();
        Eigen::VectorXd isqrt = sig.array().sqrt().inverse().matrix();
        PsdBlock b;
        // R = L_s V diag(sig^-1/2); then R' Z R = R^{-1} S R^{-T} = diag(sig).
        b.r = lsm * svd.matrixV() * isqrt.asDiagonal();
        b.r_inv = isqrt.asDiagonal() * svd.matrixU().transpose() *
                  lzm.transpose();
        Eigen::MatrixXd lam = sig.asDiagonal();
        lambda_.segment(off, c.vec_dim()) = svec(lam);
        psd_.push_back(std::move(b));
        break;
      }
    }
    off += c.vec_dim();
  }
}

Eigen::VectorXd NTScaling::apply_impl(const Eigen::VectorXd& v, bool inv,
                                      bool transpose) const {
  Eigen::VectorXd out(v.size());
  int off = 0, in_ = 0, is = 0, ip = 0;
  for (const auto& c : cones_) {
    switch (c.kind) {
      case ConeKind::nonneg: {
        const auto& d = nonneg_[in_++].d;
        if (inv)
          out.segment(off, c.dim) =
              v.segment(off, c.dim).array() / d.array();
        else
          out.segment(off, c.dim) =
              d.array() * v.segment(off, c.dim).array();
        break;
      }
      case ConeKind::soc: {
        // Symmetric: eta^{+-1} [[w0, s*w1'], [s*w1, I + w1 w1'/(1+w0)]]
        // with s = -1 for the inverse.
        const SocBlock& b = soc_[is++];
        const int k = c.dim - 1;
        auto vb = v.segment(off, c.dim);
        double w0 = b.wbar(0);
        auto w1 = b.wbar.tail(k);
        double w1v = w1.dot(vb.tail(k));
        double sign = inv ? -1.0 : 1.0;
        double scale = inv ? 1.0 / b.eta : b.eta;
        out(off) = scale * (w0 * vb(0) + sign * w1v);
        out.segment(off + 1, k) =
            scale *
            (sign * vb(0) * w1 + vb.tail(k) + (w1v / (1.0 + w0)) * w1);
        break;
      }
      case ConeKind::psd: {
        // W: V -> R'VR;  W': V -> RVR';  W^{-1}: V -> R^{-T}VR^{-1};
        // W^{-T}: V -> R^{-1}VR^{-T}.
        const PsdBlock& b = psd_[ip++];
        Eigen::MatrixXd vm = smat(v.segment(off, c.vec_dim()));
        Eigen::MatrixXd r;
        if (!inv && !transpose)
          r = b.r.transpose() * vm * b.r;
        else if (!inv && transpose)
          r = b.r * vm * b.r.transpose();
        else if (inv && !transpose)
          r = b.r_inv.transpose() * vm * b.r_inv;
        else
          r = b.r_inv * vm * b.r_inv.transpose();
        out.segment(off, c.vec_dim()) = svec(0.5 * (r + r.transpose()));
        break;
      }
    }
    off += c.vec_dim();
  }
  return out;
}

Eigen::VectorXd NTScaling::apply(const Eigen::VectorXd& v) const {
  return apply_impl(v, false, false);
}
Eigen::VectorXd NTScaling::apply_transpose(const Eigen::VectorXd& v) const {
  return apply_impl(v, false, true);
}
Eigen::VectorXd NTScaling::apply_inv(const Eigen::VectorXd& v) const {
  return apply_impl(v, true, false);
}
Eigen::VectorXd NTScaling::apply_inv_transpose(
    const Eigen::VectorXd& v) const {
  return apply_impl(v, true, true);
}

Eigen::MatrixXd NTScaling::apply_inv_transpose_matrix(
    const Eigen::MatrixXd& g) const {
  Eigen::MatrixXd out(g.rows(), g.cols());
  for (int j = 0; j < g.cols(); ++j) out.col(j) = apply_inv_transpose(g.col(j));
  return out;
}

Eigen::VectorXd jordan_product(const std::vector<ConeSpec>& cones,
                               const Eigen::VectorXd& x,
                               const Eigen::VectorXd& y) {
  Eigen::VectorXd out(x.size());
  int off = 0;
  for (const auto& c : cones) {
    switch (c.kind) {
      case ConeKind::nonneg:
        out.segment(off, c.dim) =
            x.segment(off, c.dim).array() * y.segment(off, c.dim).array();
        break;
      case ConeKind::soc: {
        const int k = c.dim - 1;
        auto xb = x.segment(off, c.dim);
        auto yb = y.segment(off, c.dim);
        out(off) = xb.dot(yb);
        out.segment(off + 1, k) = xb(0) * yb.tail(k) + yb(0) * xb.tail(k);
        break;
      }
      case ConeKind::psd: {
        Eigen::MatrixXd xm = smat(x.segment(off, c.vec_dim()));
        Eigen::MatrixXd ym = smat(y.segment(off, c.vec_dim()));
        out.segment(off, c.vec_dim()) = svec(0.5 * (xm * ym + ym * xm));
        break;
      }
    }
    off += c.vec_dim();
  }
  return out;
}

Eigen::VectorXd jordan_solve(const std::vector<ConeSpec>& cones,
                             const Eigen::VectorXd& lambda,
                             const Eigen::VectorXd& v) {
  Eigen::VectorXd out(v.size());
  int off = 0;
  for (const auto& c : cones) {
    switch (c.kind) {
      case ConeKind::nonneg:
        out.segment(off, c.dim) =
            v.segment(off, c.dim).array() / lambda.segment(off, c.dim).array();
        break;
      case ConeKind::soc: {
        const int k = c.dim - 1;
        auto lb = lambda.segment(off, c.dim);
        auto vb = v.segment(off, c.dim);
        double det = lb(0) * lb(0) - lb.tail(k).squaredNorm();
        double u0 = (lb(0) * vb(0) - lb.tail(k).dot(vb.tail(k))) / det;
        out(off) = u0;
        out.segment(off + 1, k) = (vb.tail(k) - u0 * lb.tail(k)) / lb(0);
        break;
      }
      case ConeKind::psd: {
        // lambda is diagonal in the scaled space; solve per eigen-pair.
        Eigen::MatrixXd lm = smat(lambda.segment(off, c.vec_dim()));
        Eigen::MatrixXd vm = smat(v.segment(off, c.vec_dim()));
        Eigen::MatrixXd um(c.dim, c.dim);
        for (int i = 0; i < c.dim; ++i)
          for (int j = 0; j < c.dim; ++j)
            um(i, j) = 2.0 * vm(i, j) / (lm(i, i) + lm(j, j));
        out.segment(off, c.vec_dim()) = svec(um);
        break;
      }
    }
    off += c.vec_dim();
  }
  return out;
}

}  // namespace beamselect
