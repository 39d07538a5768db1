#include "beamselect/gnn.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <random>

#include <Eigen/SVD>

namespace beamselect {

namespace {

constexpr char kCheckpointMagic[] = "beamselect-gnn v1\n";
constexpr int kMixCount = 13;

bool all_finite(const RMatrix& a) { return a.allFinite(); }

// Stage indices into GnnParams::mix (stage k of the fixed architecture
// lives at mix[k - 4]).
enum Stage {
  kEdgeMsg1 = 0,    // stage 4
  kUserMsg1 = 1,    // stage 5
  kSelfMsg1 = 2,    // stage 6
  kMsgOut1 = 3,     // stage 7
  kCombine1 = 4,    // stage 8
  kUpdate1 = 5,     // stage 9
  kEdgeMsg2 = 6,    // stage 10
  kAntMsg2 = 7,     // stage 11
  kSelfMsg2 = 8,    // stage 12
  kMsgOut2 = 9,     // stage 13
  kCombine2 = 10,   // stage 14
  kUpdate2 = 11,    // stage 15
  kReadout = 12,    // stage 16
};

}  // namespace

void GraphSample::validate() const {
  if (n_antennas <= 0 || n_users <= 0)
    throw UsageError("graph sample: empty vertex set");
  if (antenna_features.rows() != n_antennas ||
      antenna_features.cols() != kAntennaFeatureDim ||
      user_features.rows() != n_users ||
      user_features.cols() != kUserFeatureDim ||
      edge_features.rows() !=
          static_cast<Eigen::Index>(n_antennas) * n_users ||
      edge_features.cols() != kEdgeFeatureDim)
    throw UsageError("graph sample: inconsistent feature dimensions");
  if (!all_finite(antenna_features) || !all_finite(user_features) ||
      !all_finite(edge_features))
    throw UsageError("graph sample: non-finite feature entry");
}

int GnnParams::param_count() const {
  const int e = embed_dim;
  return e * (kAntennaFeatureDim + kUserFeatureDim + kEdgeFeatureDim) +
         kMixCount * e * e + e;
}

void GnnParams::validate() const {
  const int e = embed_dim;
  if (e <= 0) throw UsageError("gnn params: embed_dim must be positive");
  if (z1.rows() != e || z1.cols() != kAntennaFeatureDim || z2.rows() != e ||
      z2.cols() != kUserFeatureDim || z3.rows() != e ||
      z3.cols() != kEdgeFeatureDim ||
      mix.size() != static_cast<size_t>(kMixCount) || beta.size() != e)
    throw UsageError("gnn params: inconsistent shapes");
  for (const auto& m : mix)
    if (m.rows() != e || m.cols() != e)
      throw UsageError("gnn params: mixing matrix shape");
}

RVector GnnParams::flatten() const {
  validate();
  RVector flat(param_count());
  Eigen::Index at = 0;
  auto put = [&](const RMatrix& m) {
    flat.segment(at, m.size()) =
        Eigen::Map<const RVector>(m.data(), m.size());
    at += m.size();
  };
  put(z1);
  put(z2);
  put(z3);
  for (const auto& m : mix) put(m);
  flat.segment(at, beta.size()) = beta;
  return flat;
}

GnnParams GnnParams::unflatten(const RVector& flat, int embed_dim) {
  GnnParams p = zeros(embed_dim);
  if (flat.size() != p.param_count())
    throw UsageError("gnn params: flat vector length mismatch");
  Eigen::Index at = 0;
  auto take = [&](RMatrix& m) {
    Eigen::Map<RVector>(m.data(), m.size()) = flat.segment(at, m.size());
    at += m.size();
  };
  take(p.z1);
  take(p.z2);
  take(p.z3);
  for (auto& m : p.mix) take(m);
  p.beta = flat.segment(at, embed_dim);
  return p;
}

GnnParams GnnParams::zeros(int embed_dim) {
  if (embed_dim <= 0)
    throw UsageError("gnn params: embed_dim must be positive");
  GnnParams p;
  p.embed_dim = embed_dim;
  p.z1 = RMatrix::Zero(embed_dim, kAntennaFeatureDim);
  p.z2 = RMatrix::Zero(embed_dim, kUserFeatureDim);
  p.z3 = RMatrix::Zero(embed_dim, kEdgeFeatureDim);
  p.mix.assign(kMixCount, RMatrix::Zero(embed_dim, embed_dim));
  p.beta = RVector::Zero(embed_dim);
  return p;
}

GraphSample extract_features(const NodeState& node, const EngineView& view,
                             double rel_gap, const ProblemInstance& inst) {
  const int n = inst.n();
  const int m = inst.m();
  GraphSample s;
  s.n_antennas = n;
  s.n_users = m;
  s.antenna_features = RMatrix::Zero(n, kAntennaFeatureDim);
  s.user_features = RMatrix::Zero(m, kUserFeatureDim);
  s.edge_features =
      RMatrix::Zero(static_cast<Eigen::Index>(n) * m, kEdgeFeatureDim);

  // Scale-free normalization of every bound value by the root relaxation.
  double scale = view.root_lb;
  if (!std::isfinite(scale) || scale <= 0.0) scale = 1.0;
  auto norm_bound = [&](double v) {
    return std::isfinite(v) ? v / scale : 0.0;  // infeasible -> 0 + flag
  };

  const bool has_w = node.w_lb.size() > 0;
  for (int i : node.include_set) s.antenna_features(i, 0) = 1.0;
  for (int i : node.exclude_set) s.antenna_features(i, 1) = 1.0;
  if (node.row_powers_lb.size() == n)
    s.antenna_features.col(2) = node.row_powers_lb;

  // Gap flag: the node's completion already matches the incumbent (or a
  // bound is infinite, which also flags the node as exceptional).
  const bool bounds_finite =
      std::isfinite(node.ub) && std::isfinite(view.u_global);
  const double flag =
      (!bounds_finite || (node.ub - view.u_global) / scale < rel_gap) ? 1.0
                                                                      : 0.0;
  for (int j = 0; j < m; ++j) {
    const CVector h = inst.channel.col(j);
    double sig = 0.0, interf = 0.0;
    if (has_w) {
      for (int k = 0; k < m; ++k) {
        const double p = std::norm(node.w_lb.col(k).dot(h));
        if (k == j)
          sig = p;
        else
          interf += p;
      }
    }
    s.user_features(j, 0) = sig;
    s.user_features(j, 1) = interf;
    s.user_features(j, 2) = norm_bound(view.l_global);
    s.user_features(j, 3) = norm_bound(view.u_global);
    s.user_features(j, 4) = norm_bound(node.lb);
    s.user_features(j, 5) = norm_bound(node.ub);
    s.user_features(j, 6) = node.level;
    s.user_features(j, 7) = flag;
  }

  const bool has_inc = view.w_incumbent.size() > 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      auto* row = &s.edge_features(s.edge_row(i, j), 0);
      const std::complex<double> hij = inst.channel(i, j);
      row[0] = hij.real();
      row[1] = hij.imag();
      row[2] = std::abs(hij);
      if (has_inc) {
        const std::complex<double> wij = view.w_incumbent(i, j);
        row[3] = wij.real();
        row[4] = wij.imag();
        row[5] = std::abs(wij);
      }
      if (has_w) {
        const std::complex<double> wij = node.w_lb(i, j);
        row[6] = wij.real();
        row[7] = wij.imag();
        row[8] = std::abs(wij);
      }
    }
  }
  s.validate();
  return s;
}

double forward(const GnnParams& params, const GraphSample& sample,
               ForwardTrace* trace) {
  params.validate();
  sample.validate();
  const int n = sample.n_antennas;
  const int m = sample.n_users;
  const int e = params.embed_dim;
  const int nm = n * m;

  // Initial embeddings.
  RMatrix q0a =
      (params.z1 * sample.antenna_features.transpose()).cwiseMax(0.0);
  RMatrix q0u = (params.z2 * sample.user_features.transpose()).cwiseMax(0.0);
  RMatrix edge = (params.z3 * sample.edge_features.transpose()).cwiseMax(0.0);

  // Layer 1: antenna updates from per-edge messages.
  RMatrix inner1(e, nm);
  RMatrix a1(e, n);
  for (int i = 0; i < n; ++i) {
    RVector acc = params.mix[kCombine1] * q0a.col(i);
    const RVector self = params.mix[kSelfMsg1] * q0a.col(i);
    for (int j = 0; j < m; ++j) {
      const int k = sample.edge_row(i, j);
      inner1.col(k) =
          (self + params.mix[kUserMsg1] * q0u.col(j) +
           params.mix[kEdgeMsg1] * edge.col(k))
              .cwiseMax(0.0);
      acc += params.mix[kMsgOut1] * inner1.col(k);
    }
    a1.col(i) = acc.cwiseMax(0.0);
  }
  RMatrix q1a = params.mix[kUpdate1] * a1;

  // Layer 2: user updates from per-edge messages (users keep q0u).
  RMatrix inner2(e, nm);
  RMatrix a2(e, m);
  for (int j = 0; j < m; ++j) {
    RVector acc = params.mix[kCombine2] * q0u.col(j);
    const RVector self = params.mix[kSelfMsg2] * q0u.col(j);
    for (int i = 0; i < n; ++i) {
      const int k = sample.edge_row(i, j);
      inner2.col(k) =
          (self + params.mix[kAntMsg2] * q1a.col(i) +
           params.mix[kEdgeMsg2] * edge.col(k))
              .cwiseMax(0.0);
      acc += params.mix[kMsgOut2] * inner2.col(k);
    }
    a2.col(j) = acc.cwiseMax(0.0);
  }
  RMatrix q2u = params.mix[kUpdate2] * a2;

  // Mean readout over user vertices.
  RMatrix r = (params.mix[kReadout] * q2u).cwiseMax(0.0);
  const double logit = (params.beta.transpose() * r).sum() / m;
  const double prob = 1.0 / (1.0 + std::exp(-logit));

  if (trace) {
    trace->q0a = std::move(q0a);
    trace->q0u = std::move(q0u);
    trace->e = std::move(edge);
    trace->inner1 = std::move(inner1);
    trace->a1 = std::move(a1);
    trace->q1a = std::move(q1a);
    trace->inner2 = std::move(inner2);
    trace->a2 = std::move(a2);
    trace->q2u = std::move(q2u);
    trace->r = std::move(r);
    trace->logit = logit;
    trace->prob = prob;
  }
  return prob;
}

GradientVector backward(const GnnParams& params, const GraphSample& sample,
                        int label, double weight) {
  if (label != 0 && label != 1) throw UsageError("backward: label not 0/1");
  if (!(weight > 0)) throw UsageError("backward: weight must be positive");
  ForwardTrace t;
  forward(params, sample, &t);
  const int n = sample.n_antennas;
  const int m = sample.n_users;

  const double pi =
      std::min(1.0 - 1e-12, std::max(1e-12, t.prob));
  GradientVector out;
  out.prob = t.prob;
  out.loss = weight * (label == 1 ? -std::log(pi) : -std::log(1.0 - pi));
  GnnParams g = GnnParams::zeros(params.embed_dim);

  // d loss / d logit of the clamped cross entropy.
  const double dlogit = weight * (pi - label);

  // Readout.
  RMatrix dq2u = RMatrix::Zero(params.embed_dim, m);
  for (int j = 0; j < m; ++j) {
    const RVector mask_t =
        (t.r.col(j).array() > 0.0)
            .select(params.beta, RVector::Zero(params.embed_dim)) *
        (dlogit / m);
    g.mix[kReadout] += mask_t * t.q2u.col(j).transpose();
    g.beta += (dlogit / m) * t.r.col(j);
    dq2u.col(j) = params.mix[kReadout].transpose() * mask_t;
  }

  // Layer 2 (user updates).
  RMatrix dq1a = RMatrix::Zero(params.embed_dim, n);
  RMatrix dq0u = RMatrix::Zero(params.embed_dim, m);
  RMatrix dedge = RMatrix::Zero(params.embed_dim, n * m);
  for (int j = 0; j < m; ++j) {
    g.mix[kUpdate2] += dq2u.col(j) * t.a2.col(j).transpose();
    RVector da2 = params.mix[kUpdate2].transpose() * dq2u.col(j);
    const RVector ds2 =
        (t.a2.col(j).array() > 0.0).select(da2, 0.0);
    g.mix[kCombine2] += ds2 * t.q0u.col(j).transpose();
    dq0u.col(j) += params.mix[kCombine2].transpose() * ds2;
    for (int i = 0; i < n; ++i) {
      const int k = sample.edge_row(i, j);
      g.mix[kMsgOut2] += ds2 * t.inner2.col(k).transpose();
      RVector dinner = params.mix[kMsgOut2].transpose() * ds2;
      const RVector dpre =
          (t.inner2.col(k).array() > 0.0).select(dinner, 0.0);
      g.mix[kSelfMsg2] += dpre * t.q0u.col(j).transpose();
      dq0u.col(j) += params.mix[kSelfMsg2].transpose() * dpre;
      g.mix[kAntMsg2] += dpre * t.q1a.col(i).transpose();
      dq1a.col(i) += params.mix[kAntMsg2].transpose() * dpre;
      g.mix[kEdgeMsg2] += dpre * t.e.col(k).transpose();
      dedge.col(k) += params.mix[kEdgeMsg2].transpose() * dpre;
    }
  }

  // Layer 1 (antenna updates).
  RMatrix dq0a = RMatrix::Zero(params.embed_dim, n);
  for (int i = 0; i < n; ++i) {
    g.mix[kUpdate1] += dq1a.col(i) * t.a1.col(i).transpose();
    RVector da1 = params.mix[kUpdate1].transpose() * dq1a.col(i);
    const RVector ds1 =
        (t.a1.col(i).array() > 0.0).select(da1, 0.0);
    g.mix[kCombine1] += ds1 * t.q0a.col(i).transpose();
    dq0a.col(i) += params.mix[kCombine1].transpose() * ds1;
    for (int j = 0; j < m; ++j) {
      const int k = sample.edge_row(i, j);
      g.mix[kMsgOut1] += ds1 * t.inner1.col(k).transpose();
      RVector dinner = params.mix[kMsgOut1].transpose() * ds1;
      const RVector dpre =
          (t.inner1.col(k).array() > 0.0).select(dinner, 0.0);
      g.mix[kSelfMsg1] += dpre * t.q0a.col(i).transpose();
      dq0a.col(i) += params.mix[kSelfMsg1].transpose() * dpre;
      g.mix[kUserMsg1] += dpre * t.q0u.col(j).transpose();
      dq0u.col(j) += params.mix[kUserMsg1].transpose() * dpre;
      g.mix[kEdgeMsg1] += dpre * t.e.col(k).transpose();
      dedge.col(k) += params.mix[kEdgeMsg1].transpose() * dpre;
    }
  }

  // Initial embeddings.
  for (int i = 0; i < n; ++i) {
    const RVector dpre = (t.q0a.col(i).array() > 0.0).select(dq0a.col(i), 0.0);
    g.z1 += dpre * sample.antenna_features.row(i);
  }
  for (int j = 0; j < m; ++j) {
    const RVector dpre = (t.q0u.col(j).array() > 0.0).select(dq0u.col(j), 0.0);
    g.z2 += dpre * sample.user_features.row(j);
  }
  for (int k = 0; k < n * m; ++k) {
    const RVector dpre = (t.e.col(k).array() > 0.0).select(dedge.col(k), 0.0);
    g.z3 += dpre * sample.edge_features.row(k);
  }

  out.grad = std::move(g);
  return out;
}

GnnParams init_params(int embed_dim, std::uint64_t seed) {
  GnnParams p = GnnParams::zeros(embed_dim);
  std::mt19937_64 rng(seed);
  auto fill = [&](RMatrix& m, int fan_in, int fan_out) {
    const double b = std::sqrt(6.0 / (fan_in + fan_out));
    std::uniform_real_distribution<double> u(-b, b);
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) = u(rng);
  };
  fill(p.z1, kAntennaFeatureDim, embed_dim);
  fill(p.z2, kUserFeatureDim, embed_dim);
  fill(p.z3, kEdgeFeatureDim, embed_dim);
  for (auto& m : p.mix) fill(m, embed_dim, embed_dim);
  {
    const double b = std::sqrt(6.0 / (embed_dim + 1));
    std::uniform_real_distribution<double> u(-b, b);
    for (int i = 0; i < embed_dim; ++i) p.beta(i) = u(rng);
  }
  project_params(p);
  return p;
}

double spectral_norm(const RMatrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<RMatrix> svd(a);
  return svd.singularValues()(0);
}

void project_params(GnnParams& params, double max_spectral, double max_beta) {
  auto shrink = [&](RMatrix& m) {
    const double s = spectral_norm(m);
    if (s > max_spectral) m *= max_spectral / s;
  };
  shrink(params.z1);
  shrink(params.z2);
  shrink(params.z3);
  for (auto& m : params.mix) shrink(m);
  const double bn = params.beta.norm();
  if (bn > max_beta) params.beta *= max_beta / bn;
}

void save_params(const GnnParams& params, const std::string& path) {
  params.validate();
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ParseError("cannot open checkpoint for writing: " + path);
  os.write(kCheckpointMagic, sizeof(kCheckpointMagic) - 1);
  const std::int32_t header[4] = {params.embed_dim, kAntennaFeatureDim,
                                  kUserFeatureDim, kEdgeFeatureDim};
  os.write(reinterpret_cast<const char*>(header), sizeof(header));
  // Raw IEEE doubles; every supported target is little-endian.
  const RVector flat = params.flatten();
  os.write(reinterpret_cast<const char*>(flat.data()),
           static_cast<std::streamsize>(flat.size() * sizeof(double)));
  if (!os) throw ParseError("short write to checkpoint: " + path);
}

GnnParams load_params(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ParseError("cannot open checkpoint: " + path);
  char magic[sizeof(kCheckpointMagic) - 1];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0)
    throw ParseError("bad checkpoint magic: " + path);
  std::int32_t header[4];
  is.read(reinterpret_cast<char*>(header), sizeof(header));
  if (!is || header[0] <= 0 || header[1] != kAntennaFeatureDim ||
      header[2] != kUserFeatureDim || header[3] != kEdgeFeatureDim)
    throw ParseError("bad checkpoint header: " + path);
  GnnParams probe = GnnParams::zeros(header[0]);
  RVector flat(probe.param_count());
  is.read(reinterpret_cast<char*>(flat.data()),
          static_cast<std::streamsize>(flat.size() * sizeof(double)));
  if (!is) throw ParseError("truncated checkpoint: " + path);
  if (!flat.allFinite()) throw ParseError("non-finite checkpoint: " + path);
  return GnnParams::unflatten(flat, header[0]);
}

void BoundInputs::validate() const {
  if (feature_bound <= 0 || weight_bound <= 0 || readout_bound <= 0 ||
      activation_lip <= 0 || output_lip <= 0 || loss_lip <= 0 ||
      loss_bound <= 0)
    throw ConfigError("bound inputs: constants must be positive");
  if (n_vertices <= 0 || embed_dim <= 0 || depth <= 0 || n_samples <= 0)
    throw ConfigError("bound inputs: counts must be positive");
  if (!(delta > 0 && delta < 1))
    throw ConfigError("bound inputs: delta must lie in (0,1)");
  if (lambda_override < 0)
    throw ConfigError("bound inputs: lambda override must be nonnegative");
}

double generalization_gap(const BoundInputs& in) {
  in.validate();
  const double u = in.n_vertices;
  const double e = in.embed_dim;
  const double d = in.depth;
  const double k = static_cast<double>(in.n_samples);

  double alpha = (1.0 + u * in.activation_lip) * in.activation_lip *
                 in.weight_bound;
  if (std::abs(alpha - 1.0) < 1e-9) alpha += 1e-9;  // removable singularity

  const double base = in.output_lip * in.weight_bound * in.feature_bound;
  const double geom_d = (std::pow(alpha, d) - 1.0) / (alpha - 1.0);
  const double sigma_z1 = base * in.readout_bound * u *
                          std::pow(in.activation_lip, 3) *
                          (std::pow(alpha, d + 1) - 2.0 * alpha + 1.0) /
                          ((alpha - 1.0) * (alpha - 1.0));
  const double sigma_z2 = u * in.activation_lip * sigma_z1;
  const double sigma_z3 = base * in.readout_bound * u *
                          in.activation_lip * in.activation_lip * geom_d;
  const double sigma_beta =
      in.output_lip * in.feature_bound * std::pow(alpha, d) +
      base * u * in.activation_lip * in.activation_lip * geom_d;

  double lambda = in.lambda_override;
  if (lambda <= 0) {
    const double peak =
        std::max({sigma_z1, sigma_z2, sigma_z3,
                  (in.readout_bound / in.weight_bound) * sigma_beta});
    lambda = 1.0 + 12.0 * std::sqrt(e * k) * in.weight_bound * peak;
  }
  if (!(lambda > 1.0))
    throw ConfigError("bound inputs: covering scale must exceed 1");

  return 8.0 * in.loss_lip / k +
         24.0 * in.loss_lip * in.loss_bound *
             std::sqrt((3.0 * e * e + e) * std::log(lambda)) / std::sqrt(k) +
         3.0 * in.loss_bound * std::sqrt(std::log(2.0 / in.delta) / (2.0 * k));
}

}  // namespace beamselect
