#include "beamselect/instance.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>

namespace beamselect {

namespace {
constexpr double kTwoPi = 6.283185307179586476925;

// Deterministic standard-normal pairs via Box-Muller over mt19937_64.
// Kept hand-rolled (rather than std::normal_distribution) because the
// standard leaves normal_distribution's algorithm unspecified and replay
// determinism across library versions matters for stored instances.
class NormalPairSource {
 public:
  explicit NormalPairSource(std::uint64_t seed) : rng_(seed) {}

  std::pair<double, double> next() {
    double u1 = to_unit(rng_());
    double u2 = to_unit(rng_());
    double r = std::sqrt(-2.0 * std::log(u1));
    return {r * std::cos(kTwoPi * u2), r * std::sin(kTwoPi * u2)};
  }

 private:
  static double to_unit(std::uint64_t x) {
    // (0, 1]: never feeds 0 into log.
    return (static_cast<double>(x >> 11) + 1.0) * 0x1p-53;
  }
  std::mt19937_64 rng_;
};

void write_real_vector(std::ostream& os, const char* name, const RVector& v) {
  os << name;
  for (int i = 0; i < v.size(); ++i) os << ' ' << v(i);
  os << '\n';
}

[[noreturn]] void parse_fail(const std::string& path, int line,
                             const std::string& what) {
  std::ostringstream msg;
  msg << path << ":" << line << ": " << what;
  throw ParseError(msg.str());
}
}  // namespace

void InstanceConfig::validate() const {
  auto check = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(what);
  };
  check(n_antennas >= 1, "n_antennas must be >= 1");
  check(n_users >= 1, "n_users must be >= 1");
  check(budget >= 1 && budget <= n_antennas, "budget must satisfy 1 <= L <= N");
  check(noise_vars.size() == n_users, "noise_vars must have one entry per user");
  check(sinr_targets.size() == n_users,
        "sinr_targets must have one entry per user");
  check(uncertainty_radii.size() == n_users,
        "uncertainty_radii must have one entry per user");
  check((noise_vars.array() > 0).all(), "noise variances must be positive");
  check((sinr_targets.array() > 0).all(), "SINR targets must be positive");
  check((uncertainty_radii.array() >= 0).all(),
        "uncertainty radii must be nonnegative");
  if (csi_mode == CsiMode::perfect)
    check((uncertainty_radii.array() == 0).all(),
          "perfect CSI requires zero uncertainty radii");
}

InstanceConfig InstanceConfig::uniform(int n, int m, int l, double gamma,
                                       double sigma2, double eps,
                                       std::uint64_t seed) {
  InstanceConfig cfg;
  cfg.n_antennas = n;
  cfg.n_users = m;
  cfg.budget = l;
  cfg.noise_vars = RVector::Constant(m, sigma2);
  cfg.sinr_targets = RVector::Constant(m, gamma);
  cfg.uncertainty_radii = RVector::Constant(m, eps);
  cfg.csi_mode = eps > 0 ? CsiMode::robust : CsiMode::perfect;
  cfg.seed = seed;
  return cfg;
}

BeamformerMatrix BeamformerMatrix::from_dense(const CMatrix& w,
                                              double zero_tol) {
  BeamformerMatrix out;
  out.w = w;
  for (int i = 0; i < w.rows(); ++i)
    if (w.row(i).norm() > zero_tol) out.row_support.push_back(i);
  return out;
}

ProblemInstance generate_instance(const InstanceConfig& config) {
  config.validate();
  ProblemInstance inst;
  inst.config = config;
  inst.channel.resize(config.n_antennas, config.n_users);
  NormalPairSource normals(config.seed);
  const double scale = std::sqrt(0.5);  // Re/Im each N(0, 1/2)
  for (int i = 0; i < config.n_antennas; ++i)
    for (int j = 0; j < config.n_users; ++j) {
      auto [re, im] = normals.next();
      inst.channel(i, j) = std::complex<double>(scale * re, scale * im);
    }
  return inst;
}

RVector evaluate_sinr(const BeamformerMatrix& w, const ProblemInstance& inst) {
  const int m = inst.m();
  if (w.w.rows() != inst.n() || w.w.cols() != m)
    throw UsageError("evaluate_sinr: beamformer/instance dimension mismatch");
  RVector out(m);
  for (int user = 0; user < m; ++user) {
    CVector h = inst.channel.col(user);
    double signal = std::norm((w.w.col(user).adjoint() * h)(0));
    double interference = 0.0;
    for (int l = 0; l < m; ++l) {
      if (l == user) continue;
      interference += std::norm((w.w.col(l).adjoint() * h)(0));
    }
    out(user) = signal / (interference + inst.config.noise_vars(user));
  }
  return out;
}

bool robust_sinr_certificate(const BeamformerMatrix& w,
                             const ProblemInstance& inst, int user) {
  if (inst.config.csi_mode != CsiMode::robust)
    throw UsageError("robust_sinr_certificate requires robust csi_mode");
  if (user < 0 || user >= inst.m())
    throw UsageError("robust_sinr_certificate: user index out of range");

  const int n = inst.n();
  const double gamma = inst.config.sinr_targets(user);
  const double sigma2 = inst.config.noise_vars(user);
  const double eps = inst.config.uncertainty_radii(user);
  CVector h = inst.channel.col(user);

  CMatrix q = CMatrix::Zero(n, n);
  for (int j = 0; j < inst.m(); ++j) {
    CVector wj = w.w.col(j);
    if (j == user)
      q += (wj * wj.adjoint()) / gamma;
    else
      q -= wj * wj.adjoint();
  }

  CVector qh = q * h;
  std::complex<double> hqh = (h.adjoint() * qh)(0);

  auto min_eig = [&](double t) {
    CMatrix m(n + 1, n + 1);
    m.topLeftCorner(n, n) = q + t * CMatrix::Identity(n, n);
    m.topRightCorner(n, 1) = qh;
    m.bottomLeftCorner(1, n) = qh.adjoint();
    m(n, n) = hqh.real() - sigma2 - t * eps * eps;
    Eigen::SelfAdjointEigenSolver<CMatrix> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  };

  // min-eigenvalue of an affine matrix pencil is concave in t: locate its
  // maximum over [0, t_max] by golden-section search.
  double lo = 0.0;
  double hi = 1e3 * (q.operatorNorm() + 1.0);
  const double gr = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = min_eig(x1), f2 = min_eig(x2);
  double best = std::max({min_eig(lo), min_eig(hi), f1, f2});
  while (b - a > 1e-9 * (hi - lo + 1.0) && best < 0.0) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = min_eig(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = min_eig(x1);
    }
    best = std::max({best, f1, f2});
  }
  return best >= -1e-9;
}

void save_instance(const ProblemInstance& inst, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw ParseError("cannot open for writing: " + path);
  os << std::setprecision(17);
  os << "beamselect-instance v1\n";
  os << "dims " << inst.n() << ' ' << inst.m() << ' ' << inst.l() << '\n';
  os << "csi "
     << (inst.config.csi_mode == CsiMode::perfect ? "perfect" : "robust")
     << '\n';
  os << "seed " << inst.config.seed << '\n';
  write_real_vector(os, "sigma2", inst.config.noise_vars);
  write_real_vector(os, "gamma", inst.config.sinr_targets);
  write_real_vector(os, "eps", inst.config.uncertainty_radii);
  os << "channel\n";
  for (int i = 0; i < inst.n(); ++i)
    for (int j = 0; j < inst.m(); ++j)
      os << i << ' ' << j << ' ' << inst.channel(i, j).real() << ' '
         << inst.channel(i, j).imag() << '\n';
  if (!os) throw ParseError("write failed: " + path);
}

ProblemInstance load_instance(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ParseError("cannot open: " + path);
  int lineno = 0;
  std::string line;
  auto next_line = [&]() {
    if (!std::getline(is, line)) parse_fail(path, lineno + 1, "unexpected EOF");
    ++lineno;
    return std::istringstream(line);
  };

  {
    auto ls = next_line();
    std::string magic, version;
    ls >> magic >> version;
    if (magic != "beamselect-instance" || version != "v1")
      parse_fail(path, lineno, "bad magic/version");
  }
  ProblemInstance inst;
  InstanceConfig& cfg = inst.config;
  {
    auto ls = next_line();
    std::string key;
    ls >> key >> cfg.n_antennas >> cfg.n_users >> cfg.budget;
    if (key != "dims" || !ls) parse_fail(path, lineno, "expected dims N M L");
  }
  {
    auto ls = next_line();
    std::string key, mode;
    ls >> key >> mode;
    if (key != "csi" || (mode != "perfect" && mode != "robust"))
      parse_fail(path, lineno, "expected csi perfect|robust");
    cfg.csi_mode = mode == "perfect" ? CsiMode::perfect : CsiMode::robust;
  }
  {
    auto ls = next_line();
    std::string key;
    ls >> key >> cfg.seed;
    if (key != "seed" || !ls) parse_fail(path, lineno, "expected seed");
  }
  auto read_vec = [&](const char* name) {
    auto ls = next_line();
    std::string key;
    ls >> key;
    if (key != name) parse_fail(path, lineno, std::string("expected ") + name);
    RVector v(cfg.n_users);
    for (int i = 0; i < cfg.n_users; ++i)
      if (!(ls >> v(i)))
        parse_fail(path, lineno, std::string("short vector: ") + name);
    return v;
  };
  cfg.noise_vars = read_vec("sigma2");
  cfg.sinr_targets = read_vec("gamma");
  cfg.uncertainty_radii = read_vec("eps");
  {
    auto ls = next_line();
    std::string key;
    ls >> key;
    if (key != "channel") parse_fail(path, lineno, "expected channel");
  }
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    parse_fail(path, lineno, std::string("invalid config: ") + e.what());
  }
  inst.channel.resize(cfg.n_antennas, cfg.n_users);
  Eigen::MatrixXi seen = Eigen::MatrixXi::Zero(cfg.n_antennas, cfg.n_users);
  for (int k = 0; k < cfg.n_antennas * cfg.n_users; ++k) {
    auto ls = next_line();
    int i, j;
    double re, im;
    if (!(ls >> i >> j >> re >> im))
      parse_fail(path, lineno, "malformed channel entry");
    if (i < 0 || i >= cfg.n_antennas || j < 0 || j >= cfg.n_users)
      parse_fail(path, lineno, "channel index out of range");
    if (seen(i, j)++) parse_fail(path, lineno, "duplicate channel entry");
    inst.channel(i, j) = std::complex<double>(re, im);
  }
  return inst;
}

}  // namespace beamselect
