#ifndef BEAMSELECT_INSTANCE_HPP
#define BEAMSELECT_INSTANCE_HPP

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace beamselect {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class UsageError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class CsiMode { perfect, robust };

/// Problem dimensions and per-user QoS parameters. All powers and SINR
/// targets are linear (not dB).
struct InstanceConfig {
  int n_antennas = 0;            // N
  int n_users = 0;               // M
  int budget = 0;                // L, max active antennas
  RVector noise_vars;            // sigma_m^2 > 0
  RVector sinr_targets;          // gamma_m > 0
  RVector uncertainty_radii;     // eps_m >= 0
  CsiMode csi_mode = CsiMode::perfect;
  std::uint64_t seed = 0;

  /// Throws ConfigError on any invariant violation.
  void validate() const;

  /// Convenience: uniform per-user parameters.
  static InstanceConfig uniform(int n, int m, int l, double gamma,
                                double sigma2, double eps, std::uint64_t seed);
};

/// An immutable problem instance: config plus the channel matrix H (N x M,
/// column m is user m's channel).
struct ProblemInstance {
  InstanceConfig config;
  CMatrix channel;  // N x M

  int n() const { return config.n_antennas; }
  int m() const { return config.n_users; }
  int l() const { return config.budget; }
};

/// Beamformer matrix W (N x M, column m serves user m) together with its
/// nonzero-row support.
struct BeamformerMatrix {
  CMatrix w;                      // N x M
  std::vector<int> row_support;   // active row indices (0-based)

  static BeamformerMatrix from_dense(const CMatrix& w, double zero_tol = 0.0);
};

/// Draws H with i.i.d. entries, real and imaginary parts each N(0, 1/2),
/// so E|H(i,j)|^2 = 1. Deterministic in config.seed.
ProblemInstance generate_instance(const InstanceConfig& config);

/// Per-user SINR of W against the nominal channel.
RVector evaluate_sinr(const BeamformerMatrix& w, const ProblemInstance& inst);

/// True iff the worst-case SINR constraint of user m holds over the
/// uncertainty ball of radius eps_m, certified through the S-procedure:
/// existence of t >= 0 making the associated LMI positive semidefinite,
/// located by a 1-D concave search over t.
bool robust_sinr_certificate(const BeamformerMatrix& w,
                             const ProblemInstance& inst, int user);

void save_instance(const ProblemInstance& inst, const std::string& path);
ProblemInstance load_instance(const std::string& path);

}  // namespace beamselect

#endif
