#ifndef BEAMSELECT_GNN_HPP
#define BEAMSELECT_GNN_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "beamselect/bnb.hpp"
#include "beamselect/instance.hpp"

namespace beamselect {

// Bipartite-graph node classifier: feature extraction from search-tree
// nodes, a two-layer message-passing network with split updates (layer 1
// refreshes antenna vertices, layer 2 user vertices), exact reverse-mode
// gradients of the weighted cross-entropy loss, and the generalization
// gap calculator used in the sample-complexity checks.

inline constexpr int kAntennaFeatureDim = 3;  // V_a
inline constexpr int kUserFeatureDim = 8;     // V_u
inline constexpr int kEdgeFeatureDim = 9;     // V_e

struct GraphSample {
  int n_antennas = 0;  // N
  int n_users = 0;     // M
  RMatrix antenna_features;  // N x V_a
  RMatrix user_features;     // M x V_u
  RMatrix edge_features;     // (N*M) x V_e, row i*M + m = edge (i, m)

  int edge_row(int antenna, int user) const {
    return antenna * n_users + user;
  }
  void validate() const;  // dims consistent, all entries finite
};

// Trainable weights. The network is size-agnostic: the same value
// evaluates on samples of any (N, M).
struct GnnParams {
  int embed_dim = 32;  // E
  RMatrix z1;          // E x V_a  antenna embedding
  RMatrix z2;          // E x V_u  user embedding
  RMatrix z3;          // E x V_e  edge embedding
  // Thirteen E x E mixing matrices; mix[k] plays the role of stage
  // matrix k+4 in the fixed architecture (4..9 layer one, 10..15 layer
  // two, 16 readout).
  std::vector<RMatrix> mix;
  RVector beta;  // E readout vector

  int param_count() const;
  // Column-major concatenation z1, z2, z3, mix[0..12], beta.
  RVector flatten() const;
  static GnnParams unflatten(const RVector& flat, int embed_dim);
  static GnnParams zeros(int embed_dim);
  void validate() const;
};

// Gradient in parameter shape plus the (weighted) loss value.
struct GradientVector {
  GnnParams grad;
  double loss = 0.0;
  double prob = 0.0;  // forward output, for callers that need it
};

// Everything the backward pass needs from the forward pass. ReLU
// activation masks are recovered from the stored post-activation values
// (entry > 0 iff the unit was active).
struct ForwardTrace {
  RMatrix q0a;     // E x N        antenna embeddings
  RMatrix q0u;     // E x M        user embeddings
  RMatrix e;       // E x (N*M)    edge embeddings
  RMatrix inner1;  // E x (N*M)    layer-1 message activations
  RMatrix a1;      // E x N        layer-1 combine activations
  RMatrix q1a;     // E x N        updated antenna embeddings
  RMatrix inner2;  // E x (N*M)    layer-2 message activations
  RMatrix a2;      // E x M        layer-2 combine activations
  RMatrix q2u;     // E x M        updated user embeddings
  RMatrix r;       // E x M        readout activations
  double logit = 0.0;
  double prob = 0.5;
};

// Builds the classifier input for a popped node. Global and node bounds
// are normalized by the root relaxation value; infinite values (from
// infeasible subproblems) are encoded as 0 with the gap flag raised.
// rel_gap is the search's termination tolerance (drives the gap flag).
GraphSample extract_features(const NodeState& node, const EngineView& view,
                             double rel_gap, const ProblemInstance& inst);

// Classifier output in (0, 1). Zero parameters give exactly 0.5.
double forward(const GnnParams& params, const GraphSample& sample,
               ForwardTrace* trace = nullptr);

// Exact gradient of w * (-y log pi - (1-y) log(1-pi)) with pi clamped to
// [1e-12, 1 - 1e-12] before the logs.
GradientVector backward(const GnnParams& params, const GraphSample& sample,
                        int label, double weight);

// Xavier-uniform entries per matrix, deterministic in seed, followed by
// the spectral projection below.
GnnParams init_params(int embed_dim, std::uint64_t seed);

// Largest singular value (dense SVD; matrices are at most E x E).
double spectral_norm(const RMatrix& a);

// Scales each matrix to spectral norm <= max_spectral and beta to
// Euclidean norm <= max_beta whenever exceeded. Keeps the boundedness
// assumptions of the generalization bound literally true after every
// optimizer step.
inline constexpr double kSpectralBound = 10.0;
void project_params(GnnParams& params, double max_spectral = kSpectralBound,
                    double max_beta = kSpectralBound);

void save_params(const GnnParams& params, const std::string& path);
GnnParams load_params(const std::string& path);

// Inputs of the generalization-gap formula. U is the vertex count the
// bound is instantiated at, D the message-passing depth, K the training
// sample count, delta the confidence level.
struct BoundInputs {
  double feature_bound = 0.0;      // B_x
  double weight_bound = 0.0;       // B_Z
  double readout_bound = 0.0;      // B_beta
  double activation_lip = 1.0;     // C_xi  (ReLU: 1)
  double output_lip = 0.25;        // C_zeta (sigmoid: 1/4)
  double loss_lip = 0.0;           // C_L
  double loss_bound = 0.0;         // B_L
  int n_vertices = 0;              // U
  int embed_dim = 0;               // E
  int depth = 0;                   // D
  long n_samples = 0;              // K
  double delta = 0.05;
  // > 0 pins the covering-number scale instead of deriving it from the
  // other inputs; used to verify the exact K-scaling of the bound.
  double lambda_override = 0.0;

  void validate() const;  // positivity, delta in (0,1)
};

double generalization_gap(const BoundInputs& in);

}  // namespace beamselect

#endif
