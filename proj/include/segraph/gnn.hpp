#pragma once

#include "segraph/nn/feature_net.hpp"
#include "segraph/nn/roi_pool.hpp"
#include "segraph/scene_graph.hpp"

#include <iosfwd>

namespace segraph {

enum class GnnMode { Attention, EqualWeight, Unary };

const char* to_string(GnnMode mode);
GnnMode gnn_mode_from_string(const std::string& s);  // throws on unknown

struct GnnConfig {
  GnnMode mode = GnnMode::Attention;
  int iterations = 1;   // T; 0 predicts straight from h0
  int classes = 4;      // K
  int hidden_dim = 32;  // S
  /// Re-estimate weights from h^t before every update step instead of holding
  /// the h0-based weights fixed.
  bool recompute_weights = false;
  /// Ablation: drop the 1/|Omega| factor so weights sum to 1 per node.
  bool single_normalization = false;
};

/// Per-edge scalar weights, aligned with graph.neighbors[i].
struct EdgeWeights {
  std::vector<Vec> w;

  Scalar at(int i, int jj) const { return w[i](jj); }
  int nodes() const { return static_cast<int>(w.size()); }
};

struct Prediction {
  Vec probs;
  int argmax = 0;
};

/// The learned pieces: h0 projection, edge scorer g, message map phi, state
/// update psi, and class head f. All MLPs default to one ReLU hidden layer of
/// width S.
struct GnnModel {
  GnnConfig cfg;
  int roi_bins_r = 3, roi_bins_c = 3;  // copied from the feature config at init
  nn::Dense input_proj;                // roi vector -> S
  nn::Mlp edge_mlp;                    // [h_i, h_j] -> scalar score
  nn::Mlp message_mlp;                 // w_ij * h_j -> message contribution
  nn::Mlp update_mlp;                  // [h_i, m_i] -> next state (pre-ReLU)
  nn::Mlp predict_mlp;                 // h_i -> class logits

  void init(const GnnConfig& config, const nn::FeatureNetConfig& net_cfg, Rng& rng);
  void zero_grad();
  void collect(std::vector<nn::ParamRef>& out);
};

/// Everything one forward pass records for the exact backward pass.
struct GnnTrace {
  struct EdgeStage {
    std::vector<Vec> scores;   // raw e_ij per node
    std::vector<Vec> softmax;  // softmax(e_i) before the 1/|Omega| factor
    EdgeWeights weights;
    std::vector<std::vector<nn::MlpCache>> caches;  // per node, per neighbor
  };
  struct MessageStage {
    std::vector<Vec> messages;
    std::vector<std::vector<nn::MlpCache>> caches;
  };
  struct UpdateStage {
    std::vector<Vec> pre;  // psi output before ReLU
    std::vector<nn::MlpCache> caches;
  };

  int fmap_channels = 0, fmap_rows = 0, fmap_cols = 0;
  std::vector<nn::RoiCache> roi_caches;
  std::vector<Vec> roi_vecs;
  std::vector<std::vector<Vec>> h;  // [t][node], t = 0..T
  std::vector<EdgeStage> edge_stages;
  std::vector<MessageStage> message_stages;
  std::vector<UpdateStage> update_stages;
  std::vector<nn::MlpCache> predict_caches;
  std::vector<Prediction> predictions;

  /// Weights seen by the loss (the last estimated stage; empty in Unary mode).
  const EdgeWeights& final_weights() const { return edge_stages.back().weights; }
  bool has_weights() const { return !edge_stages.empty(); }
};

// ---------------------------------------------------------------------------
// The pipeline stages as standalone operations (recompute, no trace).
// ---------------------------------------------------------------------------

/// h0 per node: ROI-pooled feature vector through the input projection.
std::vector<Vec> init_nodes(const GnnModel& model, const SceneGraph& graph, const nn::Tensor& fmap);

/// Attention: w_ij = (1/|Omega_i|) softmax_j(g([h_i, h_j])), max-subtracted.
/// EqualWeight: w_ij = 1.
EdgeWeights estimate_edge_weights(const GnnModel& model, const std::vector<Vec>& states, const SceneGraph& graph);

/// m_i = (1/|Omega_i|) sum_j phi(w_ij * h_j); zero vector for empty Omega_i.
std::vector<Vec> aggregate_messages(const GnnModel& model, const std::vector<Vec>& states, const EdgeWeights& weights,
                                    const SceneGraph& graph);

/// h_i' = ReLU(psi([h_i, m_i])), applied to all nodes simultaneously.
std::vector<Vec> update_nodes(const GnnModel& model, const std::vector<Vec>& states,
                              const std::vector<Vec>& messages);

/// x_hat_i = softmax(f(h_i)).
std::vector<Prediction> predict_nodes(const GnnModel& model, const std::vector<Vec>& states);

// ---------------------------------------------------------------------------
// Full forward/backward over one frame graph.
// ---------------------------------------------------------------------------

std::vector<Prediction> gnn_forward(const GnnModel& model, const SceneGraph& graph, const nn::Tensor& fmap,
                                    GnnTrace& trace);

/// Accumulates parameter gradients and returns the feature-map gradient.
/// dprobs is dL/d(prediction probs) per node; dw_direct is the loss term's
/// dL/dw (empty when the loss carries no weight term).
nn::Tensor gnn_backward(GnnModel& model, const SceneGraph& graph, const GnnTrace& trace,
                        const std::vector<Vec>& dprobs, const std::vector<Vec>& dw_direct);

/// `i j w_ij rank` per line, weights sorted descending per node;
/// node_filter < 0 dumps every node.
void dump_edge_weights(const SceneGraph& graph, const EdgeWeights& weights, std::ostream& out, int node_filter = -1,
                       int top_k = -1);

}  // namespace segraph
