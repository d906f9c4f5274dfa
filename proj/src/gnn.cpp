#include "segraph/gnn.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace segraph {

const char* to_string(GnnMode mode) {
  switch (mode) {
    case GnnMode::Attention: return "attention";
    case GnnMode::EqualWeight: return "equal";
    case GnnMode::Unary: return "unary";
  }
  return "?";
}

GnnMode gnn_mode_from_string(const std::string& s) {
  if (s == "attention") return GnnMode::Attention;
  if (s == "equal") return GnnMode::EqualWeight;
  if (s == "unary") return GnnMode::Unary;
  throw std::runtime_error("unknown gnn mode: " + s);
}

void GnnModel::init(const GnnConfig& config, const nn::FeatureNetConfig& net_cfg, Rng& rng) {
  cfg = config;
  roi_bins_r = net_cfg.roi_bins_r;
  roi_bins_c = net_cfg.roi_bins_c;
  const int s = cfg.hidden_dim;
  input_proj.init(net_cfg.roi_len(), s, "gnn.proj", rng);
  edge_mlp.init({2 * s, s, 1}, "gnn.edge", rng);
  message_mlp.init({s, s, s}, "gnn.message", rng);
  update_mlp.init({2 * s, s, s}, "gnn.update", rng);
  predict_mlp.init({s, s, cfg.classes}, "gnn.predict", rng);
}

void GnnModel::zero_grad() {
  input_proj.zero_grad();
  edge_mlp.zero_grad();
  message_mlp.zero_grad();
  update_mlp.zero_grad();
  predict_mlp.zero_grad();
}

void GnnModel::collect(std::vector<nn::ParamRef>& out) {
  input_proj.collect(out);
  edge_mlp.collect(out);
  message_mlp.collect(out);
  update_mlp.collect(out);
  predict_mlp.collect(out);
}

namespace {

void estimate_stage(const GnnModel& model, const std::vector<Vec>& states, const SceneGraph& graph,
                    GnnTrace::EdgeStage& stage) {
  const int n = graph.size();
  stage.scores.resize(n);
  stage.softmax.resize(n);
  stage.weights.w.resize(n);
  stage.caches.resize(n);
  const int s = model.cfg.hidden_dim;
  Vec cat(2 * s);
  for (int i = 0; i < n; ++i) {
    const int deg = graph.degree(i);
    stage.caches[i].resize(deg);
    stage.scores[i].resize(deg);
    if (deg == 0) {
      stage.softmax[i].resize(0);
      stage.weights.w[i].resize(0);
      continue;
    }
    if (model.cfg.mode == GnnMode::EqualWeight) {
      stage.softmax[i].resize(0);
      stage.weights.w[i] = Vec::Ones(deg);
      continue;
    }
    for (int jj = 0; jj < deg; ++jj) {
      cat.head(s) = states[i];  // center first
      cat.tail(s) = states[graph.neighbors[i][jj]];
      stage.scores[i](jj) = model.edge_mlp.forward(cat, stage.caches[i][jj])(0);
    }
    stage.softmax[i] = nn::softmax(stage.scores[i]);
    const Scalar alpha = model.cfg.single_normalization ? 1.0 : 1.0 / deg;
    stage.weights.w[i] = alpha * stage.softmax[i];
  }
}

void aggregate_stage(const GnnModel& model, const std::vector<Vec>& states, const EdgeWeights& weights,
                     const SceneGraph& graph, GnnTrace::MessageStage& stage) {
  const int n = graph.size();
  stage.messages.resize(n);
  stage.caches.resize(n);
  for (int i = 0; i < n; ++i) {
    const int deg = graph.degree(i);
    stage.caches[i].resize(deg);
    Vec m = Vec::Zero(model.cfg.hidden_dim);
    for (int jj = 0; jj < deg; ++jj) {
      const int j = graph.neighbors[i][jj];
      m += model.message_mlp.forward(weights.at(i, jj) * states[j], stage.caches[i][jj]);
    }
    if (deg > 0) m /= deg;
    stage.messages[i] = std::move(m);
  }
}

void update_stage(const GnnModel& model, const std::vector<Vec>& states, const std::vector<Vec>& messages,
                  GnnTrace::UpdateStage& stage, std::vector<Vec>& next) {
  const int n = static_cast<int>(states.size());
  const int s = model.cfg.hidden_dim;
  stage.pre.resize(n);
  stage.caches.resize(n);
  next.resize(n);
  Vec cat(2 * s);
  for (int i = 0; i < n; ++i) {
    cat.head(s) = states[i];
    cat.tail(s) = messages[i];
    stage.pre[i] = model.update_mlp.forward(cat, stage.caches[i]);
    next[i] = stage.pre[i].cwiseMax(0.0);
  }
}

void predict_stage(const GnnModel& model, const std::vector<Vec>& states, std::vector<nn::MlpCache>& caches,
                   std::vector<Prediction>& preds) {
  const int n = static_cast<int>(states.size());
  caches.resize(n);
  preds.resize(n);
  for (int i = 0; i < n; ++i) {
    const Vec logits = model.predict_mlp.forward(states[i], caches[i]);
    preds[i].probs = nn::softmax(logits);
    preds[i].probs.maxCoeff(&preds[i].argmax);
  }
}

}  // namespace

std::vector<Vec> init_nodes(const GnnModel& model, const SceneGraph& graph, const nn::Tensor& fmap) {
  std::vector<Vec> h(graph.size());
  for (int i = 0; i < graph.size(); ++i) {
    const Vec roi = nn::roi_pool(fmap, graph.nodes[i].bbox, model.roi_bins_r, model.roi_bins_c);
    h[i] = model.input_proj.forward(roi);
  }
  return h;
}

EdgeWeights estimate_edge_weights(const GnnModel& model, const std::vector<Vec>& states, const SceneGraph& graph) {
  GnnTrace::EdgeStage stage;
  estimate_stage(model, states, graph, stage);
  return stage.weights;
}

std::vector<Vec> aggregate_messages(const GnnModel& model, const std::vector<Vec>& states, const EdgeWeights& weights,
                                    const SceneGraph& graph) {
  GnnTrace::MessageStage stage;
  aggregate_stage(model, states, weights, graph, stage);
  return stage.messages;
}

std::vector<Vec> update_nodes(const GnnModel& model, const std::vector<Vec>& states,
                              const std::vector<Vec>& messages) {
  GnnTrace::UpdateStage stage;
  std::vector<Vec> next;
  update_stage(model, states, messages, stage, next);
  return next;
}

std::vector<Prediction> predict_nodes(const GnnModel& model, const std::vector<Vec>& states) {
  std::vector<nn::MlpCache> caches;
  std::vector<Prediction> preds;
  predict_stage(model, states, caches, preds);
  return preds;
}

std::vector<Prediction> gnn_forward(const GnnModel& model, const SceneGraph& graph, const nn::Tensor& fmap,
                                    GnnTrace& trace) {
  const int n = graph.size();
  trace = GnnTrace{};
  trace.fmap_channels = fmap.channels();
  trace.fmap_rows = fmap.rows();
  trace.fmap_cols = fmap.cols();

  trace.roi_caches.resize(n);
  trace.roi_vecs.resize(n);
  std::vector<Vec> h0(n);
  for (int i = 0; i < n; ++i) {
    trace.roi_vecs[i] =
        nn::roi_pool(fmap, graph.nodes[i].bbox, model.roi_bins_r, model.roi_bins_c, &trace.roi_caches[i]);
    h0[i] = model.input_proj.forward(trace.roi_vecs[i]);
  }
  trace.h.push_back(std::move(h0));

  if (model.cfg.mode == GnnMode::Unary) {
    predict_stage(model, trace.h[0], trace.predict_caches, trace.predictions);
    return trace.predictions;
  }

  // Weights are estimated once from h0 and held fixed across the T updates
  // unless recompute_weights asks for per-step re-estimation.
  trace.edge_stages.emplace_back();
  estimate_stage(model, trace.h[0], graph, trace.edge_stages[0]);

  for (int t = 0; t < model.cfg.iterations; ++t) {
    if (model.cfg.recompute_weights && t > 0) {
      trace.edge_stages.emplace_back();
      estimate_stage(model, trace.h[t], graph, trace.edge_stages.back());
    }
    trace.message_stages.emplace_back();
    aggregate_stage(model, trace.h[t], trace.edge_stages.back().weights, graph, trace.message_stages.back());
    trace.update_stages.emplace_back();
    std::vector<Vec> next;
    update_stage(model, trace.h[t], trace.message_stages.back().messages, trace.update_stages.back(), next);
    trace.h.push_back(std::move(next));
  }

  predict_stage(model, trace.h.back(), trace.predict_caches, trace.predictions);
  return trace.predictions;
}

namespace {

// dL/dw -> dL/de through w = alpha * softmax(e), then through g into dh[t].
void edge_stage_backward(GnnModel& model, const SceneGraph& graph, const GnnTrace::EdgeStage& stage,
                         const std::vector<Vec>& dw, std::vector<Vec>& dh) {
  if (model.cfg.mode != GnnMode::Attention) return;
  const int s = model.cfg.hidden_dim;
  for (int i = 0; i < graph.size(); ++i) {
    const int deg = graph.degree(i);
    if (deg == 0) continue;
    const Scalar alpha = model.cfg.single_normalization ? 1.0 : 1.0 / deg;
    const Vec ds = alpha * dw[i];
    const Vec de = nn::softmax_backward(stage.softmax[i], ds);
    for (int jj = 0; jj < deg; ++jj) {
      const Vec gcat = model.edge_mlp.backward(Vec::Constant(1, de(jj)), stage.caches[i][jj]);
      dh[i] += gcat.head(s);
      dh[graph.neighbors[i][jj]] += gcat.tail(s);
    }
  }
}

}  // namespace

nn::Tensor gnn_backward(GnnModel& model, const SceneGraph& graph, const GnnTrace& trace,
                        const std::vector<Vec>& dprobs, const std::vector<Vec>& dw_direct) {
  const int n = graph.size();
  const int s = model.cfg.hidden_dim;
  const int T = static_cast<int>(trace.update_stages.size());

  // prediction head
  std::vector<Vec> dh(n);
  for (int i = 0; i < n; ++i) {
    const Vec dlogits = nn::softmax_backward(trace.predictions[i].probs, dprobs[i]);
    dh[i] = model.predict_mlp.backward(dlogits, trace.predict_caches[i]);
  }

  if (model.cfg.mode == GnnMode::Unary) {
    // straight to the projection below
  } else {
    // per-stage dL/dw accumulators
    std::vector<std::vector<Vec>> dw_stage(trace.edge_stages.size());
    for (std::size_t st = 0; st < trace.edge_stages.size(); ++st) {
      dw_stage[st].resize(n);
      for (int i = 0; i < n; ++i) dw_stage[st][i] = Vec::Zero(graph.degree(i));
    }
    if (!dw_direct.empty()) {
      auto& last = dw_stage.back();
      for (int i = 0; i < n; ++i) last[i] += dw_direct[i];
    }

    for (int t = T - 1; t >= 0; --t) {
      const std::size_t stage_idx = model.cfg.recompute_weights ? static_cast<std::size_t>(t) : 0;
      const GnnTrace::EdgeStage& estage = trace.edge_stages[stage_idx];
      const GnnTrace::UpdateStage& ustage = trace.update_stages[t];
      const GnnTrace::MessageStage& mstage = trace.message_stages[t];

      std::vector<Vec> dh_prev(n);
      for (int i = 0; i < n; ++i) dh_prev[i] = Vec::Zero(s);

      for (int i = 0; i < n; ++i) {
        Vec dz = dh[i];
        dz.array() *= (ustage.pre[i].array() > 0.0).cast<Scalar>();
        const Vec dcat = model.update_mlp.backward(dz, ustage.caches[i]);
        dh_prev[i] += dcat.head(s);
        const Vec dm = dcat.tail(s);
        const int deg = graph.degree(i);
        if (deg == 0) continue;
        const Vec dphi_out = dm / deg;
        for (int jj = 0; jj < deg; ++jj) {
          const int j = graph.neighbors[i][jj];
          const Vec dxin = model.message_mlp.backward(dphi_out, mstage.caches[i][jj]);
          dh_prev[j] += estage.weights.at(i, jj) * dxin;
          dw_stage[stage_idx][i](jj) += dxin.dot(trace.h[t][j]);
        }
      }

      if (model.cfg.recompute_weights) {
        edge_stage_backward(model, graph, estage, dw_stage[stage_idx], dh_prev);
      }
      dh = std::move(dh_prev);
    }

    if (!model.cfg.recompute_weights) {
      edge_stage_backward(model, graph, trace.edge_stages[0], dw_stage[0], dh);
    } else if (T == 0 && trace.has_weights()) {
      edge_stage_backward(model, graph, trace.edge_stages[0], dw_stage[0], dh);
    }
  }

  nn::Tensor gmap(trace.fmap_channels, trace.fmap_rows, trace.fmap_cols);
  for (int i = 0; i < n; ++i) {
    const Vec droi = model.input_proj.backward(dh[i], trace.roi_vecs[i]);
    nn::roi_pool_backward(trace.roi_caches[i], droi, gmap);
  }
  return gmap;
}

void dump_edge_weights(const SceneGraph& graph, const EdgeWeights& weights, std::ostream& out, int node_filter,
                       int top_k) {
  out << "# i j w_ij rank\n";
  for (int i = 0; i < graph.size(); ++i) {
    if (node_filter >= 0 && i != node_filter) continue;
    const int deg = graph.degree(i);
    std::vector<int> order(deg);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      if (weights.at(i, a) != weights.at(i, b)) return weights.at(i, a) > weights.at(i, b);
      return a < b;
    });
    const int take = top_k > 0 ? std::min(top_k, deg) : deg;
    for (int rank = 0; rank < take; ++rank) {
      out << i << " " << graph.neighbors[i][order[rank]] << " " << weights.at(i, order[rank]) << " " << rank + 1
          << "\n";
    }
  }
}

}  // namespace segraph
