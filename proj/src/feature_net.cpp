#include "segraph/nn/feature_net.hpp"

#include <cmath>
#include <stdexcept>

namespace segraph::nn {

std::vector<int> FeatureNetConfig::widths() const {
  const int base[6] = {64, 64, 128, 256, 256, 256};
  std::vector<int> w(6);
  for (int i = 0; i < 6; ++i) w[i] = std::max(1, static_cast<int>(std::lround(base[i] * scale)));
  return w;
}

int FeatureNetConfig::roi_len() const { return out_channels() * roi_bins_r * roi_bins_c; }

void FeatureNet::init(const FeatureNetConfig& config, Rng& rng) {
  cfg = config;
  const std::vector<int> w = cfg.widths();
  c1.init(3, w[0], "feature.c1", rng);
  bn1.init(w[0], "feature.bn1");
  c2.init(w[0], w[1], "feature.c2", rng);
  bn2.init(w[1], "feature.bn2");
  c3.init(w[1], w[2], "feature.c3", rng);
  bn3.init(w[2], "feature.bn3");
  c4.init(w[2], w[3], "feature.c4", rng);
  bn4.init(w[3], "feature.bn4");
  d1.init(w[3], w[4], "feature.d1", rng);
  bn5.init(w[4], "feature.bn5");
  d2.init(w[4], w[5], "feature.d2", rng);
  bn6.init(w[5], "feature.bn6");
}

Tensor FeatureNet::forward(const Tensor& x) {
  if (x.channels() != 3) throw std::runtime_error("feature net expects 3 input channels");
  if (x.rows() % 4 != 0 || x.cols() % 4 != 0) {
    throw std::runtime_error("feature net input dims must be divisible by 4");
  }
  Tensor t = r1.forward(bn1.forward(c1.forward(x)));
  t = r2.forward(bn2.forward(c2.forward(t)));
  t = m1.forward(t);
  t = r3.forward(bn3.forward(c3.forward(t)));
  t = m2.forward(t);
  t = r4.forward(bn4.forward(c4.forward(t)));
  t = r5.forward(bn5.forward(d1.forward(t)));
  t = r6.forward(bn6.forward(d2.forward(t)));
  return t;
}

Tensor FeatureNet::backward(const Tensor& gy) {
  Tensor g = d2.backward(bn6.backward(r6.backward(gy)));
  g = d1.backward(bn5.backward(r5.backward(g)));
  g = c4.backward(bn4.backward(r4.backward(g)));
  g = m2.backward(g);
  g = c3.backward(bn3.backward(r3.backward(g)));
  g = m1.backward(g);
  g = c2.backward(bn2.backward(r2.backward(g)));
  g = c1.backward(bn1.backward(r1.backward(g)));
  return g;
}

void FeatureNet::set_training(bool training) {
  bn1.training = training;
  bn2.training = training;
  bn3.training = training;
  bn4.training = training;
  bn5.training = training;
  bn6.training = training;
}

void FeatureNet::zero_grad() {
  c1.zero_grad();
  c2.zero_grad();
  c3.zero_grad();
  c4.zero_grad();
  d1.zero_grad();
  d2.zero_grad();
  bn1.zero_grad();
  bn2.zero_grad();
  bn3.zero_grad();
  bn4.zero_grad();
  bn5.zero_grad();
  bn6.zero_grad();
}

void FeatureNet::collect(std::vector<ParamRef>& out) {
  c1.collect(out);
  bn1.collect(out);
  c2.collect(out);
  bn2.collect(out);
  c3.collect(out);
  bn3.collect(out);
  c4.collect(out);
  bn4.collect(out);
  d1.collect(out);
  bn5.collect(out);
  d2.collect(out);
  bn6.collect(out);
}

}  // namespace segraph::nn
