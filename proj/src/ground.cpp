#include "segraph/ground.hpp"

#include <cmath>
#include <limits>

#include "segraph/range_image.hpp"

namespace segraph {

GroundModel GroundModel::plane(Scalar a, Scalar b, Scalar c, bool fallback) {
  GroundModel m;
  m.initialized_ = true;
  m.is_plane_ = true;
  m.fallback_ = fallback;
  m.a_ = a;
  m.b_ = b;
  m.c_ = c;
  return m;
}

GroundModel GroundModel::sector_table(std::vector<Scalar> elevations, std::vector<bool> filled, Scalar fill_value,
                                      bool fallback) {
  GroundModel m;
  m.initialized_ = true;
  m.is_plane_ = false;
  m.fallback_ = fallback;
  m.c_ = fill_value;
  m.sector_elev_ = std::move(elevations);
  for (std::size_t s = 0; s < m.sector_elev_.size(); ++s) {
    if (!filled[s]) m.sector_elev_[s] = fill_value;
  }
  return m;
}

Scalar GroundModel::elevation(Scalar x, Scalar y) const {
  if (is_plane_) return a_ * x + b_ * y + c_;
  const int n = static_cast<int>(sector_elev_.size());
  int s = static_cast<int>(std::floor(n * (std::atan2(y, x) + kPi) / (2.0 * kPi)));
  if (s >= n) s -= n;
  if (s < 0) s = 0;
  return sector_elev_[s];
}

Vec3 GroundModel::normal() const {
  if (!is_plane_) return {0.0, 0.0, 1.0};
  Vec3 n(-a_, -b_, 1.0);
  return n / n.norm();
}

namespace {

struct Candidate {
  Scalar x, y, z;
};

// One weighted least-squares solve of z = a*x + b*y + c.
bool fit_plane(const std::vector<Candidate>& pts, const std::vector<Scalar>& w, Scalar* a, Scalar* b, Scalar* c) {
  Eigen::Matrix3d ata = Eigen::Matrix3d::Zero();
  Eigen::Vector3d atz = Eigen::Vector3d::Zero();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Eigen::Vector3d row(pts[i].x, pts[i].y, 1.0);
    ata += w[i] * row * row.transpose();
    atz += w[i] * row * pts[i].z;
  }
  const Eigen::Vector3d sol = ata.ldlt().solve(atz);
  if (!sol.allFinite()) return false;
  // Reject degenerate candidate geometry (near-collinear in xy).
  if ((ata * sol - atz).norm() > 1e-6 * (1.0 + atz.norm())) return false;
  *a = sol(0);
  *b = sol(1);
  *c = sol(2);
  return true;
}

}  // namespace

GroundModel estimate_ground(const RangeImage& img, const GroundConfig& cfg) {
  const int n_sectors = std::max(1, cfg.sectors);
  std::vector<Candidate> cand(n_sectors);
  std::vector<bool> filled(n_sectors, false);
  Scalar min_z = std::numeric_limits<Scalar>::infinity();

  for (int r = 0; r < img.rows; ++r) {
    for (int c = 0; c < img.cols; ++c) {
      if (!img.valid(r, c)) continue;
      const Scalar x = img.x_m(r, c), y = img.y_m(r, c), z = img.z_m(r, c);
      min_z = std::min(min_z, z);
      int s = static_cast<int>(std::floor(n_sectors * (std::atan2(y, x) + kPi) / (2.0 * kPi)));
      if (s >= n_sectors) s -= n_sectors;
      if (!filled[s] || z < cand[s].z) {
        cand[s] = {x, y, z};
        filled[s] = true;
      }
    }
  }

  std::vector<Candidate> pts;
  for (int s = 0; s < n_sectors; ++s) {
    if (filled[s]) pts.push_back(cand[s]);
  }

  if (pts.size() < 3) {
    const Scalar zf = std::isfinite(min_z) ? min_z : 0.0;
    log_debug("ground fit fallback: " + std::to_string(pts.size()) + " candidate sectors");
    return GroundModel::plane(0.0, 0.0, zf, /*fallback=*/true);
  }

  if (cfg.kind == GroundConfig::Kind::SectorConstant) {
    std::vector<Scalar> elev(n_sectors, 0.0);
    for (int s = 0; s < n_sectors; ++s) {
      if (filled[s]) elev[s] = cand[s].z;
    }
    return GroundModel::sector_table(std::move(elev), filled, min_z, /*fallback=*/false);
  }

  // Iteratively reweighted plane fit; Huber-style weights against off-ground
  // candidates (sectors whose lowest return sits on an object).
  std::vector<Scalar> w(pts.size(), 1.0);
  Scalar a = 0, b = 0, c = min_z;
  for (int it = 0; it < cfg.reweight_iters; ++it) {
    Scalar na, nb, nc;
    if (!fit_plane(pts, w, &na, &nb, &nc)) {
      return GroundModel::plane(0.0, 0.0, min_z, /*fallback=*/true);
    }
    a = na;
    b = nb;
    c = nc;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const Scalar res = std::abs(pts[i].z - (a * pts[i].x + b * pts[i].y + c));
      w[i] = res <= cfg.inlier_thresh ? 1.0 : cfg.inlier_thresh / res;
    }
  }
  return GroundModel::plane(a, b, c, /*fallback=*/false);
}

}  // namespace segraph
