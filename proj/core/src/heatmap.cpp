#include "textpose/heatmap.hpp"

#include <cmath>
#include <vector>

#include "textpose/errors.hpp"

namespace textpose {

HeatmapTensor render_heatmaps(const KeypointSet& kps, const HeatmapSpec& spec) {
  kps.validate();
  if (spec.width <= 0 || spec.height <= 0 || spec.sigma <= 0.0)
    throw ShapeError("heatmap spec must have positive dims and sigma");

  HeatmapTensor out{nn::Tensor({kJointCount, spec.height, spec.width})};
  double sx = static_cast<double>(spec.width) / kps.image_width;
  double sy = static_cast<double>(spec.height) / kps.image_height;
  double inv2s2 = 1.0 / (2.0 * spec.sigma * spec.sigma);

  std::vector<double> col(static_cast<std::size_t>(spec.height));
  std::vector<double> row(static_cast<std::size_t>(spec.width));

  for (int j = 0; j < kJointCount; ++j) {
    const auto& k = kps.joints[static_cast<std::size_t>(j)];
    if (!k.visible) continue;
    double cx = k.x * sx, cy = k.y * sy;
    if (!(cx >= 0.0 && cx < spec.width && cy >= 0.0 && cy < spec.height))
      throw ShapeError("joint '" + std::string(joint_name(j)) + "' falls outside the heatmap after rescaling");

    // The Gaussian is separable; build per-axis factors then outer-product.
    for (int y = 0; y < spec.height; ++y) {
      double d = y - cy;
      col[static_cast<std::size_t>(y)] = std::exp(-d * d * inv2s2);
    }
    for (int x = 0; x < spec.width; ++x) {
      double d = x - cx;
      row[static_cast<std::size_t>(x)] = std::exp(-d * d * inv2s2);
    }
    double* plane = out.data.data() + static_cast<std::int64_t>(j) * spec.height * spec.width;
    for (int y = 0; y < spec.height; ++y) {
      double cy_f = col[static_cast<std::size_t>(y)];
      double* line = plane + static_cast<std::int64_t>(y) * spec.width;
      for (int x = 0; x < spec.width; ++x) line[x] = cy_f * row[static_cast<std::size_t>(x)];
    }
  }
  return out;
}

KeypointSet extract_keypoints(const HeatmapTensor& maps, double threshold) {
  nn::require_rank(maps.data, 3, "heatmap tensor");
  if (maps.data.dim(0) != kJointCount) throw ShapeError("heatmap tensor must have 18 channels");
  int h = maps.height(), w = maps.width();

  KeypointSet out;
  out.image_width = w;
  out.image_height = h;
  for (int j = 0; j < kJointCount; ++j) {
    const double* plane = maps.data.data() + static_cast<std::int64_t>(j) * h * w;
    double best = plane[0];
    std::int64_t best_i = 0;
    std::int64_t n = static_cast<std::int64_t>(h) * w;
    for (std::int64_t i = 1; i < n; ++i)
      if (plane[i] > best) {  // strict: ties keep the lowest row-major index
        best = plane[i];
        best_i = i;
      }
    auto& kp = out.joints[static_cast<std::size_t>(j)];
    if (best >= threshold) {
      kp.visible = true;
      kp.x = static_cast<double>(best_i % w);
      kp.y = static_cast<double>(best_i / w);
    }
  }
  return out;
}

}  // namespace textpose
