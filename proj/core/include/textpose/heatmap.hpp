#pragma once

#include "textpose/keypoints.hpp"
#include "textpose/nn/tensor.hpp"

namespace textpose {

struct HeatmapSpec {
  int width = 64;
  int height = 64;
  double sigma = 1.5;  // pixels, at the map's own resolution
};

// One Gaussian bump per joint, values in [0,1]; occluded joints leave their
// channel all-zero. Stored [18, height, width].
struct HeatmapTensor {
  nn::Tensor data;
  int width() const { return data.dim(2); }
  int height() const { return data.dim(1); }
  double at(int joint, int y, int x) const {
    return data[(static_cast<std::int64_t>(joint) * data.dim(1) + y) * data.dim(2) + x];
  }
};

inline constexpr double kVisibilityThreshold = 0.2;

// Renders all joints of kps onto maps of the spec's size, rescaling
// coordinates from the keypoint frame. A visible joint that would land
// outside the map after rescaling is an error (no clamping).
HeatmapTensor render_heatmaps(const KeypointSet& kps, const HeatmapSpec& spec);

// Per-channel argmax decode. A channel whose peak is below the threshold is
// occluded; ties resolve to the lowest row-major index. The returned set's
// frame is the map size.
KeypointSet extract_keypoints(const HeatmapTensor& maps, double threshold = kVisibilityThreshold);

}  // namespace textpose
