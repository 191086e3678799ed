#include "textpose/keypoints.hpp"

#include <cmath>

#include "textpose/errors.hpp"

namespace textpose {

namespace {
constexpr std::string_view kJointNames[kJointCount] = {
    "nose",       "neck",       "r_shoulder", "r_elbow", "r_wrist", "l_shoulder",
    "l_elbow",    "l_wrist",    "r_hip",      "r_knee",  "r_ankle", "l_hip",
    "l_knee",     "l_ankle",    "r_eye",      "l_eye",   "r_ear",   "l_ear"};
}

std::string_view joint_name(int j) {
  if (j < 0 || j >= kJointCount) throw ShapeError("joint index out of range");
  return kJointNames[j];
}

int joint_index(std::string_view name) {
  for (int i = 0; i < kJointCount; ++i)
    if (kJointNames[i] == name) return i;
  return -1;
}

void KeypointSet::validate() const {
  if (image_width <= 0 || image_height <= 0) throw ShapeError("keypoint set has non-positive image dims");
  for (int j = 0; j < kJointCount; ++j) {
    const auto& k = joints[static_cast<std::size_t>(j)];
    if (!k.visible) continue;
    if (!(k.x >= 0.0 && k.x < image_width && k.y >= 0.0 && k.y < image_height))
      throw ShapeError("visible joint '" + std::string(joint_name(j)) + "' outside image frame");
  }
}

KeypointSet rescale_keypoints(const KeypointSet& kps, int new_w, int new_h) {
  if (new_w <= 0 || new_h <= 0) throw ShapeError("rescale target dims must be positive");
  KeypointSet out = kps;
  double sx = static_cast<double>(new_w) / kps.image_width;
  double sy = static_cast<double>(new_h) / kps.image_height;
  for (auto& k : out.joints) {
    k.x *= sx;
    k.y *= sy;
  }
  out.image_width = new_w;
  out.image_height = new_h;
  return out;
}

std::optional<FacialNorm> try_normalize_facial(const KeypointSet& kps) {
  for (int j : kFacialJoints)
    if (!kps.joints[static_cast<std::size_t>(j)].visible) return std::nullopt;

  const auto& nose = kps.joints[kNose];
  FacialNorm out;
  out.params.origin_x = nose.x;
  out.params.origin_y = nose.y;

  double scale = 0.0;
  std::array<double, 10> translated{};
  for (std::size_t i = 0; i < kFacialJoints.size(); ++i) {
    const auto& k = kps.joints[static_cast<std::size_t>(kFacialJoints[i])];
    translated[2 * i] = k.x - nose.x;
    translated[2 * i + 1] = k.y - nose.y;
    scale = std::max(scale, std::max(std::abs(translated[2 * i]), std::abs(translated[2 * i + 1])));
  }
  if (scale == 0.0)
    throw DegenerateFaceError("all facial joints coincide; normalization scale would be zero");

  out.params.scale = scale;
  for (std::size_t i = 0; i < translated.size(); ++i) out.vec[i] = translated[i] / scale;
  return out;
}

std::array<std::array<double, 2>, 5> denormalize_facial(const FacialVec& vec, const FacialNormParams& params) {
  std::array<std::array<double, 2>, 5> out{};
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i][0] = vec[2 * i] * params.scale + params.origin_x;
    out[i][1] = vec[2 * i + 1] * params.scale + params.origin_y;
  }
  return out;
}

}  // namespace textpose
