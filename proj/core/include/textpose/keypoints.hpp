#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace textpose {

// Joint order follows the 18-point COCO convention used by openpose-style
// estimators: nose, neck, then right/left arm chains, right/left leg chains,
// then eyes and ears.
inline constexpr int kJointCount = 18;

enum Joint : int {
  kNose = 0,
  kNeck = 1,
  kRShoulder = 2,
  kRElbow = 3,
  kRWrist = 4,
  kLShoulder = 5,
  kLElbow = 6,
  kLWrist = 7,
  kRHip = 8,
  kRKnee = 9,
  kRAnkle = 10,
  kLHip = 11,
  kLKnee = 12,
  kLAnkle = 13,
  kREye = 14,
  kLEye = 15,
  kREar = 16,
  kLEar = 17,
};

std::string_view joint_name(int j);
int joint_index(std::string_view name);  // -1 if unknown

// The five facial joints, in the fixed order used for the 10-vector.
inline constexpr std::array<int, 5> kFacialJoints = {kNose, kREye, kLEye, kREar, kLEar};

struct Keypoint {
  double x = 0.0;
  double y = 0.0;
  bool visible = false;
};

struct KeypointSet {
  std::array<Keypoint, kJointCount> joints{};
  int image_width = 0;
  int image_height = 0;

  // Throws ShapeError if dims are non-positive or a visible joint lies
  // outside [0, w) x [0, h).
  void validate() const;
};

// Rescale coordinates onto a different image frame.
KeypointSet rescale_keypoints(const KeypointSet& kps, int new_w, int new_h);

struct FacialNormParams {
  double origin_x = 0.0;  // nose position at normalization time
  double origin_y = 0.0;
  double scale = 1.0;     // max |translated coordinate| over the five joints
};

using FacialVec = std::array<double, 10>;  // (x,y) pairs in kFacialJoints order

struct FacialNorm {
  FacialVec vec;
  FacialNormParams params;
};

// Translates the five facial joints so the nose sits at the origin, then
// scales into the +-1 square. Returns nullopt when any facial joint is
// occluded (caller skips refinement). Throws DegenerateFaceError when all
// five joints coincide exactly (zero scale).
std::optional<FacialNorm> try_normalize_facial(const KeypointSet& kps);

// Inverse map back to image coordinates, same joint order.
std::array<std::array<double, 2>, 5> denormalize_facial(const FacialVec& vec, const FacialNormParams& params);

}  // namespace textpose
