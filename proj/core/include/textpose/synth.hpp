#pragma once

#include <cstdint>
#include <string>

#include "textpose/data.hpp"
#include "textpose/image.hpp"
#include "textpose/keypoints.hpp"
#include "textpose/rng.hpp"
#include "textpose/schema.hpp"

namespace textpose {

// Procedural stick-figure sampler. A figure is identity (who) plus pose
// (how they stand); pairs of renders that share identity but differ in
// pose are what the rendering stage trains on.

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
};

enum class BodyOrientation { kFront = 0, kLeft = 1, kRight = 2 };
enum class HeadOrientation { kStraight = 0, kPartiallyLeft = 1, kPartiallyRight = 2 };

struct FigureParams {
  // identity
  int gender = 0;  // option index in the schema's gender group (0 man, 1 woman)
  Rgb shirt, trousers, skin;
  double thickness = 1.6;  // limb stroke radius in pixels at a 64 frame
  double scale = 1.0;      // overall figure scale, in (0, 1]

  // pose; angles in degrees. Splay is measured off vertical, elbow/knee are
  // interior joint angles (180 = limb fully extended).
  BodyOrientation body = BodyOrientation::kFront;
  HeadOrientation head = HeadOrientation::kStraight;
  double shoulder_l = 20.0, shoulder_r = 20.0;  // in [8, 35]
  double elbow_l = 170.0, elbow_r = 170.0;      // in [55, 178]
  double hip_l = 6.0, hip_r = 6.0;              // in [2, 12]
  double knee_l = 170.0, knee_r = 170.0;        // in [55, 178]
  double sway = 0.0;                            // horizontal drift of the figure center
};

// Interior angles below this threshold read as "folded" in descriptions.
inline constexpr double kFoldAngleDeg = 120.0;

FigureParams sample_figure(Rng& rng);
// Fresh pose, same identity fields.
FigureParams sample_pose(Rng& rng, const FigureParams& identity);

// Forward kinematics onto a size x size frame. Coordinates are integral so
// that rendering heatmaps and taking the per-channel argmax reproduces the
// set exactly; occluded joints (far ear on a turned head) are stored as
// (0, 0, occluded).
KeypointSet figure_keypoints(const FigureParams& p, int size);

// Threshold the angles into the schema's attribute vocabulary.
DescriptionRecord derive_record(const FigureParams& p, const AttributeSchema& schema);

// Anti-aliased deterministic rasterizer; size >= 32. Women get a warm shirt
// and a skirt, men a cool shirt, which gives classifiers a stable cue.
Image render_figure(const FigureParams& p, int size);

// Reads the shirt hue from the torso region; returns a gender option index.
int oracle_classify_gender(const Image& img);

// Tiny trainable alternative to the oracle: logistic regression on pooled
// color features.
struct TrainedGenderClassifier {
  std::array<double, 7> w{};  // torso mean RGB, image mean RGB, bias
  int classify(const Image& img) const;
};
TrainedGenderClassifier train_gender_classifier(const std::vector<PoseSample>& samples, Rng& rng,
                                                int epochs = 30);

struct SynthConfig {
  int train_count = 2000;
  int test_count = 200;
  int image_size = 64;
  std::uint64_t seed = 0;
};

// Pure generation: bit-identical for a given config. Samples 2k and 2k+1 of
// each split share an identity.
Dataset generate_dataset(const SynthConfig& cfg);

// generate_dataset followed by save_dataset(out_dir).
void build_dataset(const SynthConfig& cfg, const std::string& out_dir);

}  // namespace textpose
