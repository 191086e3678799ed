#pragma once

#include <string>
#include <vector>

#include "textpose/image.hpp"
#include "textpose/keypoints.hpp"
#include "textpose/schema.hpp"

namespace textpose {

struct PoseSample {
  std::string id;
  Image image;
  KeypointSet keypoints;
  DescriptionRecord record;
  TextEmbedding embedding;  // many-hot, matches the dataset schema
  std::string sentence;
};

// Samples are paired for the rendering stage: within each split, samples
// 2k and 2k+1 share an identity (palette, proportions, gender) and differ
// in pose.
struct Dataset {
  AttributeSchema schema;
  std::uint64_t seed = 0;
  int image_size = 64;
  std::vector<PoseSample> train;
  std::vector<PoseSample> test;
};

// On-disk layout: schema.json, manifest.json, annotations.txt,
// keypoints.csv, images/<id>.png.
void save_dataset(const Dataset& ds, const std::string& dir);
Dataset load_dataset(const std::string& dir);

struct DfpassLoadResult {
  std::vector<PoseSample> samples;
  int skipped = 0;  // malformed annotation lines
};

// Annotation-file loader: one record per line, "id,v0,...,vN,sentence".
// Malformed lines are skipped and counted. Images are picked up from
// images_dir/<id>.png when present; ground-truth keypoints from the
// optional keypoints file (absent joints stay occluded).
DfpassLoadResult load_dfpass(const std::string& annotations_path, const std::string& images_dir,
                             const AttributeSchema& schema, const std::string& keypoints_path = "");

}  // namespace textpose
