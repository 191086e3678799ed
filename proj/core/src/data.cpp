#include "textpose/data.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <sstream>

#include "textpose/errors.hpp"

namespace fs = std::filesystem;

namespace textpose {

namespace {

std::string annotation_line(const PoseSample& s) {
  std::ostringstream os;
  os << s.id;
  for (double v : s.embedding.values) os << ',' << (v == 1.0 ? 1 : 0);
  os << ',' << s.sentence;
  return os.str();
}

std::string keypoint_line(const PoseSample& s) {
  std::ostringstream os;
  os << s.id << ',' << s.keypoints.image_width << ',' << s.keypoints.image_height;
  os.precision(17);
  for (const auto& k : s.keypoints.joints) os << ',' << k.x << ',' << k.y << ',' << (k.visible ? 1 : 0);
  return os.str();
}

bool parse_keypoint_line(const std::string& line, std::string& id, KeypointSet& kps) {
  std::istringstream is(line);
  std::string field;
  if (!std::getline(is, field, ',') || field.empty()) return false;
  id = field;
  auto next_num = [&](double& out) {
    if (!std::getline(is, field, ',')) return false;
    try {
      out = std::stod(field);
    } catch (...) {
      return false;
    }
    return true;
  };
  double w, h;
  if (!next_num(w) || !next_num(h)) return false;
  kps.image_width = static_cast<int>(w);
  kps.image_height = static_cast<int>(h);
  for (auto& k : kps.joints) {
    double vis;
    if (!next_num(k.x) || !next_num(k.y) || !next_num(vis)) return false;
    k.visible = vis != 0.0;
  }
  return true;
}

// "id,v0,...,vN,sentence" with N = schema dim; the sentence keeps any
// commas it might contain.
bool parse_annotation_line(const std::string& line, int dim, std::string& id, std::vector<double>& vec,
                           std::string& sentence) {
  std::size_t pos = line.find(',');
  if (pos == std::string::npos || pos == 0) return false;
  id = line.substr(0, pos);
  vec.clear();
  vec.reserve(static_cast<std::size_t>(dim));
  for (int i = 0; i < dim; ++i) {
    std::size_t next = line.find(',', pos + 1);
    if (next == std::string::npos) return false;
    std::string f = line.substr(pos + 1, next - pos - 1);
    if (f == "0")
      vec.push_back(0.0);
    else if (f == "1")
      vec.push_back(1.0);
    else
      return false;
    pos = next;
  }
  sentence = line.substr(pos + 1);
  return true;
}

void write_split(std::ofstream& ann, std::ofstream& kp, const std::vector<PoseSample>& split,
                 const std::string& img_dir) {
  for (const auto& s : split) {
    ann << annotation_line(s) << '\n';
    kp << keypoint_line(s) << '\n';
    write_png(s.image, img_dir + "/" + s.id + ".png");
  }
}

}  // namespace

void save_dataset(const Dataset& ds, const std::string& dir) {
  fs::create_directories(dir);
  fs::create_directories(dir + "/images");
  save_schema(ds.schema, dir + "/schema.json");

  std::ofstream ann(dir + "/annotations.txt");
  std::ofstream kp(dir + "/keypoints.csv");
  if (!ann || !kp) throw DataError("cannot write dataset files under " + dir);
  write_split(ann, kp, ds.train, dir + "/images");
  write_split(ann, kp, ds.test, dir + "/images");

  nlohmann::ordered_json m;
  m["seed"] = ds.seed;
  m["schema_id"] = ds.schema.id;
  m["image_size"] = ds.image_size;
  nlohmann::ordered_json splits;
  auto ids = [](const std::vector<PoseSample>& v) {
    std::vector<std::string> out;
    for (const auto& s : v) out.push_back(s.id);
    return out;
  };
  splits["train"] = ids(ds.train);
  splits["test"] = ids(ds.test);
  m["splits"] = splits;
  std::ofstream mf(dir + "/manifest.json");
  if (!mf) throw DataError("cannot write manifest under " + dir);
  mf << m.dump(2) << '\n';
}

Dataset load_dataset(const std::string& dir) {
  std::ifstream mf(dir + "/manifest.json");
  if (!mf) throw DataError("no manifest.json under " + dir);
  nlohmann::json m;
  try {
    mf >> m;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("manifest parse error: " + std::string(e.what()));
  }

  Dataset ds;
  ds.schema = load_schema(dir + "/schema.json");
  ds.seed = m.at("seed").get<std::uint64_t>();
  ds.image_size = m.at("image_size").get<int>();
  if (m.at("schema_id").get<std::string>() != ds.schema.id)
    throw DataError("manifest schema_id does not match schema.json");

  auto loaded = load_dfpass(dir + "/annotations.txt", dir + "/images", ds.schema, dir + "/keypoints.csv");
  if (loaded.skipped > 0)
    throw DataError("dataset has " + std::to_string(loaded.skipped) + " malformed annotation lines");
  std::map<std::string, PoseSample*> by_id;
  for (auto& s : loaded.samples) by_id[s.id] = &s;

  auto take = [&](const nlohmann::json& idlist, std::vector<PoseSample>& out) {
    for (const auto& idj : idlist) {
      auto it = by_id.find(idj.get<std::string>());
      if (it == by_id.end()) throw DataError("manifest references missing sample " + idj.get<std::string>());
      out.push_back(std::move(*it->second));
    }
  };
  take(m.at("splits").at("train"), ds.train);
  take(m.at("splits").at("test"), ds.test);
  return ds;
}

DfpassLoadResult load_dfpass(const std::string& annotations_path, const std::string& images_dir,
                             const AttributeSchema& schema, const std::string& keypoints_path) {
  std::ifstream ann(annotations_path);
  if (!ann) throw DataError("cannot open annotations file: " + annotations_path);

  std::map<std::string, KeypointSet> kps_by_id;
  if (!keypoints_path.empty()) {
    std::ifstream kp(keypoints_path);
    if (!kp) throw DataError("cannot open keypoints file: " + keypoints_path);
    std::string line;
    while (std::getline(kp, line)) {
      if (line.empty()) continue;
      std::string id;
      KeypointSet k;
      if (parse_keypoint_line(line, id, k)) kps_by_id[id] = k;
    }
  }

  DfpassLoadResult out;
  int dim = schema.total_dim();
  std::string line;
  while (std::getline(ann, line)) {
    if (line.empty()) continue;
    PoseSample s;
    std::vector<double> vec;
    if (!parse_annotation_line(line, dim, s.id, vec, s.sentence)) {
      ++out.skipped;
      continue;
    }
    s.embedding.kind = EmbeddingKind::kManyHot;
    s.embedding.schema_id = schema.id;
    s.embedding.values = std::move(vec);
    try {
      s.record = decode_manyhot(s.embedding, schema);
    } catch (const SchemaError&) {
      ++out.skipped;
      continue;
    }
    std::string img_path = images_dir + "/" + s.id + ".png";
    if (fs::exists(img_path)) s.image = read_png(img_path);

    auto it = kps_by_id.find(s.id);
    if (it != kps_by_id.end()) {
      s.keypoints = it->second;
    } else {
      // No pose ground truth: leave every joint occluded.
      s.keypoints.image_width = s.image.width > 0 ? s.image.width : 64;
      s.keypoints.image_height = s.image.height > 0 ? s.image.height : 64;
    }
    out.samples.push_back(std::move(s));
  }
  return out;
}

}  // namespace textpose
