#include "textpose/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <vector>

#include "textpose/errors.hpp"

namespace textpose {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

struct Vec2 {
  double x = 0.0, y = 0.0;
};

Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
double norm(Vec2 a) { return std::sqrt(dot(a, a)); }

// Layout of the skeleton in continuous coordinates. Everything is a fraction
// of the frame size so other resolutions stay proportionate.
struct SkeletonLayout {
  Vec2 joints[kJointCount];
  Vec2 head_center;
  double head_radius = 0.0;
  double shoulder_y = 0.0, hip_y = 0.0;
  double cx = 0.0;
};

SkeletonLayout layout_skeleton(const FigureParams& p, int size) {
  double S = static_cast<double>(size);
  double s = p.scale;
  double cx = S * 0.5 + p.sway * (S / 64.0);
  double span_f = p.body == BodyOrientation::kFront ? 1.0 : 0.45;

  double hr = 0.10 * S * s;
  double head_cy = 0.05 * S + hr;
  double nose_dx = 0.0;
  if (p.head == HeadOrientation::kPartiallyLeft) nose_dx = 0.045 * S * s;
  if (p.head == HeadOrientation::kPartiallyRight) nose_dx = -0.045 * S * s;
  Vec2 head_c{cx + nose_dx, head_cy};

  double neck_y = head_cy + hr + 0.045 * S * s;
  double shoulder_y = neck_y + 0.02 * S;
  double sw = 0.165 * S * s * span_f;
  double hip_y = shoulder_y + 0.235 * S * s;
  double hw = 0.105 * S * s * span_f;

  double ua = 0.165 * S * s, fa = 0.15 * S * s;
  double thigh = 0.20 * S * s, shin = 0.185 * S * s;

  SkeletonLayout L;
  L.cx = cx;
  L.head_center = head_c;
  L.head_radius = hr;
  L.shoulder_y = shoulder_y;
  L.hip_y = hip_y;

  auto& J = L.joints;
  J[kNose] = head_c;
  J[kNeck] = {cx, neck_y};
  J[kREye] = {head_c.x - 0.035 * S * s + 0.3 * nose_dx, head_c.y - 0.03 * S * s};
  J[kLEye] = {head_c.x + 0.035 * S * s + 0.3 * nose_dx, head_c.y - 0.03 * S * s};
  J[kREar] = {head_c.x - hr * 0.95, head_c.y + 0.005 * S};
  J[kLEar] = {head_c.x + hr * 0.95, head_c.y + 0.005 * S};

  // side_sign +1 puts the figure's left limbs at +x, as seen facing the camera.
  auto arm = [&](double side_sign, double splay_deg, double elbow_deg, Vec2& sh, Vec2& el, Vec2& wr) {
    sh = {cx + side_sign * sw, shoulder_y};
    double a = splay_deg * kDeg;
    Vec2 d{side_sign * std::sin(a), std::cos(a)};
    el = sh + ua * d;
    double beta = std::atan2(d.y, d.x) + side_sign * (180.0 - elbow_deg) * kDeg;
    wr = el + fa * Vec2{std::cos(beta), std::sin(beta)};
  };
  arm(+1.0, p.shoulder_l, p.elbow_l, J[kLShoulder], J[kLElbow], J[kLWrist]);
  arm(-1.0, p.shoulder_r, p.elbow_r, J[kRShoulder], J[kRElbow], J[kRWrist]);

  auto leg = [&](double side_sign, double splay_deg, double knee_deg, Vec2& hip, Vec2& kn, Vec2& an) {
    hip = {cx + side_sign * hw, hip_y};
    double a = splay_deg * kDeg;
    Vec2 d{side_sign * std::sin(a), std::cos(a)};
    kn = hip + thigh * d;
    double beta = std::atan2(d.y, d.x) + side_sign * (180.0 - knee_deg) * kDeg;
    an = kn + shin * Vec2{std::cos(beta), std::sin(beta)};
  };
  leg(+1.0, p.hip_l, p.knee_l, J[kLHip], J[kLKnee], J[kLAnkle]);
  leg(-1.0, p.hip_r, p.knee_r, J[kRHip], J[kRKnee], J[kRAnkle]);

  return L;
}

bool ear_occluded(const FigureParams& p, int joint) {
  if (p.head == HeadOrientation::kPartiallyLeft) return joint == kREar;
  if (p.head == HeadOrientation::kPartiallyRight) return joint == kLEar;
  return false;
}

std::uint8_t channel_in(Rng& rng, int lo, int hi) {
  return static_cast<std::uint8_t>(rng.uniform_int(lo, hi));
}

// ---- rasterizer ----

struct Canvas {
  int size;
  std::vector<double> rgb;  // 3 per pixel

  explicit Canvas(int s, Rgb bg) : size(s), rgb(static_cast<std::size_t>(s) * s * 3) {
    for (int i = 0; i < s * s; ++i) {
      rgb[3 * static_cast<std::size_t>(i) + 0] = bg.r;
      rgb[3 * static_cast<std::size_t>(i) + 1] = bg.g;
      rgb[3 * static_cast<std::size_t>(i) + 2] = bg.b;
    }
  }

  // coverage from a signed distance, ~1px feather
  static double cov(double d) { return std::clamp(0.5 - d, 0.0, 1.0); }

  void splat(int x, int y, double a, Rgb c) {
    if (a <= 0.0) return;
    auto* px = &rgb[3 * (static_cast<std::size_t>(y) * size + x)];
    px[0] += a * (c.r - px[0]);
    px[1] += a * (c.g - px[1]);
    px[2] += a * (c.b - px[2]);
  }

  void disc(Vec2 c, double r, Rgb col) {
    int x0 = std::max(0, static_cast<int>(std::floor(c.x - r - 1)));
    int x1 = std::min(size - 1, static_cast<int>(std::ceil(c.x + r + 1)));
    int y0 = std::max(0, static_cast<int>(std::floor(c.y - r - 1)));
    int y1 = std::min(size - 1, static_cast<int>(std::ceil(c.y + r + 1)));
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x) {
        Vec2 pt{x + 0.5, y + 0.5};
        splat(x, y, cov(norm(pt - c) - r), col);
      }
  }

  void capsule(Vec2 a, Vec2 b, double r, Rgb col) {
    double lo_x = std::min(a.x, b.x) - r - 1, hi_x = std::max(a.x, b.x) + r + 1;
    double lo_y = std::min(a.y, b.y) - r - 1, hi_y = std::max(a.y, b.y) + r + 1;
    int x0 = std::max(0, static_cast<int>(std::floor(lo_x)));
    int x1 = std::min(size - 1, static_cast<int>(std::ceil(hi_x)));
    int y0 = std::max(0, static_cast<int>(std::floor(lo_y)));
    int y1 = std::min(size - 1, static_cast<int>(std::ceil(hi_y)));
    Vec2 ab = b - a;
    double len2 = std::max(dot(ab, ab), 1e-12);
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x) {
        Vec2 pt{x + 0.5, y + 0.5};
        double t = std::clamp(dot(pt - a, ab) / len2, 0.0, 1.0);
        splat(x, y, cov(norm(pt - (a + t * ab)) - r), col);
      }
  }

  // convex polygon with rounded edges; vertices in either winding
  void poly(const std::vector<Vec2>& v, double round_r, Rgb col) {
    double area2 = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const Vec2& p0 = v[i];
      const Vec2& p1 = v[(i + 1) % v.size()];
      area2 += p0.x * p1.y - p1.x * p0.y;
    }
    double wind = area2 >= 0.0 ? 1.0 : -1.0;

    double lo_x = v[0].x, hi_x = v[0].x, lo_y = v[0].y, hi_y = v[0].y;
    for (const auto& pt : v) {
      lo_x = std::min(lo_x, pt.x);
      hi_x = std::max(hi_x, pt.x);
      lo_y = std::min(lo_y, pt.y);
      hi_y = std::max(hi_y, pt.y);
    }
    int x0 = std::max(0, static_cast<int>(std::floor(lo_x - round_r - 1)));
    int x1 = std::min(size - 1, static_cast<int>(std::ceil(hi_x + round_r + 1)));
    int y0 = std::max(0, static_cast<int>(std::floor(lo_y - round_r - 1)));
    int y1 = std::min(size - 1, static_cast<int>(std::ceil(hi_y + round_r + 1)));
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x) {
        Vec2 pt{x + 0.5, y + 0.5};
        double d = -1e18;
        for (std::size_t i = 0; i < v.size(); ++i) {
          const Vec2& p0 = v[i];
          const Vec2& p1 = v[(i + 1) % v.size()];
          Vec2 e = p1 - p0;
          Vec2 n{wind * e.y, -wind * e.x};  // outward normal
          double nl = std::max(norm(n), 1e-12);
          d = std::max(d, dot(pt - p0, n) / nl);
        }
        splat(x, y, cov(d - round_r), col);
      }
  }

  Image to_image() const {
    Image img = Image::blank(size, size, 0, 0, 0);
    for (int i = 0; i < size * size; ++i)
      for (int c = 0; c < 3; ++c) {
        double v = std::round(rgb[3 * static_cast<std::size_t>(i) + c]);
        img.pixels[3 * static_cast<std::size_t>(i) + c] =
            static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
      }
    return img;
  }
};

Rgb scale_rgb(Rgb c, double f) {
  auto m = [&](std::uint8_t v) { return static_cast<std::uint8_t>(std::clamp(v * f, 0.0, 255.0)); };
  return {m(c.r), m(c.g), m(c.b)};
}

}  // namespace

FigureParams sample_figure(Rng& rng) {
  FigureParams p;
  p.gender = rng.uniform() < 0.5 ? 0 : 1;
  if (p.gender == 1) {
    p.shirt = {channel_in(rng, 170, 235), channel_in(rng, 40, 95), channel_in(rng, 40, 95)};
  } else {
    p.shirt = {channel_in(rng, 40, 95), channel_in(rng, 40, 95), channel_in(rng, 170, 235)};
  }
  int base = rng.uniform_int(60, 110);
  p.trousers = {static_cast<std::uint8_t>(base + rng.uniform_int(-8, 8)),
                static_cast<std::uint8_t>(base + rng.uniform_int(-8, 8)),
                static_cast<std::uint8_t>(base + rng.uniform_int(-8, 8))};
  int sr = rng.uniform_int(198, 232);
  p.skin = {static_cast<std::uint8_t>(sr), static_cast<std::uint8_t>(sr - 30 + rng.uniform_int(-8, 8)),
            static_cast<std::uint8_t>(sr - 55 + rng.uniform_int(-8, 8))};
  p.thickness = rng.uniform(1.2, 2.0);
  p.scale = rng.uniform(0.85, 1.0);
  return sample_pose(rng, p);
}

FigureParams sample_pose(Rng& rng, const FigureParams& identity) {
  FigureParams p = identity;
  p.body = static_cast<BodyOrientation>(rng.uniform_int(0, 2));
  p.head = static_cast<HeadOrientation>(rng.uniform_int(0, 2));
  auto splay = [&] { return rng.uniform(8.0, 35.0); };
  auto hinge = [&] {
    // two-mode sampling keeps a margin around the fold threshold
    return rng.uniform() < 0.5 ? rng.uniform(140.0, 178.0) : rng.uniform(55.0, 110.0);
  };
  p.shoulder_l = splay();
  p.shoulder_r = splay();
  p.elbow_l = hinge();
  p.elbow_r = hinge();
  p.hip_l = rng.uniform(2.0, 12.0);
  p.hip_r = rng.uniform(2.0, 12.0);
  p.knee_l = hinge();
  p.knee_r = hinge();
  p.sway = rng.uniform(-2.0, 2.0);
  return p;
}

KeypointSet figure_keypoints(const FigureParams& p, int size) {
  SkeletonLayout L = layout_skeleton(p, size);
  KeypointSet out;
  out.image_width = size;
  out.image_height = size;
  for (int j = 0; j < kJointCount; ++j) {
    if (ear_occluded(p, j)) continue;  // stays (0, 0, occluded)
    auto& kp = out.joints[static_cast<std::size_t>(j)];
    kp.x = std::round(L.joints[j].x);
    kp.y = std::round(L.joints[j].y);
    kp.visible = true;
  }
  out.validate();
  return out;
}

DescriptionRecord derive_record(const FigureParams& p, const AttributeSchema& schema) {
  DescriptionRecord rec = DescriptionRecord::empty_for(schema);
  rec.at(schema, "gender").choice = p.gender;
  rec.at(schema, "head").choice = static_cast<int>(p.head);
  rec.at(schema, "body").choice = static_cast<int>(p.body);
  rec.at(schema, "arm_left").choice = p.elbow_l < kFoldAngleDeg ? 1 : 0;
  rec.at(schema, "arm_right").choice = p.elbow_r < kFoldAngleDeg ? 1 : 0;
  rec.at(schema, "leg_left").choice = p.knee_l < kFoldAngleDeg ? 1 : 0;
  rec.at(schema, "leg_right").choice = p.knee_r < kFoldAngleDeg ? 1 : 0;
  auto& vis = rec.at(schema, "visibility").flags;
  for (int j = 0; j < kJointCount; ++j) vis[static_cast<std::size_t>(j)] = ear_occluded(p, j) ? 0 : 1;
  return rec;
}

Image render_figure(const FigureParams& p, int size) {
  if (size < 32) throw ShapeError("figure render size must be at least 32");
  SkeletonLayout L = layout_skeleton(p, size);
  const auto& J = L.joints;
  double u = size / 64.0;
  double thick = p.thickness * u;

  Canvas cv(size, {232, 231, 228});

  cv.capsule(J[kLHip], J[kLKnee], thick * 1.15, p.trousers);
  cv.capsule(J[kLKnee], J[kLAnkle], thick * 1.05, p.trousers);
  cv.capsule(J[kRHip], J[kRKnee], thick * 1.15, p.trousers);
  cv.capsule(J[kRKnee], J[kRAnkle], thick * 1.05, p.trousers);

  cv.poly({J[kRShoulder], J[kLShoulder], J[kLHip], J[kRHip]}, thick * 0.8, p.shirt);
  if (p.gender == 1) {
    double hem_y = L.hip_y + 0.09 * size * p.scale;
    double hem_w = 1.9 * std::abs(J[kLHip].x - L.cx) + 2.0 * u;
    cv.poly({{J[kRHip].x - 1.0 * u, L.hip_y - 0.015 * size}, {J[kLHip].x + 1.0 * u, L.hip_y - 0.015 * size},
             {L.cx + hem_w, hem_y}, {L.cx - hem_w, hem_y}},
            thick * 0.5, p.shirt);
  }

  cv.capsule(J[kLShoulder], J[kLElbow], thick * 0.9, p.skin);
  cv.capsule(J[kLElbow], J[kLWrist], thick * 0.85, p.skin);
  cv.capsule(J[kRShoulder], J[kRElbow], thick * 0.9, p.skin);
  cv.capsule(J[kRElbow], J[kRWrist], thick * 0.85, p.skin);

  cv.capsule(J[kNeck], {L.head_center.x, L.head_center.y + L.head_radius * 0.6}, thick * 0.8, p.skin);
  cv.disc(L.head_center, L.head_radius, p.skin);

  Rgb eye{40, 36, 34};
  double eye_r = std::max(0.8, 0.018 * size);
  cv.disc(J[kREye], eye_r, eye);
  cv.disc(J[kLEye], eye_r, eye);
  cv.disc(J[kNose], std::max(0.6, 0.015 * size), scale_rgb(p.skin, 0.72));

  return cv.to_image();
}

int oracle_classify_gender(const Image& img) {
  // The shirt fills the central torso band; red mass beats blue mass for
  // women and the reverse for men.
  int x0 = static_cast<int>(img.width * 0.30), x1 = static_cast<int>(img.width * 0.70);
  int y0 = static_cast<int>(img.height * 0.35), y1 = static_cast<int>(img.height * 0.60);
  double diff = 0.0;
  for (int y = y0; y < y1; ++y)
    for (int x = x0; x < x1; ++x) {
      const auto* px = img.px(x, y);
      diff += static_cast<double>(px[0]) - static_cast<double>(px[2]);
    }
  return diff > 0.0 ? 1 : 0;
}

namespace {

std::array<double, 7> gender_features(const Image& img) {
  std::array<double, 7> f{};
  int x0 = static_cast<int>(img.width * 0.30), x1 = static_cast<int>(img.width * 0.70);
  int y0 = static_cast<int>(img.height * 0.35), y1 = static_cast<int>(img.height * 0.60);
  double n_t = 0.0;
  for (int y = y0; y < y1; ++y)
    for (int x = x0; x < x1; ++x) {
      const auto* px = img.px(x, y);
      for (int c = 0; c < 3; ++c) f[static_cast<std::size_t>(c)] += px[c] / 255.0;
      n_t += 1.0;
    }
  double n_a = static_cast<double>(img.width) * img.height;
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      const auto* px = img.px(x, y);
      for (int c = 0; c < 3; ++c) f[static_cast<std::size_t>(3 + c)] += px[c] / 255.0;
    }
  for (int c = 0; c < 3; ++c) {
    f[static_cast<std::size_t>(c)] /= std::max(n_t, 1.0);
    f[static_cast<std::size_t>(3 + c)] /= n_a;
  }
  f[6] = 1.0;
  return f;
}

}  // namespace

int TrainedGenderClassifier::classify(const Image& img) const {
  auto f = gender_features(img);
  double z = 0.0;
  for (int i = 0; i < 7; ++i) z += w[static_cast<std::size_t>(i)] * f[static_cast<std::size_t>(i)];
  return z > 0.0 ? 1 : 0;
}

TrainedGenderClassifier train_gender_classifier(const std::vector<PoseSample>& samples, Rng& rng,
                                                int epochs) {
  TrainedGenderClassifier clf;
  if (samples.empty()) return clf;
  std::vector<std::size_t> order(samples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  const AttributeSchema schema = AttributeSchema::builtin_synthetic();
  double lr = 0.5;
  for (int e = 0; e < epochs; ++e) {
    rng.shuffle(order);
    for (std::size_t i : order) {
      const auto& s = samples[i];
      double label = s.record.at(schema, "gender").choice == 1 ? 1.0 : 0.0;
      auto f = gender_features(s.image);
      double z = 0.0;
      for (int k = 0; k < 7; ++k) z += clf.w[static_cast<std::size_t>(k)] * f[static_cast<std::size_t>(k)];
      double pred = 1.0 / (1.0 + std::exp(-z));
      double g = pred - label;
      for (int k = 0; k < 7; ++k) clf.w[static_cast<std::size_t>(k)] -= lr * g * f[static_cast<std::size_t>(k)];
    }
  }
  return clf;
}

Dataset generate_dataset(const SynthConfig& cfg) {
  Dataset ds;
  ds.schema = AttributeSchema::builtin_synthetic();
  ds.seed = cfg.seed;
  ds.image_size = cfg.image_size;

  Rng root(cfg.seed);
  auto fill_split = [&](const char* label, const char* prefix, int count, std::vector<PoseSample>& out) {
    Rng split_rng = root.child(label);
    int n_ids = (count + 1) / 2;
    for (int id_idx = 0; id_idx < n_ids; ++id_idx) {
      Rng id_rng = split_rng.child(static_cast<std::uint64_t>(id_idx));
      FigureParams identity = sample_figure(id_rng);
      for (int rep = 0; rep < 2; ++rep) {
        int index = 2 * id_idx + rep;
        if (index >= count) break;
        FigureParams params = rep == 0 ? identity : sample_pose(id_rng, identity);

        PoseSample s;
        char id[16];
        std::snprintf(id, sizeof(id), "%s%06d", prefix, index);
        s.id = id;
        s.keypoints = figure_keypoints(params, cfg.image_size);
        s.record = derive_record(params, ds.schema);
        s.embedding = encode_manyhot(s.record, ds.schema);
        s.sentence = render_description_text(s.record, ds.schema);
        s.image = render_figure(params, cfg.image_size);
        out.push_back(std::move(s));
      }
    }
  };
  fill_split("train", "tr", cfg.train_count, ds.train);
  fill_split("test", "te", cfg.test_count, ds.test);
  return ds;
}

void build_dataset(const SynthConfig& cfg, const std::string& out_dir) {
  save_dataset(generate_dataset(cfg), out_dir);
}

}  // namespace textpose
