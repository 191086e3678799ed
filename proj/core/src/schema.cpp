#include "textpose/schema.hpp"

#include <algorithm>
#include <fstream>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "textpose/errors.hpp"
#include "textpose/keypoints.hpp"
#include "textpose/rng.hpp"

namespace textpose {

namespace {

int group_width(const AttributeGroup& g) { return static_cast<int>(g.options.size()); }

std::string words(const std::string& option) {
  std::string out = option;
  std::replace(out.begin(), out.end(), '_', ' ');
  return out;
}

// Joint names come through the visibility group: r_ear -> "right ear".
std::string joint_words(const std::string& option) {
  if (option.rfind("r_", 0) == 0) return "right " + words(option.substr(2));
  if (option.rfind("l_", 0) == 0) return "left " + words(option.substr(2));
  return words(option);
}

std::string capitalize(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

struct Pronouns {
  std::string subject;     // "The woman"
  std::string subj_short;  // "She"
  std::string poss;        // "her"
};

Pronouns pronouns_for(const AttributeSchema& schema, const DescriptionRecord& rec) {
  int gi = schema.group_index("gender");
  if (gi < 0) return {"The person", "They", "their"};
  const auto& g = schema.groups[static_cast<std::size_t>(gi)];
  int c = rec.values[static_cast<std::size_t>(gi)].choice;
  const std::string& opt = g.options[static_cast<std::size_t>(c)];
  std::string subject = "The " + words(opt);
  if (opt == "woman" || opt == "female" || opt == "girl") return {subject, "She", "her"};
  if (opt == "man" || opt == "male" || opt == "boy") return {subject, "He", "his"};
  return {subject, "They", "their"};
}

// Predicate (no subject) for a single-kind group, or empty when the group
// renders in possessive form instead.
std::string subject_predicate(const AttributeGroup& g, const std::string& opt, const Pronouns& p) {
  if (g.name == "body") return "is facing towards " + words(opt);
  if (g.name == "head") {
    if (opt == "straight") return "is keeping " + p.poss + " head straight";
    return "is keeping " + p.poss + " head facing " + words(opt);
  }
  return {};
}

// Possessive-form clause ("Her left arm is folded.") or empty.
std::string possessive_clause(const AttributeGroup& g, const std::string& opt, const Pronouns& p) {
  auto limb = [&](const std::string& side, const std::string& part) {
    return capitalize(p.poss) + " " + side + " " + part + " is " + words(opt) + ".";
  };
  if (g.name == "arm_left") return limb("left", "arm");
  if (g.name == "arm_right") return limb("right", "arm");
  if (g.name == "leg_left") return limb("left", "leg");
  if (g.name == "leg_right") return limb("right", "leg");
  return {};
}

std::string generic_single_clause(const AttributeGroup& g, const std::string& opt) {
  return "For " + words(g.name) + ", the choice is " + words(opt) + ".";
}

std::string generic_flags_clause(const AttributeGroup& g, const std::vector<std::uint8_t>& flags) {
  std::string items;
  for (std::size_t i = 0; i < g.options.size(); ++i)
    if (flags[i]) {
      if (!items.empty()) items += " and ";
      items += words(g.options[i]);
    }
  if (items.empty()) items = "none";
  return "For " + words(g.name) + ", the set flags are " + items + ".";
}

std::string occlusion_clause(const std::string& option, const Pronouns& p) {
  return capitalize(p.poss) + " " + joint_words(option) + " is occluded.";
}

std::vector<std::string> split_sentences(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (std::size_t i = 0; i < text.size(); ++i) {
    cur += text[i];
    if (text[i] == '.' && (i + 1 == text.size() || text[i + 1] == ' ')) {
      out.push_back(cur);
      cur.clear();
      if (i + 1 < text.size()) ++i;  // swallow the separating space
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

void check_record_conforms(const DescriptionRecord& rec, const AttributeSchema& schema) {
  if (rec.values.size() != schema.groups.size())
    throw SchemaError("record has " + std::to_string(rec.values.size()) + " group values, schema has " +
                      std::to_string(schema.groups.size()));
  for (std::size_t i = 0; i < schema.groups.size(); ++i) {
    const auto& g = schema.groups[i];
    const auto& v = rec.values[i];
    if (g.kind == AttributeGroup::Kind::kSingle) {
      if (v.choice < 0 || v.choice >= group_width(g))
        throw SchemaError("group '" + g.name + "': choice index out of range");
    } else {
      if (v.flags.size() != g.options.size())
        throw SchemaError("group '" + g.name + "': flag count mismatch");
      for (auto f : v.flags)
        if (f != 0 && f != 1) throw SchemaError("group '" + g.name + "': flags must be 0/1");
    }
  }
}

}  // namespace

int AttributeSchema::total_dim() const {
  int n = 0;
  for (const auto& g : groups) n += group_width(g);
  return n;
}

int AttributeSchema::group_offset(int group_index) const {
  int off = 0;
  for (int i = 0; i < group_index; ++i) off += group_width(groups[static_cast<std::size_t>(i)]);
  return off;
}

int AttributeSchema::group_index(const std::string& name) const {
  for (std::size_t i = 0; i < groups.size(); ++i)
    if (groups[i].name == name) return static_cast<int>(i);
  return -1;
}

void AttributeSchema::finalize() {
  if (groups.empty()) throw SchemaError("schema must have at least one group");
  std::set<std::string> names;
  std::ostringstream canon;
  canon << "v" << version;
  for (const auto& g : groups) {
    if (g.name.empty() || g.options.empty())
      throw SchemaError("schema group needs a name and at least one option");
    if (!names.insert(g.name).second) throw SchemaError("duplicate group name '" + g.name + "'");
    std::set<std::string> opts;
    canon << '|' << g.name << ':' << (g.kind == AttributeGroup::Kind::kSingle ? 's' : 'f');
    for (const auto& o : g.options) {
      if (!opts.insert(o).second)
        throw SchemaError("duplicate option '" + o + "' in group '" + g.name + "'");
      canon << ',' << o;
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(hash_label(canon.str())));
  id = buf;
}

AttributeSchema AttributeSchema::builtin_synthetic() {
  AttributeSchema s;
  s.version = 1;
  std::vector<std::string> joints;
  for (int j = 0; j < kJointCount; ++j) joints.emplace_back(joint_name(j));
  s.groups = {
      {"gender", AttributeGroup::Kind::kSingle, {"man", "woman"}},
      {"visibility", AttributeGroup::Kind::kFlags, joints},
      {"head", AttributeGroup::Kind::kSingle, {"straight", "partially_left", "partially_right"}},
      {"body", AttributeGroup::Kind::kSingle, {"front", "left", "right"}},
      {"arm_left", AttributeGroup::Kind::kSingle, {"straight", "folded"}},
      {"arm_right", AttributeGroup::Kind::kSingle, {"straight", "folded"}},
      {"leg_left", AttributeGroup::Kind::kSingle, {"straight", "folded"}},
      {"leg_right", AttributeGroup::Kind::kSingle, {"straight", "folded"}},
  };
  s.finalize();
  return s;
}

AttributeSchema load_schema(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open schema file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("schema file parse error: " + std::string(e.what()));
  }
  AttributeSchema s;
  try {
    s.version = j.at("version").get<int>();
    for (const auto& gj : j.at("groups")) {
      AttributeGroup g;
      g.name = gj.at("name").get<std::string>();
      std::string kind = gj.at("kind").get<std::string>();
      if (kind == "single")
        g.kind = AttributeGroup::Kind::kSingle;
      else if (kind == "flags")
        g.kind = AttributeGroup::Kind::kFlags;
      else
        throw DataError("schema group kind must be 'single' or 'flags'");
      for (const auto& o : gj.at("options")) g.options.push_back(o.get<std::string>());
      s.groups.push_back(std::move(g));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError("schema file structure error: " + std::string(e.what()));
  }
  std::string stored_id = j.value("id", "");
  s.finalize();
  if (!stored_id.empty() && stored_id != s.id)
    throw DataError("schema id mismatch: file says " + stored_id + ", content hashes to " + s.id);
  return s;
}

void save_schema(const AttributeSchema& schema, const std::string& path) {
  nlohmann::ordered_json j;
  j["version"] = schema.version;
  j["id"] = schema.id;
  j["groups"] = nlohmann::ordered_json::array();
  for (const auto& g : schema.groups) {
    nlohmann::ordered_json gj;
    gj["name"] = g.name;
    gj["kind"] = g.kind == AttributeGroup::Kind::kSingle ? "single" : "flags";
    gj["options"] = g.options;
    j["groups"].push_back(gj);
  }
  std::ofstream out(path);
  if (!out) throw DataError("cannot write schema file: " + path);
  out << j.dump(2) << '\n';
}

DescriptionRecord DescriptionRecord::empty_for(const AttributeSchema& schema) {
  DescriptionRecord rec;
  rec.values.resize(schema.groups.size());
  for (std::size_t i = 0; i < schema.groups.size(); ++i)
    if (schema.groups[i].kind == AttributeGroup::Kind::kFlags)
      rec.values[i].flags.assign(schema.groups[i].options.size(), 0);
  return rec;
}

GroupValue& DescriptionRecord::at(const AttributeSchema& schema, const std::string& group) {
  int gi = schema.group_index(group);
  if (gi < 0) throw SchemaError("no group named '" + group + "'");
  return values[static_cast<std::size_t>(gi)];
}

const GroupValue& DescriptionRecord::at(const AttributeSchema& schema, const std::string& group) const {
  return const_cast<DescriptionRecord*>(this)->at(schema, group);
}

TextEmbedding encode_manyhot(const DescriptionRecord& rec, const AttributeSchema& schema) {
  check_record_conforms(rec, schema);
  TextEmbedding emb;
  emb.kind = EmbeddingKind::kManyHot;
  emb.schema_id = schema.id;
  emb.values.assign(static_cast<std::size_t>(schema.total_dim()), 0.0);
  for (std::size_t i = 0; i < schema.groups.size(); ++i) {
    int off = schema.group_offset(static_cast<int>(i));
    const auto& g = schema.groups[i];
    const auto& v = rec.values[i];
    if (g.kind == AttributeGroup::Kind::kSingle) {
      emb.values[static_cast<std::size_t>(off + v.choice)] = 1.0;
    } else {
      for (std::size_t k = 0; k < v.flags.size(); ++k)
        emb.values[static_cast<std::size_t>(off) + k] = v.flags[k] ? 1.0 : 0.0;
    }
  }
  return emb;
}

DescriptionRecord decode_manyhot(const TextEmbedding& emb, const AttributeSchema& schema) {
  if (emb.kind != EmbeddingKind::kManyHot)
    throw SchemaError("decode_manyhot needs a many-hot embedding, got a dense one");
  if (emb.schema_id != schema.id)
    throw SchemaError("embedding schema id '" + emb.schema_id + "' does not match schema '" + schema.id + "'");
  if (static_cast<int>(emb.values.size()) != schema.total_dim())
    throw SchemaError("embedding length " + std::to_string(emb.values.size()) + " != schema dim " +
                      std::to_string(schema.total_dim()));
  for (double v : emb.values)
    if (v != 0.0 && v != 1.0) throw SchemaError("many-hot embedding has a value outside {0,1}");

  DescriptionRecord rec = DescriptionRecord::empty_for(schema);
  for (std::size_t i = 0; i < schema.groups.size(); ++i) {
    int off = schema.group_offset(static_cast<int>(i));
    const auto& g = schema.groups[i];
    auto& v = rec.values[i];
    if (g.kind == AttributeGroup::Kind::kSingle) {
      int ones = 0, pick = -1;
      for (int k = 0; k < group_width(g); ++k)
        if (emb.values[static_cast<std::size_t>(off + k)] == 1.0) {
          ++ones;
          pick = k;
        }
      if (ones != 1)
        throw SchemaError("group '" + g.name + "': single-choice block has " + std::to_string(ones) +
                          " set bits");
      v.choice = pick;
    } else {
      for (int k = 0; k < group_width(g); ++k)
        v.flags[static_cast<std::size_t>(k)] =
            emb.values[static_cast<std::size_t>(off + k)] == 1.0 ? 1 : 0;
    }
  }
  return rec;
}

TextEmbedding interpolate_embeddings(const TextEmbedding& a, const TextEmbedding& b) {
  if (a.values.size() != b.values.size())
    throw SchemaError("cannot interpolate embeddings of lengths " + std::to_string(a.values.size()) +
                      " and " + std::to_string(b.values.size()));
  TextEmbedding out;
  out.kind = EmbeddingKind::kDense;
  out.schema_id = a.schema_id == b.schema_id ? a.schema_id : std::string{};
  out.values.resize(a.values.size());
  for (std::size_t i = 0; i < a.values.size(); ++i) out.values[i] = 0.5 * (a.values[i] + b.values[i]);
  return out;
}

std::string render_description_text(const DescriptionRecord& rec, const AttributeSchema& schema) {
  check_record_conforms(rec, schema);
  Pronouns p = pronouns_for(schema, rec);
  std::vector<std::string> clauses;
  bool subject_spoken = false;

  // Single-kind groups first, in schema order.
  for (std::size_t i = 0; i < schema.groups.size(); ++i) {
    const auto& g = schema.groups[i];
    if (g.kind != AttributeGroup::Kind::kSingle || g.name == "gender") continue;
    const std::string& opt = g.options[static_cast<std::size_t>(rec.values[i].choice)];
    std::string pred = subject_predicate(g, opt, p);
    if (!pred.empty()) {
      clauses.push_back((subject_spoken ? p.subj_short : p.subject) + " " + pred + ".");
      subject_spoken = true;
      continue;
    }
    std::string poss = possessive_clause(g, opt, p);
    clauses.push_back(poss.empty() ? generic_single_clause(g, opt) : poss);
  }

  // Flags groups afterwards; visibility renders one clause per occlusion.
  for (std::size_t i = 0; i < schema.groups.size(); ++i) {
    const auto& g = schema.groups[i];
    if (g.kind != AttributeGroup::Kind::kFlags) continue;
    const auto& flags = rec.values[i].flags;
    if (g.name == "visibility") {
      for (std::size_t k = 0; k < g.options.size(); ++k)
        if (!flags[k]) clauses.push_back(occlusion_clause(g.options[k], p));
    } else {
      clauses.push_back(generic_flags_clause(g, flags));
    }
  }

  // A gendered record must always name its subject somewhere.
  if (!subject_spoken && schema.group_index("gender") >= 0)
    clauses.insert(clauses.begin(), p.subject + " is pictured.");

  std::string out;
  for (std::size_t i = 0; i < clauses.size(); ++i) {
    if (i) out += ' ';
    out += clauses[i];
  }
  return out;
}

DescriptionRecord parse_description_text(const std::string& text, const AttributeSchema& schema) {
  auto sentences = split_sentences(text);
  auto contains = [&](const std::string& s) {
    return std::find(sentences.begin(), sentences.end(), s) != sentences.end();
  };

  DescriptionRecord rec = DescriptionRecord::empty_for(schema);

  // Gender first; it fixes the pronouns every other clause used.
  int gi = schema.group_index("gender");
  if (gi >= 0) {
    const auto& g = schema.groups[static_cast<std::size_t>(gi)];
    int pick = -1;
    std::size_t best_len = 0;
    for (int k = 0; k < group_width(g); ++k) {
      std::string prefix = "The " + words(g.options[static_cast<std::size_t>(k)]) + " ";
      for (const auto& s : sentences)
        if (s.rfind(prefix, 0) == 0 && prefix.size() > best_len) {
          pick = k;
          best_len = prefix.size();
        }
    }
    if (pick < 0) throw SchemaError("cannot recover gender from description text");
    rec.values[static_cast<std::size_t>(gi)].choice = pick;
  }

  // With gender settled, re-render candidate clauses and match exactly.
  Pronouns p = pronouns_for(schema, rec);
  std::vector<Pronouns> subject_variants = {p, {p.subj_short, p.subj_short, p.poss}};

  for (std::size_t i = 0; i < schema.groups.size(); ++i) {
    const auto& g = schema.groups[i];
    if (static_cast<int>(i) == gi) continue;
    if (g.kind == AttributeGroup::Kind::kSingle) {
      int pick = -1;
      for (int k = 0; k < group_width(g) && pick < 0; ++k) {
        const std::string& opt = g.options[static_cast<std::size_t>(k)];
        for (const auto& sv : subject_variants) {
          std::string pred = subject_predicate(g, opt, p);
          std::string cand = pred.empty() ? std::string{} : sv.subject + " " + pred + ".";
          if (cand.empty()) {
            cand = possessive_clause(g, opt, p);
            if (cand.empty()) cand = generic_single_clause(g, opt);
          }
          if (contains(cand)) {
            pick = k;
            break;
          }
        }
      }
      if (pick < 0) throw SchemaError("cannot recover group '" + g.name + "' from description text");
      rec.values[i].choice = pick;
    } else if (g.name == "visibility") {
      auto& flags = rec.values[i].flags;
      std::fill(flags.begin(), flags.end(), 1);
      for (std::size_t k = 0; k < g.options.size(); ++k)
        if (contains(occlusion_clause(g.options[k], p))) flags[k] = 0;
    } else {
      auto& flags = rec.values[i].flags;
      bool found = false;
      // Flag combinations are matched by regenerating each candidate subset
      // clause is infeasible; instead recover from the rendered list.
      std::string prefix = "For " + words(g.name) + ", the set flags are ";
      for (const auto& s : sentences) {
        if (s.rfind(prefix, 0) != 0) continue;
        std::string body = s.substr(prefix.size());
        if (!body.empty() && body.back() == '.') body.pop_back();
        std::fill(flags.begin(), flags.end(), 0);
        if (body != "none") {
          std::size_t pos = 0;
          while (pos <= body.size()) {
            std::size_t next = body.find(" and ", pos);
            std::string item = body.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
            bool matched = false;
            for (std::size_t k = 0; k < g.options.size(); ++k)
              if (words(g.options[k]) == item) {
                flags[k] = 1;
                matched = true;
              }
            if (!matched) throw SchemaError("unknown flag item '" + item + "' in group '" + g.name + "'");
            if (next == std::string::npos) break;
            pos = next + 5;
          }
        }
        found = true;
        break;
      }
      if (!found) throw SchemaError("cannot recover group '" + g.name + "' from description text");
    }
  }
  return rec;
}

}  // namespace textpose
