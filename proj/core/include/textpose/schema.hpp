#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace textpose {

// Attribute schemas are data: the vector layout, templates and parsers all
// derive from the group list, so new datasets can ship their own file.

struct AttributeGroup {
  enum class Kind { kSingle, kFlags };
  std::string name;
  Kind kind = Kind::kSingle;
  std::vector<std::string> options;
};

struct AttributeSchema {
  int version = 1;
  std::string id;  // stable content hash, filled by finalize()
  std::vector<AttributeGroup> groups;

  int total_dim() const;
  int group_offset(int group_index) const;
  int group_index(const std::string& name) const;  // -1 when absent
  void finalize();                                 // validates and recomputes id

  // gender, 18 per-joint visibility flags, head/body orientation, per-arm
  // and per-leg state. This is the schema the synthetic dataset uses.
  static AttributeSchema builtin_synthetic();
};

AttributeSchema load_schema(const std::string& path);
void save_schema(const AttributeSchema& schema, const std::string& path);

// One value per schema group: a chosen option index for single-kind groups,
// one 0/1 flag per option for flags-kind groups.
struct GroupValue {
  int choice = -1;
  std::vector<std::uint8_t> flags;
};

struct DescriptionRecord {
  std::vector<GroupValue> values;

  static DescriptionRecord empty_for(const AttributeSchema& schema);
  GroupValue& at(const AttributeSchema& schema, const std::string& group);
  const GroupValue& at(const AttributeSchema& schema, const std::string& group) const;
};

enum class EmbeddingKind { kManyHot, kDense };

struct TextEmbedding {
  std::vector<double> values;
  EmbeddingKind kind = EmbeddingKind::kManyHot;
  std::string schema_id;
};

// Concatenated per-group blocks in schema order; single-kind groups one-hot.
TextEmbedding encode_manyhot(const DescriptionRecord& rec, const AttributeSchema& schema);

// Exact inverse of encode_manyhot. Rejects dense embeddings, schema-id or
// length mismatches, non-binary values, and single-kind blocks whose
// popcount is not exactly one (the error names the offending group).
DescriptionRecord decode_manyhot(const TextEmbedding& emb, const AttributeSchema& schema);

// Elementwise mean of two equal-length embeddings; the result is dense.
TextEmbedding interpolate_embeddings(const TextEmbedding& a, const TextEmbedding& b);

// Deterministic English rendering; distinct records yield distinct strings.
std::string render_description_text(const DescriptionRecord& rec, const AttributeSchema& schema);

// Template inverse of render_description_text.
DescriptionRecord parse_description_text(const std::string& text, const AttributeSchema& schema);

}  // namespace textpose
