// Copyright 2026 The JPPF Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace jppf {

using ClassId = std::uint32_t;
using PartGroupId = std::uint32_t;
// Class-specific part id: 1-based position in a class's part list, 0 = none.
using PartId = std::uint32_t;

struct ClassEntry {
  ClassId id = 0;
  std::string name;
  // Grouped part ids used by this class, in order. Empty = not partitionable.
  std::vector<PartGroupId> parts;
};

struct PartGroup {
  PartGroupId id = 0;
  std::string name;
};

enum class ClassKind { kUnknown, kStuff, kThing };

struct TaxonomyViolation {
  std::string field;
  std::string rule;
};

// The class universe. Entries are stored as given; lookups are indexed on
// construction. Use validate_taxonomy() before trusting the invariants.
//
// Semantic channel order is all stuff classes followed by all thing classes.
// Part channel order follows part_groups; entry 0 is the generic background.
class ClassTaxonomy {
 public:
  ClassTaxonomy() = default;
  ClassTaxonomy(std::vector<ClassEntry> stuff, std::vector<ClassEntry> things,
                std::vector<PartGroup> part_groups);

  const std::vector<ClassEntry>& stuff() const { return stuff_; }
  const std::vector<ClassEntry>& things() const { return things_; }
  const std::vector<PartGroup>& part_groups() const { return part_groups_; }

  std::size_t num_stuff() const { return stuff_.size(); }
  std::size_t num_things() const { return things_.size(); }
  std::size_t num_semantic_channels() const { return stuff_.size() + things_.size(); }
  std::size_t num_part_channels() const { return part_groups_.size(); }

  ClassKind kind(ClassId id) const;
  bool is_stuff(ClassId id) const { return kind(id) == ClassKind::kStuff; }
  bool is_thing(ClassId id) const { return kind(id) == ClassKind::kThing; }
  bool is_partitionable(ClassId id) const;

  // Empty span for unknown or non-partitionable classes.
  std::span<const PartGroupId> class_parts(ClassId id) const;
  const ClassEntry* find_class(ClassId id) const;
  std::string_view class_name(ClassId id) const;

  std::optional<std::size_t> semantic_channel(ClassId id) const;
  ClassId semantic_class_at(std::size_t channel) const;
  std::optional<std::size_t> group_channel(PartGroupId id) const;
  const PartGroup* find_group(PartGroupId id) const;
  bool has_background_group() const { return !part_groups_.empty(); }
  PartGroupId background_group() const { return part_groups_.front().id; }

  std::vector<ClassId> partitionable_classes() const;

 private:
  std::vector<ClassEntry> stuff_;
  std::vector<ClassEntry> things_;
  std::vector<PartGroup> part_groups_;
  // First occurrence wins for duplicate ids; duplicates are a validation error.
  std::unordered_map<ClassId, std::size_t> channel_of_class_;
  std::unordered_map<PartGroupId, std::size_t> channel_of_group_;
};

std::vector<TaxonomyViolation> validate_taxonomy(const ClassTaxonomy& t);

// Parses the taxonomy JSON document without semantic validation. Throws
// Error(kInvalidTaxonomy) for schema problems (missing keys, negative ids).
ClassTaxonomy parse_taxonomy_json(std::string_view text);
std::string taxonomy_to_json(const ClassTaxonomy& t);

// parse + validate; throws Error(kInvalidTaxonomy) listing every violation.
ClassTaxonomy load_taxonomy(std::string_view json_text);
ClassTaxonomy load_taxonomy_file(const std::string& path);

PartId ungroup_part(const ClassTaxonomy& t, ClassId semantic, PartGroupId group);
PartGroupId regroup_part(const ClassTaxonomy& t, ClassId semantic, PartId part);

}  // namespace jppf
