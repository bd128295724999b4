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

#include "core/taxonomy.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "core/error.hpp"

namespace jppf {

namespace {

constexpr ClassId kMaxClassId = 255;
constexpr std::size_t kMaxPartsPerClass = 255;

}  // namespace

ClassTaxonomy::ClassTaxonomy(std::vector<ClassEntry> stuff, std::vector<ClassEntry> things,
                             std::vector<PartGroup> part_groups)
    : stuff_(std::move(stuff)), things_(std::move(things)), part_groups_(std::move(part_groups)) {
  std::size_t channel = 0;
  for (const auto& c : stuff_) channel_of_class_.emplace(c.id, channel++);
  for (const auto& c : things_) channel_of_class_.emplace(c.id, channel++);
  for (std::size_t g = 0; g < part_groups_.size(); ++g) {
    channel_of_group_.emplace(part_groups_[g].id, g);
  }
}

ClassKind ClassTaxonomy::kind(ClassId id) const {
  auto it = channel_of_class_.find(id);
  if (it == channel_of_class_.end()) return ClassKind::kUnknown;
  return it->second < stuff_.size() ? ClassKind::kStuff : ClassKind::kThing;
}

const ClassEntry* ClassTaxonomy::find_class(ClassId id) const {
  auto it = channel_of_class_.find(id);
  if (it == channel_of_class_.end()) return nullptr;
  return it->second < stuff_.size() ? &stuff_[it->second] : &things_[it->second - stuff_.size()];
}

bool ClassTaxonomy::is_partitionable(ClassId id) const {
  const ClassEntry* c = find_class(id);
  return c != nullptr && !c->parts.empty();
}

std::span<const PartGroupId> ClassTaxonomy::class_parts(ClassId id) const {
  const ClassEntry* c = find_class(id);
  if (c == nullptr) return {};
  return c->parts;
}

std::string_view ClassTaxonomy::class_name(ClassId id) const {
  const ClassEntry* c = find_class(id);
  return c == nullptr ? std::string_view{} : std::string_view{c->name};
}

std::optional<std::size_t> ClassTaxonomy::semantic_channel(ClassId id) const {
  auto it = channel_of_class_.find(id);
  if (it == channel_of_class_.end()) return std::nullopt;
  return it->second;
}

ClassId ClassTaxonomy::semantic_class_at(std::size_t channel) const {
  return channel < stuff_.size() ? stuff_[channel].id : things_.at(channel - stuff_.size()).id;
}

std::optional<std::size_t> ClassTaxonomy::group_channel(PartGroupId id) const {
  auto it = channel_of_group_.find(id);
  if (it == channel_of_group_.end()) return std::nullopt;
  return it->second;
}

const PartGroup* ClassTaxonomy::find_group(PartGroupId id) const {
  auto g = group_channel(id);
  return g ? &part_groups_[*g] : nullptr;
}

std::vector<ClassId> ClassTaxonomy::partitionable_classes() const {
  std::vector<ClassId> out;
  for (const auto& c : stuff_) {
    if (!c.parts.empty()) out.push_back(c.id);
  }
  for (const auto& c : things_) {
    if (!c.parts.empty()) out.push_back(c.id);
  }
  return out;
}

std::vector<TaxonomyViolation> validate_taxonomy(const ClassTaxonomy& t) {
  std::vector<TaxonomyViolation> out;
  auto add = [&](std::string field, std::string rule) {
    out.push_back({std::move(field), std::move(rule)});
  };

  if (t.stuff().empty()) add("stuff_classes", "at least one stuff class is required");

  std::set<ClassId> stuff_ids;
  std::set<ClassId> thing_ids;
  for (const auto& c : t.stuff()) {
    if (!stuff_ids.insert(c.id).second) {
      add("stuff_classes", "duplicate class id " + std::to_string(c.id));
    }
  }
  for (const auto& c : t.things()) {
    if (stuff_ids.count(c.id) != 0) {
      add("thing_classes", "class id " + std::to_string(c.id) + " is also a stuff class");
    } else if (!thing_ids.insert(c.id).second) {
      add("thing_classes", "duplicate class id " + std::to_string(c.id));
    }
  }

  std::set<PartGroupId> group_ids;
  if (t.part_groups().empty()) {
    add("part_groups", "the background group (entry 0) is required");
  }
  for (const auto& g : t.part_groups()) {
    if (!group_ids.insert(g.id).second) {
      add("part_groups", "duplicate part group id " + std::to_string(g.id));
    }
  }

  auto check_class = [&](const ClassEntry& c, const char* field) {
    if (c.id == 0 || c.id > kMaxClassId) {
      add(field, "class id " + std::to_string(c.id) + " outside 1..255 (0 is VOID)");
    }
    if (c.parts.size() > kMaxPartsPerClass) {
      add("class_parts", "class " + std::to_string(c.id) + " has more than 255 parts");
    }
    std::set<PartGroupId> seen;
    for (PartGroupId g : c.parts) {
      std::string where = "class_parts[" + std::to_string(c.id) + "]";
      if (!group_ids.count(g)) {
        add(where, "unknown part group id " + std::to_string(g));
      } else if (t.has_background_group() && g == t.background_group()) {
        add(where, "references the reserved background group");
      } else if (!seen.insert(g).second) {
        add(where, "part group " + std::to_string(g) + " listed twice");
      }
    }
  };
  for (const auto& c : t.stuff()) check_class(c, "stuff_classes");
  for (const auto& c : t.things()) check_class(c, "thing_classes");
  return out;
}

namespace {

using nlohmann::json;

std::uint32_t read_id(const json& j, const char* what) {
  if (!j.contains("id") || !j["id"].is_number_integer()) {
    throw Error(ErrorCode::kInvalidTaxonomy, std::string(what) + " entry needs an integer 'id'");
  }
  auto v = j["id"].get<std::int64_t>();
  if (v < 0 || v > 0xFFFFFFFFLL) {
    throw Error(ErrorCode::kInvalidTaxonomy, std::string(what) + " id must be non-negative");
  }
  return static_cast<std::uint32_t>(v);
}

std::vector<ClassEntry> read_classes(const json& doc, const char* key, bool required) {
  std::vector<ClassEntry> out;
  if (!doc.contains(key)) {
    if (required) throw Error(ErrorCode::kInvalidTaxonomy, std::string("missing '") + key + "'");
    return out;
  }
  if (!doc[key].is_array()) {
    throw Error(ErrorCode::kInvalidTaxonomy, std::string("'") + key + "' must be an array");
  }
  for (const auto& e : doc[key]) {
    ClassEntry c;
    c.id = read_id(e, key);
    c.name = e.value("name", std::string{});
    if (e.contains("parts")) {
      if (!e["parts"].is_array()) {
        throw Error(ErrorCode::kInvalidTaxonomy, "'parts' must be an array of group ids");
      }
      for (const auto& g : e["parts"]) {
        if (!g.is_number_integer() || g.get<std::int64_t>() < 0) {
          throw Error(ErrorCode::kInvalidTaxonomy, "part group ids must be non-negative integers");
        }
        c.parts.push_back(g.get<std::uint32_t>());
      }
    }
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace

ClassTaxonomy parse_taxonomy_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kInvalidTaxonomy, e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::kInvalidTaxonomy, "document must be an object");

  auto stuff = read_classes(doc, "stuff", true);
  auto things = read_classes(doc, "things", false);
  std::vector<PartGroup> groups;
  if (doc.contains("part_groups")) {
    if (!doc["part_groups"].is_array()) {
      throw Error(ErrorCode::kInvalidTaxonomy, "'part_groups' must be an array");
    }
    for (const auto& e : doc["part_groups"]) {
      groups.push_back({read_id(e, "part_groups"), e.value("name", std::string{})});
    }
  }
  return ClassTaxonomy(std::move(stuff), std::move(things), std::move(groups));
}

std::string taxonomy_to_json(const ClassTaxonomy& t) {
  json doc;
  auto classes = [](const std::vector<ClassEntry>& in, bool always_parts) {
    json arr = json::array();
    for (const auto& c : in) {
      json e = {{"id", c.id}, {"name", c.name}};
      if (always_parts || !c.parts.empty()) e["parts"] = c.parts;
      arr.push_back(std::move(e));
    }
    return arr;
  };
  doc["stuff"] = classes(t.stuff(), false);
  doc["things"] = classes(t.things(), true);
  doc["part_groups"] = json::array();
  for (const auto& g : t.part_groups()) doc["part_groups"].push_back({{"id", g.id}, {"name", g.name}});
  return doc.dump(2);
}

ClassTaxonomy load_taxonomy(std::string_view json_text) {
  ClassTaxonomy t = parse_taxonomy_json(json_text);
  auto violations = validate_taxonomy(t);
  if (!violations.empty()) {
    std::ostringstream msg;
    msg << violations.size() << " violation(s):";
    for (const auto& v : violations) msg << " [" << v.field << ": " << v.rule << "]";
    throw Error(ErrorCode::kInvalidTaxonomy, msg.str());
  }
  return t;
}

ClassTaxonomy load_taxonomy_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open taxonomy file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_taxonomy(buf.str());
}

PartId ungroup_part(const ClassTaxonomy& t, ClassId semantic, PartGroupId group) {
  auto parts = t.class_parts(semantic);
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (parts[i] == group) return static_cast<PartId>(i + 1);
  }
  throw Error(ErrorCode::kUnknownGroupForClass,
              "part group " + std::to_string(group) + " is not a part of class " +
                  std::to_string(semantic));
}

PartGroupId regroup_part(const ClassTaxonomy& t, ClassId semantic, PartId part) {
  auto parts = t.class_parts(semantic);
  if (part == 0 || part > parts.size()) {
    throw Error(ErrorCode::kUnknownGroupForClass,
                "class " + std::to_string(semantic) + " has no part " + std::to_string(part));
  }
  return parts[part - 1];
}

}  // namespace jppf
