#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kgcard/observations.hpp"
#include "kgcard/text.hpp"

namespace kgcard {

/// One pre-processed edit: a statement touching two graph nodes plus the
/// change metadata. The user token is carried through but never weighs
/// into any estimate.
struct EditRecord {
  std::string subject;
  std::string property;
  std::string object;  // entity token or literal
  std::int64_t timestamp = 0;
  std::string user;
};

struct OntologyStatement {
  std::string entity;
  std::string relation;  // "instanceOf" | "subclassOf"; anything else is skipped
  std::string target;
};

inline constexpr std::string_view kInstanceOfToken = "instanceOf";
inline constexpr std::string_view kSubclassOfToken = "subclassOf";

/// Snapshot of class membership: direct instanceOf edges plus the
/// reflexive-transitive subclassOf closure. Built once, then immutable
/// and freely shared across threads. Cycles in subclassOf collapse: every
/// member of a cycle shares one closure set.
class OntologyIndex {
 public:
  void add_instance_of(std::string_view entity, std::string_view class_token);
  void add_subclass_of(std::string_view subclass, std::string_view superclass);

  /// Compute all closures. Must be called once after the last add_*;
  /// queries below assume it ran.
  void finalize();

  /// All classes the entity belongs to: the union of closures of its
  /// direct classes. Sorted; empty when the entity has no instanceOf.
  std::vector<std::string> classes_of(std::string_view entity) const;

  /// Reflexive-transitive superclasses. A token never seen by the index
  /// is its own one-element closure.
  std::vector<std::string> closure_of(std::string_view class_token) const;

  std::size_t class_count() const { return class_names_.size(); }
  std::size_t entity_count() const { return instance_of_.size(); }

  // Handle-level accessors for the hot resolve path.
  std::optional<std::uint32_t> class_handle(std::string_view token) const;
  std::string_view class_name(std::uint32_t handle) const { return class_names_[handle]; }
  std::span<const std::uint32_t> closure_handles(std::uint32_t class_handle) const;
  /// Direct class handles of an entity; nullptr when unknown.
  const std::vector<std::uint32_t>* direct_classes(std::string_view entity) const;

  template <typename Fn>
  void for_each_entity(Fn&& fn) const {
    for (const auto& [entity, classes] : instance_of_) fn(std::string_view(entity), classes);
  }

 private:
  std::uint32_t intern_class(std::string_view token);

  StringKeyMap<std::uint32_t> class_handle_by_token_;
  std::vector<std::string_view> class_names_;         // views into map keys
  std::vector<std::vector<std::uint32_t>> subclass_adj_;  // direct superclasses
  StringKeyMap<std::vector<std::uint32_t>> instance_of_;

  bool finalized_ = false;
  std::vector<std::uint32_t> scc_of_class_;
  std::vector<std::vector<std::uint32_t>> scc_closures_;  // sorted handles, shared per cycle
};

/// Build and finalize an index from a statement stream. Statements with a
/// relation other than instanceOf/subclassOf are skipped and counted.
OntologyIndex build_index(std::span<const OntologyStatement> statements,
                          std::uint64_t* unknown_relation_skips = nullptr);

/// Entity/property/target edges backing composite-class filters.
class PropertyGraph {
 public:
  void add(std::string_view entity, std::string_view property, std::string_view target);
  bool contains(std::string_view entity, std::string_view property,
                std::string_view target) const;
  std::size_t entity_count() const { return edges_.size(); }

 private:
  StringKeyMap<std::vector<std::pair<std::string, std::string>>> edges_;
};

/// A class joined on zero or more property=target constraints. With no
/// filters this degenerates to plain single-domain membership.
struct CompositeClassSpec {
  std::string base_class;
  std::vector<std::pair<std::string, std::string>> filters;  // (property, target)

  /// Token naming this class in mention files and reports, e.g.
  /// "Q515&P17=Q142". Plain classes keep their own token.
  std::string label() const;
};

/// All entities of the base class (via closure) satisfying every filter.
/// Sorted.
std::vector<std::string> members_of_composite(const OntologyIndex& index,
                                              const CompositeClassSpec& spec,
                                              const PropertyGraph& properties);

/// Lexical rule deciding whether an edit-object token names an entity.
/// The default accepts Q followed by digits; anything else is a literal.
class EntityTokenRule {
 public:
  static EntityTokenRule default_rule();
  static EntityTokenRule from_regex(const std::string& pattern);

  bool is_entity(std::string_view token) const;

 private:
  EntityTokenRule() = default;
  std::shared_ptr<const void> regex_;  // std::regex behind a type-erased pointer
};

struct ResolveCounters {
  std::uint64_t edits = 0;             // well-formed edits processed
  std::uint64_t with_mentions = 0;     // edits contributing at least one mention
  std::uint64_t without_mentions = 0;  // edits whose endpoints have no class
  std::uint64_t mentions = 0;
  std::uint64_t literal_objects = 0;
};

/// Turns edits into mentions: each subject/object occurrence of an entity
/// yields one mention per class that entity belongs to, restricted to the
/// given class specs when present. One resolver per thread; the shared
/// index stays read-only.
class EditResolver {
 public:
  EditResolver(const OntologyIndex& index, EntityTokenRule rule = EntityTokenRule::default_rule());

  /// Restrict output to these class specs; mentions take each spec's
  /// label as their class token. `properties` may be null when no spec
  /// has filters.
  void set_filter(std::span<const CompositeClassSpec> specs, const PropertyGraph* properties);

  void resolve(std::string_view subject, std::string_view object, std::int64_t timestamp,
               const MentionSink& sink);
  void resolve(const EditRecord& edit, const MentionSink& sink) {
    resolve(edit.subject, edit.object, edit.timestamp, sink);
  }

  const ResolveCounters& counters() const { return counters_; }

 private:
  std::size_t emit_for_token(std::string_view token, std::int64_t timestamp,
                             const MentionSink& sink);

  const OntologyIndex& index_;
  EntityTokenRule rule_;
  ResolveCounters counters_;
  std::vector<std::string> filter_labels_;
  std::vector<StringKeyMap<char>> filter_members_;  // member sets per spec
  bool filtered_ = false;
  StringKeyMap<std::vector<std::uint32_t>> class_cache_;  // entity -> union of closures
};

/// Convenience wrapper over EditResolver for in-memory streams.
std::vector<Mention> resolve_edits(std::span<const EditRecord> edits, const OntologyIndex& index,
                                   std::span<const CompositeClassSpec> filter = {},
                                   const PropertyGraph* properties = nullptr,
                                   ResolveCounters* counters = nullptr);

// --- TSV file formats ---------------------------------------------------
//
// Ontology:  entity <TAB> relation <TAB> target
// Properties: entity <TAB> property <TAB> target
// Edits:     subject <TAB> property <TAB> object <TAB> timestamp <TAB> user

struct TsvStats {
  std::uint64_t rows = 0;
  std::uint64_t bad_rows = 0;
  std::uint64_t unknown_relation = 0;  // ontology files only
};

TsvStats load_ontology_tsv(const std::filesystem::path& path, OntologyIndex& index);
TsvStats load_property_tsv(const std::filesystem::path& path, PropertyGraph& graph);

using EditSink = std::function<void(std::string_view subject, std::string_view property,
                                    std::string_view object, std::int64_t timestamp,
                                    std::string_view user)>;
TsvStats for_each_edit(const std::filesystem::path& path, const EditSink& sink);

}  // namespace kgcard
