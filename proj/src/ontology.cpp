#include "kgcard/ontology.hpp"

#include <algorithm>
#include <cstdio>
#include <regex>
#include <stdexcept>

namespace kgcard {

// --- OntologyIndex --------------------------------------------------------

std::uint32_t OntologyIndex::intern_class(std::string_view token) {
  auto it = class_handle_by_token_.find(token);
  if (it != class_handle_by_token_.end()) return it->second;
  auto handle = static_cast<std::uint32_t>(class_names_.size());
  auto [inserted, ok] = class_handle_by_token_.emplace(std::string(token), handle);
  class_names_.push_back(inserted->first);
  subclass_adj_.emplace_back();
  return handle;
}

void OntologyIndex::add_instance_of(std::string_view entity, std::string_view class_token) {
  std::uint32_t handle = intern_class(class_token);
  auto it = instance_of_.find(entity);
  if (it == instance_of_.end()) {
    it = instance_of_.emplace(std::string(entity), std::vector<std::uint32_t>{}).first;
  }
  auto& classes = it->second;
  if (std::find(classes.begin(), classes.end(), handle) == classes.end()) {
    classes.push_back(handle);
  }
  finalized_ = false;
}

void OntologyIndex::add_subclass_of(std::string_view subclass, std::string_view superclass) {
  std::uint32_t sub = intern_class(subclass);
  std::uint32_t super = intern_class(superclass);
  auto& adj = subclass_adj_[sub];
  if (std::find(adj.begin(), adj.end(), super) == adj.end()) adj.push_back(super);
  finalized_ = false;
}

void OntologyIndex::finalize() {
  const auto count = static_cast<std::uint32_t>(class_names_.size());
  scc_of_class_.assign(count, 0);
  scc_closures_.clear();

  // Iterative Tarjan over the subclass graph. Components pop
  // successors-first, so each closure can union the closures of the
  // superclass components it points at.
  constexpr std::uint32_t kUnvisited = 0xffffffff;
  std::vector<std::uint32_t> index(count, kUnvisited);
  std::vector<std::uint32_t> lowlink(count, 0);
  std::vector<bool> on_stack(count, false);
  std::vector<std::uint32_t> stack;
  std::uint32_t next_index = 0;

  struct Frame {
    std::uint32_t node;
    std::size_t edge = 0;
  };
  std::vector<Frame> frames;

  for (std::uint32_t root = 0; root < count; ++root) {
    if (index[root] != kUnvisited) continue;
    frames.push_back({root});
    while (!frames.empty()) {
      Frame& frame = frames.back();
      const std::uint32_t node = frame.node;
      if (index[node] == kUnvisited) {
        index[node] = lowlink[node] = next_index++;
        stack.push_back(node);
        on_stack[node] = true;
      }
      if (frame.edge < subclass_adj_[node].size()) {
        const std::uint32_t next = subclass_adj_[node][frame.edge++];
        if (index[next] == kUnvisited) {
          frames.push_back({next});
        } else if (on_stack[next]) {
          lowlink[node] = std::min(lowlink[node], index[next]);
        }
        continue;
      }
      // Node finished: maybe close a component, then propagate lowlink.
      if (lowlink[node] == index[node]) {
        const auto scc = static_cast<std::uint32_t>(scc_closures_.size());
        std::vector<std::uint32_t> members;
        while (true) {
          const std::uint32_t member = stack.back();
          stack.pop_back();
          on_stack[member] = false;
          scc_of_class_[member] = scc;
          members.push_back(member);
          if (member == node) break;
        }
        // Every out-edge of a closing component targets either the
        // component itself or one that already closed, so its closure is
        // the members plus the closures of those targets.
        std::vector<std::uint32_t> closure = members;
        for (std::uint32_t member : members) {
          for (std::uint32_t super : subclass_adj_[member]) {
            if (scc_of_class_[super] == scc) continue;
            const auto& super_closure = scc_closures_[scc_of_class_[super]];
            closure.insert(closure.end(), super_closure.begin(), super_closure.end());
          }
        }
        std::sort(closure.begin(), closure.end());
        closure.erase(std::unique(closure.begin(), closure.end()), closure.end());
        scc_closures_.push_back(std::move(closure));
      }
      frames.pop_back();
      if (!frames.empty()) {
        lowlink[frames.back().node] = std::min(lowlink[frames.back().node], lowlink[node]);
      }
    }
  }
  finalized_ = true;
}

std::optional<std::uint32_t> OntologyIndex::class_handle(std::string_view token) const {
  auto it = class_handle_by_token_.find(token);
  if (it == class_handle_by_token_.end()) return std::nullopt;
  return it->second;
}

std::span<const std::uint32_t> OntologyIndex::closure_handles(std::uint32_t class_handle) const {
  return scc_closures_[scc_of_class_[class_handle]];
}

const std::vector<std::uint32_t>* OntologyIndex::direct_classes(std::string_view entity) const {
  auto it = instance_of_.find(entity);
  return it == instance_of_.end() ? nullptr : &it->second;
}

std::vector<std::string> OntologyIndex::classes_of(std::string_view entity) const {
  std::vector<std::string> out;
  const auto* direct = direct_classes(entity);
  if (direct == nullptr) return out;
  std::vector<std::uint32_t> handles;
  for (std::uint32_t c : *direct) {
    auto closure = closure_handles(c);
    handles.insert(handles.end(), closure.begin(), closure.end());
  }
  std::sort(handles.begin(), handles.end());
  handles.erase(std::unique(handles.begin(), handles.end()), handles.end());
  out.reserve(handles.size());
  for (std::uint32_t h : handles) out.emplace_back(class_names_[h]);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::string> OntologyIndex::closure_of(std::string_view class_token) const {
  auto handle = class_handle(class_token);
  if (!handle) return {std::string(class_token)};  // reflexive closure of an unseen token
  std::vector<std::string> out;
  for (std::uint32_t h : closure_handles(*handle)) out.emplace_back(class_names_[h]);
  std::sort(out.begin(), out.end());
  return out;
}

OntologyIndex build_index(std::span<const OntologyStatement> statements,
                          std::uint64_t* unknown_relation_skips) {
  OntologyIndex index;
  std::uint64_t skips = 0;
  for (const OntologyStatement& s : statements) {
    if (s.relation == kInstanceOfToken) {
      index.add_instance_of(s.entity, s.target);
    } else if (s.relation == kSubclassOfToken) {
      index.add_subclass_of(s.entity, s.target);
    } else {
      ++skips;
    }
  }
  index.finalize();
  if (unknown_relation_skips != nullptr) *unknown_relation_skips = skips;
  return index;
}

// --- PropertyGraph -------------------------------------------------------

void PropertyGraph::add(std::string_view entity, std::string_view property,
                        std::string_view target) {
  auto it = edges_.find(entity);
  if (it == edges_.end()) {
    it = edges_.emplace(std::string(entity), std::vector<std::pair<std::string, std::string>>{})
             .first;
  }
  auto& list = it->second;
  auto edge = std::make_pair(std::string(property), std::string(target));
  if (std::find(list.begin(), list.end(), edge) == list.end()) list.push_back(std::move(edge));
}

bool PropertyGraph::contains(std::string_view entity, std::string_view property,
                             std::string_view target) const {
  auto it = edges_.find(entity);
  if (it == edges_.end()) return false;
  for (const auto& [p, t] : it->second) {
    if (p == property && t == target) return true;
  }
  return false;
}

// --- Composite classes ------------------------------------------------------

std::string CompositeClassSpec::label() const {
  std::string out = base_class;
  for (const auto& [property, target] : filters) {
    out += '&';
    out += property;
    out += '=';
    out += target;
  }
  return out;
}

namespace {

bool closure_contains(const OntologyIndex& index, std::span<const std::uint32_t> direct,
                      std::uint32_t base) {
  for (std::uint32_t c : direct) {
    auto closure = index.closure_handles(c);
    if (std::binary_search(closure.begin(), closure.end(), base)) return true;
  }
  return false;
}

}  // namespace

std::vector<std::string> members_of_composite(const OntologyIndex& index,
                                              const CompositeClassSpec& spec,
                                              const PropertyGraph& properties) {
  std::vector<std::string> out;
  auto base = index.class_handle(spec.base_class);
  if (!base) return out;
  index.for_each_entity([&](std::string_view entity, const std::vector<std::uint32_t>& direct) {
    if (!closure_contains(index, direct, *base)) return;
    for (const auto& [property, target] : spec.filters) {
      if (!properties.contains(entity, property, target)) return;
    }
    out.emplace_back(entity);
  });
  std::sort(out.begin(), out.end());
  return out;
}

// --- EntityTokenRule ------------------------------------------------------

EntityTokenRule EntityTokenRule::default_rule() { return EntityTokenRule(); }

EntityTokenRule EntityTokenRule::from_regex(const std::string& pattern) {
  EntityTokenRule rule;
  rule.regex_ = std::make_shared<std::regex>(pattern);
  return rule;
}

bool EntityTokenRule::is_entity(std::string_view token) const {
  if (regex_ != nullptr) {
    const auto& re = *static_cast<const std::regex*>(regex_.get());
    return std::regex_match(token.begin(), token.end(), re);
  }
  if (token.size() < 2 || token[0] != 'Q') return false;
  for (std::size_t i = 1; i < token.size(); ++i) {
    if (token[i] < '0' || token[i] > '9') return false;
  }
  return true;
}

// --- EditResolver --------------------------------------------------------

EditResolver::EditResolver(const OntologyIndex& index, EntityTokenRule rule)
    : index_(index), rule_(std::move(rule)) {}

void EditResolver::set_filter(std::span<const CompositeClassSpec> specs,
                              const PropertyGraph* properties) {
  filter_labels_.clear();
  filter_members_.clear();
  filtered_ = !specs.empty();
  static const PropertyGraph kEmptyProperties;
  const PropertyGraph& props = properties != nullptr ? *properties : kEmptyProperties;
  for (const CompositeClassSpec& spec : specs) {
    if (!spec.filters.empty() && properties == nullptr) {
      throw std::invalid_argument("composite class spec needs a property graph");
    }
    filter_labels_.push_back(spec.label());
    StringKeyMap<char> members;
    for (std::string& m : members_of_composite(index_, spec, props)) {
      members.emplace(std::move(m), 1);
    }
    filter_members_.push_back(std::move(members));
  }
}

std::size_t EditResolver::emit_for_token(std::string_view token, std::int64_t timestamp,
                                         const MentionSink& sink) {
  std::size_t emitted = 0;
  if (filtered_) {
    for (std::size_t i = 0; i < filter_members_.size(); ++i) {
      if (filter_members_[i].find(token) != filter_members_[i].end()) {
        sink(token, filter_labels_[i], timestamp);
        ++emitted;
      }
    }
    return emitted;
  }
  auto it = class_cache_.find(token);
  if (it == class_cache_.end()) {
    std::vector<std::uint32_t> handles;
    if (const auto* direct = index_.direct_classes(token)) {
      for (std::uint32_t c : *direct) {
        auto closure = index_.closure_handles(c);
        handles.insert(handles.end(), closure.begin(), closure.end());
      }
      std::sort(handles.begin(), handles.end());
      handles.erase(std::unique(handles.begin(), handles.end()), handles.end());
    }
    it = class_cache_.emplace(std::string(token), std::move(handles)).first;
  }
  for (std::uint32_t h : it->second) {
    sink(token, index_.class_name(h), timestamp);
    ++emitted;
  }
  return emitted;
}

void EditResolver::resolve(std::string_view subject, std::string_view object,
                           std::int64_t timestamp, const MentionSink& sink) {
  ++counters_.edits;
  std::size_t emitted = emit_for_token(subject, timestamp, sink);
  if (rule_.is_entity(object)) {
    emitted += emit_for_token(object, timestamp, sink);
  } else {
    ++counters_.literal_objects;
  }
  counters_.mentions += emitted;
  if (emitted > 0) {
    ++counters_.with_mentions;
  } else {
    ++counters_.without_mentions;
  }
}

std::vector<Mention> resolve_edits(std::span<const EditRecord> edits, const OntologyIndex& index,
                                   std::span<const CompositeClassSpec> filter,
                                   const PropertyGraph* properties, ResolveCounters* counters) {
  EditResolver resolver(index);
  if (!filter.empty()) resolver.set_filter(filter, properties);
  std::vector<Mention> out;
  for (const EditRecord& edit : edits) {
    resolver.resolve(edit, [&out](std::string_view entity, std::string_view class_id,
                                  std::int64_t timestamp) {
      out.push_back({std::string(entity), std::string(class_id), timestamp});
    });
  }
  if (counters != nullptr) *counters = resolver.counters();
  return out;
}

// --- TSV loaders ----------------------------------------------------------

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const noexcept {
    if (f != nullptr) std::fclose(f);
  }
};

// Shared buffered line reader for the TSV formats.
template <typename RowFn>
TsvStats for_each_tsv_row(const std::filesystem::path& path, std::size_t expected_fields,
                          RowFn&& row_fn) {
  std::unique_ptr<std::FILE, FileCloser> file(std::fopen(path.string().c_str(), "rb"));
  if (file == nullptr) throw std::runtime_error("cannot open file: " + path.string());
  TsvStats stats;
  std::vector<char> buf(1 << 20);
  std::string carry;
  auto handle_line = [&](std::string_view raw) {
    std::string_view line = raw;
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.remove_suffix(1);
    if (line.empty()) return;
    auto fields = split_fields(line, '\t');
    if (fields.size() != expected_fields || !row_fn(fields)) {
      ++stats.bad_rows;
      return;
    }
    ++stats.rows;
  };
  std::size_t got = 0;
  while ((got = std::fread(buf.data(), 1, buf.size(), file.get())) > 0) {
    std::string_view chunk(buf.data(), got);
    std::size_t start = 0;
    while (true) {
      std::size_t nl = chunk.find('\n', start);
      if (nl == std::string_view::npos) {
        carry.append(chunk.substr(start));
        break;
      }
      if (carry.empty()) {
        handle_line(chunk.substr(start, nl - start));
      } else {
        carry.append(chunk.substr(start, nl - start));
        handle_line(carry);
        carry.clear();
      }
      start = nl + 1;
    }
  }
  if (!carry.empty()) handle_line(carry);
  return stats;
}

}  // namespace

TsvStats load_ontology_tsv(const std::filesystem::path& path, OntologyIndex& index) {
  std::uint64_t unknown = 0;
  TsvStats stats = for_each_tsv_row(path, 3, [&](const std::vector<std::string_view>& f) {
    if (f[0].empty() || f[2].empty()) return false;
    if (f[1] == kInstanceOfToken) {
      index.add_instance_of(f[0], f[2]);
    } else if (f[1] == kSubclassOfToken) {
      index.add_subclass_of(f[0], f[2]);
    } else {
      ++unknown;  // counted separately, still a well-formed row
    }
    return true;
  });
  stats.unknown_relation = unknown;
  index.finalize();
  return stats;
}

TsvStats load_property_tsv(const std::filesystem::path& path, PropertyGraph& graph) {
  return for_each_tsv_row(path, 3, [&](const std::vector<std::string_view>& f) {
    if (f[0].empty() || f[1].empty() || f[2].empty()) return false;
    graph.add(f[0], f[1], f[2]);
    return true;
  });
}

TsvStats for_each_edit(const std::filesystem::path& path, const EditSink& sink) {
  return for_each_tsv_row(path, 5, [&](const std::vector<std::string_view>& f) {
    if (f[0].empty() || f[1].empty()) return false;
    auto ts = parse_timestamp(f[3]);
    if (!ts || *ts < 0) return false;
    sink(f[0], f[1], f[2], *ts, f[4]);
    return true;
  });
}

}  // namespace kgcard
