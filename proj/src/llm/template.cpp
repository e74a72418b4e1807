#include "xlr/llm/template.hpp"

#include <fstream>
#include <sstream>

#include "xlr/error.hpp"
#include "xlr/hash.hpp"

namespace xlr::llm {

namespace {

bool is_name_start(char c) { return (c >= 'a' && c <= 'z') || c == '_'; }
bool is_name_char(char c) { return is_name_start(c) || (c >= '0' && c <= '9'); }

// Calls on_text(literal) and on_placeholder(name) in order.
template <typename OnText, typename OnPlaceholder>
void scan(std::string_view body, OnText on_text, OnPlaceholder on_placeholder) {
  std::size_t i = 0;
  std::size_t literal_start = 0;
  while (i < body.size()) {
    if (body[i] == '{' && i + 1 < body.size() && is_name_start(body[i + 1])) {
      std::size_t j = i + 1;
      while (j < body.size() && is_name_char(body[j])) ++j;
      if (j < body.size() && body[j] == '}') {
        on_text(body.substr(literal_start, i - literal_start));
        on_placeholder(std::string(body.substr(i + 1, j - i - 1)));
        i = j + 1;
        literal_start = i;
        continue;
      }
    }
    ++i;
  }
  on_text(body.substr(literal_start));
}

}  // namespace

PromptTemplate::PromptTemplate(std::string id, std::string body)
    : id_(std::move(id)), body_(std::move(body)) {
  scan(body_, [](std::string_view) {}, [this](std::string name) { placeholders_.insert(std::move(name)); });
}

std::string PromptTemplate::render(const Bindings& bindings) const {
  std::string missing;
  for (const auto& name : placeholders_) {
    if (!bindings.contains(name)) missing += (missing.empty() ? "" : ", ") + name;
  }
  if (!missing.empty()) {
    throw PreconditionError("template '" + id_ + "': unbound placeholders: " + missing);
  }
  std::string out;
  scan(body_, [&](std::string_view lit) { out += lit; },
       [&](const std::string& name) { out += bindings.at(name); });
  return out;
}

TemplateStore::TemplateStore(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw EnvironmentError("template directory not found: " + dir.string());
  }
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".txt") continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::ostringstream body;
    body << in.rdbuf();
    add(PromptTemplate(entry.path().stem().string(), body.str()));
  }
}

void TemplateStore::add(PromptTemplate tmpl) {
  std::string id = tmpl.id();
  templates_.insert_or_assign(std::move(id), std::move(tmpl));
}

bool TemplateStore::contains(std::string_view id) const { return templates_.find(id) != templates_.end(); }

const PromptTemplate& TemplateStore::get(std::string_view id) const {
  auto it = templates_.find(id);
  if (it == templates_.end()) throw PreconditionError("unknown template: " + std::string(id));
  return it->second;
}

std::string TemplateStore::render(std::string_view id, const Bindings& bindings) const {
  return get(id).render(bindings);
}

std::string TemplateStore::hash() const {
  FieldHasher h;
  for (const auto& [id, tmpl] : templates_) h.add(id).add(tmpl.body());
  return h.hex();
}

std::string TemplateStore::hash_of(const std::set<std::string>& ids) const {
  FieldHasher h;
  for (const auto& id : ids) h.add(id).add(get(id).body());
  return h.hex();
}

}  // namespace xlr::llm
