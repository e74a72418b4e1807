#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>

namespace xlr::llm {

using Bindings = std::map<std::string, std::string>;

// A prompt template with `{name}` placeholders, where name matches
// [a-z_][a-z0-9_]*. Any other brace usage (JSON examples, code) is literal.
// Substitution is single-pass: bound values are never re-scanned.
class PromptTemplate {
 public:
  PromptTemplate(std::string id, std::string body);

  const std::string& id() const { return id_; }
  const std::string& body() const { return body_; }
  const std::set<std::string>& placeholders() const { return placeholders_; }

  // Throws PreconditionError naming every unbound placeholder.
  std::string render(const Bindings& bindings) const;

 private:
  std::string id_;
  std::string body_;
  std::set<std::string> placeholders_;
};

// Templates loaded from `<dir>/<id>.txt`.
class TemplateStore {
 public:
  TemplateStore() = default;
  explicit TemplateStore(const std::filesystem::path& dir);

  void add(PromptTemplate tmpl);
  bool contains(std::string_view id) const;
  // Throws PreconditionError for an unknown id.
  const PromptTemplate& get(std::string_view id) const;
  std::string render(std::string_view id, const Bindings& bindings) const;

  // SHA-256 over (id, body) of every template, in id order.
  std::string hash() const;
  std::string hash_of(const std::set<std::string>& ids) const;

 private:
  std::map<std::string, PromptTemplate, std::less<>> templates_;
};

}  // namespace xlr::llm
