#include "halluc/registry.hpp"

#include <map>
#include <stdexcept>

#include "halluc/enum_learning.hpp"

namespace halluc {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    auto pos = s.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

std::map<std::string, std::string> parse_params(const std::string& text) {
  std::map<std::string, std::string> out;
  if (text.empty()) return out;
  for (const auto& piece : split(text, ',')) {
    auto eq = piece.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("malformed learner parameter: " + piece);
    }
    out[piece.substr(0, eq)] = piece.substr(eq + 1);
  }
  return out;
}

std::uint64_t get_u64(const std::map<std::string, std::string>& params,
                      const std::string& key, std::uint64_t fallback) {
  auto it = params.find(key);
  return it == params.end() ? fallback : std::stoull(it->second);
}

std::string get_str(const std::map<std::string, std::string>& params,
                    const std::string& key, const std::string& fallback) {
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

}  // namespace

FamilyPtr parse_learner_spec(const std::string& spec,
                             const TokenAlphabet& alphabet) {
  auto colon = spec.find(':');
  std::string name = colon == std::string::npos ? spec : spec.substr(0, colon);
  auto params =
      parse_params(colon == std::string::npos ? "" : spec.substr(colon + 1));

  if (name == "memorizer") {
    return make_memorizer(get_str(params, "default", "unknown"));
  }
  if (name == "const") {
    auto it = params.find("answer");
    if (it == params.end()) {
      throw std::invalid_argument("const learner needs answer=...");
    }
    return make_constant(it->second);
  }
  if (name == "echo") {
    return make_echo();
  }
  if (name == "ngram") {
    auto order = static_cast<unsigned>(get_u64(params, "order", 2));
    auto max_out = static_cast<std::size_t>(get_u64(params, "max_out", 64));
    return make_ngram(alphabet, order, max_out);
  }
  if (name == "lister") {
    auto max_chars = static_cast<std::size_t>(get_u64(params, "max_chars", 65536));
    return make_lister(alphabet, max_chars);
  }
  if (name == "orderfacts") {
    return make_order_facts();
  }
  if (name == "enum") {
    std::string cls = get_str(params, "class", "const=yes+const=no");
    auto members = split(cls, '+');
    auto fc = std::make_shared<FunctionClass>(
        FunctionClass::parse(alphabet, members));
    return make_enum_learner(fc);
  }
  throw std::invalid_argument("unknown learner family: " + name);
}

std::vector<FamilyPtr> default_zoo(const TokenAlphabet& alphabet) {
  return {
      parse_learner_spec("memorizer", alphabet),
      parse_learner_spec("const:answer=yes", alphabet),
      parse_learner_spec("const:answer=no", alphabet),
      parse_learner_spec("echo", alphabet),
      parse_learner_spec("ngram:order=2,max_out=64", alphabet),
      parse_learner_spec("lister:max_chars=4096", alphabet),
      parse_learner_spec("orderfacts", alphabet),
      parse_learner_spec("enum:class=const=yes+const=no", alphabet),
  };
}

}  // namespace halluc
