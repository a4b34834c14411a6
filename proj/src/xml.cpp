#include "bibcite/xml.hpp"

#include <algorithm>
#include <cctype>
#include <climits>
#include <cstdlib>

namespace bibcite::xml {

const std::string* Element::attr(std::string_view attr_name) const {
  for (const auto& [name_, value] : attributes)
    if (name_ == attr_name) return &value;
  return nullptr;
}

std::vector<const Element*> Element::children_named(std::string_view child_name) const {
  std::vector<const Element*> out;
  for (const auto& c : children)
    if (c.name == child_name) out.push_back(&c);
  return out;
}

const Element* Element::first_child(std::string_view child_name) const {
  for (const auto& c : children)
    if (c.name == child_name) return &c;
  return nullptr;
}

std::string escape(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  for (char c : raw) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : s_(text) {}

  Result<Element> run() {
    skip_misc();
    auto root = parse_element();
    if (!root.ok()) return root;
    skip_misc();
    if (pos_ != s_.size()) return fail("trailing content after the root element");
    return root;
  }

 private:
  Error err_{};
  std::string_view s_;
  size_t pos_ = 0;

  Result<Element> fail(std::string message) {
    return Error{"xml: " + message + " (offset " + std::to_string(pos_) + ")"};
  }

  bool starts(std::string_view prefix) const {
    return s_.substr(pos_).substr(0, prefix.size()) == prefix;
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  // whitespace, declaration, comments, doctype, processing instructions
  void skip_misc() {
    while (true) {
      skip_ws();
      if (starts("<?")) {
        size_t end = s_.find("?>", pos_);
        pos_ = end == std::string_view::npos ? s_.size() : end + 2;
      } else if (starts("<!--")) {
        size_t end = s_.find("-->", pos_);
        pos_ = end == std::string_view::npos ? s_.size() : end + 3;
      } else if (starts("<!")) {
        size_t end = s_.find('>', pos_);
        pos_ = end == std::string_view::npos ? s_.size() : end + 1;
      } else {
        return;
      }
    }
  }

  static bool name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == ':' ||
           c == '.';
  }

  std::string read_name() {
    size_t start = pos_;
    while (pos_ < s_.size() && name_char(s_[pos_])) ++pos_;
    return std::string(s_.substr(start, pos_ - start));
  }

  Result<std::string> decode_entities(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    for (size_t i = 0; i < raw.size(); ++i) {
      if (raw[i] != '&') {
        out.push_back(raw[i]);
        continue;
      }
      size_t semi = raw.find(';', i);
      if (semi == std::string_view::npos) return Error{"xml: unterminated entity"};
      std::string_view entity = raw.substr(i + 1, semi - i - 1);
      if (entity == "amp") out.push_back('&');
      else if (entity == "lt") out.push_back('<');
      else if (entity == "gt") out.push_back('>');
      else if (entity == "quot") out.push_back('"');
      else if (entity == "apos") out.push_back('\'');
      else if (!entity.empty() && entity[0] == '#') {
        int base = 10;
        std::string_view digits = entity.substr(1);
        if (!digits.empty() && (digits[0] == 'x' || digits[0] == 'X')) {
          base = 16;
          digits = digits.substr(1);
        }
        unsigned long code = std::strtoul(std::string(digits).c_str(), nullptr, base);
        if (code == 0 || code > 0x10FFFF) return Error{"xml: bad character reference"};
        // UTF-8 encode
        if (code < 0x80) {
          out.push_back(char(code));
        } else if (code < 0x800) {
          out.push_back(char(0xC0 | (code >> 6)));
          out.push_back(char(0x80 | (code & 0x3F)));
        } else if (code < 0x10000) {
          out.push_back(char(0xE0 | (code >> 12)));
          out.push_back(char(0x80 | ((code >> 6) & 0x3F)));
          out.push_back(char(0x80 | (code & 0x3F)));
        } else {
          out.push_back(char(0xF0 | (code >> 18)));
          out.push_back(char(0x80 | ((code >> 12) & 0x3F)));
          out.push_back(char(0x80 | ((code >> 6) & 0x3F)));
          out.push_back(char(0x80 | (code & 0x3F)));
        }
      } else {
        return Error{"xml: unknown entity '&" + std::string(entity) + ";'"};
      }
      i = semi;
    }
    return out;
  }

  Result<Element> parse_element() {
    if (pos_ >= s_.size() || s_[pos_] != '<') return fail("expected '<'");
    ++pos_;
    Element element;
    element.name = read_name();
    if (element.name.empty()) return fail("empty element name");

    // attributes
    while (true) {
      skip_ws();
      if (pos_ >= s_.size()) return fail("unterminated start tag");
      if (s_[pos_] == '/' || s_[pos_] == '>') break;
      std::string attr_name = read_name();
      if (attr_name.empty()) return fail("bad attribute name");
      skip_ws();
      if (pos_ >= s_.size() || s_[pos_] != '=') return fail("attribute missing '='");
      ++pos_;
      skip_ws();
      if (pos_ >= s_.size() || (s_[pos_] != '"' && s_[pos_] != '\''))
        return fail("attribute value must be quoted");
      char quote = s_[pos_++];
      size_t value_start = pos_;
      while (pos_ < s_.size() && s_[pos_] != quote) {
        if (s_[pos_] == '<') return fail("'<' in attribute value");
        ++pos_;
      }
      if (pos_ >= s_.size()) return fail("unterminated attribute value");
      auto decoded = decode_entities(s_.substr(value_start, pos_ - value_start));
      if (!decoded.ok()) return decoded.error();
      ++pos_;
      if (element.attr(attr_name)) return fail("duplicate attribute '" + attr_name + "'");
      element.attributes.emplace_back(std::move(attr_name), std::move(decoded).value());
    }

    if (s_[pos_] == '/') {
      ++pos_;
      if (pos_ >= s_.size() || s_[pos_] != '>') return fail("malformed self-closing tag");
      ++pos_;
      return element;
    }
    ++pos_;  // '>'

    // content
    std::string text;
    while (true) {
      if (pos_ >= s_.size()) return fail("unterminated element '" + element.name + "'");
      if (s_[pos_] == '<') {
        if (starts("</")) {
          pos_ += 2;
          std::string close = read_name();
          skip_ws();
          if (pos_ >= s_.size() || s_[pos_] != '>') return fail("malformed end tag");
          ++pos_;
          if (close != element.name)
            return fail("mismatched end tag </" + close + "> for <" + element.name + ">");
          auto decoded = decode_entities(text);
          if (!decoded.ok()) return decoded.error();
          element.text = std::move(decoded).value();
          return element;
        }
        if (starts("<!--")) {
          size_t end = s_.find("-->", pos_);
          if (end == std::string_view::npos) return fail("unterminated comment");
          pos_ = end + 3;
          continue;
        }
        if (starts("<![CDATA[")) {
          size_t end = s_.find("]]>", pos_);
          if (end == std::string_view::npos) return fail("unterminated CDATA");
          text.append(s_.substr(pos_ + 9, end - pos_ - 9));
          pos_ = end + 3;
          continue;
        }
        auto child = parse_element();
        if (!child.ok()) return child;
        element.children.push_back(std::move(child).value());
        continue;
      }
      text.push_back(s_[pos_++]);
    }
  }
};

}  // namespace

Result<Element> parse_document(std::string_view text) {
  return Parser(text).run();
}

// ---------------------------------------------------------------------------
// Schema validation
// ---------------------------------------------------------------------------

namespace {

bool is_integer_text(std::string_view s) {
  std::string_view t = trim(s);
  if (t.empty()) return false;
  size_t i = (t[0] == '-' || t[0] == '+') ? 1 : 0;
  if (i == t.size()) return false;
  return std::all_of(t.begin() + long(i), t.end(),
                     [](unsigned char c) { return std::isdigit(c); });
}

bool is_boolean_text(std::string_view s) {
  std::string_view t = trim(s);
  return t == "true" || t == "false" || t == "0" || t == "1";
}

Result<bool> check_builtin(std::string_view type, std::string_view value,
                           const std::string& where) {
  if (type == "xs:string" || type.empty()) return true;
  if (type == "xs:integer" || type == "xs:nonNegativeInteger") {
    if (!is_integer_text(value))
      return Error{"schema: " + where + " must be an integer, got '" + std::string(value) + "'"};
    if (type == "xs:nonNegativeInteger" && trim(value).front() == '-')
      return Error{"schema: " + where + " must be non-negative"};
    return true;
  }
  if (type == "xs:boolean") {
    if (!is_boolean_text(value))
      return Error{"schema: " + where + " must be a boolean, got '" + std::string(value) + "'"};
    return true;
  }
  return Error{"schema: unsupported builtin type '" + std::string(type) + "'"};
}

}  // namespace

Result<SchemaValidator::ElementDecl> SchemaValidator::parse_element_decl(const Element& node) {
  ElementDecl decl;
  const std::string* name = node.attr("name");
  if (!name) return Error{"schema: xs:element without a name"};
  decl.name = *name;
  if (const std::string* type = node.attr("type")) decl.leaf_type = *type;
  if (const std::string* min = node.attr("minOccurs")) decl.min_occurs = std::stoul(*min);
  if (const std::string* max = node.attr("maxOccurs"))
    decl.max_occurs = (*max == "unbounded") ? SIZE_MAX : std::stoul(*max);

  const Element* complex = node.first_child("xs:complexType");
  if (complex) {
    if (!decl.leaf_type.empty())
      return Error{"schema: element '" + decl.name + "' has both a type and a complexType"};
    if (const Element* seq = complex->first_child("xs:sequence")) {
      for (const Element* child : seq->children_named("xs:element")) {
        auto parsed = parse_element_decl(*child);
        if (!parsed.ok()) return parsed.error();
        decl.sequence.push_back(std::move(parsed).value());
      }
    }
    for (const Element* attr_node : complex->children_named("xs:attribute")) {
      const std::string* attr_name = attr_node->attr("name");
      if (!attr_name) return Error{"schema: xs:attribute without a name"};
      std::string attr_type;
      if (const std::string* t = attr_node->attr("type")) attr_type = *t;
      decl.attribute_types.emplace_back(*attr_name, attr_type);
      const std::string* use = attr_node->attr("use");
      if (use && *use == "required") decl.required_attributes.push_back(*attr_name);
    }
  }
  return decl;
}

Result<SchemaValidator> SchemaValidator::from_xsd(std::string_view xsd_text) {
  auto doc = parse_document(xsd_text);
  if (!doc.ok()) return doc.error();
  const Element& schema = doc.value();
  if (schema.name != "xs:schema") return Error{"schema: root element must be xs:schema"};
  auto roots = schema.children_named("xs:element");
  if (roots.size() != 1) return Error{"schema: expected exactly one top-level xs:element"};
  auto decl = parse_element_decl(*roots.front());
  if (!decl.ok()) return decl.error();
  SchemaValidator validator;
  validator.root_ = std::move(decl).value();
  return validator;
}

Result<bool> SchemaValidator::validate_element(const Element& element,
                                               const ElementDecl& decl) const {
  if (element.name != decl.name)
    return Error{"schema: expected element '" + decl.name + "', found '" + element.name + "'"};

  // attributes: no unexpected names, required ones present, types check out
  for (const auto& [attr_name, attr_value] : element.attributes) {
    auto it = std::find_if(decl.attribute_types.begin(), decl.attribute_types.end(),
                           [&](const auto& kv) { return kv.first == attr_name; });
    if (it == decl.attribute_types.end())
      return Error{"schema: element '" + element.name + "' has unexpected attribute '" +
                   attr_name + "'"};
    auto ok = check_builtin(it->second, attr_value,
                            "attribute '" + attr_name + "' of '" + element.name + "'");
    if (!ok.ok()) return ok;
  }
  for (const auto& required : decl.required_attributes) {
    if (!element.attr(required))
      return Error{"schema: element '" + element.name + "' missing required attribute '" +
                   required + "'"};
  }

  if (!decl.leaf_type.empty() || decl.sequence.empty()) {
    if (!element.children.empty())
      return Error{"schema: element '" + element.name + "' must not have child elements"};
    return check_builtin(decl.leaf_type, element.text, "element '" + element.name + "'");
  }

  // complex content: children must walk the sequence within occurs bounds
  if (!trim(element.text).empty())
    return Error{"schema: element '" + element.name + "' must not contain text"};
  size_t child_index = 0;
  for (const ElementDecl& item : decl.sequence) {
    size_t seen = 0;
    while (child_index < element.children.size() &&
           element.children[child_index].name == item.name && seen < item.max_occurs) {
      auto ok = validate_element(element.children[child_index], item);
      if (!ok.ok()) return ok;
      ++child_index;
      ++seen;
    }
    if (seen < item.min_occurs)
      return Error{"schema: element '" + element.name + "' needs at least " +
                   std::to_string(item.min_occurs) + " '" + item.name + "' child(ren), found " +
                   std::to_string(seen)};
  }
  if (child_index != element.children.size())
    return Error{"schema: element '" + element.name + "' has unexpected child '" +
                 element.children[child_index].name + "'"};
  return true;
}

Result<bool> SchemaValidator::validate(const Element& root) const {
  return validate_element(root, root_);
}

}  // namespace bibcite::xml
