#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bibcite/util.hpp"

namespace bibcite::xml {

/// Element tree of a parsed document. Attribute order is preserved.
struct Element {
  std::string name;
  std::vector<std::pair<std::string, std::string>> attributes;
  std::vector<Element> children;
  std::string text;  // character data directly inside, entities decoded

  const std::string* attr(std::string_view attr_name) const;
  std::vector<const Element*> children_named(std::string_view child_name) const;
  const Element* first_child(std::string_view child_name) const;
};

/// Minimal strict parser: declaration/comments/doctype skipped, entities
/// decoded, mismatched or trailing markup rejected.
Result<Element> parse_document(std::string_view text);

std::string escape(std::string_view raw);

/// Validator for the XSD subset the shipped schemas use: nested named
/// elements with sequences, minOccurs/maxOccurs, required attributes, and
/// the xs:string / xs:integer / xs:boolean leaf types.
class SchemaValidator {
 public:
  static Result<SchemaValidator> from_xsd(std::string_view xsd_text);
  Result<bool> validate(const Element& root) const;

 private:
  struct ElementDecl {
    std::string name;
    std::string leaf_type;  // builtin type for leaves, empty for complex
    size_t min_occurs = 1;
    size_t max_occurs = 1;  // SIZE_MAX for unbounded
    std::vector<ElementDecl> sequence;
    std::vector<std::pair<std::string, std::string>> attribute_types;  // name -> type
    std::vector<std::string> required_attributes;
  };

  static Result<ElementDecl> parse_element_decl(const Element& node);
  Result<bool> validate_element(const Element& element, const ElementDecl& decl) const;

  ElementDecl root_;
};

}  // namespace bibcite::xml
