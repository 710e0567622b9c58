#ifndef ADR_CODE_TREE_HPP
#define ADR_CODE_TREE_HPP

#include <map>
#include <optional>
#include <string>

#include "adr/types.hpp"

namespace adr {

/// Hierarchical event-code dictionary. Parent/level structure is derived
/// from the 5-character '.'-padding pattern; every non-level-1 code must
/// have its parent present.
struct CodeTree {
    struct Node {
        std::string description;
        std::optional<CodeId> parent;
        int level = 0;
    };

    std::map<CodeId, Node> nodes;

    bool contains(const CodeId& code) const { return nodes.count(code) > 0; }

    /// Description of a code, or "" for codes not in the dictionary.
    std::string description_of(const CodeId& code) const {
        auto it = nodes.find(code);
        return it == nodes.end() ? std::string{} : it->second.description;
    }
};

}  // namespace adr

#endif
