#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace glmb {

/// Value of one entry of an extended association. 0 is a misdetection,
/// 1..M a measurement index, M+1 means the track does not exist this scan.
using AssocValue = std::int32_t;

/// Extended association vector over an enumeration of tracks (surviving
/// tracks first, then births).
struct ExtendedAssociation {
    std::vector<AssocValue> values;

    [[nodiscard]] std::size_t size() const { return values.size(); }
    AssocValue operator[](std::size_t n) const { return values[n]; }
    AssocValue& operator[](std::size_t n) { return values[n]; }

    friend bool operator==(const ExtendedAssociation&, const ExtendedAssociation&) = default;
    friend auto operator<=>(const ExtendedAssociation&, const ExtendedAssociation&) = default;
};

/// No measurement index 1..M is used twice and all values lie in 0..M+1.
[[nodiscard]] inline bool is_valid(std::span<const AssocValue> values, int num_measurements) {
    std::vector<bool> used(static_cast<std::size_t>(num_measurements) + 1, false);
    for (AssocValue a : values) {
        if (a < 0 || a > num_measurements + 1) return false;
        if (a >= 1 && a <= num_measurements) {
            if (used[static_cast<std::size_t>(a)]) return false;
            used[static_cast<std::size_t>(a)] = true;
        }
    }
    return true;
}

[[nodiscard]] inline bool is_valid(const ExtendedAssociation& a, int num_measurements) {
    return is_valid(std::span<const AssocValue>(a.values), num_measurements);
}

namespace detail {

inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t hash_values(std::span<const AssocValue> values) {
    std::uint64_t h = mix64(values.size());
    for (AssocValue v : values) h = mix64(h ^ static_cast<std::uint32_t>(v));
    return h;
}

}  // namespace detail

/// Association history of a hypothesis: an immutable, structurally shared
/// list of per-scan extended associations with a rolling hash.
class AssociationHistory {
public:
    AssociationHistory() = default;

    [[nodiscard]] AssociationHistory extended(ExtendedAssociation record) const {
        auto node = std::make_shared<Node>();
        node->parent = head_;
        node->length = length() + 1;
        node->hash = detail::mix64(hash() * 31 + detail::hash_values(record.values));
        node->record = std::move(record);
        AssociationHistory out;
        out.head_ = std::move(node);
        return out;
    }

    [[nodiscard]] std::size_t length() const { return head_ ? head_->length : 0; }
    [[nodiscard]] std::uint64_t hash() const { return head_ ? head_->hash : 0x5bd1e995ULL; }

    /// Most recent record; empty history has none.
    [[nodiscard]] const ExtendedAssociation* last() const { return head_ ? &head_->record : nullptr; }

    /// Records oldest first.
    [[nodiscard]] std::vector<ExtendedAssociation> records() const {
        std::vector<ExtendedAssociation> out(length());
        std::size_t i = out.size();
        for (const Node* n = head_.get(); n; n = n->parent.get()) out[--i] = n->record;
        return out;
    }

    friend bool operator==(const AssociationHistory& a, const AssociationHistory& b) {
        if (a.hash() != b.hash() || a.length() != b.length()) return false;
        const Node* x = a.head_.get();
        const Node* y = b.head_.get();
        while (x != y) {
            if (!x || !y || x->record != y->record) return false;
            x = x->parent.get();
            y = y->parent.get();
        }
        return true;
    }

private:
    struct Node {
        std::shared_ptr<const Node> parent;
        ExtendedAssociation record;
        std::size_t length = 0;
        std::uint64_t hash = 0;
    };
    std::shared_ptr<const Node> head_;
};

}  // namespace glmb
