#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace anchoring {

/// Raised for malformed experiment input (bad anchors, gap violations, unknown keys).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The four structured fields of the template. Values double as bit positions.
enum class Field : std::uint8_t { Scene = 0, Comparative = 1, Absolute = 2, Anchor = 3 };

inline constexpr std::array<Field, 4> kAllFields = {Field::Scene, Field::Comparative,
                                                    Field::Absolute, Field::Anchor};
inline constexpr int kFieldCount = 4;
inline constexpr int kSubsetCount = 1 << kFieldCount;

std::string_view field_name(Field f);
Field field_from_name(std::string_view name);

/// Subset of the four fields, stored as a 4-bit mask.
class FieldSubset {
public:
    constexpr FieldSubset() = default;
    constexpr explicit FieldSubset(std::uint8_t mask) : mask_(mask & 0x0F) {}

    static constexpr FieldSubset full() { return FieldSubset{0x0F}; }
    static constexpr FieldSubset empty() { return FieldSubset{0x00}; }

    constexpr bool contains(Field f) const { return (mask_ >> static_cast<int>(f)) & 1U; }
    constexpr FieldSubset with(Field f) const {
        return FieldSubset(static_cast<std::uint8_t>(mask_ | (1U << static_cast<int>(f))));
    }
    constexpr FieldSubset without(Field f) const {
        return FieldSubset(static_cast<std::uint8_t>(mask_ & ~(1U << static_cast<int>(f))));
    }
    constexpr int size() const { return __builtin_popcount(mask_); }
    constexpr std::uint8_t mask() const { return mask_; }

    /// "{scene,anchor}" style label, fields in template order.
    std::string label() const;

    friend constexpr bool operator==(FieldSubset, FieldSubset) = default;

private:
    std::uint8_t mask_ = 0;
};

/// Anchor condition of a variation.
enum class AnchorCondition : std::uint8_t { Low, High };
std::string_view condition_name(AnchorCondition c);

/// How an absent field is rendered.
enum class AblationPolicy : std::uint8_t {
    /// Absent slots become empty; a sentence left without alphanumeric content
    /// is dropped together with its punctuation and separator.
    DropEmpty,
    /// Absent slots become empty; every sentence keeps its punctuation and separator.
    KeepScaffold,
};
std::string_view ablation_name(AblationPolicy p);
AblationPolicy ablation_from_name(std::string_view name);

struct PromptFields {
    std::string scene;
    std::string comparative;
    std::string absolute;
    int anchor = 0;

    /// Throws ConfigError if a text field is empty or the anchor is outside [0,100].
    void validate() const;
};

/// Anchor regime: the control item, the standard pair, or a moved pair with a fixed gap.
enum class Regime : std::uint8_t { Control, Standard, Different };
std::string_view regime_name(Regime r);  // "control" | "S" | "D"
Regime regime_from_name(std::string_view name);

inline constexpr int kDifferentRegimeGap = 55;

struct Variation {
    std::string id;
    Regime regime = Regime::Standard;
    std::string scene;
    std::string comparative;
    std::string absolute;
    int anchor_low = 10;
    int anchor_high = 65;
    bool include_in_aggregate = true;

    int anchor(AnchorCondition c) const { return c == AnchorCondition::Low ? anchor_low : anchor_high; }
    PromptFields fields(AnchorCondition c) const { return {scene, comparative, absolute, anchor(c)}; }

    void validate() const;
};

/// Three-sentence template, rendered with only the fields in `subset`.
std::string render_prompt(const PromptFields& fields, FieldSubset subset,
                          AblationPolicy policy = AblationPolicy::DropEmpty);

inline constexpr int kTargetCount = 101;

/// "i%" for i in [0,100]; throws std::out_of_range otherwise.
std::string render_target(int i);

/// The control item plus the two five-question regimes (11 variations).
std::vector<Variation> default_variations();

/// Validates the list: unique ids, anchor ranges, the 55-point gap on moved pairs,
/// and that only control items are kept out of the aggregate.
void validate_variation_set(const std::vector<Variation>& variations);

}  // namespace anchoring
