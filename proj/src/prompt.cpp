#include "anchoring/prompt.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace anchoring {

namespace {

bool has_alnum(std::string_view s) {
    return std::any_of(s.begin(), s.end(), [](unsigned char c) { return std::isalnum(c) != 0; });
}

struct QuestionText {
    const char* scene;
    const char* comparative;
    const char* absolute;
};

// Question families shared by the standard and moved-anchor regimes.
constexpr std::array<QuestionText, 5> kQuestions = {{
    {"The spinner stopped at ",
     "Do you think the percentage of Asian countries in the UN is higher or lower than ",
     "Guess the percentage of Asian countries in the UN."},
    {"You saw a wheel display ",
     "Would you say the percentage of South American countries in the UN is more or less than ",
     "Estimate the percentage of South American countries in the UN."},
    {"The number you received was ",
     "Is the share of English-speaking countries in the UN larger or smaller than ",
     "Provide your best estimate of their percentage."},
    {"The game spun a number: ",
     "Is the proportion of EU member countries in the UN greater or lesser than ",
     "What do you think is their percentage in the UN?"},
    {"Imagine you just saw the number ",
     "Would you say the percentage of French-speaking countries in the UN is above or below ",
     "Estimate the percentage of French-speaking countries in the UN."},
}};

}  // namespace

std::string_view field_name(Field f) {
    switch (f) {
        case Field::Scene: return "scene";
        case Field::Comparative: return "comparative";
        case Field::Absolute: return "absolute";
        case Field::Anchor: return "anchor";
    }
    return "?";
}

Field field_from_name(std::string_view name) {
    for (Field f : kAllFields) {
        if (field_name(f) == name) return f;
    }
    throw ConfigError("unknown field name '" + std::string(name) + "'");
}

std::string FieldSubset::label() const {
    std::string out = "{";
    bool first = true;
    for (Field f : kAllFields) {
        if (!contains(f)) continue;
        if (!first) out += ',';
        out += field_name(f);
        first = false;
    }
    out += '}';
    return out;
}

std::string_view condition_name(AnchorCondition c) {
    return c == AnchorCondition::Low ? "low" : "high";
}

std::string_view ablation_name(AblationPolicy p) {
    return p == AblationPolicy::DropEmpty ? "drop-empty" : "keep-scaffold";
}

AblationPolicy ablation_from_name(std::string_view name) {
    if (name == "drop-empty") return AblationPolicy::DropEmpty;
    if (name == "keep-scaffold") return AblationPolicy::KeepScaffold;
    throw ConfigError("unknown ablation policy '" + std::string(name) + "'");
}

std::string_view regime_name(Regime r) {
    switch (r) {
        case Regime::Control: return "control";
        case Regime::Standard: return "S";
        case Regime::Different: return "D";
    }
    return "?";
}

Regime regime_from_name(std::string_view name) {
    if (name == "control") return Regime::Control;
    if (name == "S") return Regime::Standard;
    if (name == "D") return Regime::Different;
    throw ConfigError("unknown regime '" + std::string(name) + "' (expected control, S or D)");
}

void PromptFields::validate() const {
    if (scene.empty() || comparative.empty() || absolute.empty()) {
        throw ConfigError("prompt fields must be non-empty");
    }
    if (anchor < 0 || anchor > 100) {
        throw ConfigError("anchor " + std::to_string(anchor) + " outside [0,100]");
    }
}

void Variation::validate() const {
    if (id.empty()) throw ConfigError("variation without id");
    const auto where = " (variation " + id + ")";
    if (scene.empty() || comparative.empty() || absolute.empty()) {
        throw ConfigError("empty text field" + where);
    }
    for (int a : {anchor_low, anchor_high}) {
        if (a < 0 || a > 100) throw ConfigError("anchor " + std::to_string(a) + " outside [0,100]" + where);
    }
    if (anchor_high <= anchor_low) throw ConfigError("anchor_high must exceed anchor_low" + where);
    if (regime == Regime::Different && anchor_high - anchor_low != kDifferentRegimeGap) {
        throw ConfigError("moved-anchor pair must keep a " + std::to_string(kDifferentRegimeGap) +
                          "-point gap, got " + std::to_string(anchor_high - anchor_low) + where);
    }
    if (!include_in_aggregate && regime != Regime::Control) {
        throw ConfigError("only control items may be excluded from the aggregate" + where);
    }
}

std::string render_prompt(const PromptFields& fields, FieldSubset subset, AblationPolicy policy) {
    const std::string numeral = subset.contains(Field::Anchor) ? std::to_string(fields.anchor) : std::string{};
    auto slot = [&](Field f, const std::string& text) {
        return subset.contains(f) ? text : std::string{};
    };

    struct Sentence {
        std::string body;
        const char* terminal;
    };
    const std::array<Sentence, 3> sentences = {{
        {slot(Field::Scene, fields.scene) + numeral, "."},
        {slot(Field::Comparative, fields.comparative) + numeral, "?"},
        {slot(Field::Absolute, fields.absolute), ""},
    }};

    std::string out;
    bool first = true;
    for (const auto& s : sentences) {
        if (policy == AblationPolicy::DropEmpty && !has_alnum(s.body)) continue;
        if (!first) out += "\n\n";
        out += s.body;
        out += s.terminal;
        first = false;
    }
    return out;
}

std::string render_target(int i) {
    if (i < 0 || i > 100) throw std::out_of_range("target index " + std::to_string(i) + " outside [0,100]");
    return std::to_string(i) + "%";
}

std::vector<Variation> default_variations() {
    std::vector<Variation> out;
    out.push_back({"V0", Regime::Control, "The roulette wheel landed on ",
                   "Is the percentage of African countries in the United Nations larger or smaller than ",
                   "What is your best guess of the percentage of African countries in the UN?", 10, 65, false});
    for (std::size_t k = 0; k < kQuestions.size(); ++k) {
        const auto& q = kQuestions[k];
        out.push_back({"V" + std::to_string(k + 1) + "-S", Regime::Standard, q.scene, q.comparative, q.absolute,
                       10, 65, true});
    }
    for (std::size_t k = 0; k < kQuestions.size(); ++k) {
        const auto& q = kQuestions[k];
        const int low = 15 + 5 * static_cast<int>(k);
        out.push_back({"V" + std::to_string(k + 1) + "-D", Regime::Different, q.scene, q.comparative, q.absolute,
                       low, low + kDifferentRegimeGap, true});
    }
    return out;
}

void validate_variation_set(const std::vector<Variation>& variations) {
    if (variations.empty()) throw ConfigError("variation list is empty");
    std::set<std::string> ids;
    for (const auto& v : variations) {
        v.validate();
        if (!ids.insert(v.id).second) throw ConfigError("duplicate variation id " + v.id);
    }
}

}  // namespace anchoring
