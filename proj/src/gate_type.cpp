#include "ghsat/gate_type.hpp"

#include <algorithm>
#include <cctype>

namespace ghsat {

namespace {

constexpr std::array<std::string_view, 16> kCanonical = {
    "FALSE", "NOR", "¬A∧B", "¬A", "A∧¬B", "¬B", "XOR", "NAND",
    "AND",   "XNOR", "B",   "¬A∨B", "A",  "A∨¬B", "OR", "TRUE",
};

constexpr std::array<std::string_view, 16> kAscii = {
    "FALSE",       "NOR",   "NOT_A_AND_B", "NOT_A", "A_AND_NOT_B", "NOT_B",
    "XOR",         "NAND",  "AND",         "XNOR",  "B",           "NOT_A_OR_B",
    "A",           "A_OR_NOT_B", "OR",     "TRUE",
};

std::string upper(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return out;
}

} // namespace

std::string_view GateType::name() const { return kCanonical[tt_]; }

std::string_view GateType::ascii_name() const { return kAscii[tt_]; }

std::optional<GateType> GateType::from_name(std::string_view name) {
    for (std::uint8_t i = 0; i < 16; ++i)
        if (kCanonical[i] == name)
            return GateType(i);
    const std::string up = upper(name);
    for (std::uint8_t i = 0; i < 16; ++i)
        if (kAscii[i] == up)
            return GateType(i);
    if (up == "ZERO" || up == "CONST0")
        return types::FALSE_;
    if (up == "ONE" || up == "CONST1")
        return types::TRUE_;
    if (up == "A_IMPLIES_B" || up == "IMPLY")
        return types::NOT_A_OR_B;
    if (up == "B_IMPLIES_A")
        return types::A_OR_NOT_B;
    return std::nullopt;
}

std::string TypeSet::to_string() const {
    std::string out = "{";
    bool first = true;
    for (auto t : members()) {
        if (!first)
            out += ", ";
        out += t.name();
        first = false;
    }
    return out + "}";
}

} // namespace ghsat
