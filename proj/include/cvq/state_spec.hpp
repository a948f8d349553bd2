#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace cvq::lab {

/// Parsed test-state expression. See docs/state-spec.md for the grammar.
struct StateSpec;
using SpecPtr = std::shared_ptr<const StateSpec>;

struct FockAtom { int n = 0; };
struct CoherentAtom { double re = 0.0; double im = 0.0; };
struct ThermalAtom { double nbar = 0.0; };
struct TmsvAtom { double V = 1.0; };
struct SqueezedAtom { double r = 0.0; };

struct MixNode {
    std::vector<double> weights;
    std::vector<SpecPtr> parts;
};
// Channels and photon subtraction act on the last mode of their argument.
struct LossNode { double T = 1.0; SpecPtr arg; };
struct DephaseNode { double p = 0.0; SpecPtr arg; };
struct PhotonSubNode { SpecPtr arg; };
struct ProductNode { SpecPtr first; SpecPtr second; };

struct StateSpec {
    std::variant<FockAtom, CoherentAtom, ThermalAtom, TmsvAtom, SqueezedAtom,
                 MixNode, LossNode, DephaseNode, PhotonSubNode, ProductNode> node;
    int modes = 1;
    std::size_t position = 0;  // offset of the expression in the source text
};

// Throws SpecError carrying the offending character offset.
SpecPtr parse_state_spec(std::string_view text);

// Canonical text form; parse_state_spec(to_string(s)) reproduces s.
std::string to_string(const StateSpec& s);

} // namespace cvq::lab
