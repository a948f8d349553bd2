#include <gtest/gtest.h>

#include "cvq/errors.hpp"
#include "cvq/state_spec.hpp"

using namespace cvq;
using namespace cvq::lab;

TEST(Parse, FockAtom) {
    const SpecPtr s = parse_state_spec("fock:1");
    ASSERT_TRUE(std::holds_alternative<FockAtom>(s->node));
    EXPECT_EQ(std::get<FockAtom>(s->node).n, 1);
    EXPECT_EQ(s->modes, 1);
}

TEST(Parse, TwoBranchMixture) {
    const SpecPtr s = parse_state_spec("mix(0.5*fock:0, 0.5*fock:1)");
    ASSERT_TRUE(std::holds_alternative<MixNode>(s->node));
    const MixNode& m = std::get<MixNode>(s->node);
    ASSERT_EQ(m.parts.size(), 2u);
    EXPECT_EQ(m.weights, (std::vector<double>{0.5, 0.5}));
    EXPECT_EQ(std::get<FockAtom>(m.parts[1]->node).n, 1);
}

TEST(Parse, WeightSumRejectedWithPosition) {
    try {
        parse_state_spec("mix(0.6*fock:0, 0.6*fock:1)");
        FAIL() << "expected SpecError";
    } catch (const SpecError& e) {
        EXPECT_NE(e.message.find("1.2"), std::string::npos) << e.message;
        EXPECT_EQ(e.position, 0u);
    }
}

TEST(Parse, WeightToleranceIsTight) {
    EXPECT_NO_THROW(parse_state_spec("mix(0.3*fock:0, 0.7000000000001*fock:1)"));
    EXPECT_THROW(parse_state_spec("mix(0.3*fock:0, 0.70001*fock:1)"), SpecError);
}

TEST(Parse, AllForms) {
    EXPECT_EQ(parse_state_spec("coherent:1.5,-0.25")->modes, 1);
    EXPECT_EQ(parse_state_spec("thermal:0.5")->modes, 1);
    EXPECT_EQ(parse_state_spec("tmsv:2")->modes, 2);
    EXPECT_EQ(parse_state_spec("squeezed:0.3")->modes, 1);
    EXPECT_EQ(parse_state_spec("loss(0.7, tmsv:1.5)")->modes, 2);
    EXPECT_EQ(parse_state_spec("dephase(0.3, loss(0.7, tmsv:1.5))")->modes, 2);
    EXPECT_EQ(parse_state_spec("photonsub(loss(0.7, tmsv:1.5))")->modes, 2);
    EXPECT_EQ(parse_state_spec("prod(fock:1, coherent:0.5,0)")->modes, 2);
    EXPECT_EQ(parse_state_spec("  mix( 0.25 * thermal:1 , 0.75*squeezed:-0.2 ) ")->modes, 1);
}

TEST(Parse, ErrorsCarryPositions) {
    struct Case {
        const char* text;
        std::size_t position;
    };
    const Case cases[] = {
        {"foo:1", 0},                       // unknown atom
        {"fock:1.5", 5},                    // non-integer
        {"fock:-1", 5},
        {"thermal:-0.1", 8},
        {"tmsv:0.5", 5},
        {"loss(0, fock:1)", 5},             // T out of range
        {"loss(1.5, fock:1)", 5},
        {"dephase(2, fock:1)", 8},
        {"loss(0.5)", 8},                   // arity
        {"photonsub(fock:1, fock:2)", 16},
        {"mix(0.5*fock:0, 0.5*tmsv:2)", 20},  // mode mismatch
        {"mix(-0.5*fock:0, 1.5*fock:1)", 4},
        {"fock:1 extra", 7},
        {"coherent:1", 10},                 // missing imaginary part
        {"prod(tmsv:2, fock:0)", 0},
        {"", 0},
    };
    for (const Case& c : cases) {
        try {
            parse_state_spec(c.text);
            ADD_FAILURE() << "no error for '" << c.text << "'";
        } catch (const SpecError& e) {
            EXPECT_EQ(e.position, c.position) << c.text << ": " << e.what();
        }
    }
}

TEST(ToString, RoundTrips) {
    for (const char* text : {"fock:3", "coherent:0.5,-1", "mix(0.25*thermal:1, 0.75*squeezed:0.2)",
                             "dephase(0.3, loss(0.7, tmsv:1.5))", "photonsub(prod(fock:1, thermal:0.1))"}) {
        const std::string canon = to_string(*parse_state_spec(text));
        EXPECT_EQ(to_string(*parse_state_spec(canon)), canon) << text;
    }
    EXPECT_EQ(to_string(*parse_state_spec("mix( 0.5*fock:0 ,0.5*fock:1 )")), "mix(0.5*fock:0, 0.5*fock:1)");
}
