#include <gtest/gtest.h>

#include "railrelay/relay_decision.hpp"
#include "support/generators.hpp"

using namespace railrelay;

namespace {

Instance make_instance(int mrs, std::set<int> blocked, double sinr_min = 0.0, long slots = 2400)
{
    ScenarioConfig cfg;
    cfg.mr_count = mrs;
    Instance inst;
    inst.scenario = build_scenario(cfg);
    for (int f = 1; f <= mrs; ++f) {
        inst.flows.push_back({f, f, 10e6, sinr_min});
    }
    inst.blocked = std::move(blocked);
    inst.total_slots = slots;
    return inst;
}

ModeEvaluation eval(double s, double l, double r, double u)
{
    // Rates double as SINRs to keep the fixtures short.
    ModeEvaluation e;
    e.at(Mode::Direct) = {s, s};
    e.at(Mode::Left) = {l, l};
    e.at(Mode::Right) = {r, r};
    e.at(Mode::Uav) = {u, u};
    return e;
}

} // namespace

TEST(MinRequiredRate, HandValue)
{
    const RadioParams p;
    const Flow f{1, 1, 10e6, 0};
    EXPECT_NEAR(min_required_rate(f, 2400, p), 10.1968e6, 0.00005e6);
    EXPECT_NEAR(min_required_rate(f, 2400, p), 10196759.259259259, 1e-6);
}

TEST(MinRequiredRate, NoOverheadAndLargeBudget)
{
    RadioParams p;
    p.sched_phase_s = 0.0;
    const Flow f{1, 1, 10e6, 0};
    EXPECT_DOUBLE_EQ(min_required_rate(f, 100, p), 10e6);
    p = {};
    double prev = min_required_rate(f, 1, p);
    for (long m = 10; m < 10'000'000; m *= 10) {
        const double r = min_required_rate(f, m, p);
        EXPECT_LT(r, prev);
        EXPECT_GT(r, 10e6);
        prev = r;
    }
    EXPECT_TRUE(std::isinf(min_required_rate(f, 0, p)));
}

TEST(Decide, NoBlockageAllDirect)
{
    const auto inst = make_instance(16, {}, 7e4);
    const auto g = build_graph({}, 16);
    const auto evals = evaluate_instance(inst, g);
    const auto d = decide(inst, g, evals);
    EXPECT_EQ(d.sets.direct.size(), 16U);
    EXPECT_TRUE(d.sets.left.empty());
    EXPECT_TRUE(d.sets.right.empty());
    EXPECT_TRUE(d.sets.uav.empty());
    EXPECT_TRUE(d.sets.abandoned.empty());
}

TEST(Decide, AdjacentBlockedPairNeverDirect)
{
    const auto inst = make_instance(5, {2, 3});
    const auto g = build_graph(inst.blocked, 5);
    const auto evals = evaluate_instance(inst, g);
    const auto d = decide(inst, g, evals);
    EXPECT_TRUE(d.assignment[1].mode == Mode::Left || d.assignment[1].mode == Mode::Uav);
    EXPECT_TRUE(d.assignment[2].mode == Mode::Right || d.assignment[2].mode == Mode::Uav);
    EXPECT_EQ(d.assignment[0].mode, Mode::Direct);
    EXPECT_EQ(d.assignment[3].mode, Mode::Direct);
    EXPECT_EQ(d.assignment[4].mode, Mode::Direct);
    EXPECT_TRUE(assignment_satisfies_p1_constraints(inst, g, d.assignment));
}

TEST(Decide, DirectPreferredEvenWhenRelayIsFaster)
{
    const auto inst = make_instance(3, {});
    const auto g = build_graph({}, 3);
    const std::vector<ModeEvaluation> evals = {eval(2e7, 0, 0, 9e9), eval(2e7, 9e9, 9e9, 9e9),
                                               eval(2e7, 9e9, 0, 9e9)};
    const auto d = decide(inst, g, evals);
    for (const auto& c : d.assignment) {
        EXPECT_EQ(c.mode, Mode::Direct);
    }
}

TEST(Decide, RelayTieBreakLeftRightUav)
{
    const auto inst = make_instance(3, {2});
    const auto g = build_graph({2}, 3);
    std::vector<ModeEvaluation> evals = {eval(5e8, 0, 0, 5e8), eval(0, 3e8, 3e8, 3e8), eval(5e8, 0, 0, 5e8)};
    // Flow 2's neighbours are unblocked, so both MR relays survive.
    auto d = decide(inst, g, evals);
    EXPECT_EQ(d.assignment[1].mode, Mode::Left);
    evals[1] = eval(0, 1e8, 3e8, 3e8);
    d = decide(inst, g, evals);
    EXPECT_EQ(d.assignment[1].mode, Mode::Right);
    evals[1] = eval(0, 1e8, 2e8, 3e8);
    d = decide(inst, g, evals);
    EXPECT_EQ(d.assignment[1].mode, Mode::Uav);
    EXPECT_EQ(d.sets.uav, (std::set<int>{2}));
}

TEST(Decide, AbandonWhenBestRelayMissesSinr)
{
    const auto inst = make_instance(3, {2}, 1e9);
    const auto g = build_graph({2}, 3);
    const std::vector<ModeEvaluation> evals = {eval(2e9, 0, 0, 2e9), eval(0, 3e8, 4e8, 5e8),
                                               eval(2e9, 0, 0, 2e9)};
    const auto d = decide(inst, g, evals);
    EXPECT_EQ(d.assignment[1].mode, Mode::Abandoned);
    EXPECT_EQ(d.assignment[1].rate_bps, 0.0);
    EXPECT_EQ(d.sets.abandoned, (std::set<int>{2}));
}

TEST(Decide, MaskedUavFallsBackToNeighbours)
{
    const auto inst = make_instance(3, {2});
    const auto g = build_graph({2}, 3);
    const std::vector<ModeEvaluation> evals = {eval(5e8, 0, 0, 5e8), eval(0, 1e8, 2e8, 3e8),
                                               eval(5e8, 0, 0, 5e8)};
    const auto d = decide(inst, g, evals, ModeSet{Mode::Uav});
    EXPECT_EQ(d.assignment[1].mode, Mode::Right);
}

TEST(ConstraintChecker, RejectsStructuralViolations)
{
    const auto inst = make_instance(5, {3});
    const auto g = build_graph({3}, 5);
    const auto evals = evaluate_instance(inst, g);
    const auto good = decide(inst, g, evals).assignment;
    ASSERT_TRUE(assignment_satisfies_p1_constraints(inst, g, good));

    auto bad = good;
    bad[0] = {Mode::Left, 1e6, 1e10};
    EXPECT_FALSE(assignment_satisfies_p1_constraints(inst, g, bad));

    bad = good;
    bad[2] = {Mode::Direct, 1e6, 1e10};
    EXPECT_FALSE(assignment_satisfies_p1_constraints(inst, g, bad));

    bad = good;
    bad[1] = {Mode::Right, 1e6, 1e10}; // MR_2 relaying through blocked MR_3
    EXPECT_FALSE(assignment_satisfies_p1_constraints(inst, g, bad));

    bad = good;
    bad[3] = {Mode::Left, 1e6, 1e10}; // MR_4 relaying through blocked MR_3
    EXPECT_FALSE(assignment_satisfies_p1_constraints(inst, g, bad));

    bad = good;
    bad[4] = {Mode::Right, 1e6, 1e10};
    EXPECT_FALSE(assignment_satisfies_p1_constraints(inst, g, bad));

    bad = good;
    bad[0] = {Mode::Uav, 1e6, 1e3}; // rate below r_f
    EXPECT_FALSE(assignment_satisfies_p1_constraints(inst, g, bad));

    bad = good;
    bad.pop_back();
    EXPECT_FALSE(assignment_satisfies_p1_constraints(inst, g, bad));
}

TEST(DecideProperties, RandomInstances)
{
    for (std::uint64_t seed = 0; seed < 2000; ++seed) {
        const auto c = support::random_case(seed, 12);
        const auto& inst = c.instance;
        const auto d = decide(inst, c.graph, c.evals);
        ASSERT_TRUE(assignment_satisfies_p1_constraints(inst, c.graph, d.assignment)) << seed;

        std::size_t total = 0;
        for (const auto* s : {&d.sets.direct, &d.sets.left, &d.sets.right, &d.sets.uav, &d.sets.abandoned}) {
            total += s->size();
        }
        EXPECT_EQ(total, inst.flows.size());

        for (std::size_t i = 0; i < inst.flows.size(); ++i) {
            const auto& flow = inst.flows[i];
            const auto& ch = d.assignment[i];
            EXPECT_FALSE(c.graph.forbidden_modes(flow.dest_mr).contains(ch.mode));
            if (ch.mode != Mode::Abandoned) {
                EXPECT_GE(ch.rate_bps, min_required_rate(flow, inst.total_slots, inst.scenario.params));
                EXPECT_GE(ch.sinr, flow.sinr_min);
            }
            if (!inst.is_blocked(flow.dest_mr)
                && meets_thresholds(c.evals[i].at(Mode::Direct), flow, inst.total_slots, inst.scenario.params)) {
                EXPECT_EQ(ch.mode, Mode::Direct);
            }
        }

        // Shrinking the blocked set never abandons a flow that was served.
        if (!inst.blocked.empty()) {
            Instance fewer = inst;
            fewer.blocked.erase(fewer.blocked.begin());
            const auto g2 = build_graph(fewer.blocked, inst.scenario.mr_count());
            const auto d2 = decide(fewer, g2, evaluate_instance(fewer, g2));
            for (std::size_t i = 0; i < inst.flows.size(); ++i) {
                if (d.assignment[i].mode != Mode::Abandoned) {
                    EXPECT_NE(d2.assignment[i].mode, Mode::Abandoned) << seed;
                }
            }
        }
    }
}
