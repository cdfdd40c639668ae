#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <functional>
#include <set>
#include <string>

#include "doctest.h"
#include "pricesim/policies.hpp"

using namespace pricesim;

namespace {

Scenario case1(std::optional<int> truth = std::nullopt) {
    return make_scenario({DemandModel::linear(1.4, -0.9), DemandModel::linear(0.8, -0.3)},
                         {0.5, 1.5}, {}, truth);
}

// case-1 pair plus a curve halfway between them
Scenario three_linear() {
    return make_scenario({DemandModel::linear(1.4, -0.9), DemandModel::linear(0.8, -0.3),
                          DemandModel::linear(1.1, -0.6)},
                         {0.5, 1.5});
}

// Hand-built matrix knowledge with symmetric likelihoods: observing arm 0
// then arm 1 (same outcome) cancels exactly, giving a bona fide tie.
PolicyKnowledge symmetric_matrix() {
    PolicyKnowledge k;
    k.mode = KnowledgeMode::matrix_only;
    k.optimal_prices = {1.0, 2.0};
    k.prob_matrix = {{0.6, 0.4}, {0.4, 0.6}};
    return k;
}

bool wants_curves(PolicyKind k) {
    return k == PolicyKind::xlrt || k == PolicyKind::exlrt || k == PolicyKind::mbp ||
           k == PolicyKind::cmbp;
}

void expect_throw_containing(const std::function<void()>& f, const std::string& needle) {
    try {
        f();
        FAIL_CHECK("expected invalid_argument containing '" << needle << "'");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
}

}  // namespace

TEST_SUITE("policies") {

TEST_CASE("policy kind names round-trip") {
    for (const PolicyKind k : {PolicyKind::lrt, PolicyKind::xlrt, PolicyKind::elrt,
                               PolicyKind::exlrt, PolicyKind::mbp, PolicyKind::cmbp,
                               PolicyKind::oracle})
        CHECK(policy_kind_from_string(to_string(k)) == k);
    CHECK_THROWS_AS(policy_kind_from_string("ucb"), std::invalid_argument);
}

TEST_CASE("argmax_set uses exact comparison and reports all ties") {
    CHECK(argmax_set({1.0, 3.0, 3.0, 2.0}) == std::vector<int>{1, 2});
    CHECK(argmax_set({5.0}) == std::vector<int>{0});
    CHECK(argmax_set({0.1 + 0.2, 0.3}) == std::vector<int>{0});  // 0.30000000000000004 wins
}

TEST_CASE("default thresholds for the linear pair") {
    const Thresholds th = default_thresholds(case1(), 0.5);
    CHECK(th.eta1 == doctest::Approx(0.019802792488110135).epsilon(1e-7));
    CHECK(th.eta0 == doctest::Approx(0.018799465764724816).epsilon(1e-7));
    CHECK(th.eta_pair[1][0] == th.eta1);
    CHECK(th.eta_pair[0][1] == th.eta0);
    // kappa scales linearly
    const Thresholds quarter = default_thresholds(case1(), 0.25);
    CHECK(quarter.eta1 == doctest::Approx(0.5 * th.eta1).epsilon(1e-12));
    CHECK_THROWS_AS(default_thresholds(case1(), 0.0), std::invalid_argument);
    CHECK_THROWS_AS(default_thresholds(case1(), 1.0), std::invalid_argument);
}

TEST_CASE("knowledge gating: exploration and Bayesian kinds need full curves") {
    const Scenario s = case1();
    for (const PolicyKind k :
         {PolicyKind::xlrt, PolicyKind::exlrt, PolicyKind::mbp, PolicyKind::cmbp}) {
        PolicySpec spec;
        spec.kind = k;
        expect_throw_containing(
            [&] { PolicyEngine(spec, PolicyKnowledge::matrix_only(s)); },
            "full curves required");
    }
    // matrix knowledge suffices for the arm-only kinds
    PolicySpec lrt;
    CHECK_NOTHROW(PolicyEngine(lrt, PolicyKnowledge::matrix_only(s)));
    PolicySpec elrt;
    elrt.kind = PolicyKind::elrt;
    CHECK_NOTHROW(PolicyEngine(elrt, PolicyKnowledge::matrix_only(s)));
}

TEST_CASE("two-model kinds reject larger hypothesis sets") {
    const Scenario s3 = three_linear();
    for (const PolicyKind k :
         {PolicyKind::lrt, PolicyKind::xlrt, PolicyKind::mbp, PolicyKind::cmbp}) {
        PolicySpec spec;
        spec.kind = k;
        const PolicyKnowledge kn = wants_curves(k) ? PolicyKnowledge::full_curves(s3)
                                                   : PolicyKnowledge::matrix_only(s3);
        expect_throw_containing([&] { PolicyEngine(spec, kn); }, "exactly 2 models");
    }
    PolicySpec elrt;
    elrt.kind = PolicyKind::elrt;
    CHECK_NOTHROW(PolicyEngine(elrt, PolicyKnowledge::matrix_only(s3)));
    PolicySpec exlrt;
    exlrt.kind = PolicyKind::exlrt;
    CHECK_NOTHROW(PolicyEngine(exlrt, PolicyKnowledge::full_curves(s3)));
}

TEST_CASE("explicit threshold validation") {
    const Scenario s = case1();
    PolicySpec spec;
    spec.kind = PolicyKind::xlrt;
    spec.eta0 = 0.01;  // missing eta1
    expect_throw_containing([&] { PolicyEngine(spec, PolicyKnowledge::full_curves(s)); },
                            "need both eta0 and eta1");
    spec.eta1 = 0.05;  // above the 0.0396 bound for the (1,0) condition
    expect_throw_containing([&] { PolicyEngine(spec, PolicyKnowledge::full_curves(s)); },
                            "violates the bound");
    spec.eta1 = 0.01;
    PolicyEngine ok(spec, PolicyKnowledge::full_curves(s));
    CHECK(ok.thresholds().eta0 == 0.01);
    CHECK(ok.thresholds().eta1 == 0.01);

    PolicySpec plain;
    plain.kind = PolicyKind::xlrt;
    Thresholds bad;
    bad.eta_pair = {{0.0, -0.1}, {0.01, 0.0}};
    expect_throw_containing(
        [&] { PolicyEngine(plain, PolicyKnowledge::full_curves(s), bad); },
        "is negative");
}

TEST_CASE("oracle plays its model's arm unconditionally") {
    const Scenario s = case1();
    PolicySpec spec;
    spec.kind = PolicyKind::oracle;
    expect_throw_containing([&] { PolicyEngine(spec, PolicyKnowledge::matrix_only(s)); },
                            "needs the true model index");
    expect_throw_containing(
        [&] { PolicyEngine(spec, PolicyKnowledge::matrix_only(s), std::nullopt, 7); },
        "out of range");

    PolicyEngine e(spec, PolicyKnowledge::matrix_only(s), std::nullopt, 1);
    Rng rng(3);
    PolicyState st = policy_init(e, rng);
    for (int t = 1; t <= 5; ++t) {
        const double p = choose_price(st, t);
        CHECK(p == e.arm_prices()[1]);
        observe(st, p, t % 2);
    }
    CHECK_THROWS_AS(e.exploration_price_for(0, 1), std::logic_error);
}

TEST_CASE("first step draws an arm uniformly for likelihood policies") {
    const Scenario s = case1();
    PolicySpec spec;  // lrt
    PolicyEngine e(spec, PolicyKnowledge::matrix_only(s));
    int count0 = 0, count1 = 0;
    for (int seed = 0; seed < 400; ++seed) {
        Rng rng(seed);
        PolicyState st = policy_init(e, rng);
        const double p = choose_price(st, 1);
        if (p == e.arm_prices()[0]) ++count0;
        else if (p == e.arm_prices()[1]) ++count1;
    }
    CHECK(count0 + count1 == 400);
    CHECK(count0 >= 140);  // ~6 sigma below the binomial mean of 200
    CHECK(count1 >= 140);
}

TEST_CASE("lrt follows the sign of the log-likelihood ratio") {
    const Scenario s = case1();
    PolicySpec spec;
    PolicyEngine e(spec, PolicyKnowledge::matrix_only(s));
    Rng rng(11);
    PolicyState st = policy_init(e, rng);
    const double p0 = e.arm_prices()[0], p1 = e.arm_prices()[1];

    // acceptance at p0* is likelier under model 0 (0.7 vs 17/30)
    observe(st, p0, 1);
    CHECK(st.cum_loglik[1] < st.cum_loglik[0]);
    CHECK(choose_price(st, 2) == p0);

    // two acceptances at p1* each add log 2 in favor of model 1
    observe(st, p1, 1);
    observe(st, p1, 1);
    CHECK(st.cum_loglik[1] > st.cum_loglik[0]);
    CHECK(choose_price(st, 4) == p1);
}

TEST_CASE("lrt flips a fair coin on an exact tie") {
    PolicySpec spec;  // lrt
    PolicyEngine e(spec, symmetric_matrix());
    Rng rng(17);
    PolicyState st = policy_init(e, rng);
    observe(st, 1.0, 1);  // Lambda = {log 0.6, log 0.4}
    observe(st, 2.0, 1);  // plus    {log 0.4, log 0.6}: exact cancellation
    REQUIRE(st.cum_loglik[0] == st.cum_loglik[1]);
    int c0 = 0, c1 = 0;
    for (int rep = 0; rep < 100; ++rep) {
        const double p = choose_price(st, 3);
        (p == 1.0 ? c0 : c1)++;
    }
    CHECK(c0 >= 20);
    CHECK(c1 >= 20);
}

TEST_CASE("xlrt exploits outside the band and explores inside it") {
    const Scenario s = case1();
    PolicySpec spec;
    spec.kind = PolicyKind::xlrt;
    PolicyEngine e(spec, PolicyKnowledge::full_curves(s));
    const double p0 = e.arm_prices()[0], p1 = e.arm_prices()[1];
    const double px = e.exploration_price_for(0, 1);
    CHECK(px == doctest::Approx(0.5).epsilon(1e-12));

    Rng rng(5);
    {  // one acceptance at p0*: time-average -0.21, well below -eta0
        PolicyState st = policy_init(e, rng);
        observe(st, p0, 1);
        CHECK(choose_price(st, 2) == p0);
    }
    {  // one rejection at p0*: +0.37, above eta1
        PolicyState st = policy_init(e, rng);
        observe(st, p0, 0);
        CHECK(choose_price(st, 2) == p1);
    }
    {  // 7 acceptances and 4 rejections at p0* nearly cancel: |mean| ~ 8e-4
        PolicyState st = policy_init(e, rng);
        for (int i = 0; i < 7; ++i) observe(st, p0, 1);
        for (int i = 0; i < 4; ++i) observe(st, p0, 0);
        const double lbar = (st.cum_loglik[1] - st.cum_loglik[0]) / st.t_obs;
        REQUIRE(lbar > -e.thresholds().eta0);
        REQUIRE(lbar <= e.thresholds().eta1);
        CHECK(choose_price(st, 12) == px);
    }
}

TEST_CASE("elrt plays the most likely model and breaks ties uniformly") {
    PolicyKnowledge k;
    k.mode = KnowledgeMode::matrix_only;
    k.optimal_prices = {1.0, 2.0, 3.0};
    k.prob_matrix = {{0.9, 0.1, 0.5}, {0.8, 0.2, 0.5}, {0.7, 0.3, 0.1}};
    PolicySpec spec;
    spec.kind = PolicyKind::elrt;
    PolicyEngine e(spec, k);

    {  // singleton argmax: deterministic choice, repeated calls agree
        Rng rng(21);
        PolicyState st = policy_init(e, rng);
        observe(st, 1.0, 1);  // log 0.9 > log 0.8 > log 0.7
        for (int rep = 0; rep < 20; ++rep) CHECK(choose_price(st, 2) == 1.0);
    }
    {  // models 0 and 1 agree at arm 2: observing there ties them exactly
        Rng rng(22);
        PolicyState st = policy_init(e, rng);
        observe(st, 3.0, 1);
        REQUIRE(st.cum_loglik[0] == st.cum_loglik[1]);
        REQUIRE(st.cum_loglik[2] < st.cum_loglik[0]);
        int c0 = 0, c1 = 0;
        for (int rep = 0; rep < 100; ++rep) {
            const double p = choose_price(st, 2);
            REQUIRE(p != 3.0);
            (p == 1.0 ? c0 : c1)++;
        }
        CHECK(c0 >= 20);
        CHECK(c1 >= 20);
    }
}

TEST_CASE("exlrt exploits the leader or explores its top pair") {
    const Scenario s = three_linear();
    PolicySpec spec;
    spec.kind = PolicyKind::exlrt;
    PolicyEngine e(spec, PolicyKnowledge::full_curves(s));
    Rng rng(31);

    {  // clear leader, huge margin: play its arm
        PolicyState st = policy_init(e, rng);
        st.cum_loglik = {5.0, 0.0, -1.0};
        st.t_obs = 10;
        CHECK(choose_price(st, 11) == e.arm_prices()[0]);
    }
    {  // leader barely ahead: margin under every threshold, explore the pair
        PolicyState st = policy_init(e, rng);
        st.cum_loglik = {0.01, 0.0, -1.0};
        st.t_obs = 100;
        REQUIRE(0.01 / 100.0 < e.thresholds().eta_pair[0][1]);
        CHECK(choose_price(st, 101) == e.exploration_price_for(0, 1));
    }
    {  // runner-up tie decides between exploit and explore: both must occur
        // (eta(0,2) is tiny because the middle curve hugs model 0 at its arm,
        //  eta(0,1) is ~30x larger; an average of 0.01 sits between them)
        REQUIRE(e.thresholds().eta_pair[0][2] < 0.01);
        REQUIRE(0.01 < e.thresholds().eta_pair[0][1]);
        PolicyState st = policy_init(e, rng);
        st.cum_loglik = {0.01, 0.0, 0.0};
        st.t_obs = 1;
        int exploit = 0, explore = 0;
        for (int rep = 0; rep < 100; ++rep) {
            const double p = choose_price(st, 2);
            if (p == e.arm_prices()[0]) ++exploit;       // d2 = 2 drawn
            else if (p == e.exploration_price_for(0, 1)) ++explore;  // d2 = 1
        }
        CHECK(exploit + explore == 100);
        CHECK(exploit >= 20);
        CHECK(explore >= 20);
    }
}

TEST_CASE("myopic Bayes prices the posterior-weighted revenue curve") {
    const Scenario s = case1();
    PolicySpec mbp;
    mbp.kind = PolicyKind::mbp;
    PolicyEngine e(mbp, PolicyKnowledge::full_curves(s));
    Rng rng(41);
    PolicyState st = policy_init(e, rng);
    CHECK(st.q == 0.5);

    // At q = 1/2 the blended curve is p (1.1 - 0.6 p), vertex 11/12. The two
    // bracketing grid points are 0.9165 and 0.91675; the latter is closer.
    const double expected = 0.5 + 1.0 * 1667.0 / 4000.0;
    CHECK(choose_price(st, 1) == expected);

    // Certainty pins the price to the corresponding arm's grid neighborhood.
    st.q = 1.0;
    const double p_sure1 = choose_price(st, 1);
    CHECK(p_sure1 == doctest::Approx(4.0 / 3.0).epsilon(2e-4));
    st.q = 0.0;
    const double p_sure0 = choose_price(st, 1);
    CHECK(p_sure0 == doctest::Approx(7.0 / 9.0).epsilon(2e-4));
}

TEST_CASE("constrained myopic Bayes skips prices inside the delta margin") {
    const Scenario s = case1();
    PolicySpec cmbp;
    cmbp.kind = PolicyKind::cmbp;  // delta = 0.05
    PolicyEngine e(cmbp, PolicyKnowledge::full_curves(s));
    Rng rng(42);
    PolicyState st = policy_init(e, rng);
    // The unconstrained maximizer 0.91675 has |rho0 - rho1| = 0.04995 < delta;
    // its left neighbor 0.9165 (gap 0.0501) is the best admissible price.
    const double expected = 0.5 + 1.0 * 1666.0 / 4000.0;
    CHECK(choose_price(st, 1) == expected);

    // An infeasible margin is rejected at construction: these curves never
    // differ by more than 0.6 anywhere on [0.5, 1.5].
    PolicySpec hopeless = cmbp;
    hopeless.delta = 0.7;
    expect_throw_containing(
        [&] { PolicyEngine(hopeless, PolicyKnowledge::full_curves(s)); },
        "no grid price separates the models");
}

TEST_CASE("belief updates follow Bayes rule and skip uninformative prices") {
    const Scenario s = case1();
    PolicySpec mbp;
    mbp.kind = PolicyKind::mbp;
    mbp.q0 = 0.3;
    PolicyEngine e(mbp, PolicyKnowledge::full_curves(s));
    Rng rng(43);
    PolicyState st = policy_init(e, rng);
    CHECK(st.q == 0.3);

    const double rho0 = eval(s.models[0], 0.5), rho1 = eval(s.models[1], 0.5);
    const double expect_up = 0.3 * rho1 / (0.3 * rho1 + 0.7 * rho0);
    observe(st, 0.5, 1);
    CHECK(st.q == doctest::Approx(expect_up).epsilon(1e-15));
    const double q_before = st.q;
    const double expect_down =
        q_before * (1 - rho1) / (q_before * (1 - rho1) + (1 - q_before) * (1 - rho0));
    observe(st, 0.5, 0);
    CHECK(st.q == doctest::Approx(expect_down).epsilon(1e-15));

    // Curves crossing exactly at p = 1 (dyadic coefficients, so the evals are
    // bit-identical): the posterior must not move at all.
    const Scenario cross = make_scenario(
        {DemandModel::linear(1.25, -0.75), DemandModel::linear(0.75, -0.25)}, {0.5, 1.5});
    REQUIRE(eval(cross.models[0], 1.0) == eval(cross.models[1], 1.0));
    PolicyEngine ec(mbp, PolicyKnowledge::full_curves(cross));
    PolicyState stc = policy_init(ec, rng);
    observe(stc, 0.5, 1);
    const double frozen = stc.q;
    observe(stc, 1.0, 1);
    CHECK(stc.q == frozen);
    observe(stc, 1.0, 0);
    CHECK(stc.q == frozen);
    CHECK(stc.t_obs == 3);  // the step still counts
}

TEST_CASE("observe validates its inputs") {
    const Scenario s = case1();
    PolicySpec spec;  // lrt
    PolicyEngine e(spec, PolicyKnowledge::matrix_only(s));
    Rng rng(51);
    PolicyState st = policy_init(e, rng);
    CHECK_THROWS_AS(observe(st, e.arm_prices()[0], 2), std::invalid_argument);
    CHECK_THROWS_AS(observe(st, e.arm_prices()[0], -1), std::invalid_argument);
    expect_throw_containing([&] { observe(st, 0.777, 1); }, "unknown price");
    CHECK(st.t_obs == 0);  // nothing was folded in
}

TEST_CASE("matrix-only and full-curve lrt engines agree step for step") {
    const Scenario s = case1();
    PolicySpec spec;  // lrt
    PolicyEngine em(spec, PolicyKnowledge::matrix_only(s));
    PolicyEngine ef(spec, PolicyKnowledge::full_curves(s));
    REQUIRE(em.arm_prices()[0] == ef.arm_prices()[0]);
    REQUIRE(em.arm_prices()[1] == ef.arm_prices()[1]);
    Rng rm(1234), rf(1234), env(99);
    PolicyState sm = policy_init(em, rm);
    PolicyState sf = policy_init(ef, rf);
    for (int t = 1; t <= 200; ++t) {
        const double pm = choose_price(sm, t);
        const double pf = choose_price(sf, t);
        REQUIRE(pm == pf);
        const int o = env.bernoulli(0.6) ? 1 : 0;
        observe(sm, pm, o);
        observe(sf, pf, o);
        REQUIRE(sm.cum_loglik[0] == sf.cum_loglik[0]);
        REQUIRE(sm.cum_loglik[1] == sf.cum_loglik[1]);
    }
}

}  // TEST_SUITE
