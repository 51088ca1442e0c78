#include <catch2/catch_amalgamated.hpp>

#include "indefsl/presets.hpp"
#include "indefsl/theorems.hpp"

using namespace indefsl;

TEST_CASE("count estimate holds on the solvable wells", "[theorems]") {
    const IndefiniteProblem k2 = build_problem(presets::sech2_doc(2));
    WeylSolver s2(k2);
    const TheoremReport r2 = verify_count_estimate(s2, 3.0, 9.0);
    CHECK(r2.verdict == Verdict::holds);
    CHECK(r2.measured["n_A"].get<long>() == 2);
    CHECK(r2.measured["n_JA_total"].get<long>() == 2);
    CHECK(r2.measured["discrepancy"].get<long>() == 0);

    const IndefiniteProblem cq = build_problem(presets::constant_doc(1.0));
    WeylSolver sc(cq);
    const TheoremReport rc = verify_count_estimate(sc, 0.0, 1.0);
    CHECK(rc.verdict == Verdict::holds);
    CHECK(rc.measured["n_A"].get<long>() == 0);
}

TEST_CASE("rank-one perturbation bound holds", "[theorems]") {
    const IndefiniteProblem k2 = build_problem(presets::sech2_doc(2));
    WeylSolver solver(k2);
    const TheoremReport rep = verify_rank_one_perturbation(solver, 3.0, 9.0);
    CHECK(rep.verdict == Verdict::holds);
    CHECK(rep.measured["n_Bplus"].get<long>() == 1);
    CHECK(rep.measured["n_Bminus"].get<long>() == 1);
    CHECK(rep.measured["discrepancy"].get<long>() <= 1);
}

TEST_CASE("symmetric halving matches the solvable counts", "[theorems]") {
    {
        const IndefiniteProblem k2 = build_problem(presets::sech2_doc(2));
        WeylSolver solver(k2);
        const TheoremReport rep = verify_symmetric_halving(solver, 3.0, 9.0);
        CHECK(rep.verdict == Verdict::holds);
        CHECK(rep.measured["n_A"].get<long>() == 2);
        CHECK(rep.measured["n_JA_positive"].get<long>() == 1);
    }
    {
        const IndefiniteProblem k3 = build_problem(presets::sech2_doc(3));
        WeylSolver solver(k3);
        const TheoremReport rep = verify_symmetric_halving(solver, 4.0, 16.0);
        CHECK(rep.verdict == Verdict::holds);
        const long np = rep.measured["n_JA_positive"].get<long>();
        CHECK((np == 1 || np == 2));
    }
    {
        const IndefiniteProblem k4 = build_problem(presets::sech2_doc(4));
        WeylSolver solver(k4);
        const TheoremReport rep = verify_symmetric_halving(solver, 5.0, 25.0);
        CHECK(rep.verdict == Verdict::holds);
        CHECK(rep.measured["n_A"].get<long>() == 4);
        CHECK(rep.measured["n_JA_positive"].get<long>() == 2);
        CHECK(rep.measured["n_JA_negative"].get<long>() == 2);
    }
}

TEST_CASE("halving is inconclusive off the symmetric preconditions", "[theorems]") {
    json doc = presets::constant_doc(3.0);
    doc["q"] = {{"expr", "3 - 2*exp(-(x-0.7)^2)"}};
    doc["symmetric"] = false;
    const IndefiniteProblem prob = build_problem(doc);
    WeylSolver solver(prob);
    CHECK(verify_symmetric_halving(solver, 0.0, 2.9).verdict == Verdict::inconclusive);
}

TEST_CASE("interlacing with the definite spectrum", "[theorems]") {
    {
        const IndefiniteProblem k2 = build_problem(presets::sech2_doc(2));
        WeylSolver solver(k2);
        const TheoremReport rep = verify_interlacing_with_A(solver, 3.0, 9.0);
        CHECK(rep.verdict == Verdict::holds);
        CHECK(rep.measured["alternative_i"].get<bool>());
    }
    {
        const IndefiniteProblem k4 = build_problem(presets::sech2_doc(4));
        WeylSolver solver(k4);
        const TheoremReport rep = verify_interlacing_with_A(solver, 5.0, 25.0);
        CHECK(rep.verdict == Verdict::holds);
        CHECK(rep.measured["alternative_i"].get<bool>());
    }
    {
        const IndefiniteProblem cq = build_problem(presets::constant_doc(1.0));
        WeylSolver solver(cq);
        const TheoremReport rep = verify_interlacing_with_A(solver, 0.0, 1.0);
        CHECK(rep.verdict == Verdict::holds);  // vacuous
    }
}

TEST_CASE("accumulation dichotomy at the tail edge", "[theorems]") {
    {
        const IndefiniteProblem sup = build_problem(presets::kneser_supercritical_doc());
        WeylSolver solver(sup);
        const TheoremReport rep = verify_accumulation(solver, 0.0, 1.0, 20);
        CHECK(rep.verdict == Verdict::holds);
        CHECK(rep.measured["n_A_lower_bound"].get<long>() >= 20);
    }
    {
        const IndefiniteProblem sub = build_problem(presets::kneser_subcritical_doc());
        WeylSolver solver(sub);
        const TheoremReport rep = verify_accumulation(solver, 0.0, 1.0, 20);
        CHECK(rep.verdict == Verdict::holds);
        CHECK(rep.measured["stable_Bplus"].get<bool>());
    }
    {
        const IndefiniteProblem cq = build_problem(presets::constant_doc(1.0));
        WeylSolver solver(cq);
        const TheoremReport rep = verify_accumulation(solver, 0.0, 1.0, 20);
        CHECK(rep.verdict == Verdict::holds);
        CHECK(rep.measured["n_A"].get<long>() == 0);
    }
}

TEST_CASE("gap check on the solvable well", "[theorems]") {
    const IndefiniteProblem k2 = build_problem(presets::sech2_doc(2));
    WeylSolver solver(k2);
    const TheoremReport rep = verify_gap(solver);
    CHECK(rep.verdict == Verdict::holds);
    CHECK(rep.measured["lambda1_case"].get<std::string>() == "zero_of_m_difference");
}

TEST_CASE("seeded suite cases replay deterministically", "[theorems]") {
    const auto suite_a = presets::seeded_suite(4);
    const auto suite_b = presets::seeded_suite(4);
    REQUIRE(suite_a.size() == 4);
    for (std::size_t i = 0; i < suite_a.size(); ++i)
        CHECK(suite_a[i].doc.dump() == suite_b[i].doc.dump());

    // a smoke pass over the first cases; the full 20-case sweep runs in the
    // acceptance suite
    for (int i = 0; i < 2; ++i) {
        const auto& sc = suite_a[static_cast<std::size_t>(i)];
        const IndefiniteProblem prob = build_problem(sc.doc);
        WeylSolver solver(prob);
        const double b = sc.gap_hi - 0.15;
        const TheoremReport t1 = verify_count_estimate(solver, 0.0, b);
        const TheoremReport t2 = verify_rank_one_perturbation(solver, 0.0, b);
        CHECK(t1.verdict == Verdict::holds);
        CHECK(t2.verdict == Verdict::holds);
    }
}
