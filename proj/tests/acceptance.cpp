// Copyright 2026 The qchain Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>

#include "qchain/evolution.hpp"
#include "qchain/feynman.hpp"
#include "qchain/gedanken.hpp"
#include "qchain/histories.hpp"
#include "support/documents.hpp"
#include "support/random_chain.hpp"

using namespace qchain;

namespace {

int failures = 0;

void report(const char *id, bool ok, const std::string &detail) {
    std::printf("%s %s %s\n", ok ? "PASS" : "FAIL", id, detail.c_str());
    std::fflush(stdout);
    failures += ok ? 0 : 1;
}

std::string secs(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f s", x);
    return buf;
}

std::string sci(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2e", x);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double yes_w(const GedankenResult &r, bool closed) {
    double p = 0.0;
    for (const auto &e : r.entries) {
        if (e.outcome.back() == "yes") {
            p += closed ? e.closed_form : e.engine;
        }
    }
    return p;
}

double total(const Distribution &d) {
    double s = 0.0;
    for (const auto &[k, p] : d) {
        s += p;
    }
    return s;
}

void ac1_ac2() {
    std::vector<MeasurementChain> chains;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        chains.push_back(testing_support::random_chain(1000 + seed));
    }
    std::vector<Distribution> feynman;
    double worst_norm = 0.0;
    auto t0 = std::chrono::steady_clock::now();
    for (const auto &c : chains) {
        feynman.push_back(chain_distribution(c));
        worst_norm = std::max(worst_norm, std::abs(total(feynman.back()) - 1.0));
    }
    const double t_norm = seconds_since(t0);
    report("AC1", worst_norm < 1e-9 && t_norm < 10.0,
           "normalization over 200 random chains: max |sum - 1| = " + sci(worst_norm) + ", " + secs(t_norm));

    double worst_diff = 0.0;
    double worst_oracle = 0.0;
    t0 = std::chrono::steady_clock::now();
    for (std::size_t k = 0; k < chains.size(); ++k) {
        worst_diff = std::max(worst_diff, max_abs_difference(feynman[k], evolution_distribution(chains[k])));
    }
    const double t_eq = seconds_since(t0) + t_norm;
    for (std::size_t k = 0; k < chains.size(); ++k) {
        worst_oracle = std::max(worst_oracle,
                                max_abs_difference(feynman[k], testing_support::oracle_distribution(chains[k])));
    }
    report("AC2", worst_diff < 1e-9 && worst_oracle < 1e-9 && t_eq < 20.0,
           "engine equivalence: max |feynman - evolution| = " + sci(worst_diff) + ", vs reference " +
               sci(worst_oracle) + ", " + secs(t_eq));
}

void ac3() {
    double same_bc = 0.0;
    double interference = 0.0;
    double a_sum = 0.0;
    double composite = 0.0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const TwoObserverParams p = TwoObserverParams::random(2000 + seed);
        const SystemAmplitudes amps = system_amplitudes(p);
        const GedankenResult a = scenario_a(p);
        const GedankenResult b = scenario_b(p);
        const GedankenResult c = scenario_c(p);
        same_bc = std::max(same_bc, std::abs(yes_w(b, false) - yes_w(c, false)));
        const Complex cross = std::conj(p.alpha) * p.beta * amps.a[0] * std::conj(amps.a[3]);
        interference = std::max(interference, std::abs(yes_w(a, false) - yes_w(b, false) - 2.0 * cross.real()));
        double s = 0.0;
        for (const auto &e : a.entries) {
            s += e.engine;
        }
        a_sum = std::max(a_sum, std::abs(s - 1.0));
        composite = std::max({composite, a.max_difference(), b.max_difference(), c.max_difference()});
    }
    report("AC3",
           same_bc < 1e-12 && interference < 1e-12 && a_sum < 1e-12 && composite < 1e-10,
           "two-observer identities over 50 parameter sets: |P2 - P3| = " + sci(same_bc) +
               ", interference residual " + sci(interference) + ", |sum A - 1| = " + sci(a_sum) +
               ", closed form vs composite " + sci(composite));
}

double report_value(const Report &r, const std::vector<std::string> &suffix, std::size_t column) {
    // sum of rows whose outcome ends with `suffix`
    double p = 0.0;
    for (const auto &row : r.rows) {
        if (row.outcome.size() >= suffix.size() &&
            std::equal(suffix.begin(), suffix.end(), row.outcome.end() - static_cast<long>(suffix.size()))) {
            p += row.values[column];
        }
    }
    return p;
}

void ac4() {
    double worst = 0.0;
    std::string values;
    for (const auto &[name, want] : {std::pair{"scenario-a", 1.0}, {"scenario-b", 0.5}, {"scenario-c", 0.5}}) {
        const Report r = run(builtin_document(name));
        // feynman and evolution columns on the full composite
        for (std::size_t col = 0; col < 2; ++col) {
            worst = std::max(worst, std::abs(report_value(r, {"yes"}, col) - want));
        }
        values += std::string(values.empty() ? "" : ", ") + name + " " + sci(report_value(r, {"yes"}, 0));
    }
    report("AC4", worst < 1e-12, "Hadamard values of P(yes^W): " + values + "; max deviation " + sci(worst));
}

void ac5() {
    double cross = 0.0;
    double diag = 0.0;
    double invariance = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Operator us = haar_random_unitary(2, 3000 + seed);
        const Vector s0 = haar_random_state(2, 3100 + seed);
        const Vector evolved = us * s0;
        const GedankenResult base = wigner_friend(us, identity(4), s0);
        const GedankenResult r = wigner_friend(us, haar_random_unitary(4, 3200 + seed), s0);
        cross = std::max({cross, r.at({"yes", "no"}).engine, r.at({"no", "yes"}).engine});
        diag = std::max({diag, std::abs(r.at({"yes", "yes"}).engine - std::norm(evolved(0))),
                         std::abs(r.at({"no", "no"}).engine - std::norm(evolved(1)))});
        for (std::size_t k = 0; k < r.entries.size(); ++k) {
            invariance = std::max(invariance, std::abs(r.entries[k].engine - base.entries[k].engine));
        }
    }
    report("AC5", cross < 1e-12 && diag < 1e-12 && invariance < 1e-12,
           "Wigner's friend over 20 post-measurement unitaries: cross terms " + sci(cross) + ", diagonal error " +
               sci(diag) + ", variation " + sci(invariance));
}

void ac6() {
    double free_err = 0.0;
    double reg_err = 0.0;
    double diff_err = 0.0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const Operator u = haar_random_unitary(2, 4000 + seed);
        const double p0 = std::norm(u(0, 0));
        const double p1 = std::norm(u(1, 0));
        const double free = interference_experiment(u, false).at({"back"}).engine;
        const double reg = interference_experiment(u, true).at({"back"}).engine;
        free_err = std::max(free_err, std::abs(free - 1.0));
        reg_err = std::max(reg_err, std::abs(reg - (p0 * p0 + p1 * p1)));
        diff_err = std::max(diff_err, std::abs(free - reg - 2.0 * p0 * p1));
    }
    report("AC6", free_err < 1e-12 && reg_err < 1e-12 && diff_err < 1e-12,
           "interference reversal over 50 unitaries: unregistered " + sci(free_err) + ", registered " +
               sci(reg_err) + ", difference " + sci(diff_err));
}

void ac7() {
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        TwoObserverParams p = TwoObserverParams::random(5000 + seed);
        p.alpha = 1.0;
        p.beta = 0.0;
        const ReducedResult r = reduced_path_probabilities(p);
        for (std::size_t i = 0; i < 2; ++i) {
            for (std::size_t j = 0; j < 2; ++j) {
                worst = std::max(worst, std::abs(r.reduced[i][j] - r.closed_form[i][j]));
                for (const auto &full : r.composite) {
                    worst = std::max(worst, std::abs(r.reduced[i][j] - full[i][j]));
                }
            }
        }
    }
    report("AC7", worst < 1e-12, "reduction over 20 parameter sets: max |reduced - composite| = " + sci(worst));
}

// Two probes, N = 2: couple d1 after U1, d2 after U2, then U3 and a final
// system readout. Perceiving (d1, d2, s) jointly at the end must reproduce
// the system-only chain.
double tagging_case(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const CompositeSpace space({{"d1", 3, Role::probe}, {"d2", 3, Role::probe}, {"s", 2, Role::system}});
    const Vector s0 = haar_random_state(2, rng());
    const Operator u1 = haar_random_unitary(2, rng());
    const Operator u2 = haar_random_unitary(2, rng());
    const Operator u3 = haar_random_unitary(2, rng());
    const Observable p1(haar_random_unitary(2, rng()), {0, 1}, {{"a", 0.0}, {"b", 1.0}});
    const Observable p2(haar_random_unitary(2, rng()), {0, 1}, {{"a", 0.0}, {"b", 1.0}});
    const Observable last = Observable::nondegenerate(haar_random_unitary(2, rng()));
    const std::vector<Event> events{{1.0, 0, UnitaryStep{{"s"}, u1}},
                                    {1.0, 1, CoupleStep{{"d1", {"s"}, p1, 1.0}}},
                                    {2.0, 0, UnitaryStep{{"s"}, u2}},
                                    {2.0, 1, CoupleStep{{"d2", {"s"}, p2, 2.0}}},
                                    {3.0, 0, UnitaryStep{{"s"}, u3}}};
    const Vector out = tagged_final_state(space, space.product_state({{"s", s0}}), events);
    std::vector<std::size_t> assignment(18);
    for (std::size_t a = 0; a < 3; ++a) {
        for (std::size_t b = 0; b < 3; ++b) {
            for (std::size_t n = 0; n < 2; ++n) {
                assignment[a * 6 + b * 2 + n] = (a == 0 || b == 0) ? 8 : (a - 1) * 4 + (b - 1) * 2 + n;
            }
        }
    }
    std::vector<EigenClass> classes;
    for (std::size_t c = 0; c <= 8; ++c) {
        classes.push_back({"c" + std::to_string(c), static_cast<double>(c)});
    }
    const Observable joint(tensor_product(identity(9), last.basis()), assignment, classes);
    const std::vector<std::string> factors{"d1", "d2", "s"};
    const Distribution perceived = perceive_distribution(space, out, joint, factors);
    const Distribution chain =
        chain_distribution(make_chain(InitialState::pure(s0), {u1, u2, u3}, {p1, p2, last}));
    double worst = perceived.at(OutcomeSequence{{8}});
    for (const auto &[s, p] : chain) {
        worst = std::max(worst, std::abs(perceived.at(OutcomeSequence{{s[0] * 4 + s[1] * 2 + s[2]}}) - p));
    }
    return worst;
}

void ac8() {
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        worst = std::max(worst, tagging_case(6000 + seed));
    }
    report("AC8", worst < 1e-9, "tagging over 50 seeds: max |perceived - chain| = " + sci(worst));
}

void ac9() {
    const Vector plus = hadamard() * basis_vector(2, 0);
    const HistoryFamily bare =
        make_family(plus, {identity(2), identity(2)},
                    {Observable::computational(2, {0, 1}, {{"0", 0.0}, {"1", 1.0}}), Observable::nondegenerate(hadamard())});
    const DecoherenceMatrix d = decoherence_matrix(bare);
    const ConsistencyVerdict v = consistency_check(d);
    const bool bare_ok = std::abs(v.max_off_diagonal - 0.25) < 1e-12 && !v.consistent;

    const AugmentedFamily aug = augment_with_observers(bare, default_witnesses(bare.length()));
    const DecoherenceMatrix da = decoherence_matrix(aug.family);
    const ConsistencyVerdict va = consistency_check(da, 1e-10);
    const double diag =
        max_abs_difference(history_probabilities(da), chain_distribution(chain_from_family(aug.family)));

    const std::vector<Witness> probe{Witness::probe, Witness::none};
    const AugmentedFamily witnessed = augment_with_observers(bare, probe);
    const double marginal = marginal_check(chain_distribution(chain_from_family(witnessed.family)),
                                           final_only_distribution(witnessed.family));
    report("AC9", bare_ok && va.consistent && diag < 1e-9 && marginal < 1e-10,
           "histories: bare off-diagonal " + sci(v.max_off_diagonal) + (v.consistent ? " consistent" : " inconsistent") +
               ", augmented off-diagonal " + sci(va.max_off_diagonal) + ", diagonal vs feynman " + sci(diag) +
               ", probe-witnessed marginal " + sci(marginal));
}

std::string slurp(const std::filesystem::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void ac10() {
    std::set<ErrorCode> covered;
    std::size_t wrong = 0;
    for (const auto &c : testing_support::error_cases()) {
        const auto code = testing_support::thrown_code(c.trigger);
        if (code && *code == c.code) {
            covered.insert(*code);
        } else {
            ++wrong;
        }
    }
    std::size_t files = 0;
    std::size_t mismatched = 0;
    for (const auto &e : std::filesystem::directory_iterator(QCHAIN_SOURCE_DIR "/corpus")) {
        if (e.path().extension() != ".json") {
            continue;
        }
        ++files;
        const std::string text = slurp(e.path());
        try {
            mismatched += serialize_scenario(parse_scenario(text)) == text ? 0 : 1;
        } catch (const Error &) {
            ++mismatched;
        }
    }
    auto doc = testing_support::base_document();
    doc["events"][0]["matrix"] = testing_support::json::parse("[[1, 0], [0, 0]]");
    bool deviation_reported = false;
    try {
        parse_scenario(doc.dump());
    } catch (const Error &e) {
        deviation_reported = e.code() == ErrorCode::non_unitary &&
                             e.message().find("max deviation 1") != std::string::npos;
    }
    report("AC10", covered.size() == kAllErrorCodes.size() && wrong == 0 && files > 0 && mismatched == 0 &&
                       deviation_reported,
           "parser: " + std::to_string(covered.size()) + "/" + std::to_string(kAllErrorCodes.size()) +
               " error codes, " + std::to_string(files - mismatched) + "/" + std::to_string(files) +
               " corpus files round-trip, non-unitary deviation " + (deviation_reported ? "reported" : "missing"));
}

} // namespace

int main() {
    const std::function<void()> criteria[] = {ac1_ac2, ac3, ac4, ac5, ac6, ac7, ac8, ac9, ac10};
    for (const auto &c : criteria) {
        try {
            c();
        } catch (const std::exception &e) {
            report("AC?", false, std::string("unexpected error: ") + e.what());
        }
    }
    std::printf("%d failed\n", failures);
    return failures == 0 ? 0 : 1;
}
