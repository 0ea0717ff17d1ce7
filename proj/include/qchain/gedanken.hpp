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

/**
 * @file
 * Worked two-observer experiments. Every builder produces a Protocol on the
 * full system/probe/memory composite, and every result carries a closed-form
 * value next to the value the Feynman engine computes from that protocol.
 *
 * Two-observer composite, factor order (slowest first):
 *
 *   muW (6)  muF (3)  dW (6)  dF (3)  s (2)
 *
 * F's probe couples to s in the s^F basis (classes yes, no). W's probe
 * couples to (dF, s) in the phi basis: phi_1..phi_4 span dF in {1, 2}; a
 * fifth "idle" class covers the two states with dF at its ready level, which
 * never carry amplitude. W's readout classes on muW are blank {0, 5},
 * yes {1}, no {2} and not_sure {3, 4}.
 */

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "qchain/apparatus.hpp"

namespace qchain {

struct TwoObserverParams {
    Complex alpha{1.0 / std::sqrt(2.0), 0.0};
    Complex beta{1.0 / std::sqrt(2.0), 0.0};
    Vector s0 = basis_vector(2, 0);
    /// System evolution up to F's coupling.
    Operator u_f = hadamard();
    /// System evolution between F's and W's couplings.
    Operator u_w = identity(2);
    /// Columns are |s^F_1>, |s^F_2>.
    Operator basis_f = identity(2);
    /// Columns are |s^W_1>, |s^W_2>.
    Operator basis_w = identity(2);

    /// U_F = H, U_W = I, alpha = beta = 1/sqrt(2), computational bases.
    static TwoObserverParams hadamard_case();
    /// Haar unitaries and bases, random (alpha, beta) and s0.
    static TwoObserverParams random(std::uint64_t seed);
};

/// Throws invalid_state or invalid_observable when a parameter is off by
/// more than 1e-12.
void validate(const TwoObserverParams &params);

struct SystemAmplitudes {
    /// A_1 .. A_4
    std::array<Complex, 4> a{};
    double norm_squared() const;
};

SystemAmplitudes system_amplitudes(const TwoObserverParams &params);

enum class TwoObserverScenario {
    /// F couples only; W couples, registers and perceives.
    a,
    /// F and W both couple, register and perceive.
    b,
    /// F couples and registers but never perceives.
    c,
};

/// Columns phi_1..phi_4 followed by the two idle states, on (dF, s).
Operator phi_basis(const TwoObserverParams &params);

/// The full-composite protocol. When `fine_grained` is set, W's readout
/// gives phi_3 and phi_4 separate classes (labels phi3, phi4).
Protocol two_observer_protocol(const TwoObserverParams &params, TwoObserverScenario scenario,
                               bool fine_grained = false);

struct GedankenEntry {
    /// Outcome labels in time order.
    std::vector<std::string> outcome;
    double closed_form = 0.0;
    double engine = 0.0;
    double difference() const { return std::abs(closed_form - engine); }
};

struct GedankenResult {
    std::string name;
    std::vector<GedankenEntry> entries;

    double max_difference() const;
    /// Throws unknown_label.
    const GedankenEntry &at(const std::vector<std::string> &outcome) const;
};

/// W's yes/no/not_sure probabilities.
GedankenResult scenario_a(const TwoObserverParams &params);
/// Joint (F, W) distribution over {yes, no} x {yes, no, not_sure}.
GedankenResult scenario_b(const TwoObserverParams &params);
/// W's yes/no/not_sure probabilities with F's record in place.
GedankenResult scenario_c(const TwoObserverParams &params);

/// Closed-form scenario A values: yes, no, not_sure.
std::array<double, 3> scenario_a_closed_form(const SystemAmplitudes &amps, Complex alpha, Complex beta);
/// 2 Re[conj(alpha) beta A_1 conj(A_4)]
double interference_term(const SystemAmplitudes &amps, Complex alpha, Complex beta);

/// Composite (muF 3, d 3, s 2). s_1, s_2 are the computational states.
Protocol wigner_friend_protocol(const Operator &u_s, const Operator &u_ds, const Vector &s0);

/// Joint distribution of F's answers at t_1 and t_2 over {yes, no}^2.
/// `u_ds` acts on span{d_1, d_2} (x) s, ordered (d, s).
GedankenResult wigner_friend(const Operator &u_s, const Operator &u_ds, const Vector &s0 = basis_vector(2, 0));

/**
 * Composite (muW, muF, [muD,] dW, dF, d, s), all 3-dim except s. The system
 * evolves by U, probe D couples to s, optionally a memory records D, F
 * checks whether the coupling happened, the coupling and U are undone and W
 * asks whether (d, s) is back in |d_0 s_0> with s_0 = |0>.
 */
Protocol interference_protocol(const Operator &u, bool register_memory);

/// Single entry "back": the probability that W finds |d_0 s_0>.
GedankenResult interference_experiment(const Operator &u, bool register_memory);

struct ReducedResult {
    /// Indexed [i][j] for s^F_i, s^W_j.
    std::array<std::array<double, 2>, 2> closed_form{};
    /// From a two-measurement chain on the system alone.
    std::array<std::array<double, 2>, 2> reduced{};
    /// From the full composite of each scenario (fine-grained W readout).
    std::array<std::array<std::array<double, 2>, 2>, 3> composite{};

    double max_difference() const;
};

/// Requires alpha = 1 (within 1e-12); throws invalid_state otherwise.
ReducedResult reduced_path_probabilities(const TwoObserverParams &params);

/// System-only chain: U_F, measure s^F, U_W, measure s^W.
Protocol reduced_protocol(const TwoObserverParams &params);

} // namespace qchain
