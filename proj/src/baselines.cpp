// SPDX-License-Identifier: Apache-2.0
#include "risne/baselines.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace risne {

namespace {

std::size_t total_elements(const ChannelSet& cs)
{
    return cs.ris_count() * cs.n_ris();
}

// Splits a flat symbol string into one binary PhaseConfig per RIS.
std::vector<PhaseConfig> split_phases(const std::vector<int>& bits, std::size_t ris_count, std::size_t n_ris)
{
    std::vector<PhaseConfig> phases(ris_count);
    for (std::size_t k = 0; k < ris_count; ++k) {
        phases[k].values.assign(bits.begin() + static_cast<std::ptrdiff_t>(k * n_ris),
                                bits.begin() + static_cast<std::ptrdiff_t>((k + 1) * n_ris));
    }
    return phases;
}

double score(const ElementTerms& terms, const std::vector<int>& bits, std::vector<Complex>& scratch)
{
    scratch.resize(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) {
        scratch[i] = phase_to_coefficient(bits[i]);
    }
    return terms.gamma(scratch);
}

struct Candidate {
    std::vector<int> bits;
    double gamma = 0.0;
};

void check_inputs(const ChannelSet& cs, const Codebook& codebook, const char* who)
{
    if (cs.ris_count() == 0 || cs.n_ris() == 0) {
        throw InputError(std::string(who) + ": channel set has no RIS elements");
    }
    if (codebook.size() == 0 || codebook.dimension() != cs.n_tx()) {
        throw InputError(std::string(who) + ": codebook dimension " + std::to_string(codebook.dimension()) +
                         " does not match N_TX " + std::to_string(cs.n_tx()));
    }
}

} // namespace

void LgaParams::validate() const
{
    if (individuals < 2) {
        throw ConfigError("lga.individuals: must be at least 2, got " + std::to_string(individuals));
    }
    if (elitism >= individuals) {
        throw ConfigError("lga.elitism: must be smaller than lga.individuals");
    }
    if (p_mut && !(*p_mut >= 0.0 && *p_mut <= 1.0)) {
        throw ConfigError("lga.p_mut: must lie in [0, 1]");
    }
    if (initial_population.size() > individuals) {
        throw ConfigError("lga.initial_population: more rows than individuals");
    }
}

BaselineChoice lga_solve(const ChannelSet& cs, const LinkBudget& budget, const Codebook& codebook,
                         const LgaParams& params, Rng& rng)
{
    params.validate();
    check_inputs(cs, codebook, "lga_solve");
    const std::size_t n = total_elements(cs);
    const double p_mut = params.p_mut.value_or(1.0 / static_cast<double>(n));
    const std::size_t l = params.individuals;
    for (const auto& row : params.initial_population) {
        if (row.size() != n || std::any_of(row.begin(), row.end(), [](int s) { return s != -1 && s != 1; })) {
            throw InputError("lga_solve: initial population rows must be " + std::to_string(n) + " symbols in {-1, +1}");
        }
    }

    // Rank weights: best individual gets weight l, worst gets 1.
    std::vector<double> rank_cdf(l);
    const double rank_total = static_cast<double>(l * (l + 1) / 2);
    double acc = 0.0;
    for (std::size_t r = 0; r < l; ++r) {
        acc += static_cast<double>(l - r) / rank_total;
        rank_cdf[r] = acc;
    }
    auto pick_parent = [&](Rng& r) {
        const double u = r.uniform();
        const auto it = std::upper_bound(rank_cdf.begin(), rank_cdf.end(), u);
        return std::min(static_cast<std::size_t>(it - rank_cdf.begin()), l - 1);
    };

    const std::uint64_t base = rng.next_u64();
    BaselineChoice best;
    bool have_best = false;
    std::vector<Complex> scratch;

    for (std::size_t vi = 0; vi < codebook.size(); ++vi) {
        Rng local(derive_seed(base, {vi}));
        const ElementTerms terms(cs, codebook.vector(vi), budget);

        std::vector<Candidate> pop(l);
        for (std::size_t i = 0; i < l; ++i) {
            if (i < params.initial_population.size()) {
                pop[i].bits = params.initial_population[i];
            } else {
                pop[i].bits.resize(n);
                for (int& b : pop[i].bits) {
                    b = local.bernoulli(0.5) ? 1 : -1;
                }
            }
            pop[i].gamma = score(terms, pop[i].bits, scratch);
        }
        best.evaluations += l;
        auto by_fitness = [](const Candidate& a, const Candidate& b) { return a.gamma > b.gamma; };
        std::stable_sort(pop.begin(), pop.end(), by_fitness);

        for (std::size_t g = 0; g < params.generations; ++g) {
            std::vector<Candidate> next(pop.begin(), pop.begin() + static_cast<std::ptrdiff_t>(params.elitism));
            while (next.size() < l) {
                const Candidate& a = pop[pick_parent(local)];
                const Candidate& b = pop[pick_parent(local)];
                Candidate child;
                const std::size_t cut = n > 1 ? 1 + local.uniform_index(n - 1) : 0;
                child.bits.assign(a.bits.begin(), a.bits.begin() + static_cast<std::ptrdiff_t>(cut));
                child.bits.insert(child.bits.end(), b.bits.begin() + static_cast<std::ptrdiff_t>(cut), b.bits.end());
                for (int& bit : child.bits) {
                    if (local.bernoulli(p_mut)) {
                        bit = -bit;
                    }
                }
                child.gamma = score(terms, child.bits, scratch);
                ++best.evaluations;
                next.push_back(std::move(child));
            }
            std::stable_sort(next.begin(), next.end(), by_fitness);
            pop = std::move(next);
        }

        // With elitism >= 1 the head of the sorted population is best-so-far.
        // Without elitism we still track it here.
        if (!have_best || pop.front().gamma > best.gamma) {
            best.phases = split_phases(pop.front().bits, cs.ris_count(), cs.n_ris());
            best.precoder_index = vi;
            best.gamma = pop.front().gamma;
            have_best = true;
        }
    }
    // Report the exact snr() value of the chosen pair.
    best.gamma = snr(cs, best.phases, codebook.vector(best.precoder_index), budget);
    return best;
}

BaselineChoice exhaustive_oracle(const ChannelSet& cs, const LinkBudget& budget, const Codebook& codebook,
                                 std::uint64_t cap)
{
    check_inputs(cs, codebook, "exhaustive_oracle");
    const std::size_t n = total_elements(cs);
    if (n >= 63 || (std::uint64_t{1} << n) > cap / codebook.size()) {
        throw InputError("exhaustive_oracle: 2^" + std::to_string(n) + " x " + std::to_string(codebook.size()) +
                         " candidates exceed the cap of " + std::to_string(cap));
    }
    std::vector<ElementTerms> terms;
    terms.reserve(codebook.size());
    for (std::size_t vi = 0; vi < codebook.size(); ++vi) {
        terms.emplace_back(cs, codebook.vector(vi), budget);
    }

    const std::uint64_t count = std::uint64_t{1} << n;
    std::vector<Complex> coeff(n);
    std::uint64_t best_pattern = 0;
    std::size_t best_v = 0;
    double best_gamma = -1.0;
    for (std::uint64_t pattern = 0; pattern < count; ++pattern) {
        // Bit (n-1-i) of the pattern is element i; 0 -> symbol -1.
        for (std::size_t i = 0; i < n; ++i) {
            const bool plus = (pattern >> (n - 1 - i)) & 1U;
            coeff[i] = phase_to_coefficient(plus ? 1 : -1);
        }
        for (std::size_t vi = 0; vi < terms.size(); ++vi) {
            const double g = terms[vi].gamma(coeff);
            if (g > best_gamma) {
                best_gamma = g;
                best_pattern = pattern;
                best_v = vi;
            }
        }
    }

    std::vector<int> bits(n);
    for (std::size_t i = 0; i < n; ++i) {
        bits[i] = ((best_pattern >> (n - 1 - i)) & 1U) ? 1 : -1;
    }
    BaselineChoice result;
    result.phases = split_phases(bits, cs.ris_count(), cs.n_ris());
    result.precoder_index = best_v;
    result.gamma = snr(cs, result.phases, codebook.vector(best_v), budget);
    result.evaluations = static_cast<std::size_t>(count * codebook.size());
    return result;
}

BaselineChoice random_baseline(const ChannelSet& cs, const Codebook& codebook, Rng& rng)
{
    if (codebook.size() == 0) {
        throw InputError("random_baseline: empty codebook");
    }
    BaselineChoice result;
    result.phases.resize(cs.ris_count());
    for (auto& phase : result.phases) {
        phase.values.resize(cs.n_ris());
        for (int& s : phase.values) {
            s = rng.bernoulli(0.5) ? 1 : -1;
        }
    }
    result.precoder_index = rng.uniform_index(codebook.size());
    return result;
}

namespace {

PolicyOutput to_output(BaselineChoice choice, std::size_t codebook_size)
{
    PolicyOutput out;
    out.phases = std::move(choice.phases);
    out.precoder_index = choice.precoder_index;
    out.precoder_probs.assign(codebook_size, 0.0);
    out.precoder_probs[choice.precoder_index] = 1.0;
    return out;
}

} // namespace

PolicyOutput RandomPolicy::act(std::span<const double> genome, const ChannelSet& cs, Rng& rng, SelectMode) const
{
    check_genome(genome);
    return to_output(random_baseline(cs, codebook_, rng), codebook_.size());
}

LgaPolicy::LgaPolicy(Codebook codebook, LinkBudget budget, LgaParams params)
    : codebook_(std::move(codebook)), budget_(budget), params_(std::move(params))
{
    params_.validate();
}

PolicyOutput LgaPolicy::act(std::span<const double> genome, const ChannelSet& cs, Rng& rng, SelectMode) const
{
    check_genome(genome);
    return to_output(lga_solve(cs, budget_, codebook_, params_, rng), codebook_.size());
}

OraclePolicy::OraclePolicy(Codebook codebook, LinkBudget budget, std::uint64_t cap)
    : codebook_(std::move(codebook)), budget_(budget), cap_(cap)
{
}

PolicyOutput OraclePolicy::act(std::span<const double> genome, const ChannelSet& cs, Rng&, SelectMode) const
{
    check_genome(genome);
    return to_output(exhaustive_oracle(cs, budget_, codebook_, cap_), codebook_.size());
}

} // namespace risne
